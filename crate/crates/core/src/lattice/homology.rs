use std::collections::{HashSet, VecDeque};

use super::{LatticeError, Tiling};
use crate::f2::{self, BitVec, EchelonBasis};

/// A simple closed cycle on the tiling graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Loop {
    /// Cyclic vertex sequence; `edges[i]` joins `vertices[i]` and `vertices[i+1]`.
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
}

impl Loop {
    pub fn edge_vector(&self, num_edges: usize) -> BitVec {
        BitVec::from_indices(num_edges, self.edges.iter().copied())
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct HomologyBasis {
    pub loops: Vec<Loop>,
    /// Mod-2 intersection numbers, row `i` column `j`.
    pub intersection: Vec<BitVec>,
}

impl HomologyBasis {
    pub fn intersection_nonsingular(&self) -> bool {
        f2::det(&self.intersection)
    }
}

/// Shortest-first basis of `H1(surface; F2)` with its intersection matrix.
///
/// Candidates are the fundamental cycles of every BFS tree (Horton's set),
/// sorted by length then by sorted edge indices. A candidate is kept when it
/// is independent of the face boundaries and the loops already chosen.
pub fn homology_basis(t: &Tiling) -> Result<HomologyBasis, LatticeError> {
    let expected = 2 * t.genus()?;
    let m = t.num_edges();
    let mut span = EchelonBasis::new(m);
    for f in 0..t.num_faces() {
        span.insert(BitVec::from_indices(m, t.face_edges(f)));
    }
    let mut loops = Vec::with_capacity(expected);
    if expected > 0 {
        for cand in horton_candidates(t) {
            if span.insert(cand.edge_vector(m)) {
                loops.push(cand);
                if loops.len() == expected {
                    break;
                }
            }
        }
    }
    if loops.len() != expected {
        return Err(LatticeError::HomologyFailure { found: loops.len(), expected });
    }
    let intersection = intersection_matrix(t, &loops)?;
    Ok(HomologyBasis { loops, intersection })
}

fn horton_candidates(t: &Tiling) -> Vec<Loop> {
    let n = t.num_vertices();
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let mut out: Vec<(Vec<usize>, Loop)> = Vec::new();
    let mut parent_edge = vec![usize::MAX; n];
    let mut depth = vec![usize::MAX; n];
    let mut mark = vec![usize::MAX; n];
    for root in 0..n {
        parent_edge.fill(usize::MAX);
        depth.fill(usize::MAX);
        depth[root] = 0;
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            let mut nbrs: Vec<(usize, usize)> =
                t.vertex_edges(u).iter().map(|&e| (t.edges[e].other(u), e)).collect();
            nbrs.sort_unstable();
            for (w, e) in nbrs {
                if depth[w] == usize::MAX {
                    depth[w] = depth[u] + 1;
                    parent_edge[w] = e;
                    queue.push_back(w);
                }
            }
        }
        let up = |mut v: usize| {
            let mut verts = vec![v];
            let mut edges = Vec::new();
            while v != root {
                let e = parent_edge[v];
                edges.push(e);
                v = t.edges[e].other(v);
                verts.push(v);
            }
            (verts, edges)
        };
        for (e, edge) in t.edges.iter().enumerate() {
            if parent_edge[edge.u] == e || parent_edge[edge.v] == e {
                continue;
            }
            let (pu, eu) = up(edge.u);
            let (pv, ev) = up(edge.v);
            for &x in &pu {
                mark[x] = root;
            }
            // simple iff the two tree paths meet only at the root
            let shared = pv.iter().filter(|&&x| mark[x] == root).count();
            for &x in &pu {
                mark[x] = usize::MAX;
            }
            if shared != 1 {
                continue;
            }
            let mut key: Vec<usize> = eu.iter().chain(&ev).copied().chain([e]).collect();
            key.sort_unstable();
            if !seen.insert(key.clone()) {
                continue;
            }
            // root -> ... -> u, then v -> ... -> (before root)
            let mut vertices: Vec<usize> = pu.iter().rev().copied().collect();
            let mut edges: Vec<usize> = eu.iter().rev().copied().collect();
            edges.push(e);
            vertices.extend(pv[..pv.len() - 1].iter().copied());
            edges.extend(ev.iter().copied());
            out.push((key, Loop { vertices, edges }));
        }
    }
    out.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then_with(|| a.0.cmp(&b.0)));
    out.into_iter().map(|(_, l)| l).collect()
}

/// Mod-2 crossing counts between loops.
///
/// Each vertex is a small disc whose boundary carries, for every incident edge
/// in counter-clockwise order, three slots: before, center, after. Loop `a`
/// uses center slots. Loop `b` uses the center of edges not on `a` and is
/// pushed to the left of shared edges (left relative to the low-to-high vertex
/// direction), which keeps the two strands parallel along the shared edge.
/// Two chords in a disc cross iff their endpoints interleave.
pub fn intersection_matrix(t: &Tiling, loops: &[Loop]) -> Result<Vec<BitVec>, LatticeError> {
    let m = t.num_edges();
    let rot: Vec<Vec<usize>> = (0..t.num_vertices()).map(|v| t.rotation(v)).collect::<Result<_, _>>()?;
    let sets: Vec<BitVec> = loops.iter().map(|l| l.edge_vector(m)).collect();
    let k = loops.len();
    let mut rows = vec![BitVec::zeros(k); k];
    for i in 0..k {
        for j in 0..k {
            let mut parity = false;
            for (v, order) in rot.iter().enumerate() {
                let a: Vec<usize> = (0..order.len()).filter(|&s| sets[i].get(order[s])).collect();
                let b: Vec<usize> = (0..order.len()).filter(|&s| sets[j].get(order[s])).collect();
                if a.len() != 2 || b.len() != 2 {
                    continue;
                }
                let pa = [3 * a[0] + 1, 3 * a[1] + 1];
                let pb = [b[0], b[1]].map(|s| {
                    let e = order[s];
                    if !sets[i].get(e) {
                        3 * s + 1
                    } else if v == t.edges[e].u.min(t.edges[e].v) {
                        3 * s + 2
                    } else {
                        3 * s
                    }
                });
                let inside = pb.iter().filter(|&&x| x > pa[0] && x < pa[1]).count();
                parity ^= inside == 1;
            }
            rows[i].set(j, parity);
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{hcf16, honeycomb_torus};

    fn check_basis(t: &Tiling, hb: &HomologyBasis) {
        let m = t.num_edges();
        let mut faces = EchelonBasis::new(m);
        for f in 0..t.num_faces() {
            faces.insert(BitVec::from_indices(m, t.face_edges(f)));
        }
        for l in &hb.loops {
            let mut deg = vec![0usize; t.num_vertices()];
            for &e in &l.edges {
                deg[t.edges[e].u] += 1;
                deg[t.edges[e].v] += 1;
            }
            assert!(deg.iter().all(|d| d % 2 == 0));
            assert!(!faces.contains(&l.edge_vector(m)));
            let n = l.vertices.len();
            for (idx, &e) in l.edges.iter().enumerate() {
                let (a, b) = (l.vertices[idx], l.vertices[(idx + 1) % n]);
                assert_eq!(t.edge_between(a, b), Some(e));
            }
        }
        for i in 0..hb.loops.len() {
            assert!(!hb.intersection[i].get(i));
            for j in 0..hb.loops.len() {
                assert_eq!(hb.intersection[i].get(j), hb.intersection[j].get(i));
            }
        }
        assert!(hb.intersection_nonsingular());
    }

    #[test]
    fn hcf16_has_four_loops() {
        let t = hcf16().unwrap();
        let hb = homology_basis(&t).unwrap();
        assert_eq!(hb.loops.len(), 4);
        check_basis(&t, &hb);
    }

    #[test]
    fn torus_has_two_loops() {
        let t = honeycomb_torus(3).unwrap();
        let hb = homology_basis(&t).unwrap();
        assert_eq!(hb.loops.len(), 2);
        check_basis(&t, &hb);
    }

    #[test]
    fn loops_are_shortest_first() {
        let t = hcf16().unwrap();
        let hb = homology_basis(&t).unwrap();
        let lens: Vec<usize> = hb.loops.iter().map(Loop::len).collect();
        assert!(lens.windows(2).all(|w| w[0] <= w[1]));
    }
}
