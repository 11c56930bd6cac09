use std::collections::{HashMap, VecDeque};

use super::{Color, Edge, Face, LatticeError, Tiling};

/// Oriented triangulated surface with three-colored points.
///
/// Corners of each triangle are listed counter-clockwise. Side `k` joins
/// corner `k` to corner `k+1`; side ids are shared by exactly two triangles,
/// which allows multi-edges between the same pair of points.
#[derive(Clone, Debug)]
pub struct TriangleComplex {
    pub colors: Vec<Color>,
    pub triangles: Vec<[usize; 3]>,
    pub sides: Vec<[usize; 3]>,
}

impl TriangleComplex {
    /// The dual triangulation of a valid trivalent tiling: one point per face,
    /// one triangle per vertex, one side id per edge.
    pub fn from_tiling(t: &Tiling) -> Result<Self, LatticeError> {
        let colors = t.faces.iter().map(|f| f.color).collect();
        let mut triangles = Vec::with_capacity(t.vertex_count);
        let mut sides = Vec::with_capacity(t.vertex_count);
        for v in 0..t.vertex_count {
            let faces = t.vertex_faces(v);
            if faces.len() != 3 {
                return Err(LatticeError::Inconsistent(format!("vertex {v} lies on {} faces", faces.len())));
            }
            let mut corners = [0usize; 3];
            let mut tri_sides = [0usize; 3];
            let mut f = faces[0];
            for k in 0..3 {
                corners[k] = f;
                // the face after f around v shares the edge from v to its predecessor on f
                let vs = &t.faces[f].vertices;
                let i = vs.iter().position(|&w| w == v).expect("vertex on face");
                let u = vs[(i + vs.len() - 1) % vs.len()];
                let e = t
                    .edge_between(v, u)
                    .ok_or_else(|| LatticeError::Inconsistent(format!("missing edge {v}-{u}")))?;
                tri_sides[k] = e;
                let ef = t.edge_faces(e);
                f = if ef[0] == f { ef[1] } else { ef[0] };
            }
            if f != corners[0] {
                return Err(LatticeError::Inconsistent(format!("faces around vertex {v} do not close")));
            }
            triangles.push(corners);
            sides.push(tri_sides);
        }
        Ok(TriangleComplex { colors, triangles, sides })
    }

    /// Dual tiling: qubits are triangles, edges are sides, faces are points.
    pub fn dual(&self, p: usize, refinement_level: usize) -> Result<Tiling, LatticeError> {
        let nside = self.sides.iter().flatten().max().map_or(0, |&m| m + 1);
        let mut occ: Vec<Vec<(usize, usize)>> = vec![Vec::new(); nside];
        for (ti, s) in self.sides.iter().enumerate() {
            for k in 0..3 {
                occ[s[k]].push((ti, k));
            }
        }
        let mut edges = Vec::with_capacity(nside);
        for (sid, o) in occ.iter().enumerate() {
            if o.len() != 2 {
                return Err(LatticeError::Inconsistent(format!("side {sid} appears {} times", o.len())));
            }
            let (t0, k0) = o[0];
            let a = self.colors[self.triangles[t0][k0]];
            let b = self.colors[self.triangles[t0][(k0 + 1) % 3]];
            if a == b {
                return Err(LatticeError::Inconsistent(format!("side {sid} joins two {a} points")));
            }
            let (u, v) = (o[0].0.min(o[1].0), o[0].0.max(o[1].0));
            edges.push(Edge { u, v, color: Color::third(a, b) });
        }

        let mut at_point: Vec<Vec<(usize, usize)>> = vec![Vec::new(); self.colors.len()];
        for (ti, tri) in self.triangles.iter().enumerate() {
            for (k, &pnt) in tri.iter().enumerate() {
                at_point[pnt].push((ti, k));
            }
        }
        let mut faces = Vec::with_capacity(self.colors.len());
        for (pnt, around) in at_point.iter().enumerate() {
            let Some(&start) = around.first() else {
                return Err(LatticeError::Inconsistent(format!("point {pnt} is on no triangle")));
            };
            let mut cycle = Vec::with_capacity(around.len());
            let (mut ti, mut i) = start;
            loop {
                cycle.push(ti);
                // side (i+2) runs from corner i+2 into this point; cross it
                let sid = self.sides[ti][(i + 2) % 3];
                let &(nt, nk) = occ[sid].iter().find(|&&(t2, k2)| (t2, k2) != (ti, (i + 2) % 3)).unwrap();
                if self.triangles[nt][nk] != pnt {
                    return Err(LatticeError::Inconsistent(format!(
                        "orientation mismatch across side {sid} at point {pnt}"
                    )));
                }
                (ti, i) = (nt, nk);
                if (ti, i) == start {
                    break;
                }
                if cycle.len() > around.len() {
                    return Err(LatticeError::Inconsistent(format!("walk around point {pnt} does not close")));
                }
            }
            if cycle.len() != around.len() {
                return Err(LatticeError::Inconsistent(format!("point {pnt} is not a manifold point")));
            }
            faces.push(Face { color: self.colors[pnt], vertices: cycle });
        }
        Tiling::new(p, 3, refinement_level, self.triangles.len(), edges, faces)
    }
}

/// The genus-2 `{8,3}` lattice on 16 qubits.
///
/// Built as the dual of a branched double cover of the octahedron. The six
/// octahedron vertices are the branch points; the branch cut is a perfect
/// matching of octahedron edges, so every vertex has odd monodromy and lifts
/// to a single point of degree 8. Riemann-Hurwitz gives genus 2.
pub fn hcf16() -> Result<Tiling, LatticeError> {
    use Color::*;
    // 0,1 = red pair; 2,3 = green pair; 4,5 = blue pair (antipodal pairs)
    let colors = vec![Red, Red, Green, Green, Blue, Blue];
    let cut = [(0usize, 2usize), (3, 4), (1, 5)];
    let mut base: Vec<[usize; 3]> = Vec::new();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                let (r, g, b) = (i, 2 + j, 4 + k);
                // outward orientation flips with each reflected axis
                base.push(if (i + j + k) % 2 == 0 { [r, g, b] } else { [r, b, g] });
            }
        }
    }
    let mut edge_id: HashMap<(usize, usize), usize> = HashMap::new();
    let mut edge_tris: Vec<Vec<usize>> = Vec::new();
    for (t, tri) in base.iter().enumerate() {
        for k in 0..3 {
            let key = ordered(tri[k], tri[(k + 1) % 3]);
            let next = edge_id.len();
            let e = *edge_id.entry(key).or_insert(next);
            if e == edge_tris.len() {
                edge_tris.push(Vec::new());
            }
            edge_tris[e].push(t);
        }
    }
    let in_cut = |e: (usize, usize)| cut.iter().any(|&c| ordered(c.0, c.1) == e);

    let mut triangles = Vec::with_capacity(16);
    let mut sides = Vec::with_capacity(16);
    for (t, tri) in base.iter().enumerate() {
        for sheet in 0..2 {
            let mut s = [0usize; 3];
            for k in 0..3 {
                let key = ordered(tri[k], tri[(k + 1) % 3]);
                let e = edge_id[&key];
                let other = edge_tris[e].iter().copied().find(|&x| x != t).unwrap();
                let flip = usize::from(in_cut(key));
                s[k] = 2 * e + if t < other { sheet } else { sheet ^ flip };
            }
            triangles.push(*tri);
            sides.push(s);
        }
    }
    TriangleComplex { colors, triangles, sides }.dual(8, 1)
}

/// Honeycomb on an `l x l` torus (`l` a positive multiple of 3).
///
/// Dual of the triangular lattice whose point `(i, j)` has color
/// `(i + 2j) mod 3`. Gives `2 l^2` qubits, `3 l^2` edges, `l^2` hexagons.
pub fn honeycomb_torus(l: usize) -> Result<Tiling, LatticeError> {
    if l == 0 || l % 3 != 0 {
        return Err(LatticeError::Malformed(format!("torus side {l} is not a positive multiple of 3")));
    }
    let idx = |i: usize, j: usize| (i % l) + l * (j % l);
    let colors = (0..l * l).map(|p| Color::from_index(p % l + 2 * (p / l))).collect();
    // directions (1,0), (0,1), (-1,1); a side is keyed by its base point and direction
    let side = |a: (usize, usize), b: (usize, usize)| -> usize {
        let d = ((b.0 + l - a.0 % l) % l, (b.1 + l - a.1 % l) % l);
        let dirs = [(1, 0), (0, 1), (l - 1, 1)];
        if let Some(k) = dirs.iter().position(|&x| x == d) {
            3 * idx(a.0, a.1) + k
        } else {
            let nd = ((l - d.0) % l, (l - d.1) % l);
            let k = dirs.iter().position(|&x| x == nd).expect("lattice direction");
            3 * idx(b.0, b.1) + k
        }
    };
    let mut triangles = Vec::new();
    let mut sides = Vec::new();
    for j in 0..l {
        for i in 0..l {
            for pts in [[(i, j), (i + 1, j), (i, j + 1)], [(i + 1, j), (i + 1, j + 1), (i, j + 1)]] {
                triangles.push(pts.map(|(a, b)| idx(a, b)));
                sides.push([0, 1, 2].map(|k| side(pts[k], pts[(k + 1) % 3])));
            }
        }
    }
    TriangleComplex { colors, triangles, sides }.dual(6, 1)
}

#[inline]
fn ordered(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

/// Semi-hyperbolic refinement: dualize, split each triangle into `ell^2`
/// micro-triangles, three-color the result, dualize back.
/// `ell = 1` returns any tiling unchanged, so refined lattice files load
/// back as they are.
pub fn refine(t: &Tiling, ell: usize) -> Result<Tiling, LatticeError> {
    if ell == 0 {
        return Err(LatticeError::Malformed("refinement level must be at least 1".into()));
    }
    if ell == 1 {
        return Ok(t.clone());
    }
    if t.refinement_level != 1 {
        return Err(LatticeError::NotBase(t.refinement_level));
    }
    let base = TriangleComplex::from_tiling(t)?;
    let nf = base.colors.len();
    let ne = t.num_edges();
    let per_edge = ell - 1;
    let per_tri = (ell - 1) * (ell - 2) / 2;
    let npoints = nf + ne * per_edge + base.triangles.len() * per_tri;

    // local index of an interior barycentric point (i, j, k), all >= 1
    let mut interior_index = HashMap::new();
    for i in 1..ell {
        for j in 1..ell - i {
            let n = interior_index.len();
            interior_index.insert((i, j), n);
        }
    }

    let mut triangles = Vec::with_capacity(base.triangles.len() * ell * ell);
    let mut side_keys: Vec<[(usize, usize, usize); 3]> = Vec::with_capacity(triangles.capacity());
    for (tau, (corners, tsides)) in base.triangles.iter().zip(&base.sides).enumerate() {
        let [a, b, c] = *corners;
        let edge_point = |e: usize, x: usize, y: usize, d: usize| {
            let pos = if x < y { d } else { ell - d };
            nf + e * per_edge + pos - 1
        };
        let pid = |(i, j, k): (usize, usize, usize)| -> usize {
            match (i, j, k) {
                (_, 0, 0) => a,
                (0, _, 0) => b,
                (0, 0, _) => c,
                (_, _, 0) => edge_point(tsides[0], a, b, j),
                (0, _, _) => edge_point(tsides[1], b, c, k),
                (_, 0, _) => edge_point(tsides[2], c, a, i),
                _ => nf + ne * per_edge + tau * per_tri + interior_index[&(i, j)],
            }
        };
        let on_boundary = |p: (usize, usize, usize), q: (usize, usize, usize)| {
            (p.2 == 0 && q.2 == 0) || (p.0 == 0 && q.0 == 0) || (p.1 == 0 && q.1 == 0)
        };
        let mut push = |pts: [(usize, usize, usize); 3]| {
            let ids = pts.map(pid);
            let keys = [0, 1, 2].map(|k| {
                let (p, q) = (pts[k], pts[(k + 1) % 3]);
                let (x, y) = (ids[k], ids[(k + 1) % 3]);
                let owner = if on_boundary(p, q) { usize::MAX } else { tau };
                (owner, x.min(y), x.max(y))
            });
            triangles.push(ids);
            side_keys.push(keys);
        };
        for i in 0..ell {
            for j in 0..ell - i {
                let k = ell - 1 - i - j;
                push([(i + 1, j, k), (i, j + 1, k), (i, j, k + 1)]);
            }
        }
        for i in 0..ell - 1 {
            for j in 0..ell - 1 - i {
                let k = ell - 2 - i - j;
                push([(i + 1, j + 1, k), (i, j + 1, k + 1), (i + 1, j, k + 1)]);
            }
        }
    }
    let mut side_id: HashMap<(usize, usize, usize), usize> = HashMap::new();
    let sides: Vec<[usize; 3]> = side_keys
        .iter()
        .map(|ks| {
            ks.map(|key| {
                let n = side_id.len();
                *side_id.entry(key).or_insert(n)
            })
        })
        .collect();

    let colors = three_color(&triangles, &sides, npoints, seed_colors(&base, ell))?;
    TriangleComplex { colors, triangles, sides }.dual(t.p, ell)
}

// Colors for the first micro-triangle, chosen so that base corners keep their
// colors whenever ell is not a multiple of 3.
fn seed_colors(base: &TriangleComplex, ell: usize) -> [Color; 3] {
    let [a, b, _] = base.triangles[0];
    let ca = base.colors[a].index();
    let cb = base.colors[b].index();
    let step = (cb + 3 - ca) % 3;
    let d1 = if ell % 3 == 0 { step } else { (step * (ell % 3)) % 3 };
    let d2 = (2 * d1) % 3;
    // color of barycentric point (i, j, k) is ca + j d1 + k d2; the first
    // micro-triangle is (1, 0, ell-1), (0, 1, ell-1), (0, 0, ell)
    let at = |j: usize, k: usize| Color::from_index(ca + j * d1 + k * d2);
    [at(0, ell - 1), at(1, ell - 1), at(0, ell)]
}

fn three_color(
    triangles: &[[usize; 3]],
    sides: &[[usize; 3]],
    npoints: usize,
    seed: [Color; 3],
) -> Result<Vec<Color>, LatticeError> {
    let nside = sides.iter().flatten().max().map_or(0, |&m| m + 1);
    let mut by_side: Vec<Vec<usize>> = vec![Vec::new(); nside];
    for (t, s) in sides.iter().enumerate() {
        for &x in s {
            by_side[x].push(t);
        }
    }
    let mut color: Vec<Option<Color>> = vec![None; npoints];
    let mut seen = vec![false; triangles.len()];
    for (k, &p) in triangles[0].iter().enumerate() {
        color[p] = Some(seed[k]);
    }
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    while let Some(t) = queue.pop_front() {
        for &s in &sides[t] {
            for &nt in &by_side[s] {
                if seen[nt] {
                    continue;
                }
                let known: Vec<Color> = triangles[nt].iter().filter_map(|&p| color[p]).collect();
                if known.len() < 2 {
                    continue;
                }
                for &p in &triangles[nt] {
                    if color[p].is_none() {
                        color[p] = Some(Color::third(known[0], known[1]));
                    }
                }
                let cs = triangles[nt].map(|p| color[p].unwrap());
                if cs[0] == cs[1] || cs[1] == cs[2] || cs[0] == cs[2] {
                    return Err(LatticeError::Inconsistent(format!(
                        "refined triangulation is not three-colorable at micro-triangle {nt}"
                    )));
                }
                seen[nt] = true;
                queue.push_back(nt);
            }
        }
    }
    color
        .into_iter()
        .enumerate()
        .map(|(p, c)| c.ok_or_else(|| LatticeError::Inconsistent(format!("point {p} never colored"))))
        .collect()
}
