use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::time::Instant;

use crate::f2::BitVec;

use super::blossom::max_weight_matching;
use super::{Correction, DecodeError, Diagnostics, MatchingGraph};

const UNSET: usize = usize::MAX;

/// Graphs up to this many nodes get an all-pairs table.
pub const DENSE_LIMIT: usize = 4096;

/// Exact all-pairs distances and path observable parities, shared by every
/// decoder built on the same graph. Row `u` comes from Dijkstra rooted at
/// `u`; pair queries read the row of the smaller index, so the chosen path
/// does not depend on which end asks.
#[derive(Debug)]
pub struct DistanceTable {
    n: usize,
    words: usize,
    dist: Vec<i64>,
    parity: Vec<u64>,
}

impl DistanceTable {
    pub fn new(g: &MatchingGraph) -> Self {
        let n = g.num_nodes();
        let words = g.num_observables.div_ceil(64).max(1);
        let mut dist = vec![i64::MAX; n * n];
        let mut parity = vec![0u64; n * n * words];
        let mut scratch = Dijkstra::new(n);
        for u in 0..n {
            let order = scratch.run(g, u, i64::MAX, |_| false);
            let row = u * n;
            for &v in &order {
                dist[row + v] = scratch.dist[v];
                if v != u {
                    let e = &g.edges[scratch.pred[v]];
                    let prev = e.other(v);
                    for (w, &bits) in e.observables.words().iter().enumerate() {
                        parity[(row + v) * words + w] = parity[(row + prev) * words + w] ^ bits;
                    }
                }
            }
        }
        DistanceTable { n, words, dist, parity }
    }

    fn key(&self, a: usize, b: usize) -> usize {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        lo * self.n + hi
    }

    pub fn distance(&self, a: usize, b: usize) -> i64 {
        self.dist[self.key(a, b)]
    }

    fn xor_parity_into(&self, a: usize, b: usize, out: &mut BitVec) {
        let k = self.key(a, b) * self.words;
        out.xor_words(&self.parity[k..k + self.words]);
    }
}

/// Dijkstra with reusable buffers. Ties pop the lower node index first.
struct Dijkstra {
    dist: Vec<i64>,
    pred: Vec<usize>,
    stamp: Vec<u32>,
    done: Vec<u32>,
    generation: u32,
}

impl Dijkstra {
    fn new(n: usize) -> Self {
        Dijkstra { dist: vec![0; n], pred: vec![UNSET; n], stamp: vec![0; n], done: vec![0; n], generation: 0 }
    }

    /// Settle nodes from `src` in order of distance below `bound`, never
    /// expanding out of the boundary node. `stop` is asked after each
    /// settled node. Returns the settled nodes in order.
    fn run(&mut self, g: &MatchingGraph, src: usize, bound: i64, mut stop: impl FnMut(usize) -> bool) -> Vec<usize> {
        self.generation = self.generation.wrapping_add(1);
        if self.generation == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.done.iter_mut().for_each(|s| *s = 0);
            self.generation = 1;
        }
        let gen = self.generation;
        let boundary = g.boundary();
        let mut heap = BinaryHeap::new();
        let mut order = Vec::new();
        self.dist[src] = 0;
        self.pred[src] = UNSET;
        self.stamp[src] = gen;
        heap.push(Reverse((0i64, src)));
        while let Some(Reverse((d, v))) = heap.pop() {
            if self.done[v] == gen || d > self.dist[v] {
                continue;
            }
            if d >= bound {
                break;
            }
            self.done[v] = gen;
            order.push(v);
            if stop(v) {
                break;
            }
            if v == boundary && v != src {
                continue;
            }
            for &(w, k) in g.neighbors(v) {
                let nd = d + g.edges[k].iweight;
                if self.stamp[w] != gen || nd < self.dist[w] {
                    self.stamp[w] = gen;
                    self.dist[w] = nd;
                    self.pred[w] = k;
                    heap.push(Reverse((nd, w)));
                }
            }
        }
        order
    }

    fn trace(&self, g: &MatchingGraph, mut v: usize, out: &mut BitVec) {
        while self.pred[v] != UNSET {
            let e = &g.edges[self.pred[v]];
            out.xor_assign(&e.observables);
            v = e.other(v);
        }
    }
}

/// One candidate pair for the matching.
struct Pair {
    a: usize,
    b: usize,
    dist: i64,
    obs: Option<BitVec>,
}

/// Reusable MWPM decoder; one per worker thread.
///
/// The defect graph has one node per flipped detector. Leaving a defect
/// unmatched means routing it to the boundary at its exact boundary
/// distance `dB`, so the matching maximizes `dB(i) + dB(j) - d(i, j)` over
/// pairs and pairs with a non-positive value are dropped.
pub struct Matcher<'g> {
    g: &'g MatchingGraph,
    table: Option<&'g DistanceTable>,
    boundary_dist: Vec<i64>,
    boundary_obs: Vec<BitVec>,
    dijkstra: Dijkstra,
    defect_slot: Vec<usize>,
}

impl<'g> Matcher<'g> {
    pub fn new(g: &'g MatchingGraph) -> Self {
        Self::with_table(g, g.num_nodes() <= DENSE_LIMIT)
    }

    /// `dense = false` runs a bounded Dijkstra per defect instead of reading
    /// the all-pairs table.
    pub fn with_table(g: &'g MatchingGraph, dense: bool) -> Self {
        let n = g.num_nodes();
        let table = dense.then(|| g.distance_table());
        let mut dijkstra = Dijkstra::new(n);
        let mut boundary_dist = vec![i64::MAX; n];
        let mut boundary_obs = vec![BitVec::zeros(g.num_observables); n];
        let order = dijkstra.run(g, g.boundary(), i64::MAX, |_| false);
        for &v in &order {
            boundary_dist[v] = dijkstra.dist[v];
            if v != g.boundary() {
                let e = &g.edges[dijkstra.pred[v]];
                let mut o = boundary_obs[e.other(v)].clone();
                o.xor_assign(&e.observables);
                boundary_obs[v] = o;
            }
        }
        Matcher { g, table, boundary_dist, boundary_obs, dijkstra, defect_slot: vec![UNSET; n] }
    }

    pub fn graph(&self) -> &MatchingGraph {
        self.g
    }

    pub fn decode(&mut self, syndrome: &BitVec) -> Result<Correction, DecodeError> {
        let start = Instant::now();
        if syndrome.len() != self.g.num_detectors {
            return Err(DecodeError::SyndromeLength { expected: self.g.num_detectors, got: syndrome.len() });
        }
        let defects: Vec<usize> = syndrome.ones().collect();
        let (observables, cost) = self.solve(&defects)?;
        Ok(Correction {
            observables,
            diagnostics: Diagnostics::Matching { defects: defects.len(), cost: cost as f64 / super::WEIGHT_SCALE, icost: cost },
            elapsed: start.elapsed(),
        })
    }

    fn pairs(&mut self, defects: &[usize], db: &[i64]) -> Vec<Pair> {
        let finite_max = db.iter().copied().filter(|&x| x != i64::MAX).max();
        let unbounded = finite_max.is_none() || db.contains(&i64::MAX);
        let bound = |i: usize| if unbounded { i64::MAX } else { db[i].saturating_add(finite_max.unwrap()) };
        let mut pairs = Vec::new();
        if let Some(t) = self.table {
            for i in 0..defects.len() {
                for j in i + 1..defects.len() {
                    let d = t.distance(defects[i], defects[j]);
                    if d < bound(i) {
                        pairs.push(Pair { a: i, b: j, dist: d, obs: None });
                    }
                }
            }
            return pairs;
        }
        for (i, &d) in defects.iter().enumerate() {
            self.defect_slot[d] = i;
        }
        for i in 0..defects.len() {
            let mut remaining = defects.len() - 1 - i;
            let slots = &self.defect_slot;
            let order = self.dijkstra.run(self.g, defects[i], bound(i), |v| {
                if slots[v] != UNSET && slots[v] > i {
                    remaining -= 1;
                }
                remaining == 0
            });
            for v in order {
                let j = self.defect_slot[v];
                if j != UNSET && j > i {
                    let mut o = BitVec::zeros(self.g.num_observables);
                    self.dijkstra.trace(self.g, v, &mut o);
                    pairs.push(Pair { a: i, b: j, dist: self.dijkstra.dist[v], obs: Some(o) });
                }
            }
        }
        for &d in defects {
            self.defect_slot[d] = UNSET;
        }
        pairs
    }

    fn solve(&mut self, defects: &[usize]) -> Result<(BitVec, i64), DecodeError> {
        let mut obs = BitVec::zeros(self.g.num_observables);
        if defects.is_empty() {
            return Ok((obs, 0));
        }
        let db: Vec<i64> = defects.iter().map(|&d| self.boundary_dist[d]).collect();
        let pairs = self.pairs(defects, &db);

        // Defects that cannot reach the boundary get a bonus larger than any
        // achievable saving, so matching them takes priority.
        let finite = |x: i64| if x == i64::MAX { 0 } else { x };
        let big = 1
            + 2 * db.iter().map(|&x| finite(x)).sum::<i64>()
            + pairs.iter().map(|p| finite(p.dist)).sum::<i64>();
        let reward: Vec<i64> = db.iter().map(|&x| if x == i64::MAX { big } else { x }).collect();
        let mut kept = Vec::with_capacity(pairs.len());
        let mut edges = Vec::with_capacity(pairs.len());
        for p in pairs {
            if p.dist == i64::MAX {
                continue;
            }
            let w = reward[p.a] + reward[p.b] - p.dist;
            if w > 0 {
                edges.push((p.a, p.b, w));
                kept.push(p);
            }
        }
        let mate = max_weight_matching(defects.len(), &edges, false);
        let mut cost = 0i64;
        for p in &kept {
            if mate[p.a] == Some(p.b) {
                cost += p.dist;
                match (&p.obs, self.table) {
                    (Some(o), _) => obs.xor_assign(o),
                    (None, Some(t)) => t.xor_parity_into(defects[p.a], defects[p.b], &mut obs),
                    (None, None) => unreachable!(),
                }
            }
        }
        for (i, &d) in defects.iter().enumerate() {
            if mate[i].is_none() {
                if db[i] == i64::MAX {
                    return Err(DecodeError::Unmatchable { detector: d });
                }
                cost += db[i];
                obs.xor_assign(&self.boundary_obs[d]);
            }
        }
        Ok((obs, cost))
    }
}

/// One-off decode; build a [`Matcher`] to decode many shots.
pub fn mwpm_decode(g: &MatchingGraph, syndrome: &BitVec) -> Result<Correction, DecodeError> {
    Matcher::new(g).decode(syndrome)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decoders::{shortest_paths, GraphEdge};

    fn edge(a: usize, b: usize, w: i64, obs: &[usize]) -> GraphEdge {
        GraphEdge { a, b, p: 0.0, weight: w as f64, iweight: w, observables: BitVec::from_indices(2, obs.iter().copied()) }
    }

    /// Minimum over all ways to pair defects or send them to the boundary,
    /// using unrestricted shortest-path distances.
    pub(crate) fn brute_cost(g: &MatchingGraph, defects: &[usize]) -> Option<i64> {
        let mut sources = defects.to_vec();
        sources.push(g.boundary());
        let trees = shortest_paths(g, &sources);
        let dist = |i: usize, j: usize| trees[i].dist[defects[j]];
        let to_b = |i: usize| trees[i].dist[g.boundary()];
        fn go(rest: &[usize], dist: &dyn Fn(usize, usize) -> i64, to_b: &dyn Fn(usize) -> i64) -> Option<i64> {
            let Some((&first, tail)) = rest.split_first() else { return Some(0) };
            let mut best: Option<i64> = None;
            let mut consider = |c: Option<i64>| {
                if let Some(c) = c {
                    best = Some(best.map_or(c, |b: i64| b.min(c)));
                }
            };
            if to_b(first) != i64::MAX {
                consider(go(tail, dist, to_b).map(|c| c + to_b(first)));
            }
            for (k, &other) in tail.iter().enumerate() {
                if dist(first, other) == i64::MAX {
                    continue;
                }
                let mut r = tail.to_vec();
                r.remove(k);
                consider(go(&r, dist, to_b).map(|c| c + dist(first, other)));
            }
            best
        }
        let idx: Vec<usize> = (0..defects.len()).collect();
        go(&idx, &dist, &to_b)
    }

    fn syndrome(n: usize, ones: &[usize]) -> BitVec {
        BitVec::from_indices(n, ones.iter().copied())
    }

    #[test]
    fn empty_syndrome() {
        let g = MatchingGraph::from_edges(2, 2, vec![edge(0, 1, 3, &[0])], 0);
        let c = mwpm_decode(&g, &syndrome(2, &[])).unwrap();
        assert!(c.observables.is_zero());
        assert!(matches!(c.diagnostics, Diagnostics::Matching { icost: 0, .. }));
    }

    #[test]
    fn chain_prefers_cheaper_side() {
        // B - 0 - 1 - 2 - 3 - B
        let g = MatchingGraph::from_edges(
            4,
            2,
            vec![edge(0, 4, 2, &[0]), edge(0, 1, 3, &[]), edge(1, 2, 3, &[1]), edge(2, 3, 3, &[]), edge(3, 4, 10, &[])],
            0,
        );
        let c = mwpm_decode(&g, &syndrome(4, &[1])).unwrap();
        assert_eq!(c.observables.ones().collect::<Vec<_>>(), vec![0]);
        let c = mwpm_decode(&g, &syndrome(4, &[1, 2])).unwrap();
        assert_eq!(c.observables.ones().collect::<Vec<_>>(), vec![1]);
        assert_eq!(brute_cost(&g, &[1, 2]), Some(3));
        let c = mwpm_decode(&g, &syndrome(4, &[0, 3])).unwrap();
        assert!(matches!(c.diagnostics, Diagnostics::Matching { icost: 9, .. }));
    }

    #[test]
    fn odd_defects_without_boundary_fail() {
        let g = MatchingGraph::from_edges(3, 2, vec![edge(0, 1, 1, &[]), edge(1, 2, 1, &[])], 0);
        assert!(matches!(mwpm_decode(&g, &syndrome(3, &[0, 1, 2])), Err(DecodeError::Unmatchable { .. })));
        assert!(mwpm_decode(&g, &syndrome(3, &[0, 2])).is_ok());
    }

    #[test]
    fn matches_brute_force_on_random_graphs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..300 {
            let n = rng.gen_range(3..25);
            let mut edges = Vec::new();
            for a in 0..n {
                for b in a + 1..=n {
                    if rng.gen_bool(0.2) {
                        edges.push(edge(a, b, rng.gen_range(0..20), &[]));
                    }
                }
            }
            let g = MatchingGraph::from_edges(n, 2, edges, 0);
            let k = rng.gen_range(0..=8.min(n));
            let mut ds: Vec<usize> = (0..n).collect();
            for i in 0..k {
                let j = rng.gen_range(i..n);
                ds.swap(i, j);
            }
            let mut ds = ds[..k].to_vec();
            ds.sort_unstable();
            let want = brute_cost(&g, &ds);
            for dense in [true, false] {
                let got = Matcher::with_table(&g, dense).decode(&syndrome(n, &ds));
                match want {
                    Some(c) => match got.unwrap().diagnostics {
                        Diagnostics::Matching { icost, .. } => assert_eq!(icost, c, "dense={dense} n={n} ds={ds:?}"),
                        _ => unreachable!(),
                    },
                    None => assert!(got.is_err()),
                }
            }
        }
    }
}
