use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};
use std::sync::OnceLock;

use crate::dem::{xor_probability, DecompositionTable, DetectorErrorModel};
use crate::f2::BitVec;

use super::mwpm::DistanceTable;

/// Fixed-point scale for integer edge weights; matching runs on integers so
/// that costs compare exactly.
pub const WEIGHT_SCALE: f64 = 1e6;

/// How an edge probability becomes a weight.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum WeightRule {
    /// `ln((1-p)/p)`.
    #[default]
    LogOdds,
    /// `-ln p`.
    NegLog,
}

impl WeightRule {
    /// Weights are clamped at zero, so `p >= 1/2` gives a free edge.
    pub fn weight(self, p: f64) -> f64 {
        let w = match self {
            WeightRule::LogOdds => ((1.0 - p) / p).ln(),
            WeightRule::NegLog => -p.ln(),
        };
        w.max(0.0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GraphEdge {
    pub a: usize,
    /// Equal to the boundary node for half-edges.
    pub b: usize,
    pub p: f64,
    pub weight: f64,
    pub iweight: i64,
    pub observables: BitVec,
}

impl GraphEdge {
    pub fn other(&self, v: usize) -> usize {
        if v == self.a {
            self.b
        } else {
            self.a
        }
    }
}

/// Detector graph plus one virtual boundary node (index `num_detectors`).
#[derive(Debug)]
pub struct MatchingGraph {
    pub num_detectors: usize,
    pub num_observables: usize,
    pub edges: Vec<GraphEdge>,
    /// Node pairs that received components with different observable flips;
    /// the most probable payload was kept.
    pub payload_conflicts: usize,
    adjacency: Vec<Vec<(usize, usize)>>,
    table: OnceLock<DistanceTable>,
}

impl MatchingGraph {
    /// Merge the components of every decomposed mechanism into edges.
    ///
    /// A hyperedge adds its probability to each of its components, and
    /// parallel contributions combine as independent events.
    pub fn build(model: &DetectorErrorModel, table: &DecompositionTable, rule: WeightRule) -> Self {
        let boundary = model.num_detectors;
        let mut acc: HashMap<(usize, usize), (f64, HashMap<Vec<usize>, f64>)> = HashMap::new();
        for entry in &table.entries {
            let p = model.mechanisms[entry.mechanism].p;
            for c in &entry.components {
                let key = match c.detectors[..] {
                    [a] => (a, boundary),
                    [a, b] => (a, b),
                    _ => unreachable!("components flip one or two detectors"),
                };
                let slot = acc.entry(key).or_insert((0.0, HashMap::new()));
                slot.0 = xor_probability(slot.0, p);
                let q = slot.1.entry(c.observables.clone()).or_insert(0.0);
                *q = xor_probability(*q, p);
            }
        }
        let mut keys: Vec<(usize, usize)> = acc.keys().copied().collect();
        keys.sort_unstable();
        let mut payload_conflicts = 0;
        let edges: Vec<GraphEdge> = keys
            .into_iter()
            .map(|(a, b)| {
                let (p, payloads) = &acc[&(a, b)];
                if payloads.len() > 1 {
                    payload_conflicts += 1;
                }
                let mut options: Vec<(&Vec<usize>, &f64)> = payloads.iter().collect();
                options.sort_by(|x, y| y.1.total_cmp(x.1).then_with(|| x.0.cmp(y.0)));
                let weight = rule.weight(*p);
                GraphEdge {
                    a,
                    b,
                    p: *p,
                    weight,
                    iweight: (weight * WEIGHT_SCALE).round() as i64,
                    observables: BitVec::from_indices(model.num_observables, options[0].0.iter().copied()),
                }
            })
            .collect();
        Self::from_edges(model.num_detectors, model.num_observables, edges, payload_conflicts)
    }

    pub fn from_edges(num_detectors: usize, num_observables: usize, edges: Vec<GraphEdge>, payload_conflicts: usize) -> Self {
        let mut adjacency = vec![Vec::new(); num_detectors + 1];
        for (k, e) in edges.iter().enumerate() {
            adjacency[e.a].push((e.b, k));
            if e.b != e.a {
                adjacency[e.b].push((e.a, k));
            }
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        MatchingGraph { num_detectors, num_observables, edges, payload_conflicts, adjacency, table: OnceLock::new() }
    }

    pub fn boundary(&self) -> usize {
        self.num_detectors
    }

    pub fn num_nodes(&self) -> usize {
        self.num_detectors + 1
    }

    /// `(neighbour, edge index)` pairs, ascending by neighbour.
    pub fn neighbors(&self, v: usize) -> &[(usize, usize)] {
        &self.adjacency[v]
    }

    /// All-pairs table, built on first use and shared afterwards.
    pub fn distance_table(&self) -> &DistanceTable {
        self.table.get_or_init(|| DistanceTable::new(self))
    }

    pub fn half_edges(&self) -> impl Iterator<Item = &GraphEdge> {
        self.edges.iter().filter(|e| e.b == self.num_detectors)
    }
}

/// Single-source shortest paths over integer weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathTree {
    pub source: usize,
    /// `i64::MAX` where unreachable.
    pub dist: Vec<i64>,
    /// Edge used to reach each node; `usize::MAX` at the source and where
    /// unreachable.
    pub pred: Vec<usize>,
}

impl PathTree {
    /// Edges from the source to `v`, nearest to `v` first.
    pub fn path(&self, g: &MatchingGraph, mut v: usize) -> Vec<usize> {
        let mut out = Vec::new();
        while v != self.source && self.pred[v] != usize::MAX {
            let e = self.pred[v];
            out.push(e);
            v = g.edges[e].other(v);
        }
        out
    }
}

/// Dijkstra from each source. Ties pop the lower node index first, so
/// equal-length paths resolve the same way every time.
pub fn shortest_paths(g: &MatchingGraph, sources: &[usize]) -> Vec<PathTree> {
    sources
        .iter()
        .map(|&s| {
            let n = g.num_nodes();
            let mut dist = vec![i64::MAX; n];
            let mut pred = vec![usize::MAX; n];
            let mut done = vec![false; n];
            let mut heap = BinaryHeap::new();
            dist[s] = 0;
            heap.push(Reverse((0i64, s)));
            while let Some(Reverse((d, v))) = heap.pop() {
                if done[v] {
                    continue;
                }
                done[v] = true;
                for &(w, k) in g.neighbors(v) {
                    let nd = d + g.edges[k].iweight;
                    if nd < dist[w] {
                        dist[w] = nd;
                        pred[w] = k;
                        heap.push(Reverse((nd, w)));
                    }
                }
            }
            PathTree { source: s, dist, pred }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn edge(a: usize, b: usize, iweight: i64) -> GraphEdge {
        GraphEdge { a, b, p: 0.0, weight: iweight as f64, iweight, observables: BitVec::zeros(1) }
    }

    #[test]
    fn weight_formulas() {
        assert!((WeightRule::LogOdds.weight(0.1) - 9f64.ln()).abs() < 1e-12);
        assert!((WeightRule::NegLog.weight(0.1) - 10f64.ln()).abs() < 1e-12);
        assert_eq!(WeightRule::LogOdds.weight(0.7), 0.0);
    }

    #[test]
    fn adjacent_and_boundary_distances() {
        let g = MatchingGraph::from_edges(3, 1, vec![edge(0, 1, 5), edge(1, 2, 7), edge(2, 3, 4)], 0);
        let t = &shortest_paths(&g, &[0])[0];
        assert_eq!(t.dist, vec![0, 5, 12, 16]);
        let t2 = &shortest_paths(&g, &[2])[0];
        assert_eq!(t2.dist[g.boundary()], 4);
        assert_eq!(t.path(&g, 3), vec![2, 1, 0]);
    }

    proptest! {
        #[test]
        fn dijkstra_matches_floyd_warshall(
            n in 2usize..40,
            raw in prop::collection::vec((0usize..40, 0usize..40, 0i64..1000), 0..120),
        ) {
            let edges: Vec<GraphEdge> = raw.into_iter()
                .map(|(a, b, w)| (a % n, b % n, w))
                .filter(|(a, b, _)| a != b)
                .map(|(a, b, w)| edge(a.min(b), a.max(b), w))
                .collect();
            let g = MatchingGraph::from_edges(n - 1, 1, edges.clone(), 0);
            let inf = i64::MAX / 4;
            let mut fw = vec![vec![inf; n]; n];
            for (i, row) in fw.iter_mut().enumerate() {
                row[i] = 0;
            }
            for e in &edges {
                fw[e.a][e.b] = fw[e.a][e.b].min(e.iweight);
                fw[e.b][e.a] = fw[e.b][e.a].min(e.iweight);
            }
            for k in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        if fw[i][k] + fw[k][j] < fw[i][j] {
                            fw[i][j] = fw[i][k] + fw[k][j];
                        }
                    }
                }
            }
            let sources: Vec<usize> = (0..n).collect();
            for t in shortest_paths(&g, &sources) {
                for v in 0..n {
                    let want = if fw[t.source][v] >= inf { i64::MAX } else { fw[t.source][v] };
                    prop_assert_eq!(t.dist[v], want);
                    if want != i64::MAX {
                        let len: i64 = t.path(&g, v).iter().map(|&k| g.edges[k].iweight).sum();
                        prop_assert_eq!(len, want);
                    }
                }
            }
        }
    }
}
