use std::time::Instant;

use crate::dem::DetectorErrorModel;
use crate::f2::BitVec;

use super::{Correction, DecodeError, Diagnostics};

/// Min-sum normalization factor.
pub const MIN_SUM_SCALE: f64 = 0.9;

/// Incrementally built echelon form whose rows remember which selected
/// columns they combine. Each row's lowest set bit is its pivot.
struct Elimination {
    rows: Vec<BitVec>,
    combos: Vec<BitVec>,
    pivot_row: Vec<usize>,
    width: usize,
}

impl Elimination {
    fn new(height: usize, width: usize) -> Self {
        Elimination { rows: Vec::new(), combos: Vec::new(), pivot_row: vec![usize::MAX; height], width }
    }

    fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduce `v`; returns the combination used and whether `v` was in the span.
    fn reduce(&self, v: &mut BitVec) -> (BitVec, bool) {
        let mut combo = BitVec::zeros(self.width);
        while let Some(b) = v.first_one() {
            let r = self.pivot_row[b];
            if r == usize::MAX {
                return (combo, false);
            }
            v.xor_assign(&self.rows[r]);
            combo.xor_assign(&self.combos[r]);
        }
        (combo, true)
    }

    /// Try to add a column; true if it was independent.
    fn insert(&mut self, mut v: BitVec) -> bool {
        let (mut combo, dependent) = self.reduce(&mut v);
        if dependent {
            return false;
        }
        combo.set(self.rows.len(), true);
        let pivot = v.first_one().unwrap();
        self.pivot_row[pivot] = self.rows.len();
        self.rows.push(v);
        self.combos.push(combo);
        true
    }
}

/// Reusable BP+OSD decoder over a compiled model.
///
/// Mechanisms that flip no detector are invisible to the syndrome and are
/// left out of the Tanner graph.
pub struct BpOsd {
    num_detectors: usize,
    num_observables: usize,
    /// Model index of each column.
    pub columns: Vec<usize>,
    col_checks: Vec<Vec<usize>>,
    col_vectors: Vec<BitVec>,
    col_obs: Vec<BitVec>,
    /// Per check: (column, edge slot).
    check_edges: Vec<Vec<(usize, usize)>>,
    /// Per column: edge slots, aligned with `col_checks`.
    col_edges: Vec<Vec<usize>>,
    num_edges: usize,
    prior: Vec<f64>,
    full_rank: usize,
    pub max_iters: usize,
    pub osd_order: usize,
}

impl BpOsd {
    pub fn new(model: &DetectorErrorModel, max_iters: usize, osd_order: usize) -> Self {
        let nd = model.num_detectors;
        let mut columns = Vec::new();
        let mut col_checks = Vec::new();
        let mut col_vectors = Vec::new();
        let mut col_obs = Vec::new();
        let mut prior = Vec::new();
        for (k, m) in model.mechanisms.iter().enumerate() {
            if m.detectors.is_empty() {
                continue;
            }
            columns.push(k);
            col_checks.push(m.detectors.clone());
            col_vectors.push(BitVec::from_indices(nd, m.detectors.iter().copied()));
            col_obs.push(BitVec::from_indices(model.num_observables, m.observables.iter().copied()));
            prior.push(((1.0 - m.p) / m.p).ln());
        }
        let mut check_edges = vec![Vec::new(); nd];
        let mut col_edges = Vec::with_capacity(columns.len());
        let mut num_edges = 0;
        for (j, checks) in col_checks.iter().enumerate() {
            let mut slots = Vec::with_capacity(checks.len());
            for &c in checks {
                check_edges[c].push((j, num_edges));
                slots.push(num_edges);
                num_edges += 1;
            }
            col_edges.push(slots);
        }
        let full_rank = crate::f2::rank(&col_vectors);
        BpOsd {
            num_detectors: nd,
            num_observables: model.num_observables,
            columns,
            col_checks,
            col_vectors,
            col_obs,
            check_edges,
            col_edges,
            num_edges,
            prior,
            full_rank,
            max_iters,
            osd_order,
        }
    }

    pub fn num_columns(&self) -> usize {
        self.columns.len()
    }

    fn syndrome_of(&self, cols: impl Iterator<Item = usize>) -> BitVec {
        let mut s = BitVec::zeros(self.num_detectors);
        for j in cols {
            for &c in &self.col_checks[j] {
                s.toggle(c);
            }
        }
        s
    }

    /// Min-sum BP. Returns the hard decision if it reproduced the syndrome,
    /// plus the final posteriors and the iteration count.
    fn bp(&self, s: &BitVec) -> (Option<Vec<usize>>, Vec<f64>, usize) {
        let nv = self.columns.len();
        let mut q = vec![0.0f64; self.num_edges];
        let mut r = vec![0.0f64; self.num_edges];
        for j in 0..nv {
            for &e in &self.col_edges[j] {
                q[e] = self.prior[j];
            }
        }
        let mut post = self.prior.clone();
        for it in 1..=self.max_iters {
            for (c, edges) in self.check_edges.iter().enumerate() {
                let mut sign = s.get(c);
                let (mut min1, mut min2, mut arg) = (f64::INFINITY, f64::INFINITY, usize::MAX);
                for &(_, e) in edges {
                    let m = q[e];
                    sign ^= m < 0.0;
                    let a = m.abs();
                    if a < min1 {
                        min2 = min1;
                        min1 = a;
                        arg = e;
                    } else if a < min2 {
                        min2 = a;
                    }
                }
                for &(_, e) in edges {
                    let mag = if e == arg { min2 } else { min1 };
                    let own = q[e] < 0.0;
                    let neg = sign ^ own;
                    let v = MIN_SUM_SCALE * mag;
                    r[e] = if neg { -v } else { v };
                }
            }
            let mut hard = Vec::new();
            for j in 0..nv {
                let total: f64 = self.prior[j] + self.col_edges[j].iter().map(|&e| r[e]).sum::<f64>();
                post[j] = total;
                for &e in &self.col_edges[j] {
                    q[e] = total - r[e];
                }
                if total < 0.0 {
                    hard.push(j);
                }
            }
            if self.syndrome_of(hard.iter().copied()) == *s {
                return (Some(hard), post, it);
            }
        }
        (None, post, self.max_iters)
    }

    /// Ordered-statistics post-processing.
    ///
    /// Columns are ranked by BP posterior (most likely flipped first) and the
    /// first independent ones form the basis. Order `w` tries every pattern on
    /// the first `w` non-basis columns and keeps the cheapest solution under
    /// the prior weights.
    fn osd(&self, s: &BitVec, post: &[f64]) -> Result<Vec<usize>, DecodeError> {
        let mut order: Vec<usize> = (0..self.columns.len()).collect();
        order.sort_by(|&a, &b| post[a].total_cmp(&post[b]).then(a.cmp(&b)));
        let mut elim = Elimination::new(self.num_detectors, self.full_rank);
        let mut basis = Vec::with_capacity(self.full_rank);
        let mut rest = Vec::new();
        for (pos, &j) in order.iter().enumerate() {
            if elim.rank() == self.full_rank {
                rest.extend_from_slice(&order[pos..(pos + self.osd_order).min(order.len())]);
                break;
            }
            if elim.insert(self.col_vectors[j].clone()) {
                basis.push(j);
            } else if rest.len() < self.osd_order {
                rest.push(j);
            }
        }
        rest.truncate(self.osd_order);

        let solve = |target: &BitVec| -> Option<Vec<usize>> {
            let mut v = target.clone();
            let (combo, ok) = elim.reduce(&mut v);
            ok.then(|| combo.ones().map(|i| basis[i]).collect())
        };
        let mut best = solve(s).ok_or(DecodeError::Undecodable)?;
        let cost = |cols: &[usize]| cols.iter().map(|&j| self.prior[j]).sum::<f64>();
        let mut best_cost = cost(&best);
        for mask in 1u64..(1u64 << rest.len()) {
            let flipped: Vec<usize> = (0..rest.len()).filter(|b| mask >> b & 1 == 1).map(|b| rest[b]).collect();
            let mut t = s.clone();
            for &j in &flipped {
                t.xor_assign(&self.col_vectors[j]);
            }
            if let Some(mut cand) = solve(&t) {
                cand.extend_from_slice(&flipped);
                let c = cost(&cand);
                if c < best_cost {
                    best_cost = c;
                    best = cand;
                }
            }
        }
        Ok(best)
    }

    pub fn decode(&self, syndrome: &BitVec) -> Result<Correction, DecodeError> {
        let start = Instant::now();
        if syndrome.len() != self.num_detectors {
            return Err(DecodeError::SyndromeLength { expected: self.num_detectors, got: syndrome.len() });
        }
        let mut observables = BitVec::zeros(self.num_observables);
        if syndrome.is_zero() {
            return Ok(Correction {
                observables,
                diagnostics: Diagnostics::BpOsd { iterations: 0, osd: false, weight: 0 },
                elapsed: start.elapsed(),
            });
        }
        let (hard, post, iterations) = self.bp(syndrome);
        let (cols, osd) = match hard {
            Some(h) => (h, false),
            None => (self.osd(syndrome, &post)?, true),
        };
        for &j in &cols {
            observables.xor_assign(&self.col_obs[j]);
        }
        Ok(Correction {
            observables,
            diagnostics: Diagnostics::BpOsd { iterations, osd, weight: cols.len() },
            elapsed: start.elapsed(),
        })
    }

    /// Columns (model indices) chosen for a syndrome; for tests and tools.
    pub fn explain(&self, syndrome: &BitVec) -> Result<Vec<usize>, DecodeError> {
        if syndrome.is_zero() {
            return Ok(Vec::new());
        }
        let (hard, post, _) = self.bp(syndrome);
        let cols = match hard {
            Some(h) => h,
            None => self.osd(syndrome, &post)?,
        };
        let mut out: Vec<usize> = cols.into_iter().map(|j| self.columns[j]).collect();
        out.sort_unstable();
        Ok(out)
    }
}

/// One-off decode; build a [`BpOsd`] to decode many shots.
pub fn bposd_decode(
    model: &DetectorErrorModel,
    syndrome: &BitVec,
    max_iters: usize,
    osd_order: usize,
) -> Result<Correction, DecodeError> {
    BpOsd::new(model, max_iters, osd_order).decode(syndrome)
}
