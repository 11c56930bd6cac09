//! Detector error models.
//!
//! Every nontrivial branch of every noise site is pushed through a Pauli
//! frame to get the detectors and observables it flips. Branches with equal
//! flip sets are merged into one mechanism.

mod decompose;
mod io;

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::Serialize;

use crate::anyon::Pauli;
use crate::circuit::{MeasurementCircuit, Site};
use crate::decoders::{MatchingGraph, WeightRule};

pub use decompose::{decompose_hyperedges, decompose_with_circuit, decompose_with_streams, Component, Decomposition, DecompositionTable};
pub use io::{emit, parse};

#[derive(Debug, thiserror::Error)]
pub enum DemError {
    #[error("mechanism {index} (detectors {detectors:?}) has no exact cover by weight-1/2 mechanisms")]
    NoDecomposition { index: usize, detectors: Vec<usize> },
    #[error("DEM file line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Where one merged branch came from.
#[derive(Clone, Debug, PartialEq)]
pub struct Provenance {
    /// The fault acts just before this step.
    pub time: usize,
    /// Index into the circuit's noise sites.
    pub site: usize,
    pub paulis: Vec<(usize, Pauli)>,
    pub flip: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct FaultMechanism {
    pub p: f64,
    /// Sorted, deduplicated.
    pub detectors: Vec<usize>,
    pub observables: Vec<usize>,
    /// Empty for models read back from a file.
    pub provenance: Vec<Provenance>,
}

/// Provenance is not part of the file format, so equality ignores it.
impl PartialEq for FaultMechanism {
    fn eq(&self, other: &Self) -> bool {
        self.p.to_bits() == other.p.to_bits()
            && self.detectors == other.detectors
            && self.observables == other.observables
    }
}

impl FaultMechanism {
    pub fn weight(&self) -> usize {
        self.detectors.len()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DetectorErrorModel {
    pub num_detectors: usize,
    pub num_observables: usize,
    /// Sorted by (detectors, observables).
    pub mechanisms: Vec<FaultMechanism>,
}

/// `p1(1-p2) + p2(1-p1)`: probability that exactly one of two independent events fires.
pub fn xor_probability(p1: f64, p2: f64) -> f64 {
    p1 * (1.0 - p2) + p2 * (1.0 - p1)
}

/// Symmetric difference of two sorted lists.
pub(crate) fn sym_diff(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Flip signatures in one index space: detectors first, then observables
/// shifted by the detector count.
struct Signatures {
    num_detectors: usize,
    /// Detectors/observables reading each measurement.
    membership: Vec<Vec<usize>>,
    /// `suffix[q][k][t]`: flips from the X (k = 0) or Z (k = 1) component of
    /// a Pauli on qubit `q` acting just before step `t`.
    suffix: Vec<[Vec<Vec<usize>>; 2]>,
}

impl Signatures {
    fn new(c: &MeasurementCircuit) -> Self {
        let nd = c.detectors.len();
        let mut membership = vec![Vec::new(); c.measurements.len()];
        for (i, d) in c.detectors.iter().enumerate() {
            for &m in &d.outcomes {
                membership[m].push(i);
            }
        }
        for (k, o) in c.observables.iter().enumerate() {
            for &m in &o.outcomes {
                membership[m].push(nd + k);
            }
        }
        for v in &mut membership {
            v.sort_unstable();
        }
        let steps = c.num_steps();
        let mut touching: Vec<Vec<Vec<usize>>> = vec![vec![Vec::new(); steps + 1]; c.num_qubits];
        for (m, meas) in c.measurements.iter().enumerate() {
            for &q in &meas.qubits {
                touching[q][meas.time].push(m);
            }
        }
        let suffix = touching
            .iter()
            .map(|by_time| {
                [Pauli::X, Pauli::Z].map(|component| {
                    let mut table = vec![Vec::new(); steps + 1];
                    let mut acc: Vec<usize> = Vec::new();
                    for t in (0..=steps).rev() {
                        for &m in &by_time[t] {
                            if c.measurements[m].basis != component {
                                acc = sym_diff(&acc, &membership[m]);
                            }
                        }
                        table[t] = acc.clone();
                    }
                    table
                })
            })
            .collect();
        Signatures { num_detectors: nd, membership, suffix }
    }

    fn of(&self, time: usize, paulis: &[(usize, Pauli)], flip: Option<usize>) -> Vec<usize> {
        let mut s = Vec::new();
        for &(q, p) in paulis {
            let (x, z) = p.xz();
            if x {
                s = sym_diff(&s, &self.suffix[q][0][time]);
            }
            if z {
                s = sym_diff(&s, &self.suffix[q][1][time]);
            }
        }
        if let Some(m) = flip {
            s = sym_diff(&s, &self.membership[m]);
        }
        s
    }

    fn split(&self, s: Vec<usize>) -> (Vec<usize>, Vec<usize>) {
        let cut = s.partition_point(|&i| i < self.num_detectors);
        let obs = s[cut..].iter().map(|&i| i - self.num_detectors).collect();
        let mut det = s;
        det.truncate(cut);
        (det, obs)
    }
}

/// Detectors and observables flipped by Pauli faults `paulis` acting just
/// before step `time`, plus an optional flipped measurement.
pub fn signature(
    c: &MeasurementCircuit,
    time: usize,
    paulis: &[(usize, Pauli)],
    flip: Option<usize>,
) -> (Vec<usize>, Vec<usize>) {
    let sig = Signatures::new(c);
    sig.split(sig.of(time, paulis, flip))
}

/// Stream label of every detector: detectors comparing inferences of the
/// same plaquette operator share a label.
/// Check anchors each get their own label.
pub fn detector_streams(c: &MeasurementCircuit) -> Vec<usize> {
    let faces = c.detectors.iter().filter_map(|d| match d.site {
        Site::Face(f) => Some(f + 1),
        Site::Edge(_) => None,
    });
    let offset = 3 * faces.max().unwrap_or(0);
    c.detectors
        .iter()
        .map(|d| match d.site {
            Site::Face(f) => 3 * f + d.pauli.index(),
            Site::Edge(e) => offset + e,
        })
        .collect()
}

/// Compile the circuit's noise sites into a merged error model.
///
/// Branches that flip nothing are dropped; branches that flip only
/// observables are kept (they are undetectable logical faults).
pub fn compile(c: &MeasurementCircuit) -> DetectorErrorModel {
    let sig = Signatures::new(c);
    let raw: Vec<Vec<(Vec<usize>, f64, Provenance)>> = c
        .noise
        .par_iter()
        .enumerate()
        .map(|(site, ns)| {
            ns.outcomes()
                .into_iter()
                .filter_map(|o| {
                    let s = sig.of(ns.time, &o.paulis, o.flip);
                    (!s.is_empty()).then(|| {
                        let prov = Provenance { time: ns.time, site, paulis: o.paulis, flip: o.flip };
                        (s, o.p, prov)
                    })
                })
                .collect()
        })
        .collect();

    let mut index: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut merged: Vec<(Vec<usize>, f64, Vec<Provenance>)> = Vec::new();
    for (s, p, prov) in raw.into_iter().flatten() {
        match index.get(&s) {
            Some(&i) => {
                merged[i].1 = xor_probability(merged[i].1, p);
                merged[i].2.push(prov);
            }
            None => {
                index.insert(s.clone(), merged.len());
                merged.push((s, p, vec![prov]));
            }
        }
    }
    let mut mechanisms: Vec<FaultMechanism> = merged
        .into_iter()
        .filter(|(_, p, _)| *p > 0.0)
        .map(|(s, p, provenance)| {
            let (detectors, observables) = sig.split(s);
            FaultMechanism { p, detectors, observables, provenance }
        })
        .collect();
    mechanisms.sort_by(|a, b| (&a.detectors, &a.observables).cmp(&(&b.detectors, &b.observables)));
    DetectorErrorModel { num_detectors: c.detectors.len(), num_observables: c.observables.len(), mechanisms }
}

/// Matching graph from an exactly decomposable model.
pub fn to_matching_graph(model: &DetectorErrorModel, rule: WeightRule) -> Result<MatchingGraph, DemError> {
    Ok(MatchingGraph::build(model, &decompose_hyperedges(model)?, rule))
}

/// Matching graph that falls back to per-stream remnants where no exact
/// cover exists.
pub fn to_matching_graph_with_streams(
    model: &DetectorErrorModel,
    streams: &[usize],
    rule: WeightRule,
) -> Result<MatchingGraph, DemError> {
    Ok(MatchingGraph::build(model, &decompose_with_streams(model, streams)?, rule))
}

/// Matching graph using the circuit-aware fallbacks of
/// [`decompose_with_circuit`].
pub fn to_matching_graph_with_circuit(
    model: &DetectorErrorModel,
    c: &MeasurementCircuit,
    rule: WeightRule,
) -> Result<MatchingGraph, DemError> {
    Ok(MatchingGraph::build(model, &decompose_with_circuit(model, c)?, rule))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HistogramRow {
    pub w: usize,
    pub count: usize,
    pub percent: f64,
}

impl DetectorErrorModel {
    /// Distinct mechanisms by number of flipped detectors.
    pub fn weight_histogram(&self) -> Vec<HistogramRow> {
        histogram(self.mechanisms.iter().map(|m| (m.weight(), 1)))
    }

    /// The same, counting each merged branch separately.
    pub fn raw_weight_histogram(&self) -> Vec<HistogramRow> {
        histogram(self.mechanisms.iter().map(|m| (m.weight(), m.provenance.len().max(1))))
    }

    /// Mechanisms that flip an observable but no detector.
    pub fn undetectable(&self) -> impl Iterator<Item = &FaultMechanism> {
        self.mechanisms.iter().filter(|m| m.detectors.is_empty() && !m.observables.is_empty())
    }

    pub fn max_weight(&self) -> usize {
        self.mechanisms.iter().map(|m| m.weight()).max().unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.mechanisms.is_empty()
    }
}

fn histogram(items: impl Iterator<Item = (usize, usize)>) -> Vec<HistogramRow> {
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for (w, k) in items {
        *counts.entry(w).or_default() += k;
    }
    let total: usize = counts.values().sum();
    counts
        .into_iter()
        .map(|(w, count)| HistogramRow { w, count, percent: 100.0 * count as f64 / total as f64 })
        .collect()
}
