//! Syndrome decoders: minimum-weight perfect matching over the detector
//! graph, and BP+OSD over the full detector/mechanism incidence.

pub mod blossom;
mod bposd;
mod graph;
mod mwpm;

use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::circuit::MeasurementCircuit;
use crate::dem::{to_matching_graph_with_circuit, DemError, DetectorErrorModel};
use crate::f2::BitVec;

pub use blossom::max_weight_matching;
pub use bposd::{bposd_decode, BpOsd, MIN_SUM_SCALE};
pub use graph::{shortest_paths, GraphEdge, MatchingGraph, PathTree, WeightRule, WEIGHT_SCALE};
pub use mwpm::{mwpm_decode, DistanceTable, Matcher, DENSE_LIMIT};

/// Detector bits of one shot.
pub type Syndrome = BitVec;

#[derive(Debug, thiserror::Error)]
pub enum DecodeError {
    #[error("syndrome has {got} bits, model has {expected} detectors")]
    SyndromeLength { expected: usize, got: usize },
    #[error("defect at detector {detector} has no partner and no route to the boundary")]
    Unmatchable { detector: usize },
    #[error("syndrome is not in the column space of the check matrix")]
    Undecodable,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Diagnostics {
    Matching {
        defects: usize,
        cost: f64,
        /// Cost in fixed-point units.
        icost: i64,
    },
    BpOsd {
        iterations: usize,
        osd: bool,
        /// Number of mechanisms in the returned explanation.
        weight: usize,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Correction {
    /// Predicted observable flips.
    pub observables: BitVec,
    pub diagnostics: Diagnostics,
    pub elapsed: Duration,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DecoderKind {
    Mwpm,
    BpOsd,
}

impl DecoderKind {
    pub fn name(self) -> &'static str {
        match self {
            DecoderKind::Mwpm => "mwpm",
            DecoderKind::BpOsd => "bposd",
        }
    }
}

impl fmt::Display for DecoderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DecoderKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "mwpm" => Ok(DecoderKind::Mwpm),
            "bposd" | "bp+osd" | "bp-osd" => Ok(DecoderKind::BpOsd),
            _ => Err(format!("unknown decoder {s:?} (expected mwpm or bposd)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecoderConfig {
    pub kind: DecoderKind,
    pub bp_iters: usize,
    pub osd_order: usize,
    pub weight_rule: WeightRule,
}

impl Default for DecoderConfig {
    fn default() -> Self {
        DecoderConfig { kind: DecoderKind::Mwpm, bp_iters: 30, osd_order: 1, weight_rule: WeightRule::LogOdds }
    }
}

impl DecoderConfig {
    pub fn with_kind(kind: DecoderKind) -> Self {
        DecoderConfig { kind, ..Self::default() }
    }
}

/// Decoder state that is built once per model and shared by all workers.
pub enum PreparedDecoder {
    Mwpm(MatchingGraph),
    BpOsd(BpOsd),
}

impl PreparedDecoder {
    /// `circuit` is the one `model` was compiled from; the matching graph
    /// uses it to split hyperedges.
    pub fn new(model: &DetectorErrorModel, circuit: &MeasurementCircuit, config: &DecoderConfig) -> Result<Self, DemError> {
        Ok(match config.kind {
            DecoderKind::Mwpm => {
                PreparedDecoder::Mwpm(to_matching_graph_with_circuit(model, circuit, config.weight_rule)?)
            }
            DecoderKind::BpOsd => PreparedDecoder::BpOsd(BpOsd::new(model, config.bp_iters, config.osd_order)),
        })
    }

    pub fn worker(&self) -> DecoderWorker<'_> {
        match self {
            PreparedDecoder::Mwpm(g) => DecoderWorker::Mwpm(Matcher::new(g)),
            PreparedDecoder::BpOsd(b) => DecoderWorker::BpOsd(b),
        }
    }
}

/// Per-thread handle with private scratch space.
pub enum DecoderWorker<'a> {
    Mwpm(Matcher<'a>),
    BpOsd(&'a BpOsd),
}

impl DecoderWorker<'_> {
    pub fn decode(&mut self, syndrome: &Syndrome) -> Result<Correction, DecodeError> {
        match self {
            DecoderWorker::Mwpm(m) => m.decode(syndrome),
            DecoderWorker::BpOsd(b) => b.decode(syndrome),
        }
    }
}
