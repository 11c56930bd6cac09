//! Noisy memory-experiment circuits for the HF and HCF schedules.
//!
//! A circuit is: product-state preparation in the memory basis, a sequence
//! of steps each measuring every edge of one color in one two-qubit Pauli
//! basis, and a transversal readout. Detectors and observables are parities
//! of the global measurement record.

mod detectors;
mod io;
mod noise;
mod observables;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::anyon::{validate_schedule, Boson, Pauli};
use crate::lattice::{Color, HomologyBasis, LatticeError, Tiling};
use crate::stabsim::PauliString;

pub use detectors::{plaquette_inference_sets, Event, Inference};
pub use io::{emit, parse};
pub use noise::{Channel, NoiseKind, NoiseModel, NoiseSite};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    /// Three-Pauli schedule rXX, gYY, bZZ.
    Hf,
    /// Two-Pauli six-step schedule rXX, gZZ, bXX, rZZ, gXX, bZZ.
    Hcf,
}

impl Family {
    pub fn period(self) -> usize {
        match self {
            Family::Hf => 3,
            Family::Hcf => 6,
        }
    }

    /// The color and basis measured at step `t`.
    pub fn step(self, t: usize) -> (Color, Pauli) {
        use Color::*;
        use Pauli::*;
        const HF: [(Color, Pauli); 3] = [(Red, X), (Green, Y), (Blue, Z)];
        const HCF: [(Color, Pauli); 6] = [(Red, X), (Green, Z), (Blue, X), (Red, Z), (Green, X), (Blue, Z)];
        match self {
            Family::Hf => HF[t % 3],
            Family::Hcf => HCF[t % 6],
        }
    }

    pub fn bosons(self) -> Vec<Boson> {
        (0..self.period()).map(|t| {
            let (c, p) = self.step(t);
            Boson::new(c, p)
        }).collect()
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::Hf => "hf",
            Family::Hcf => "hcf",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = CircuitError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "hf" => Ok(Family::Hf),
            "hcf" => Ok(Family::Hcf),
            _ => Err(CircuitError::Config(format!("unknown family {s:?} (expected hf or hcf)"))),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CircuitError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("schedule fails the confinement rule: {0}")]
    Schedule(String),
    #[error("inference set for face {face} ({pauli}) at step {time} does not cover the plaquette")]
    Cover { face: usize, pauli: Pauli, time: usize },
    #[error("detector {0} is not deterministic under zero noise")]
    NonDeterministic(usize),
    #[error("observable {index}: representative anticommutes with a check at step {time}")]
    Anticommutes { index: usize, time: usize },
    #[error("observable {index}: final representative is not readable in the {basis} basis")]
    Unreadable { index: usize, basis: Pauli },
    #[error("observable {0}: empty loop")]
    EmptyLoop(usize),
    #[error("circuit file line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("{0}")]
    Config(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub color: Color,
    pub basis: Pauli,
    /// Edge ids measured this step, ascending.
    pub edges: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MeasKind {
    Check { edge: usize },
    Readout { qubit: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Measurement {
    /// Step index; readouts use the step count.
    pub time: usize,
    pub basis: Pauli,
    pub qubits: Vec<usize>,
    pub kind: MeasKind,
}

impl Measurement {
    pub fn operator(&self, n: usize) -> PauliString {
        PauliString::from_paulis(n, self.qubits.iter().map(|&q| (q, self.basis)))
    }
}

/// Where a detector's two compared inferences come from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Instant {
    Prep,
    /// Step index (for two-step inferences, the first of the two steps).
    Step(usize),
    Readout,
}

impl fmt::Display for Instant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Instant::Prep => f.write_str("P"),
            Instant::Step(t) => write!(f, "{t}"),
            Instant::Readout => f.write_str("R"),
        }
    }
}

/// What a detector watches: a plaquette operator, or a single check anchored
/// to the prep or readout.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Site {
    Face(usize),
    Edge(usize),
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Site::Face(i) => write!(f, "{i}"),
            Site::Edge(e) => write!(f, "e{e}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Detector {
    pub site: Site,
    pub color: Color,
    pub pauli: Pauli,
    pub first: Instant,
    pub second: Instant,
    /// Sorted measurement indices whose XOR (with `reference`) is the detector bit.
    pub outcomes: Vec<usize>,
    /// Noiseless parity of `outcomes`.
    pub reference: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Observable {
    pub loop_index: usize,
    pub basis: Pauli,
    /// Representative before each step, plus the final one (length steps + 1).
    /// Not serialized.
    pub support: Vec<PauliString>,
    pub outcomes: Vec<usize>,
    pub reference: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CircuitOptions {
    /// For HCF, keep plaquette streams of both Pauli types. Off by default:
    /// a memory experiment in basis `b` only needs the `b`-type streams, and
    /// mixing them lets Y faults hit four detectors.
    pub both_sectors: bool,
    /// For HF, compare every check of the first and last layers with the
    /// prep or readout when that layer is measured in the memory basis.
    /// Plaquette streams alone cannot tell those checks apart.
    pub check_anchors: bool,
}

impl Default for CircuitOptions {
    fn default() -> Self {
        CircuitOptions { both_sectors: false, check_anchors: true }
    }
}

#[derive(Clone, Debug)]
pub struct MeasurementCircuit {
    pub family: Family,
    pub num_qubits: usize,
    /// Preparation and readout basis.
    pub basis: Pauli,
    pub steps: Vec<Step>,
    pub measurements: Vec<Measurement>,
    pub noise: Vec<NoiseSite>,
    pub detectors: Vec<Detector>,
    pub observables: Vec<Observable>,
    /// `step_offsets[t]` is the first measurement index of step `t`; the last
    /// entry is where readouts start.
    pub step_offsets: Vec<usize>,
}

impl PartialEq for MeasurementCircuit {
    fn eq(&self, other: &Self) -> bool {
        self.family == other.family
            && self.num_qubits == other.num_qubits
            && self.basis == other.basis
            && self.steps == other.steps
            && self.measurements == other.measurements
            && self.noise == other.noise
            && self.detectors == other.detectors
            && self.observables.len() == other.observables.len()
            && self.observables.iter().zip(&other.observables).all(|(a, b)| {
                a.loop_index == b.loop_index && a.basis == b.basis && a.outcomes == b.outcomes && a.reference == b.reference
            })
    }
}

/// Steps for `periods` repetitions of the family's schedule.
pub fn build_schedule(family: Family, t: &Tiling, periods: usize) -> Result<Vec<Step>, CircuitError> {
    schedule(family, t, periods, 0..family.period() * periods)
}

/// Schedule of a memory experiment in `basis`.
///
/// HCF starts at the first phase whose closing layer is measured in `basis`
/// (phase 0 for Z, one step later for X). HF is rotated to open with the
/// layer measured in `basis` and closes with one more such layer, so both
/// time boundaries sit next to checks that commute with the prep and readout.
pub fn memory_schedule(family: Family, t: &Tiling, periods: usize, basis: Pauli) -> Result<Vec<Step>, CircuitError> {
    match family {
        Family::Hcf => {
            let len = family.period() * periods;
            let phase = (0..family.period()).find(|&s| family.step(s + len - 1).1 == basis).ok_or_else(|| {
                CircuitError::Config(format!("no HCF layer is measured in {basis}"))
            })?;
            schedule(family, t, periods, phase..phase + len)
        }
        Family::Hf => {
            let phase = (0..3).find(|&s| family.step(s).1 == basis).ok_or_else(|| {
                CircuitError::Config(format!("no HF layer is measured in {basis}"))
            })?;
            schedule(family, t, periods, phase..phase + 3 * periods + 1)
        }
    }
}

fn schedule(family: Family, t: &Tiling, periods: usize, range: std::ops::Range<usize>) -> Result<Vec<Step>, CircuitError> {
    if periods == 0 {
        return Err(CircuitError::Config("periods must be at least 1".into()));
    }
    let report = t.validate();
    if !report.is_ok() {
        return Err(LatticeError::Invalid(report).into());
    }
    let violations = validate_schedule(&family.bosons());
    if !violations.is_empty() {
        let msg: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
        return Err(CircuitError::Schedule(msg.join("; ")));
    }
    let by_color: Vec<Vec<usize>> = Color::ALL.iter().map(|&c| t.edges_of_color(c).collect()).collect();
    Ok(range
        .map(|s| {
            let (color, basis) = family.step(s);
            Step { color, basis, edges: by_color[color.index()].clone() }
        })
        .collect())
}

impl MeasurementCircuit {
    /// Noiseless memory experiment with detectors and observables attached.
    pub fn memory(
        t: &Tiling,
        homology: &HomologyBasis,
        family: Family,
        periods: usize,
        basis: Pauli,
        options: CircuitOptions,
    ) -> Result<Self, CircuitError> {
        if basis == Pauli::Y {
            return Err(CircuitError::Config("memory basis must be X or Z".into()));
        }
        // the HF logical representative only comes back to its starting
        // pattern every second period, and the readout needs that pattern
        if family == Family::Hf && periods % 2 == 1 {
            return Err(CircuitError::Config(format!("HF memory needs an even number of periods, got {periods}")));
        }
        let steps = memory_schedule(family, t, periods, basis)?;
        let mut c = Self::from_steps(t, family, basis, steps);
        detectors::attach_detectors(&mut c, t, options)?;
        observables::attach_observables(&mut c, t, homology)?;
        crate::stabsim::set_references(&mut c, 0x5eed)?;
        Ok(c)
    }

    /// Bare circuit: measurements only, no detectors, observables or noise.
    pub fn from_steps(t: &Tiling, family: Family, basis: Pauli, steps: Vec<Step>) -> Self {
        let n = t.num_vertices();
        let mut measurements = Vec::new();
        let mut step_offsets = Vec::with_capacity(steps.len() + 1);
        for (time, s) in steps.iter().enumerate() {
            step_offsets.push(measurements.len());
            for &e in &s.edges {
                let edge = t.edges[e];
                measurements.push(Measurement {
                    time,
                    basis: s.basis,
                    qubits: vec![edge.u, edge.v],
                    kind: MeasKind::Check { edge: e },
                });
            }
        }
        step_offsets.push(measurements.len());
        let end = steps.len();
        for q in 0..n {
            measurements.push(Measurement { time: end, basis, qubits: vec![q], kind: MeasKind::Readout { qubit: q } });
        }
        MeasurementCircuit {
            family,
            num_qubits: n,
            basis,
            steps,
            measurements,
            noise: Vec::new(),
            detectors: Vec::new(),
            observables: Vec::new(),
            step_offsets,
        }
    }

    pub fn num_steps(&self) -> usize {
        self.steps.len()
    }

    /// Measurement index range of step `t` (or the readout layer for `t == steps`).
    pub fn step_range(&self, t: usize) -> std::ops::Range<usize> {
        if t == self.steps.len() {
            self.step_offsets[t]..self.measurements.len()
        } else {
            self.step_offsets[t]..self.step_offsets[t + 1]
        }
    }

    /// Index of the check on `edge` at step `t`, if that step measures it.
    pub fn check_index(&self, t: usize, edge: usize) -> Option<usize> {
        let r = self.step_range(t);
        let edges = &self.steps[t].edges;
        edges.binary_search(&edge).ok().map(|k| r.start + k)
    }

    pub fn readout_index(&self, q: usize) -> usize {
        self.step_offsets[self.steps.len()] + q
    }

    /// Replace the noise sites with those of `model`.
    pub fn apply_noise(&mut self, model: &NoiseModel) {
        self.noise = noise::noise_sites(self, model);
    }

    pub fn with_noise(mut self, model: &NoiseModel) -> Self {
        self.apply_noise(model);
        self
    }
}
