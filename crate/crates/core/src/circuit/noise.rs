use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::anyon::Pauli;

use super::{CircuitError, MeasurementCircuit};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NoiseKind {
    /// Independent two-qubit depolarizing and outcome flip per parity measurement.
    Em3Ind,
    /// One of the 31 nontrivial (Pauli pair, flip) events per parity measurement.
    Em3Cor,
}

impl NoiseKind {
    pub fn name(self) -> &'static str {
        match self {
            NoiseKind::Em3Ind => "em3-ind",
            NoiseKind::Em3Cor => "em3-cor",
        }
    }
}

impl fmt::Display for NoiseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NoiseKind {
    type Err = CircuitError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "em3-ind" | "em3ind" | "ind" => Ok(NoiseKind::Em3Ind),
            "em3-cor" | "em3cor" | "cor" => Ok(NoiseKind::Em3Cor),
            _ => Err(CircuitError::Config(format!("unknown noise model {s:?} (expected em3-ind or em3-cor)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub kind: NoiseKind,
    pub p: f64,
}

impl NoiseModel {
    pub fn new(kind: NoiseKind, p: f64) -> Result<Self, CircuitError> {
        if !(0.0..=1.0).contains(&p) {
            return Err(CircuitError::Config(format!("noise strength {p} is outside [0, 1]")));
        }
        Ok(NoiseModel { kind, p })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Channel {
    /// Wrong preparation: `pauli` applied right after the prologue.
    PrepFlip { qubit: usize, pauli: Pauli },
    Depolarize1 { qubit: usize },
    /// Uniform over the 15 nontrivial two-qubit Paulis.
    Depolarize2 { qubits: [usize; 2] },
    MeasFlip { measurement: usize },
    /// Uniform over the 31 nontrivial elements of `{I,X,Y,Z}^2 x {keep, flip}`.
    Correlated { qubits: [usize; 2], measurement: usize },
}

impl Channel {
    pub fn name(&self) -> &'static str {
        match self {
            Channel::PrepFlip { .. } => "PREP_FLIP",
            Channel::Depolarize1 { .. } => "DEPOLARIZE1",
            Channel::Depolarize2 { .. } => "DEPOLARIZE2",
            Channel::MeasFlip { .. } => "MEAS_FLIP",
            Channel::Correlated { .. } => "CORRELATED",
        }
    }

    pub fn num_outcomes(&self) -> usize {
        match self {
            Channel::PrepFlip { .. } | Channel::MeasFlip { .. } => 1,
            Channel::Depolarize1 { .. } => 3,
            Channel::Depolarize2 { .. } => 15,
            Channel::Correlated { .. } => 31,
        }
    }
}

/// One nontrivial branch of a channel.
#[derive(Clone, Debug, PartialEq)]
pub struct FaultOutcome {
    pub paulis: Vec<(usize, Pauli)>,
    pub flip: Option<usize>,
    pub p: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseSite {
    /// Paulis act just before step `time`.
    pub time: usize,
    pub channel: Channel,
    /// Total probability that the channel acts nontrivially.
    pub p: f64,
}

fn pauli_or_identity(k: usize) -> Option<Pauli> {
    (k > 0).then(|| Pauli::from_index(k - 1))
}

impl NoiseSite {
    pub fn outcomes(&self) -> Vec<FaultOutcome> {
        let each = self.p / self.channel.num_outcomes() as f64;
        match self.channel {
            Channel::PrepFlip { qubit, pauli } => {
                vec![FaultOutcome { paulis: vec![(qubit, pauli)], flip: None, p: each }]
            }
            Channel::Depolarize1 { qubit } => Pauli::ALL
                .iter()
                .map(|&p| FaultOutcome { paulis: vec![(qubit, p)], flip: None, p: each })
                .collect(),
            Channel::MeasFlip { measurement } => {
                vec![FaultOutcome { paulis: vec![], flip: Some(measurement), p: each }]
            }
            Channel::Depolarize2 { qubits } => pair_paulis(qubits)
                .filter(|ps| !ps.is_empty())
                .map(|paulis| FaultOutcome { paulis, flip: None, p: each })
                .collect(),
            Channel::Correlated { qubits, measurement } => [false, true]
                .iter()
                .flat_map(|&flip| {
                    pair_paulis(qubits).filter_map(move |paulis| {
                        (flip || !paulis.is_empty()).then(|| FaultOutcome {
                            paulis,
                            flip: flip.then_some(measurement),
                            p: each,
                        })
                    })
                })
                .collect(),
        }
    }
}

fn pair_paulis(qubits: [usize; 2]) -> impl Iterator<Item = Vec<(usize, Pauli)>> {
    (0..16).map(move |k| {
        let mut v = Vec::with_capacity(2);
        if let Some(p) = pauli_or_identity(k / 4) {
            v.push((qubits[0], p));
        }
        if let Some(p) = pauli_or_identity(k % 4) {
            v.push((qubits[1], p));
        }
        v
    })
}

pub(super) fn noise_sites(c: &MeasurementCircuit, model: &NoiseModel) -> Vec<NoiseSite> {
    let p = model.p;
    let mut out = Vec::new();
    if p == 0.0 {
        return out;
    }
    let prep_p = match model.kind {
        NoiseKind::Em3Ind => p,
        NoiseKind::Em3Cor => p / 2.0,
    };
    let flip = match c.basis {
        Pauli::Z => Pauli::X,
        _ => Pauli::Z,
    };
    for q in 0..c.num_qubits {
        out.push(NoiseSite { time: 0, channel: Channel::PrepFlip { qubit: q, pauli: flip }, p: prep_p });
    }
    for t in 0..c.steps.len() {
        let mut busy = vec![false; c.num_qubits];
        for m in c.step_range(t) {
            let qs = &c.measurements[m].qubits;
            let qubits = [qs[0], qs[1]];
            busy[qs[0]] = true;
            busy[qs[1]] = true;
            match model.kind {
                NoiseKind::Em3Ind => {
                    out.push(NoiseSite { time: t, channel: Channel::Depolarize2 { qubits }, p });
                    out.push(NoiseSite { time: t, channel: Channel::MeasFlip { measurement: m }, p });
                }
                NoiseKind::Em3Cor => {
                    out.push(NoiseSite { time: t, channel: Channel::Correlated { qubits, measurement: m }, p });
                }
            }
        }
        for (q, _) in busy.iter().enumerate().filter(|(_, b)| !**b) {
            out.push(NoiseSite { time: t, channel: Channel::Depolarize1 { qubit: q }, p });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{CircuitOptions, Family};
    use crate::lattice::{build_base_lattice, homology_basis};

    fn circuit() -> MeasurementCircuit {
        let t = build_base_lattice("hcf16").unwrap();
        let h = homology_basis(&t).unwrap();
        MeasurementCircuit::memory(&t, &h, Family::Hcf, 8, Pauli::Z, CircuitOptions::default()).unwrap()
    }

    #[test]
    fn zero_noise_has_no_sites() {
        let c = circuit().with_noise(&NoiseModel::new(NoiseKind::Em3Ind, 0.0).unwrap());
        assert!(c.noise.is_empty());
    }

    #[test]
    fn em3_ind_site_counts() {
        let c = circuit().with_noise(&NoiseModel::new(NoiseKind::Em3Ind, 1e-3).unwrap());
        for t in 0..48 {
            let at: Vec<&NoiseSite> = c.noise.iter().filter(|s| s.time == t && !matches!(s.channel, Channel::PrepFlip { .. })).collect();
            assert_eq!(at.iter().filter(|s| matches!(s.channel, Channel::Depolarize2 { .. })).count(), 8);
            assert_eq!(at.iter().filter(|s| matches!(s.channel, Channel::MeasFlip { .. })).count(), 8);
            assert_eq!(at.iter().filter(|s| matches!(s.channel, Channel::Depolarize1 { .. })).count(), 0);
        }
    }

    #[test]
    fn channel_probabilities_sum() {
        let p = 3e-3;
        let c = circuit().with_noise(&NoiseModel::new(NoiseKind::Em3Cor, p).unwrap());
        let site = c.noise.iter().find(|s| matches!(s.channel, Channel::Correlated { .. })).unwrap();
        let outs = site.outcomes();
        assert_eq!(outs.len(), 31);
        assert!(outs.iter().all(|o| (o.p - p / 31.0).abs() < 1e-18));
        assert!((outs.iter().map(|o| o.p).sum::<f64>() - p).abs() < 1e-15);
        let d2 = NoiseSite { time: 0, channel: Channel::Depolarize2 { qubits: [0, 1] }, p };
        assert_eq!(d2.outcomes().len(), 15);
        let prep = c.noise.iter().find(|s| matches!(s.channel, Channel::PrepFlip { .. })).unwrap();
        assert_eq!(prep.p, p / 2.0);
    }
}
