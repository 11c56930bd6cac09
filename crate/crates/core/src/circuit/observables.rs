use crate::anyon::Pauli;
use crate::lattice::{Color, HomologyBasis, Loop, Tiling};
use crate::stabsim::PauliString;

use super::{CircuitError, Family, MeasurementCircuit, Observable};

/// Track one logical representative along loop `gamma`.
///
/// The start is `basis` on the endpoints of the loop's `start` colored edges,
/// which the preparation stabilizes. Before each step the representative must
/// commute with every check of that step; afterwards the measured checks on
/// the loop are multiplied in (HCF: only checks in the memory basis, HF: all of
/// them) and their outcomes join the observable.
fn track(
    c: &MeasurementCircuit,
    t: &Tiling,
    gamma: &Loop,
    start: Color,
    index: usize,
) -> Result<Observable, CircuitError> {
    let n = t.num_vertices();
    let mut ops = Vec::new();
    for &e in &gamma.edges {
        if t.edges[e].color == start {
            ops.push((t.edges[e].u, c.basis));
            ops.push((t.edges[e].v, c.basis));
        }
    }
    let mut rep = PauliString::from_paulis(n, ops);
    let mut support = Vec::with_capacity(c.steps.len() + 1);
    let mut outcomes = Vec::new();
    let loop_edges = |color: Color| gamma.edges.iter().copied().filter(move |&e| t.edges[e].color == color);
    for (s, step) in c.steps.iter().enumerate() {
        support.push(rep.clone());
        for &e in &step.edges {
            let edge = t.edges[e];
            let m = PauliString::from_paulis(n, [(edge.u, step.basis), (edge.v, step.basis)]);
            if !m.commutes(&rep) {
                return Err(CircuitError::Anticommutes { index, time: s });
            }
        }
        let multiply = match c.family {
            Family::Hcf => step.basis == c.basis,
            Family::Hf => true,
        };
        if multiply {
            for e in loop_edges(step.color) {
                let edge = t.edges[e];
                rep.mul_single(edge.u, step.basis);
                rep.mul_single(edge.v, step.basis);
                outcomes.push(c.check_index(s, e).expect("loop edge measured"));
            }
        }
    }
    support.push(rep.clone());
    match rep.uniform_type() {
        Some(p) if p == c.basis => {}
        None if rep.is_identity() => {}
        _ => return Err(CircuitError::Unreadable { index, basis: c.basis }),
    }
    outcomes.extend(rep.support().into_iter().map(|q| c.readout_index(q)));
    outcomes.sort_unstable();
    Ok(Observable { loop_index: index, basis: c.basis, support, outcomes, reference: false })
}

pub(super) fn attach_observables(
    c: &mut MeasurementCircuit,
    t: &Tiling,
    homology: &HomologyBasis,
) -> Result<(), CircuitError> {
    let preferred = match c.basis {
        Pauli::X => [Color::Blue, Color::Red, Color::Green],
        _ => [Color::Red, Color::Green, Color::Blue],
    };
    let mut obs = Vec::with_capacity(homology.loops.len());
    for (i, gamma) in homology.loops.iter().enumerate() {
        if gamma.is_empty() {
            return Err(CircuitError::EmptyLoop(i));
        }
        let mut last_err = None;
        let mut found = None;
        for &start in &preferred {
            match track(c, t, gamma, start, i) {
                Ok(o) => {
                    found = Some(o);
                    break;
                }
                Err(e) => last_err = Some(e),
            }
        }
        match found {
            Some(o) => obs.push(o),
            None => return Err(last_err.unwrap()),
        }
    }
    c.observables = obs;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::CircuitOptions;
    use crate::lattice::{build_base_lattice, homology_basis};

    #[test]
    fn empty_loop_is_rejected() {
        let t = build_base_lattice("hcf16").unwrap();
        let mut h = homology_basis(&t).unwrap();
        h.loops[0] = Loop { vertices: vec![], edges: vec![] };
        let err = MeasurementCircuit::memory(&t, &h, Family::Hcf, 1, Pauli::Z, CircuitOptions::default());
        assert!(matches!(err, Err(CircuitError::EmptyLoop(0))));
    }

    #[test]
    fn hcf_pattern_returns_after_six_steps() {
        let t = build_base_lattice("hcf16").unwrap();
        let h = homology_basis(&t).unwrap();
        for b in [Pauli::Z, Pauli::X] {
            let c = MeasurementCircuit::memory(&t, &h, Family::Hcf, 2, b, CircuitOptions::default()).unwrap();
            for o in &c.observables {
                assert_eq!(o.support[6], o.support[0]);
                assert_eq!(o.support[12], o.support[0]);
                assert!((1..6).any(|k| o.support[k] != o.support[0]));
                assert!(o.support.iter().all(|s| s.uniform_type() == Some(b)));
            }
        }
    }
}
