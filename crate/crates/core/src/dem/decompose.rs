use std::collections::{BTreeMap, HashMap};

use crate::anyon::Pauli;
use crate::circuit::MeasurementCircuit;

use super::{detector_streams, sym_diff, DemError, DetectorErrorModel, Provenance, Signatures};

/// One graphlike piece of a decomposed mechanism.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    /// One or two detectors.
    pub detectors: Vec<usize>,
    pub observables: Vec<usize>,
    /// The weight-1/2 mechanism with this signature, or `None` for a piece
    /// produced by one of the fallbacks.
    pub source: Option<usize>,
}

/// A mechanism written as a disjoint union of graphlike components.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub mechanism: usize,
    pub components: Vec<Component>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DecompositionTable {
    /// One entry per mechanism that flips at least one detector.
    pub entries: Vec<Decomposition>,
}

impl DecompositionTable {
    /// Entries that needed more than one component.
    pub fn hyperedges(&self) -> impl Iterator<Item = &Decomposition> {
        self.entries.iter().filter(|d| d.components.len() > 1)
    }

    /// Entries that used a fallback piece.
    pub fn remnant_count(&self) -> usize {
        self.entries.iter().filter(|d| d.components.iter().any(|c| c.source.is_none())).count()
    }
}

/// Search budget per hyperedge; exhausting it counts as "no cover".
const MAX_NODES: usize = 200_000;

struct Search<'a> {
    model: &'a DetectorErrorModel,
    by_detector: &'a [Vec<usize>],
    target_obs: &'a [usize],
    best: Option<(f64, Vec<usize>)>,
    chosen: Vec<usize>,
    nodes: usize,
}

impl Search<'_> {
    fn run(&mut self, remaining: &[usize], obs: Vec<usize>, score: f64) {
        self.nodes += 1;
        if self.nodes > MAX_NODES {
            return;
        }
        let Some(&d) = remaining.first() else {
            if obs == self.target_obs && self.best.as_ref().map_or(true, |(s, _)| score > *s) {
                self.best = Some((score, self.chosen.clone()));
            }
            return;
        };
        for &k in &self.by_detector[d] {
            let m = &self.model.mechanisms[k];
            if !m.detectors.iter().all(|x| remaining.binary_search(x).is_ok()) {
                continue;
            }
            let rest: Vec<usize> = remaining.iter().copied().filter(|x| !m.detectors.contains(x)).collect();
            self.chosen.push(k);
            self.run(&rest, sym_diff(&obs, &m.observables), score + m.p.ln());
            self.chosen.pop();
        }
    }
}

fn existing(model: &DetectorErrorModel, k: usize) -> Component {
    let m = &model.mechanisms[k];
    Component { detectors: m.detectors.clone(), observables: m.observables.clone(), source: Some(k) }
}

/// Express each mechanism flipping three or more detectors as a disjoint
/// union of the model's own weight-1/2 detector sets whose observable flips
/// XOR to the mechanism's. Among valid covers the one with the largest
/// product of component probabilities wins; ties keep the first found.
pub fn decompose_hyperedges(model: &DetectorErrorModel) -> Result<DecompositionTable, DemError> {
    decompose(model, |_, _| None)
}

/// As [`decompose_hyperedges`], but a mechanism without an exact cover is
/// split by detector stream instead of failing. `streams[d]` labels the
/// stream of detector `d`; within a stream, detectors are paired in index
/// order and a leftover becomes a boundary half-edge. Any observable
/// mismatch goes on the first remnant.
pub fn decompose_with_streams(model: &DetectorErrorModel, streams: &[usize]) -> Result<DecompositionTable, DemError> {
    decompose(model, |by_set, k| Some(split_by_stream(model, by_set, k, streams)))
}

/// As [`decompose_hyperedges`], with two fallbacks for mechanisms without
/// an exact cover. First the fault itself is split: each single-qubit Pauli
/// and the measurement flip of one merged branch become separate pieces,
/// with `Y` split into `X` and `Z` where that is what keeps every piece at
/// one or two detectors. Pieces sharing a detector are then summed, so the
/// result partitions the mechanism's detectors. Only if no branch splits
/// that way does the per-stream rule of [`decompose_with_streams`] apply.
pub fn decompose_with_circuit(model: &DetectorErrorModel, c: &MeasurementCircuit) -> Result<DecompositionTable, DemError> {
    let sig = Signatures::new(c);
    let streams = detector_streams(c);
    decompose(model, |by_set, k| {
        let m = &model.mechanisms[k];
        let split = m.provenance.iter().find_map(|prov| split_by_fault(model, by_set, c, &sig, k, prov));
        Some(split.unwrap_or_else(|| split_by_stream(model, by_set, k, &streams)))
    })
}

fn decompose<F>(model: &DetectorErrorModel, mut fallback: F) -> Result<DecompositionTable, DemError>
where
    F: FnMut(&HashMap<&[usize], usize>, usize) -> Option<Vec<Component>>,
{
    let mut by_detector = vec![Vec::new(); model.num_detectors];
    let mut by_set: HashMap<&[usize], usize> = HashMap::new();
    for (k, m) in model.mechanisms.iter().enumerate() {
        if matches!(m.weight(), 1 | 2) {
            for &d in &m.detectors {
                by_detector[d].push(k);
            }
            let best = by_set.entry(&m.detectors).or_insert(k);
            if model.mechanisms[*best].p < m.p {
                *best = k;
            }
        }
    }
    let mut entries = Vec::new();
    for (k, m) in model.mechanisms.iter().enumerate() {
        let components = match m.weight() {
            0 => continue,
            1 | 2 => vec![existing(model, k)],
            _ => {
                let mut s = Search {
                    model,
                    by_detector: &by_detector,
                    target_obs: &m.observables,
                    best: None,
                    chosen: Vec::new(),
                    nodes: 0,
                };
                s.run(&m.detectors, Vec::new(), 0.0);
                match s.best {
                    Some((_, ks)) => ks.into_iter().map(|j| existing(model, j)).collect(),
                    None => match fallback(&by_set, k) {
                        Some(parts) => parts,
                        None => return Err(DemError::NoDecomposition { index: k, detectors: m.detectors.clone() }),
                    },
                }
            }
        };
        entries.push(Decomposition { mechanism: k, components });
    }
    Ok(DecompositionTable { entries })
}

/// A piece whose detector set matches an existing mechanism with the same
/// observables is attributed to it.
fn piece(model: &DetectorErrorModel, by_set: &HashMap<&[usize], usize>, detectors: Vec<usize>, observables: Vec<usize>) -> Component {
    let source = by_set.get(detectors.as_slice()).copied().filter(|&j| model.mechanisms[j].observables == observables);
    Component { detectors, observables, source }
}

fn weight(sig: &Signatures, s: &[usize]) -> usize {
    s.partition_point(|&i| i < sig.num_detectors)
}

/// Signatures of single-qubit Paulis on `q` just before step `time` whose
/// product is `p`, each flipping at most two detectors: `p` itself, or the
/// other two Paulis when `p` alone flips more.
fn expand_pauli(sig: &Signatures, time: usize, q: usize, p: Pauli) -> Option<Vec<Vec<usize>>> {
    let whole = sig.of(time, &[(q, p)], None);
    if weight(sig, &whole) <= 2 {
        return Some(vec![whole]);
    }
    let [a, b] = match p {
        Pauli::X => [Pauli::Y, Pauli::Z],
        Pauli::Y => [Pauli::X, Pauli::Z],
        Pauli::Z => [Pauli::X, Pauli::Y],
    };
    let (sa, sb) = (sig.of(time, &[(q, a)], None), sig.of(time, &[(q, b)], None));
    (weight(sig, &sa) <= 2 && weight(sig, &sb) <= 2).then(|| vec![sa, sb])
}

/// A flipped two-qubit check outcome has the signature of a single-qubit
/// Pauli that anticommutes with the check, applied just before and just
/// after its step. Both halves are expanded with [`expand_pauli`]; the
/// choice with the fewest pieces wins.
fn expand_flip(c: &MeasurementCircuit, sig: &Signatures, f: usize) -> Option<Vec<Vec<usize>>> {
    let m = &c.measurements[f];
    if m.qubits.len() != 2 {
        return None;
    }
    let mut best: Option<Vec<Vec<usize>>> = None;
    for &q in &m.qubits {
        for p in [Pauli::X, Pauli::Y, Pauli::Z] {
            if p == m.basis {
                continue;
            }
            let (Some(mut before), Some(after)) = (expand_pauli(sig, m.time, q, p), expand_pauli(sig, m.time + 1, q, p)) else {
                continue;
            };
            before.extend(after);
            if best.as_ref().map_or(true, |b| before.len() < b.len()) {
                best = Some(before);
            }
        }
    }
    best
}

fn split_by_fault(
    model: &DetectorErrorModel,
    by_set: &HashMap<&[usize], usize>,
    c: &MeasurementCircuit,
    sig: &Signatures,
    k: usize,
    prov: &Provenance,
) -> Option<Vec<Component>> {
    let mut raw: Vec<Vec<usize>> = Vec::new();
    for &(q, p) in &prov.paulis {
        raw.extend(expand_pauli(sig, prov.time, q, p)?);
    }
    if let Some(f) = prov.flip {
        let whole = sig.of(prov.time, &[], Some(f));
        if weight(sig, &whole) <= 2 {
            raw.push(whole);
        } else {
            raw.extend(expand_flip(c, sig, f)?);
        }
    }
    let mut parts: Vec<Component> = Vec::new();
    for s in raw {
        let (detectors, observables) = sig.split(s);
        if detectors.len() > 2 {
            return None;
        }
        if !detectors.is_empty() {
            parts.push(piece(model, by_set, detectors, observables));
        }
    }
    // Pieces that share a detector are merged into their sum, so the final
    // pieces partition the mechanism's detectors and no edge of the
    // explanation passes through a detector the fault leaves untouched.
    // Merged pieces of one or two detectors stay valid; empty ones vanish
    // and their observables are picked up by the mismatch below.
    while let Some((i, j)) = shared_pair(&parts) {
        let b = parts.swap_remove(j);
        let a = parts.swap_remove(i);
        let detectors = sym_diff(&a.detectors, &b.detectors);
        if !detectors.is_empty() {
            parts.push(piece(model, by_set, detectors, sym_diff(&a.observables, &b.observables)));
        }
    }
    parts.sort_by(|a, b| a.detectors.cmp(&b.detectors));
    let mut parts = parts;
    let mut net: Vec<usize> = Vec::new();
    for c in &parts {
        net = sym_diff(&net, &c.detectors);
    }
    if parts.is_empty() || net != model.mechanisms[k].detectors {
        return None;
    }
    let mismatch = parts.iter().fold(model.mechanisms[k].observables.clone(), |acc, c| sym_diff(&acc, &c.observables));
    if !mismatch.is_empty() {
        let c = &mut parts[0];
        c.observables = sym_diff(&c.observables, &mismatch);
        c.source = None;
    }
    Some(parts)
}

/// Indices `i < j` of two pieces with a detector in common.
fn shared_pair(parts: &[Component]) -> Option<(usize, usize)> {
    (0..parts.len()).find_map(|j| {
        (0..j).find(|&i| parts[i].detectors.iter().any(|d| parts[j].detectors.contains(d))).map(|i| (i, j))
    })
}

fn split_by_stream(
    model: &DetectorErrorModel,
    by_set: &HashMap<&[usize], usize>,
    k: usize,
    streams: &[usize],
) -> Vec<Component> {
    let m = &model.mechanisms[k];
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &d in &m.detectors {
        groups.entry(streams[d]).or_default().push(d);
    }
    let mut parts: Vec<Component> = groups
        .into_values()
        .flat_map(|g| g.chunks(2).map(|c| c.to_vec()).collect::<Vec<_>>())
        .map(|detectors| match by_set.get(detectors.as_slice()) {
            Some(&j) => existing(model, j),
            None => Component { detectors, observables: Vec::new(), source: None },
        })
        .collect();
    parts.sort_by(|a, b| a.detectors.cmp(&b.detectors));
    let mismatch = parts.iter().fold(m.observables.clone(), |acc, c| sym_diff(&acc, &c.observables));
    if !mismatch.is_empty() {
        let slot = parts.iter().position(|c| c.source.is_none()).unwrap_or(0);
        let c = &mut parts[slot];
        c.observables = sym_diff(&c.observables, &mismatch);
        c.source = None;
    }
    parts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dem::FaultMechanism;

    fn mech(p: f64, d: &[usize], o: &[usize]) -> FaultMechanism {
        FaultMechanism { p, detectors: d.to_vec(), observables: o.to_vec(), provenance: Vec::new() }
    }

    fn sources(d: &Decomposition) -> Vec<Option<usize>> {
        d.components.iter().map(|c| c.source).collect()
    }

    fn model(ms: Vec<FaultMechanism>) -> DetectorErrorModel {
        DetectorErrorModel { num_detectors: 12, num_observables: 2, mechanisms: ms }
    }

    #[test]
    fn four_set_splits_into_present_pairs() {
        let m = model(vec![
            mech(0.01, &[0, 2, 6, 8], &[]),
            mech(0.01, &[0, 6], &[]),
            mech(0.01, &[2, 8], &[]),
            mech(0.001, &[0, 2], &[]),
        ]);
        let t = decompose_hyperedges(&m).unwrap();
        let d = t.entries.iter().find(|d| d.mechanism == 0).unwrap();
        assert_eq!(sources(d), vec![Some(1), Some(2)]);
        assert_eq!(t.hyperedges().count(), 1);
    }

    #[test]
    fn graphlike_mechanisms_decompose_to_themselves() {
        let m = model(vec![mech(0.01, &[3], &[1]), mech(0.01, &[3, 4], &[])]);
        let t = decompose_hyperedges(&m).unwrap();
        assert_eq!(t.entries.len(), 2);
        assert_eq!(sources(&t.entries[0]), vec![Some(0)]);
        assert_eq!(sources(&t.entries[1]), vec![Some(1)]);
        assert_eq!(t.hyperedges().count(), 0);
    }

    #[test]
    fn observables_must_match() {
        let m = model(vec![
            mech(0.01, &[1, 2, 3], &[0]),
            mech(0.05, &[1, 2], &[]),
            mech(0.05, &[3], &[]),
            mech(0.01, &[1], &[0]),
            mech(0.01, &[2, 3], &[]),
        ]);
        let t = decompose_hyperedges(&m).unwrap();
        assert_eq!(sources(&t.entries[0]), vec![Some(3), Some(4)]);
    }

    #[test]
    fn missing_cover_is_an_error() {
        let m = model(vec![mech(0.01, &[1, 2, 3], &[]), mech(0.05, &[1, 2], &[])]);
        assert!(matches!(decompose_hyperedges(&m), Err(DemError::NoDecomposition { index: 0, .. })));
    }

    #[test]
    fn stream_fallback_pairs_within_streams() {
        let m = model(vec![mech(0.01, &[2, 4, 8, 10], &[1]), mech(0.02, &[2, 4], &[]), mech(0.02, &[8], &[])]);
        // detectors 2 and 8 share a stream, as do 4 and 10
        let streams = [0, 0, 5, 0, 7, 0, 0, 0, 5, 0, 7];
        let t = decompose_with_streams(&m, &streams).unwrap();
        let d = &t.entries[0];
        let sets: Vec<&[usize]> = d.components.iter().map(|c| c.detectors.as_slice()).collect();
        assert_eq!(sets, vec![&[2, 8][..], &[4, 10][..]]);
        assert_eq!(d.components[0].observables, vec![1]);
        assert!(d.components[1].observables.is_empty());
        assert_eq!(t.remnant_count(), 1);
        assert!(decompose_hyperedges(&m).is_err());
    }
}
