//! Stabilizer tableau for Pauli-product measurements, and Pauli frames.
//!
//! The circuits here contain nothing but preparations, Pauli-product
//! measurements and Pauli faults, so the tableau supports exactly those.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::anyon::Pauli;
use crate::circuit::{CircuitError, MeasurementCircuit};
use crate::f2::BitVec;

/// Unsigned Pauli operator on `n` qubits in symplectic form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    pub x: BitVec,
    pub z: BitVec,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        PauliString { x: BitVec::zeros(n), z: BitVec::zeros(n) }
    }

    pub fn from_paulis(n: usize, ops: impl IntoIterator<Item = (usize, Pauli)>) -> Self {
        let mut s = PauliString::identity(n);
        for (q, p) in ops {
            s.mul_single(q, p);
        }
        s
    }

    pub fn num_qubits(&self) -> usize {
        self.x.len()
    }

    pub fn get(&self, q: usize) -> Option<Pauli> {
        match (self.x.get(q), self.z.get(q)) {
            (false, false) => None,
            (true, false) => Some(Pauli::X),
            (true, true) => Some(Pauli::Y),
            (false, true) => Some(Pauli::Z),
        }
    }

    /// Multiply by a single-qubit Pauli, ignoring phase.
    pub fn mul_single(&mut self, q: usize, p: Pauli) {
        let (x, z) = p.xz();
        if x {
            self.x.toggle(q);
        }
        if z {
            self.z.toggle(q);
        }
    }

    /// Multiply by another string, ignoring phase.
    pub fn mul_assign(&mut self, other: &PauliString) {
        self.x.xor_assign(&other.x);
        self.z.xor_assign(&other.z);
    }

    pub fn commutes(&self, other: &PauliString) -> bool {
        self.x.dot(&other.z) == self.z.dot(&other.x)
    }

    pub fn is_identity(&self) -> bool {
        self.x.is_zero() && self.z.is_zero()
    }

    pub fn support(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self.x.ones().chain(self.z.ones()).collect();
        s.sort_unstable();
        s.dedup();
        s
    }

    /// The single Pauli type used on every supported qubit, if there is one.
    pub fn uniform_type(&self) -> Option<Pauli> {
        let mut kind = None;
        for q in self.support() {
            let p = self.get(q).unwrap();
            match kind {
                None => kind = Some(p),
                Some(k) if k != p => return None,
                _ => {}
            }
        }
        kind
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = (0..self.num_qubits()).map(|q| self.get(q).map_or('_', Pauli::as_char)).collect();
        write!(f, "{s}")
    }
}

// Exponent of i picked up by multiplying single-qubit Paulis a * b.
#[inline]
fn phase_exponent(x1: bool, z1: bool, x2: bool, z2: bool) -> i32 {
    match (x1, z1) {
        (false, false) => 0,
        (true, true) => z2 as i32 - x2 as i32,
        (true, false) => z2 as i32 * (2 * x2 as i32 - 1),
        (false, true) => x2 as i32 * (1 - 2 * z2 as i32),
    }
}

#[derive(Clone, Debug)]
struct Row {
    p: PauliString,
    sign: bool,
}

impl Row {
    // self <- self * other with exact sign bookkeeping
    fn mul_assign(&mut self, other: &Row) {
        let mut e = 2 * self.sign as i32 + 2 * other.sign as i32;
        let overlap_words = self
            .p
            .x
            .words()
            .iter()
            .zip(self.p.z.words())
            .zip(other.p.x.words().iter().zip(other.p.z.words()))
            .map(|((a, b), (c, d))| (a | b) & (c | d));
        for (w, word) in overlap_words.enumerate() {
            let mut rest = word;
            while rest != 0 {
                let q = w * 64 + rest.trailing_zeros() as usize;
                rest &= rest - 1;
                e += phase_exponent(self.p.x.get(q), self.p.z.get(q), other.p.x.get(q), other.p.z.get(q));
            }
        }
        self.sign = e.rem_euclid(4) == 2;
        self.p.mul_assign(&other.p);
    }
}

/// Aaronson-Gottesman tableau of a pure `n`-qubit stabilizer state.
#[derive(Clone, Debug)]
pub struct Tableau {
    n: usize,
    destab: Vec<Row>,
    stab: Vec<Row>,
}

impl Tableau {
    /// Product state with every qubit in the `+1` eigenstate of `basis`.
    pub fn product_state(n: usize, basis: Pauli) -> Self {
        let conj = match basis {
            Pauli::Z => Pauli::X,
            _ => Pauli::Z,
        };
        let stab = (0..n).map(|q| Row { p: PauliString::from_paulis(n, [(q, basis)]), sign: false }).collect();
        let destab = (0..n).map(|q| Row { p: PauliString::from_paulis(n, [(q, conj)]), sign: false }).collect();
        Tableau { n, destab, stab }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    /// Apply a Pauli operator to the state (flips anticommuting generator signs).
    pub fn apply_pauli(&mut self, e: &PauliString) {
        for r in self.stab.iter_mut().chain(self.destab.iter_mut()) {
            if !r.p.commutes(e) {
                r.sign = !r.sign;
            }
        }
    }

    /// `Some(outcome)` when `±p` is in the stabilizer group.
    pub fn peek(&self, p: &PauliString) -> Option<bool> {
        if self.stab.iter().any(|r| !r.p.commutes(p)) {
            return None;
        }
        let mut acc = Row { p: PauliString::identity(self.n), sign: false };
        for (d, s) in self.destab.iter().zip(&self.stab) {
            if !d.p.commutes(p) {
                acc.mul_assign(s);
            }
        }
        debug_assert_eq!(acc.p, *p);
        Some(acc.sign)
    }

    /// Measure the Hermitian Pauli product `p`; outcome `true` means eigenvalue `-1`.
    pub fn measure<R: Rng + ?Sized>(&mut self, p: &PauliString, rng: &mut R) -> bool {
        assert!(!p.is_identity(), "cannot measure the identity");
        let Some(k) = self.stab.iter().position(|r| !r.p.commutes(p)) else {
            return self.peek(p).expect("commuting operator is in the group");
        };
        let pivot = self.stab[k].clone();
        for i in 0..self.n {
            if i != k && !self.stab[i].p.commutes(p) {
                self.stab[i].mul_assign(&pivot);
            }
            if !self.destab[i].p.commutes(p) && i != k {
                self.destab[i].mul_assign(&pivot);
            }
        }
        let outcome: bool = rng.gen();
        self.destab[k] = pivot;
        self.stab[k] = Row { p: p.clone(), sign: outcome };
        outcome
    }
}

/// Accumulated Pauli error, carried unchanged through Pauli measurements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PauliFrame {
    pub pauli: PauliString,
}

impl PauliFrame {
    pub fn new(n: usize) -> Self {
        PauliFrame { pauli: PauliString::identity(n) }
    }

    pub fn inject(&mut self, e: &PauliString) {
        self.pauli.mul_assign(e);
    }

    /// Whether a measurement of `m` reports a flipped outcome under this frame.
    pub fn flips(&self, m: &PauliString) -> bool {
        !self.pauli.commutes(m)
    }
}

/// Run the noiseless circuit on a tableau, applying `faults` (each acting just
/// before the given step; the step count means before readout). Returns every
/// measurement outcome.
pub fn simulate<R: Rng + ?Sized>(
    c: &MeasurementCircuit,
    faults: &[(usize, PauliString)],
    rng: &mut R,
) -> Vec<bool> {
    let n = c.num_qubits;
    let mut tab = Tableau::product_state(n, c.basis);
    let mut out = Vec::with_capacity(c.measurements.len());
    for t in 0..=c.steps.len() {
        for (ft, e) in faults {
            if *ft == t {
                tab.apply_pauli(e);
            }
        }
        for m in c.step_range(t) {
            out.push(tab.measure(&c.measurements[m].operator(n), rng));
        }
    }
    out
}

fn parity(outcomes: &[bool], idx: &[usize]) -> bool {
    idx.iter().fold(false, |acc, &i| acc ^ outcomes[i])
}

/// Detector and observable parities of one shot, relative to their references.
pub fn syndrome_of(c: &MeasurementCircuit, outcomes: &[bool]) -> (Vec<bool>, Vec<bool>) {
    let d = c.detectors.iter().map(|d| parity(outcomes, &d.outcomes) ^ d.reference).collect();
    let o = c.observables.iter().map(|o| parity(outcomes, &o.outcomes) ^ o.reference).collect();
    (d, o)
}

/// A detector or observable whose noiseless parity varied between runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Nondeterminism {
    Detector(usize),
    Observable(usize),
}

/// Run the noiseless circuit `runs` times with independent random outcomes
/// and report every detector or observable whose parity is not constant (or
/// differs from its recorded reference).
pub fn check_detector_determinism(c: &MeasurementCircuit, runs: usize, seed: u64) -> Vec<Nondeterminism> {
    let mut bad = Vec::new();
    for r in 0..runs.max(1) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(r as u64));
        let out = simulate(c, &[], &mut rng);
        let (d, o) = syndrome_of(c, &out);
        for (i, &x) in d.iter().enumerate() {
            if x && !bad.contains(&Nondeterminism::Detector(i)) {
                bad.push(Nondeterminism::Detector(i));
            }
        }
        for (i, &x) in o.iter().enumerate() {
            if x && !bad.contains(&Nondeterminism::Observable(i)) {
                bad.push(Nondeterminism::Observable(i));
            }
        }
    }
    bad.sort_by_key(|b| match b {
        Nondeterminism::Detector(i) => (0, *i),
        Nondeterminism::Observable(i) => (1, *i),
    });
    bad
}

/// Record noiseless reference parities, then verify determinism over 8 runs.
pub fn set_references(c: &mut MeasurementCircuit, seed: u64) -> Result<(), CircuitError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let out = simulate(c, &[], &mut rng);
    for d in &mut c.detectors {
        d.reference = parity(&out, &d.outcomes);
    }
    for o in &mut c.observables {
        o.reference = parity(&out, &o.outcomes);
    }
    match check_detector_determinism(c, 8, seed ^ 0x9e37_79b9) .first() {
        None => Ok(()),
        Some(Nondeterminism::Detector(i)) => Err(CircuitError::NonDeterministic(*i)),
        Some(Nondeterminism::Observable(i)) => Err(CircuitError::Unreadable { index: *i, basis: c.basis }),
    }
}

/// Outcome flips caused by Pauli `fault` acting just before step `time`.
pub fn frame_propagate(c: &MeasurementCircuit, time: usize, fault: &PauliString) -> BitVec {
    let mut frame = PauliFrame::new(c.num_qubits);
    frame.inject(fault);
    let mut flips = BitVec::zeros(c.measurements.len());
    for t in time..=c.steps.len() {
        for m in c.step_range(t) {
            let meas = &c.measurements[m];
            // only the measured qubits matter, so skip building the full operator
            let anti = meas.qubits.iter().fold(false, |acc, &q| {
                acc ^ frame.pauli.get(q).is_some_and(|p| p != meas.basis)
            });
            if anti {
                flips.set(m, true);
            }
        }
    }
    flips
}
