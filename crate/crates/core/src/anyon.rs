//! The nine bosons of the color code and the schedule rule built on them.
//!
//! Bosons sit in a 3x3 table: rows are Pauli types, columns are colors. Two
//! distinct bosons in the same row or column braid trivially and fuse to the
//! third one of that line; any other pair fuses to a fermion.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::lattice::Color;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Pauli {
        Pauli::ALL[i % 3]
    }

    pub fn third(a: Pauli, b: Pauli) -> Pauli {
        debug_assert_ne!(a, b);
        Pauli::from_index(3 - a.index() - b.index())
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<Pauli> {
        match c.to_ascii_uppercase() {
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    /// `(x, z)` bits of the single-qubit operator.
    pub fn xz(self) -> (bool, bool) {
        match self {
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Boson {
    pub color: Color,
    pub pauli: Pauli,
}

impl Boson {
    pub const fn new(color: Color, pauli: Pauli) -> Self {
        Boson { color, pauli }
    }

    pub fn all() -> impl Iterator<Item = Boson> {
        Pauli::ALL.into_iter().flat_map(|p| Color::ALL.into_iter().map(move |c| Boson::new(c, p)))
    }

    /// Same row (Pauli) or same column (color), excluding equality.
    pub fn aligned(self, other: Boson) -> bool {
        self != other && (self.color == other.color || self.pauli == other.pauli)
    }

    /// Parse the two-letter form, e.g. `rx`.
    pub fn parse(s: &str) -> Option<Boson> {
        let mut it = s.chars();
        let c = Color::from_char(it.next()?)?;
        let p = Pauli::from_char(it.next()?)?;
        if it.next().is_some() {
            return None;
        }
        Some(Boson::new(c, p))
    }
}

impl fmt::Display for Boson {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.color.as_char(), self.pauli.as_char().to_ascii_lowercase())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Fusion {
    Vacuum,
    Boson(Boson),
    /// Fermionic composite of two bosons in different rows and columns.
    Fermion(Boson, Boson),
}

pub fn fuse(a: Boson, b: Boson) -> Fusion {
    if a == b {
        Fusion::Vacuum
    } else if a.color == b.color {
        Fusion::Boson(Boson::new(a.color, Pauli::third(a.pauli, b.pauli)))
    } else if a.pauli == b.pauli {
        Fusion::Boson(Boson::new(Color::third(a.color, b.color), a.pauli))
    } else {
        Fusion::Fermion(a.min(b), a.max(b))
    }
}

/// Braiding phase: `+1` for aligned bosons, `-1` otherwise.
pub fn monodromy(a: Boson, b: Boson) -> i8 {
    if a == b || a.aligned(b) {
        1
    } else {
        -1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Status {
    /// The condensed boson itself.
    Vacuum,
    Deconfined,
    Confined,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CondensationTable {
    pub condensed: Boson,
    pub status: Vec<(Boson, Status)>,
}

impl CondensationTable {
    pub fn of(&self, b: Boson) -> Status {
        self.status.iter().find(|(x, _)| *x == b).map(|(_, s)| *s).expect("all nine bosons present")
    }

    pub fn with(&self, s: Status) -> Vec<Boson> {
        self.status.iter().filter(|(_, x)| *x == s).map(|(b, _)| *b).collect()
    }
}

pub fn classify(condensed: Boson) -> CondensationTable {
    let status = Boson::all()
        .map(|b| {
            let s = if b == condensed {
                Status::Vacuum
            } else if b.aligned(condensed) {
                Status::Deconfined
            } else {
                Status::Confined
            };
            (b, s)
        })
        .collect();
    CondensationTable { condensed, status }
}

/// A transition `from -> to` that breaks the confinement rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ScheduleViolation {
    pub step: usize,
    pub from: Boson,
    pub to: Boson,
    pub status: Status,
}

impl fmt::Display for ScheduleViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (n, m) = (self.step, self.step + 1);
        match self.status {
            Status::Vacuum => write!(f, "step {n}->{m}: {} repeats the condensed boson", self.to),
            Status::Deconfined => {
                let why = if self.from.pauli == self.to.pauli { "same Pauli row" } else { "same color column" };
                write!(f, "step {n}->{m}: {} deconfined under {} ({why}), logical erasure risk", self.to, self.from)
            }
            Status::Confined => write!(f, "step {n}->{m}: ok"),
        }
    }
}

/// Check a cyclic boson sequence: each next boson must be confined under the
/// current one, i.e. differ in both color and Pauli.
pub fn validate_schedule(seq: &[Boson]) -> Vec<ScheduleViolation> {
    let n = seq.len();
    (0..n)
        .filter_map(|i| {
            let (from, to) = (seq[i], seq[(i + 1) % n]);
            let status = classify(from).of(to);
            (status != Status::Confined).then_some(ScheduleViolation { step: i, from, to, status })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn b(s: &str) -> Boson {
        Boson::parse(s).unwrap()
    }

    fn seq(s: &str) -> Vec<Boson> {
        s.split(',').map(|x| b(x.trim())).collect()
    }

    fn any_boson() -> impl Strategy<Value = Boson> {
        (0usize..3, 0usize..3).prop_map(|(c, p)| Boson::new(Color::from_index(c), Pauli::from_index(p)))
    }

    #[test]
    fn fusion_examples() {
        assert_eq!(fuse(b("rx"), b("ry")), Fusion::Boson(b("rz")));
        assert_eq!(fuse(b("gz"), b("gz")), Fusion::Vacuum);
        assert_eq!(fuse(b("gz"), b("bz")), Fusion::Boson(b("rz")));
        assert!(matches!(fuse(b("gx"), b("rz")), Fusion::Fermion(..)));
    }

    #[test]
    fn monodromy_examples() {
        assert_eq!(monodromy(b("rx"), b("ry")), 1);
        assert_eq!(monodromy(b("gz"), b("bz")), 1);
        assert_eq!(monodromy(b("gx"), b("rz")), -1);
    }

    #[test]
    fn classify_examples() {
        let t = classify(b("rx"));
        assert_eq!(t.with(Status::Vacuum), vec![b("rx")]);
        let mut d = t.with(Status::Deconfined);
        d.sort();
        let mut want = seq("ry,rz,gx,bx");
        want.sort();
        assert_eq!(d, want);
        let mut c = t.with(Status::Confined);
        c.sort();
        let mut want = seq("gy,gz,by,bz");
        want.sort();
        assert_eq!(c, want);

        let t = classify(b("bz"));
        let mut d = t.with(Status::Deconfined);
        d.sort();
        let mut want = seq("bx,by,rz,gz");
        want.sort();
        assert_eq!(d, want);
    }

    #[test]
    fn schedules() {
        assert!(validate_schedule(&seq("rx,gz,bx,rz,gx,bz")).is_empty());
        assert!(validate_schedule(&seq("rx,gy,bz")).is_empty());
        let v = validate_schedule(&seq("rx,gx,bz"));
        assert_eq!(v[0].step, 0);
        assert_eq!(v[0].status, Status::Deconfined);
        assert!(v[0].to_string().contains("gx deconfined under rx (same Pauli row)"));
    }

    proptest! {
        #[test]
        fn classification_counts(a in any_boson()) {
            let t = classify(a);
            prop_assert_eq!(t.with(Status::Vacuum).len(), 1);
            prop_assert_eq!(t.with(Status::Deconfined).len(), 4);
            prop_assert_eq!(t.with(Status::Confined).len(), 4);
        }

        #[test]
        fn monodromy_symmetric(a in any_boson(), c in any_boson()) {
            prop_assert_eq!(monodromy(a, c), monodromy(c, a));
        }

        #[test]
        fn fusion_commutes_and_inverts(a in any_boson(), c in any_boson()) {
            prop_assert_eq!(fuse(a, c), fuse(c, a));
            if let Fusion::Boson(x) = fuse(a, c) {
                prop_assert_eq!(fuse(a, x), Fusion::Boson(c));
            }
        }

        #[test]
        fn aligned_neighbours_are_rejected(s in proptest::collection::vec(any_boson(), 2..8)) {
            let bad = (0..s.len()).any(|i| {
                let (x, y) = (s[i], s[(i + 1) % s.len()]);
                x.color == y.color || x.pauli == y.pauli
            });
            prop_assert_eq!(!validate_schedule(&s).is_empty(), bad);
        }
    }
}
