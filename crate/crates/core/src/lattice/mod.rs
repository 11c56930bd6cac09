//! Three-colorable trivalent tilings of closed surfaces.
//!
//! Tilings are built as duals of oriented, three-colored triangle complexes.
//! The same route gives the shipped genus-2 `{8,3}` lattice, a torus fixture
//! and the semi-hyperbolic refinement.

mod complex;
mod homology;
mod io;
mod tiling;

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

pub use complex::{hcf16, honeycomb_torus, refine, TriangleComplex};
pub use homology::{homology_basis, HomologyBasis, Loop};
pub use io::{emit, parse};
pub use tiling::{genus, Edge, Face, Tiling, ValidationReport, Violation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Color {
    Red,
    Green,
    Blue,
}

impl Color {
    pub const ALL: [Color; 3] = [Color::Red, Color::Green, Color::Blue];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Color {
        Color::ALL[i % 3]
    }

    /// The color distinct from both `a` and `b`. Requires `a != b`.
    pub fn third(a: Color, b: Color) -> Color {
        debug_assert_ne!(a, b);
        Color::from_index(3 - a.index() - b.index())
    }

    pub fn as_char(self) -> char {
        match self {
            Color::Red => 'r',
            Color::Green => 'g',
            Color::Blue => 'b',
        }
    }

    pub fn from_char(c: char) -> Option<Color> {
        match c {
            'r' => Some(Color::Red),
            'g' => Some(Color::Green),
            'b' => Some(Color::Blue),
            _ => None,
        }
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Color::Red => "red",
            Color::Green => "green",
            Color::Blue => "blue",
        };
        f.write_str(s)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum LatticeError {
    #[error("invalid tiling parameters: p={p}, q={q}, |E|={num_edges} give no non-negative integer genus")]
    InvalidParameters { p: usize, q: usize, num_edges: usize },
    #[error("unknown lattice identifier {0:?}")]
    UnknownLattice(String),
    #[error("lattice file line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("malformed lattice: {0}")]
    Malformed(String),
    #[error("tiling invariant violated:\n{0}")]
    Invalid(ValidationReport),
    #[error("internal consistency error: {0}")]
    Inconsistent(String),
    #[error("homology basis has {found} independent classes, expected {expected}")]
    HomologyFailure { found: usize, expected: usize },
    #[error("refinement requires a base tiling with refinement_level 1 (got {0})")]
    NotBase(usize),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

const HCF16_FILE: &str = include_str!("../../data/hcf16.lattice");

/// Resolve a shipped lattice name or a lattice file path.
///
/// Shipped names: `hcf16` (the genus-2 `{8,3}` lattice on 16 qubits) and
/// `torus18` (a 3x3 honeycomb torus used as a genus-1 fixture).
pub fn build_base_lattice(name: &str) -> Result<Tiling, LatticeError> {
    match name {
        "hcf16" => parse(HCF16_FILE),
        "torus18" => honeycomb_torus(3),
        _ => {
            let path = Path::new(name);
            if !path.exists() {
                return Err(LatticeError::UnknownLattice(name.to_string()));
            }
            parse(&std::fs::read_to_string(path)?)
        }
    }
}

/// Shipped lattice name plus refinement level, the usual entry point.
pub fn build_lattice(name: &str, ell: usize) -> Result<Tiling, LatticeError> {
    refine(&build_base_lattice(name)?, ell)
}
