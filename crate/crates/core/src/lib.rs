//! Floquet-code workbench on three-colorable hyperbolic tilings.
//!
//! The pipeline is lattice -> measurement circuit -> detector error model ->
//! decoder, with Monte Carlo experiments on top.

pub mod anyon;
pub mod circuit;
pub mod decoders;
pub mod dem;
pub mod experiments;
pub mod f2;
pub mod lattice;
pub mod stabsim;

pub use anyon::Pauli;
pub use circuit::{Family, MeasurementCircuit, NoiseKind, NoiseModel};
pub use decoders::{Correction, DecoderConfig, DecoderKind, MatchingGraph};
pub use dem::{compile, DetectorErrorModel, FaultMechanism};
pub use experiments::{logical_error_rate, ExperimentConfig, ExperimentResult};
pub use lattice::{build_base_lattice, build_lattice, Color, Tiling};
