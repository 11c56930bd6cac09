//! Shared fixtures for the criterion benches.

use floqsim::circuit::CircuitOptions;
use floqsim::decoders::{PreparedDecoder, Syndrome};
use floqsim::experiments::ShotSampler;
use floqsim::lattice::homology_basis;
use floqsim::{
    build_lattice, compile, DecoderConfig, DecoderKind, DetectorErrorModel, Family, MeasurementCircuit, NoiseKind,
    NoiseModel, Pauli,
};

/// A noisy memory circuit, its model and a batch of sampled syndromes.
pub struct Fixture {
    pub n: usize,
    pub circuit: MeasurementCircuit,
    pub model: DetectorErrorModel,
    pub syndromes: Vec<Syndrome>,
}

impl Fixture {
    pub fn memory(family: Family, ell: usize, periods: usize, p: f64, shots: usize) -> Self {
        let t = build_lattice("hcf16", ell).expect("lattice");
        let h = homology_basis(&t).expect("homology");
        let circuit = MeasurementCircuit::memory(&t, &h, family, periods, Pauli::Z, CircuitOptions::default())
            .expect("circuit")
            .with_noise(&NoiseModel::new(NoiseKind::Em3Ind, p).expect("noise"));
        let model = compile(&circuit);
        let sampler = ShotSampler::new(&model, 1);
        let syndromes = (0..shots as u64).map(|i| sampler.shot(i).0).collect();
        Fixture { n: t.num_vertices(), circuit, model, syndromes }
    }

    pub fn decoder(&self, kind: DecoderKind) -> PreparedDecoder {
        PreparedDecoder::new(&self.model, &self.circuit, &DecoderConfig::with_kind(kind)).expect("decoder")
    }
}
