//! Monte Carlo memory experiments: logical error rates, threshold
//! crossings, decode timing fits and report files.

mod report;
mod sample;
mod threshold;
mod timing;

use std::time::Instant;

use rayon::prelude::*;
use rayon::ThreadPool;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::anyon::Pauli;
use crate::circuit::{CircuitError, CircuitOptions, Family, MeasurementCircuit, NoiseKind, NoiseModel};
use crate::decoders::{DecoderConfig, PreparedDecoder};
use crate::dem::{compile, DemError};
use crate::f2::BitVec;
use crate::lattice::{build_lattice, homology_basis, LatticeError};

pub use report::{git_describe, report, write_csv, write_histogram_csv, write_json, write_timing_csv, ReportFormat};
pub use sample::{sample_shots, ShotSampler};
pub use threshold::{threshold_estimate, threshold_sweep, Curve, CurvePoint, NoCrossing, PairCrossing, ThresholdReport};
pub use timing::{fit_power_law, timing_benchmark, PowerLawFit, TimingRow, TimingTable};

/// Caps the worker pool when set.
pub const THREADS_ENV: &str = "FLOQSIM_THREADS";

/// Step count of the memory experiments in the comparison runs.
pub const MEMORY_STEPS: usize = 48;

#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error("invalid experiment configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Dem(#[from] DemError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub family: Family,
    /// Shipped lattice name or lattice file path.
    pub lattice: String,
    pub ell: usize,
    pub periods: usize,
    pub noise: NoiseKind,
    pub p: Vec<f64>,
    pub decoder: DecoderConfig,
    pub shots: usize,
    pub seed: u64,
    pub basis: Pauli,
}

impl ExperimentConfig {
    /// A 48-step Z-memory run on the shipped `hcf16` family at one `p`.
    pub fn memory(family: Family, ell: usize, p: f64) -> Self {
        ExperimentConfig {
            family,
            lattice: "hcf16".into(),
            ell,
            periods: MEMORY_STEPS / family.period(),
            noise: NoiseKind::Em3Ind,
            p: vec![p],
            decoder: DecoderConfig::default(),
            shots: 10_000,
            seed: 0,
            basis: Pauli::Z,
        }
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        let bad = |msg: String| Err(ExperimentError::Config(msg));
        if self.shots == 0 {
            return bad("shots must be at least 1".into());
        }
        if self.periods == 0 {
            return bad("periods must be at least 1".into());
        }
        if self.p.is_empty() {
            return bad("empty p grid".into());
        }
        // p = 0 is allowed as a sanity point; it gives an empty model.
        if let Some(p) = self.p.iter().find(|p| !(0.0..1.0).contains(*p)) {
            return bad(format!("p = {p} is outside [0, 1)"));
        }
        if self.basis == Pauli::Y {
            return bad("memory basis must be X or Z".into());
        }
        Ok(())
    }

    /// SHA-256 of the JSON form, in hex.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        format!("{:x}", Sha256::digest(bytes))
    }
}

/// Per-shot wall-clock decode time in seconds.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TimingStats {
    pub min: f64,
    pub median: f64,
    pub mean: f64,
    pub max: f64,
}

impl TimingStats {
    pub fn from_samples(samples: &mut [f64]) -> Self {
        if samples.is_empty() {
            return TimingStats::default();
        }
        samples.sort_by(f64::total_cmp);
        let n = samples.len();
        let median = if n % 2 == 1 { samples[n / 2] } else { 0.5 * (samples[n / 2 - 1] + samples[n / 2]) };
        TimingStats { min: samples[0], median, mean: samples.iter().sum::<f64>() / n as f64, max: samples[n - 1] }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointResult {
    pub p: f64,
    pub shots: usize,
    /// Shots where the prediction differs from the actual flips on any
    /// observable; decoder errors count as failures too.
    pub failures: usize,
    pub p_l: f64,
    pub std_err: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub observable_failures: Vec<usize>,
    pub decode_errors: usize,
    pub num_detectors: usize,
    pub num_mechanisms: usize,
    pub timing: TimingStats,
}

impl PointResult {
    fn new(p: f64, shots: usize, failures: usize) -> Self {
        let p_l = failures as f64 / shots as f64;
        let (ci_low, ci_high) = confidence_interval(failures, shots);
        PointResult {
            p,
            shots,
            failures,
            p_l,
            std_err: (p_l * (1.0 - p_l) / shots as f64).sqrt(),
            ci_low,
            ci_high,
            observable_failures: Vec::new(),
            decode_errors: 0,
            num_detectors: 0,
            num_mechanisms: 0,
            timing: TimingStats::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub num_qubits: usize,
    pub num_observables: usize,
    pub points: Vec<PointResult>,
}

/// 95% interval: normal approximation, or Wilson below 20 failures.
pub fn confidence_interval(failures: usize, shots: usize) -> (f64, f64) {
    const Z: f64 = 1.959963984540054;
    let n = shots as f64;
    let ph = failures as f64 / n;
    if failures < 20 {
        let z2 = Z * Z;
        let centre = (ph + z2 / (2.0 * n)) / (1.0 + z2 / n);
        let half = Z / (1.0 + z2 / n) * (ph * (1.0 - ph) / n + z2 / (4.0 * n * n)).sqrt();
        let lo = if failures == 0 { 0.0 } else { (centre - half).max(0.0) };
        (lo, (centre + half).min(1.0))
    } else {
        let se = (ph * (1.0 - ph) / n).sqrt();
        ((ph - Z * se).max(0.0), (ph + Z * se).min(1.0))
    }
}

/// Rayon pool sized by `FLOQSIM_THREADS`, or rayon's default when unset.
pub fn worker_pool() -> Result<ThreadPool, ExperimentError> {
    let threads = match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Some(n),
            _ => return Err(ExperimentError::Config(format!("{THREADS_ENV}={v:?} is not a positive integer"))),
        },
        Err(_) => None,
    };
    worker_pool_with(threads)
}

pub fn worker_pool_with(threads: Option<usize>) -> Result<ThreadPool, ExperimentError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| ExperimentError::Config(format!("thread pool: {e}")))
}

/// Noiseless memory circuit for a config, with its qubit count.
pub fn build_circuit(config: &ExperimentConfig) -> Result<(MeasurementCircuit, usize), ExperimentError> {
    let t = build_lattice(&config.lattice, config.ell)?;
    let h = homology_basis(&t)?;
    let c = MeasurementCircuit::memory(&t, &h, config.family, config.periods, config.basis, CircuitOptions::default())?;
    Ok((c, t.num_vertices()))
}

pub fn logical_error_rate(config: &ExperimentConfig) -> Result<ExperimentResult, ExperimentError> {
    logical_error_rate_with(config, &worker_pool()?)
}

/// Lattice, circuit, model, sampled shots, decoding, tallies; once per `p`.
pub fn logical_error_rate_with(config: &ExperimentConfig, pool: &ThreadPool) -> Result<ExperimentResult, ExperimentError> {
    config.validate()?;
    let (base, num_qubits) = build_circuit(config)?;
    let k = base.observables.len();
    let mut points = Vec::with_capacity(config.p.len());
    for &p in &config.p {
        let circuit = base.clone().with_noise(&NoiseModel::new(config.noise, p)?);
        let model = compile(&circuit);
        let decoder = PreparedDecoder::new(&model, &circuit, &config.decoder)?;
        let sampler = ShotSampler::new(&model, config.seed);
        let outcomes: Vec<(Option<BitVec>, f64)> = pool.install(|| {
            (0..config.shots as u64)
                .into_par_iter()
                .map_init(
                    || decoder.worker(),
                    |worker, i| {
                        let (syndrome, actual) = sampler.shot(i);
                        let start = Instant::now();
                        let result = worker.decode(&syndrome);
                        let secs = start.elapsed().as_secs_f64();
                        let mismatch = result.ok().map(|c| {
                            let mut m = c.observables;
                            m.xor_assign(&actual);
                            m
                        });
                        (mismatch, secs)
                    },
                )
                .collect()
        });
        let mut observable_failures = vec![0usize; k];
        let mut failures = 0;
        let mut decode_errors = 0;
        let mut times = Vec::with_capacity(outcomes.len());
        for (mismatch, secs) in outcomes {
            times.push(secs);
            match mismatch {
                None => {
                    decode_errors += 1;
                    failures += 1;
                }
                Some(m) => {
                    if !m.is_zero() {
                        failures += 1;
                    }
                    for o in m.ones() {
                        observable_failures[o] += 1;
                    }
                }
            }
        }
        let mut point = PointResult::new(p, config.shots, failures);
        point.observable_failures = observable_failures;
        point.decode_errors = decode_errors;
        point.num_detectors = model.num_detectors;
        point.num_mechanisms = model.mechanisms.len();
        point.timing = TimingStats::from_samples(&mut times);
        points.push(point);
    }
    Ok(ExperimentResult { config: config.clone(), num_qubits, num_observables: k, points })
}
