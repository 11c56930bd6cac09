use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::circuit::NoiseModel;
use crate::decoders::{DecoderConfig, DecoderKind, Diagnostics, PreparedDecoder};
use crate::dem::compile;

use super::{build_circuit, ExperimentConfig, ExperimentError, ShotSampler, TimingStats};

/// `T = beta * n^alpha`, fitted as a line in log-log space.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub alpha: f64,
    pub beta: f64,
    pub r2: f64,
}

/// Least squares of `ln T` against `ln n`. Needs two distinct positive `n`.
pub fn fit_power_law(points: &[(f64, f64)]) -> Option<PowerLawFit> {
    let pts: Vec<(f64, f64)> = points.iter().filter(|(n, t)| *n > 0.0 && *t > 0.0).map(|(n, t)| (n.ln(), t.ln())).collect();
    let m = pts.len() as f64;
    if pts.len() < 2 {
        return None;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let alpha = sxy / sxx;
    let intercept = my - alpha * mx;
    let ss_tot: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    let ss_res: f64 = pts.iter().map(|p| (p.1 - intercept - alpha * p.0).powi(2)).sum();
    let r2 = if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot };
    Some(PowerLawFit { alpha, beta: intercept.exp(), r2 })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimingRow {
    pub n: usize,
    pub ell: usize,
    pub decoder: DecoderKind,
    pub shots: usize,
    pub stats: TimingStats,
    /// Fraction of BP+OSD shots that needed OSD.
    pub osd_fraction: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimingTable {
    pub rows: Vec<TimingRow>,
    /// Fit of mean time against `n`, per decoder with at least two sizes.
    pub fits: Vec<(DecoderKind, PowerLawFit)>,
}

/// Decode `shots` pre-sampled syndromes serially at every size and with
/// every decoder, timing each call. Uses the first `p` of the config.
pub fn timing_benchmark(
    config: &ExperimentConfig,
    ells: &[usize],
    decoders: &[DecoderConfig],
    shots: usize,
) -> Result<TimingTable, ExperimentError> {
    config.validate()?;
    let p = config.p[0];
    let mut rows = Vec::new();
    for &ell in ells {
        let cfg = ExperimentConfig { ell, ..config.clone() };
        let (base, n) = build_circuit(&cfg)?;
        let circuit = base.with_noise(&NoiseModel::new(cfg.noise, p)?);
        let model = compile(&circuit);
        let sampler = ShotSampler::new(&model, cfg.seed);
        let syndromes: Vec<_> = (0..shots as u64).map(|i| sampler.shot(i).0).collect();
        for dc in decoders {
            let prepared = PreparedDecoder::new(&model, &circuit, dc)?;
            let mut worker = prepared.worker();
            let mut times = Vec::with_capacity(shots);
            let mut osd = 0usize;
            for s in &syndromes {
                let start = Instant::now();
                let r = worker.decode(s);
                times.push(start.elapsed().as_secs_f64());
                if let Ok(c) = r {
                    osd += matches!(c.diagnostics, Diagnostics::BpOsd { osd: true, .. }) as usize;
                }
            }
            rows.push(TimingRow {
                n,
                ell,
                decoder: dc.kind,
                shots,
                stats: TimingStats::from_samples(&mut times),
                osd_fraction: (dc.kind == DecoderKind::BpOsd).then(|| osd as f64 / shots.max(1) as f64),
            });
        }
    }
    let mut fits = Vec::new();
    for dc in decoders {
        let pts: Vec<(f64, f64)> = rows.iter().filter(|r| r.decoder == dc.kind).map(|r| (r.n as f64, r.stats.mean)).collect();
        if let Some(f) = fit_power_law(&pts) {
            fits.push((dc.kind, f));
        }
    }
    Ok(TimingTable { rows, fits })
}
