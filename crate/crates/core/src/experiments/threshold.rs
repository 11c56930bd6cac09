use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use rayon::ThreadPool;
use serde::{Deserialize, Serialize};

use super::{logical_error_rate_with, ExperimentConfig, ExperimentError, ExperimentResult};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub p: f64,
    pub failures: usize,
    pub shots: usize,
}

impl CurvePoint {
    /// Zero failures are read as half a failure so the log stays finite.
    fn rate(&self) -> f64 {
        (self.failures as f64).max(0.5) / self.shots as f64
    }
}

/// One code size's `P_L(p)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Curve {
    pub n: usize,
    pub points: Vec<CurvePoint>,
}

impl Curve {
    pub fn from_result(r: &ExperimentResult) -> Self {
        Curve {
            n: r.num_qubits,
            points: r.points.iter().map(|x| CurvePoint { p: x.p, failures: x.failures, shots: x.shots }).collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum NoCrossing {
    /// Every pair of curves coincides on the whole grid.
    Degenerate,
    /// No pair changes order inside the grid.
    NeverCross,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairCrossing {
    /// Curve indices.
    pub a: usize,
    pub b: usize,
    pub p: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub crossings: Vec<PairCrossing>,
    /// Smallest and largest pairwise crossing.
    pub estimate: Option<(f64, f64)>,
    /// 2.5 and 97.5 percentiles of the mean crossing under binomial
    /// resampling of every point.
    pub bootstrap: Option<(f64, f64)>,
    pub no_crossing: Option<NoCrossing>,
}

enum PairOutcome {
    Cross(f64),
    Degenerate,
    None,
}

/// Crossing of two curves, interpolating `ln P_L` linearly in `ln p` over
/// the shared grid points. Several sign changes give their median.
fn crossing(a: &[(f64, f64)], b: &[(f64, f64)]) -> PairOutcome {
    let mut xs = Vec::new();
    let mut gs = Vec::new();
    for &(p, ra) in a {
        if let Some(&(_, rb)) = b.iter().find(|(q, _)| *q == p) {
            xs.push(p.ln());
            gs.push(ra.ln() - rb.ln());
        }
    }
    if gs.is_empty() {
        return PairOutcome::None;
    }
    if gs.iter().all(|&g| g == 0.0) {
        return PairOutcome::Degenerate;
    }
    let mut found = Vec::new();
    for i in 0..gs.len() {
        if gs[i] == 0.0 {
            found.push(xs[i]);
        } else if i + 1 < gs.len() && gs[i + 1] != 0.0 && (gs[i] < 0.0) != (gs[i + 1] < 0.0) {
            let t = gs[i] / (gs[i] - gs[i + 1]);
            found.push(xs[i] + t * (xs[i + 1] - xs[i]));
        }
    }
    if found.is_empty() {
        return PairOutcome::None;
    }
    found.sort_by(f64::total_cmp);
    let m = found.len();
    let mid = if m % 2 == 1 { found[m / 2] } else { 0.5 * (found[m / 2 - 1] + found[m / 2]) };
    PairOutcome::Cross(mid.exp())
}

fn sorted_rates(c: &Curve, mut rate: impl FnMut(&CurvePoint) -> f64) -> Vec<(f64, f64)> {
    let mut v: Vec<(f64, f64)> = c.points.iter().map(|x| (x.p, rate(x))).collect();
    v.sort_by(|x, y| x.0.total_cmp(&y.0));
    v
}

fn all_crossings(rates: &[Vec<(f64, f64)>]) -> (Vec<PairCrossing>, bool) {
    let mut out = Vec::new();
    let mut all_degenerate = true;
    for a in 0..rates.len() {
        for b in a + 1..rates.len() {
            match crossing(&rates[a], &rates[b]) {
                PairOutcome::Cross(p) => {
                    all_degenerate = false;
                    out.push(PairCrossing { a, b, p });
                }
                PairOutcome::Degenerate => {}
                PairOutcome::None => all_degenerate = false,
            }
        }
    }
    (out, all_degenerate)
}

/// Pairwise crossings of at least two curves, with a parametric bootstrap
/// over `resamples` draws (0 skips it).
pub fn threshold_estimate(curves: &[Curve], resamples: usize, seed: u64) -> Result<ThresholdReport, ExperimentError> {
    if curves.len() < 2 {
        return Err(ExperimentError::Config("a threshold needs at least two curves".into()));
    }
    let rates: Vec<Vec<(f64, f64)>> = curves.iter().map(|c| sorted_rates(c, CurvePoint::rate)).collect();
    let (crossings, degenerate) = all_crossings(&rates);
    if crossings.is_empty() {
        let flag = if degenerate { NoCrossing::Degenerate } else { NoCrossing::NeverCross };
        return Ok(ThresholdReport { crossings, estimate: None, bootstrap: None, no_crossing: Some(flag) });
    }
    let lo = crossings.iter().map(|c| c.p).fold(f64::INFINITY, f64::min);
    let hi = crossings.iter().map(|c| c.p).fold(0.0, f64::max);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut means = Vec::with_capacity(resamples);
    for _ in 0..resamples {
        let redrawn: Vec<Vec<(f64, f64)>> = curves
            .iter()
            .map(|c| {
                sorted_rates(c, |x| {
                    let ph = x.failures as f64 / x.shots as f64;
                    let f = Binomial::new(x.shots as u64, ph).expect("valid binomial").sample(&mut rng);
                    (f as f64).max(0.5) / x.shots as f64
                })
            })
            .collect();
        let (cs, _) = all_crossings(&redrawn);
        if !cs.is_empty() {
            means.push(cs.iter().map(|c| c.p).sum::<f64>() / cs.len() as f64);
        }
    }
    let bootstrap = (resamples > 0 && means.len() * 2 >= resamples).then(|| {
        means.sort_by(f64::total_cmp);
        let at = |q: f64| means[((q * (means.len() - 1) as f64).round() as usize).min(means.len() - 1)];
        (at(0.025), at(0.975))
    });
    Ok(ThresholdReport { crossings, estimate: Some((lo, hi)), bootstrap, no_crossing: None })
}

/// Run the same config at every refinement level, then estimate the
/// crossing.
pub fn threshold_sweep(
    config: &ExperimentConfig,
    ells: &[usize],
    resamples: usize,
    pool: &ThreadPool,
) -> Result<(Vec<ExperimentResult>, ThresholdReport), ExperimentError> {
    let results = ells
        .iter()
        .map(|&ell| logical_error_rate_with(&ExperimentConfig { ell, ..config.clone() }, pool))
        .collect::<Result<Vec<_>, _>>()?;
    let curves: Vec<Curve> = results.iter().map(Curve::from_result).collect();
    let report = threshold_estimate(&curves, resamples, config.seed)?;
    Ok((results, report))
}

#[cfg(test)]
mod tests {
    use super::*;

    const SHOTS: usize = 1_000_000;

    fn curve(n: usize, grid: &[f64], f: impl Fn(f64) -> f64) -> Curve {
        Curve { n, points: grid.iter().map(|&p| CurvePoint { p, failures: (f(p) * SHOTS as f64).round() as usize, shots: SHOTS }).collect() }
    }

    #[test]
    fn synthetic_crossing_is_exact() {
        let grid = [0.004, 0.007, 0.012, 0.02, 0.03];
        let a = curve(64, &grid, |p| p);
        let b = curve(144, &grid, |p| p * p / 0.01);
        let r = threshold_estimate(&[a, b], 0, 0).unwrap();
        let (lo, hi) = r.estimate.unwrap();
        assert!((lo - 0.01).abs() < 1e-12 && (hi - 0.01).abs() < 1e-12, "{lo} {hi}");
        assert_eq!(r.no_crossing, None);
    }

    #[test]
    fn identical_curves_are_degenerate() {
        let grid = [0.01, 0.02];
        let a = curve(64, &grid, |p| p);
        let r = threshold_estimate(&[a.clone(), a], 100, 0).unwrap();
        assert_eq!(r.no_crossing, Some(NoCrossing::Degenerate));
        assert!(r.estimate.is_none());
    }

    #[test]
    fn separated_curves_never_cross() {
        let grid = [0.01, 0.02, 0.03];
        let a = curve(64, &grid, |p| p);
        let b = curve(144, &grid, |p| p / 2.0);
        let r = threshold_estimate(&[a, b], 0, 0).unwrap();
        assert_eq!(r.no_crossing, Some(NoCrossing::NeverCross));
    }

    #[test]
    fn bootstrap_brackets_the_crossing() {
        let grid = [0.005, 0.008, 0.012, 0.02];
        let a = curve(64, &grid, |p| p);
        let b = curve(144, &grid, |p| p * p / 0.01);
        let r = threshold_estimate(&[a, b], 200, 1).unwrap();
        let (lo, hi) = r.bootstrap.unwrap();
        assert!(lo <= 0.01 && 0.01 <= hi && hi - lo < 1e-3, "{lo} {hi}");
    }

    #[test]
    fn one_curve_is_an_error() {
        assert!(threshold_estimate(&[curve(16, &[0.01], |p| p)], 0, 0).is_err());
    }
}
