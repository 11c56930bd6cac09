use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dem::DetectorErrorModel;
use crate::f2::BitVec;

/// Independent Bernoulli draws of every mechanism in a model.
///
/// Shot `i` draws from its own ChaCha stream keyed by `(seed, i)`, so any
/// subset of shots can be regenerated in any order on any thread.
pub struct ShotSampler<'m> {
    model: &'m DetectorErrorModel,
    thresholds: Vec<u64>,
    seed: u64,
}

impl<'m> ShotSampler<'m> {
    pub fn new(model: &'m DetectorErrorModel, seed: u64) -> Self {
        let thresholds = model.mechanisms.iter().map(|m| probability_threshold(m.p)).collect();
        ShotSampler { model, thresholds, seed }
    }

    /// Syndrome and actual observable flips of shot `index`.
    pub fn shot(&self, index: u64) -> (BitVec, BitVec) {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        let mut syndrome = BitVec::zeros(self.model.num_detectors);
        let mut flips = BitVec::zeros(self.model.num_observables);
        for (m, &t) in self.model.mechanisms.iter().zip(&self.thresholds) {
            let fire = match t {
                0 => false,
                u64::MAX => true,
                _ => rng.next_u64() < t,
            };
            if fire {
                for &d in &m.detectors {
                    syndrome.toggle(d);
                }
                for &o in &m.observables {
                    flips.toggle(o);
                }
            }
        }
        (syndrome, flips)
    }
}

/// `u < t` for uniform 64-bit `u` happens with probability `p` (to 2^-64).
fn probability_threshold(p: f64) -> u64 {
    if p <= 0.0 {
        0
    } else if p >= 1.0 {
        u64::MAX
    } else {
        (p * 18446744073709551616.0) as u64
    }
}

/// Shots `0..shots` of a model as `(syndrome, actual flips)` pairs.
pub fn sample_shots(model: &DetectorErrorModel, shots: usize, seed: u64) -> impl Iterator<Item = (BitVec, BitVec)> + '_ {
    let sampler = ShotSampler::new(model, seed);
    (0..shots as u64).map(move |i| sampler.shot(i))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dem::FaultMechanism;

    fn model(ps: &[f64]) -> DetectorErrorModel {
        DetectorErrorModel {
            num_detectors: ps.len() + 1,
            num_observables: 1,
            mechanisms: ps
                .iter()
                .enumerate()
                .map(|(i, &p)| FaultMechanism {
                    p,
                    detectors: vec![i, i + 1],
                    observables: if i == 0 { vec![0] } else { vec![] },
                    provenance: vec![],
                })
                .collect(),
        }
    }

    #[test]
    fn zero_noise_gives_zero_syndromes() {
        let m = model(&[0.0, 0.0]);
        assert!(sample_shots(&m, 100, 1).all(|(s, f)| s.is_zero() && f.is_zero()));
    }

    #[test]
    fn certain_mechanism_fires_every_shot() {
        let m = model(&[1.0]);
        for (s, f) in sample_shots(&m, 50, 2) {
            assert_eq!(s.ones().collect::<Vec<_>>(), vec![0, 1]);
            assert!(f.get(0));
        }
    }

    #[test]
    fn marginals_within_three_sigma() {
        let ps = [0.01, 0.1, 0.3];
        let m = model(&ps);
        let shots = 100_000;
        let sampler = ShotSampler::new(&m, 7);
        let mut counts = [0usize; 3];
        // Detector 1 sees mechanisms 0 and 1, detector 3 only mechanism 2,
        // and the observable only mechanism 0.
        for i in 0..shots {
            let (s, f) = sampler.shot(i as u64);
            counts[0] += f.get(0) as usize;
            counts[1] += (s.get(1) ^ f.get(0)) as usize;
            counts[2] += s.get(3) as usize;
        }
        for (c, p) in counts.iter().zip(ps) {
            let sigma = (shots as f64 * p * (1.0 - p)).sqrt();
            assert!((*c as f64 - shots as f64 * p).abs() < 3.0 * sigma, "{c} vs {p}");
        }
    }

    #[test]
    fn shots_do_not_depend_on_order() {
        let m = model(&[0.2, 0.4, 0.1]);
        let all: Vec<_> = sample_shots(&m, 20, 9).collect();
        let sampler = ShotSampler::new(&m, 9);
        for i in (0..20).rev() {
            assert_eq!(sampler.shot(i), all[i as usize]);
        }
    }
}
