use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::ChannelRealization;
use crate::error::{Error, Result};
use crate::linalg::CVector;

/// Generator used for every Monte Carlo draw.
///
/// ChaCha8 keyed by `seed_from_u64(seed)`, with the 64-bit stream id
/// selecting an independent substream. Bit-identical on every platform.
pub type TrialRng = ChaCha8Rng;

/// Generator for substream `stream` of master seed `seed`.
pub fn trial_rng(seed: u64, stream: u64) -> TrialRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Rayleigh fading parameters: each coefficient is circularly symmetric
/// complex Gaussian with variance `sigma²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FadingSpec {
    pub sigma_g: f64,
    pub sigma_h: f64,
    pub sigma_z: f64,
    pub relays: usize,
    pub seed: u64,
}

impl FadingSpec {
    pub fn validate(&self) -> Result<()> {
        for (name, s) in [
            ("sigma_g", self.sigma_g),
            ("sigma_h", self.sigma_h),
            ("sigma_z", self.sigma_z),
        ] {
            if !(s > 0.0 && s.is_finite()) {
                return Err(Error::invalid(name, format!("{s} is not a positive scale")));
            }
        }
        if self.relays == 0 || self.relays > crate::linalg::MAX_DIM {
            return Err(Error::invalid(
                "relays",
                format!("{} is outside 1..={}", self.relays, crate::linalg::MAX_DIM),
            ));
        }
        Ok(())
    }
}

/// Draws successive independent realizations from one generator.
#[derive(Debug, Clone)]
pub struct ChannelSampler {
    spec: FadingSpec,
    rng: TrialRng,
}

impl ChannelSampler {
    pub fn new(spec: FadingSpec) -> Result<Self> {
        spec.validate()?;
        Ok(ChannelSampler {
            spec,
            rng: trial_rng(spec.seed, 0),
        })
    }

    pub fn with_rng(spec: FadingSpec, rng: TrialRng) -> Result<Self> {
        spec.validate()?;
        Ok(ChannelSampler { spec, rng })
    }

    /// Draws `g`, then `h`, then `z`; real part before imaginary part.
    pub fn draw(&mut self, noise_relays: &[f64], noise_rx: f64) -> Result<ChannelRealization> {
        let m = self.spec.relays;
        let g = gaussian_vector(&mut self.rng, m, self.spec.sigma_g);
        let h = gaussian_vector(&mut self.rng, m, self.spec.sigma_h);
        let z = gaussian_vector(&mut self.rng, m, self.spec.sigma_z);
        ChannelRealization::new(g, h, z, noise_relays.to_vec(), noise_rx)
    }
}

fn gaussian_vector<R: Rng>(rng: &mut R, m: usize, sigma: f64) -> CVector {
    let s = sigma * std::f64::consts::FRAC_1_SQRT_2;
    CVector::new(
        (0..m)
            .map(|_| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                Complex64::new(s * re, s * im)
            })
            .collect(),
    )
}

/// One realization drawn from substream 0 of `spec.seed`.
pub fn sample_channel(
    spec: &FadingSpec,
    noise_relays: &[f64],
    noise_rx: f64,
) -> Result<ChannelRealization> {
    ChannelSampler::new(*spec)?.draw(noise_relays, noise_rx)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(sigma_h: f64, sigma_z: f64, relays: usize, seed: u64) -> FadingSpec {
        FadingSpec {
            sigma_g: 1.0,
            sigma_h,
            sigma_z,
            relays,
            seed,
        }
    }

    #[test]
    fn same_seed_same_realization() {
        let s = spec(3.0, 1.0, 5, 42);
        let a = sample_channel(&s, &[1.0; 5], 1.0).unwrap();
        let b = sample_channel(&s, &[1.0; 5], 1.0).unwrap();
        assert_eq!(a, b);
        let c = sample_channel(&spec(3.0, 1.0, 5, 43), &[1.0; 5], 1.0).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn substreams_differ() {
        let s = spec(1.0, 1.0, 3, 7);
        let mut a = ChannelSampler::with_rng(s, trial_rng(7, 1)).unwrap();
        let mut b = ChannelSampler::with_rng(s, trial_rng(7, 2)).unwrap();
        assert_ne!(
            a.draw(&[1.0; 3], 1.0).unwrap(),
            b.draw(&[1.0; 3], 1.0).unwrap()
        );
    }

    #[test]
    fn second_moment_matches_variance() {
        let mut sampler = ChannelSampler::new(spec(3.0, 1.0, 1, 2024)).unwrap();
        let n = 100_000;
        let mut h2 = 0.0;
        let mut re2 = 0.0;
        for _ in 0..n {
            let ch = sampler.draw(&[1.0], 1.0).unwrap();
            h2 += ch.h[0].norm_sqr();
            re2 += ch.h[0].re * ch.h[0].re;
        }
        let h2 = h2 / n as f64;
        let re2 = re2 / n as f64;
        assert!((h2 - 9.0).abs() < 0.03 * 9.0, "E|h|^2 = {h2}");
        // Half the power sits in each quadrature.
        assert!((re2 - 4.5).abs() < 0.03 * 4.5, "E[Re h]^2 = {re2}");
    }

    #[test]
    fn variance_scaling_between_specs() {
        let moment = |sigma_z: f64| {
            let mut sampler = ChannelSampler::new(spec(1.0, sigma_z, 4, 99)).unwrap();
            let n = 25_000;
            let mut acc = 0.0;
            for _ in 0..n {
                acc += sampler.draw(&[1.0; 4], 1.0).unwrap().z.norm_sqr();
            }
            acc / (4 * n) as f64
        };
        let ratio = moment(2.0) / moment(1.0);
        assert!((ratio - 4.0).abs() < 0.15, "ratio {ratio}");
    }

    #[test]
    fn invalid_specs_rejected() {
        assert!(ChannelSampler::new(spec(0.0, 1.0, 2, 0)).is_err());
        assert!(ChannelSampler::new(spec(1.0, 1.0, 0, 0)).is_err());
        assert!(ChannelSampler::new(spec(1.0, 1.0, 65, 0)).is_err());
    }
}
