//! Two-hop relay channel realizations and the rate formulas evaluated on them.
//!
//! All rates are in bits per channel use. The relay→destination and
//! relay→eavesdropper vectors are stored so that the received amplitudes are
//! `h† w` and `z† w`.

mod record;
mod sampling;

pub use record::{parse_channel, ChannelRecord};
pub use sampling::{sample_channel, trial_rng, ChannelSampler, FadingSpec, TrialRng};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CVector, LinalgError};

/// One draw of the relay network plus its noise powers (linear units).
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    /// Source→relay coefficients.
    pub g: CVector,
    /// Relay→destination channel.
    pub h: CVector,
    /// Relay→eavesdropper channel.
    pub z: CVector,
    /// Per-relay noise variances `N_m`.
    pub noise_relays: Vec<f64>,
    /// Noise variance `N0` shared by destination and eavesdropper.
    pub noise_rx: f64,
}

impl ChannelRealization {
    pub fn new(
        g: CVector,
        h: CVector,
        z: CVector,
        noise_relays: Vec<f64>,
        noise_rx: f64,
    ) -> Result<Self> {
        let ch = ChannelRealization {
            g,
            h,
            z,
            noise_relays,
            noise_rx,
        };
        ch.validate()?;
        Ok(ch)
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.h.dim();
        for (name, v) in [("g", &self.g), ("h", &self.h), ("z", &self.z)] {
            v.validate()
                .map_err(|e| Error::invalid(name, e.to_string()))?;
            if v.dim() != m {
                return Err(Error::invalid(
                    name,
                    format!("expected {m} entries, got {}", v.dim()),
                ));
            }
        }
        if self.noise_relays.len() != m {
            return Err(Error::invalid(
                "n_relays",
                format!("expected {m} entries, got {}", self.noise_relays.len()),
            ));
        }
        if let Some(bad) = self
            .noise_relays
            .iter()
            .find(|n| !(**n > 0.0 && n.is_finite()))
        {
            return Err(Error::invalid(
                "n_relays",
                format!("noise power {bad} is not positive"),
            ));
        }
        if !(self.noise_rx > 0.0 && self.noise_rx.is_finite()) {
            return Err(Error::invalid(
                "n0",
                format!("noise power {} is not positive", self.noise_rx),
            ));
        }
        Ok(())
    }

    /// Number of relays `M`.
    pub fn relays(&self) -> usize {
        self.h.dim()
    }

    fn check_weights(&self, w: &CVector) -> Result<()> {
        if w.dim() != self.relays() {
            return Err(LinalgError::DimensionMismatch {
                expected: self.relays(),
                got: w.dim(),
            }
            .into());
        }
        Ok(())
    }
}

/// Rates achieved by a beamformer on one realization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SecrecyResult {
    pub snr_dest: f64,
    pub snr_eve: f64,
    pub rate_hop2: f64,
    pub rate_hop1: f64,
    pub rate_overall: f64,
}

/// Output unit for rates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RateUnit {
    #[default]
    Bits,
    Nats,
}

impl RateUnit {
    pub fn from_bits(self, bits: f64) -> f64 {
        match self {
            RateUnit::Bits => bits,
            RateUnit::Nats => bits * std::f64::consts::LN_2,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            RateUnit::Bits => "bits",
            RateUnit::Nats => "nats",
        }
    }
}

/// Received SNRs `(Γ_d, Γ_e) = (|h†w|²/N0, |z†w|²/N0)`.
pub fn snr_pair(ch: &ChannelRealization, w: &CVector) -> Result<(f64, f64)> {
    ch.check_weights(w)?;
    Ok((
        ch.h.dot(w).norm_sqr() / ch.noise_rx,
        ch.z.dot(w).norm_sqr() / ch.noise_rx,
    ))
}

/// Second-hop secrecy rate, clamped at zero.
pub fn secrecy_rate(ch: &ChannelRealization, w: &CVector) -> Result<f64> {
    let (gd, ge) = snr_pair(ch, w)?;
    Ok(secrecy_rate_from_snr(gd, ge))
}

/// `max(0, log2(1+Γ_d) − log2(1+Γ_e))`, evaluated as a single ratio.
pub fn secrecy_rate_from_snr(snr_dest: f64, snr_eve: f64) -> f64 {
    ((1.0 + snr_dest) / (1.0 + snr_eve)).log2().max(0.0)
}

/// Unclamped second-hop rate; can be negative for poor weights.
pub fn raw_secrecy_rate(ch: &ChannelRealization, w: &CVector) -> Result<f64> {
    let (gd, ge) = snr_pair(ch, w)?;
    Ok(((1.0 + gd) / (1.0 + ge)).log2())
}

/// First-hop rate: the weakest relay decoder limits the source rate.
pub fn first_hop_rate(ch: &ChannelRealization, p_s: f64) -> Result<f64> {
    if !(p_s > 0.0 && p_s.is_finite()) {
        return Err(Error::invalid(
            "p_s",
            format!("source power {p_s} is not positive"),
        ));
    }
    Ok(ch
        .g
        .iter()
        .zip(&ch.noise_relays)
        .map(|(g, n)| (g.norm_sqr() * p_s / n).ln_1p() / std::f64::consts::LN_2)
        .fold(f64::INFINITY, f64::min))
}

/// End-to-end rate `min(C_1, R_s)` together with its ingredients.
pub fn overall_rate(ch: &ChannelRealization, w: &CVector, p_s: f64) -> Result<SecrecyResult> {
    let (snr_dest, snr_eve) = snr_pair(ch, w)?;
    let rate_hop2 = secrecy_rate_from_snr(snr_dest, snr_eve);
    let rate_hop1 = first_hop_rate(ch, p_s)?;
    Ok(SecrecyResult {
        snr_dest,
        snr_eve,
        rate_hop2,
        rate_hop1,
        rate_overall: rate_hop1.min(rate_hop2),
    })
}
