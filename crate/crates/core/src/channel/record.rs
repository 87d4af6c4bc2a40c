//! JSON text form of a channel realization:
//! `{"g": [[re, im], ...], "h": ..., "z": ..., "n_relays": [...], "n0": x}`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ChannelRealization;
use crate::error::{Error, Result};
use crate::linalg::CVector;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelRecord {
    pub g: Vec<[f64; 2]>,
    pub h: Vec<[f64; 2]>,
    pub z: Vec<[f64; 2]>,
    pub n_relays: Vec<f64>,
    pub n0: f64,
}

fn to_vector(parts: &[[f64; 2]]) -> CVector {
    CVector::new(
        parts
            .iter()
            .map(|&[re, im]| Complex64::new(re, im))
            .collect(),
    )
}

fn to_parts(v: &CVector) -> Vec<[f64; 2]> {
    v.iter().map(|c| [c.re, c.im]).collect()
}

impl ChannelRecord {
    pub fn into_realization(self) -> Result<ChannelRealization> {
        if self.h.is_empty() {
            return Err(Error::invalid("h", "at least one relay is required"));
        }
        ChannelRealization::new(
            to_vector(&self.g),
            to_vector(&self.h),
            to_vector(&self.z),
            self.n_relays,
            self.n0,
        )
    }
}

impl From<&ChannelRealization> for ChannelRecord {
    fn from(ch: &ChannelRealization) -> Self {
        ChannelRecord {
            g: to_parts(&ch.g),
            h: to_parts(&ch.h),
            z: to_parts(&ch.z),
            n_relays: ch.noise_relays.clone(),
            n0: ch.noise_rx,
        }
    }
}

/// Parses and validates a channel record.
pub fn parse_channel(text: &str) -> Result<ChannelRealization> {
    let record: ChannelRecord = serde_json::from_str(text)?;
    record.into_realization()
}

impl ChannelRealization {
    pub fn to_json(&self) -> String {
        serde_json::to_string(&ChannelRecord::from(self)).expect("record serializes")
    }
}
