//! LSB replacement under sequential, pseudorandom and equidistributed
//! sample selection.
//!
//! Samples are addressed in channel-interleaved row-major order: R, G, B of
//! pixel 0, then pixel 1, and so on. Payload bits are written most
//! significant bit first.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::image::SampleImage;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Distribution {
    Sequential,
    Pseudorandom { seed: u64 },
    Equidistributed,
}

impl Distribution {
    pub fn name(self) -> &'static str {
        match self {
            Distribution::Sequential => "sequential",
            Distribution::Pseudorandom { .. } => "pseudorandom",
            Distribution::Equidistributed => "equidistributed",
        }
    }

    pub fn seed(self) -> Option<u64> {
        match self {
            Distribution::Pseudorandom { seed } => Some(seed),
            _ => None,
        }
    }
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Distribution kind without a seed, as named on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DistributionKind {
    Sequential,
    Pseudorandom,
    Equidistributed,
}

impl DistributionKind {
    pub const ALL: [DistributionKind; 3] = [
        DistributionKind::Sequential,
        DistributionKind::Pseudorandom,
        DistributionKind::Equidistributed,
    ];

    pub fn with_seed(self, seed: u64) -> Distribution {
        match self {
            DistributionKind::Sequential => Distribution::Sequential,
            DistributionKind::Pseudorandom => Distribution::Pseudorandom { seed },
            DistributionKind::Equidistributed => Distribution::Equidistributed,
        }
    }
}

impl FromStr for DistributionKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "sequential" | "seq" => Ok(DistributionKind::Sequential),
            "pseudorandom" | "random" => Ok(DistributionKind::Pseudorandom),
            "equidistributed" | "equi" => Ok(DistributionKind::Equidistributed),
            other => Err(format!("unknown distribution '{other}'")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbedSpec {
    pub distribution: Distribution,
    pub payload: Vec<u8>,
    /// Fraction of the LSB capacity the payload may use, in (0, 1].
    pub target_rate: f64,
}

#[derive(Debug, Error, PartialEq)]
pub enum EmbedError {
    #[error("payload of {bits} bits exceeds the {allowed} bits allowed at this rate")]
    PayloadTooLarge { bits: usize, allowed: usize },
    #[error("nothing to embed")]
    EmptyPayload,
    #[error("embedding rate {0} is outside (0, 1]")]
    InvalidRate(f64),
}

/// Bits available at `rate`: `floor(rate × capacity)`.
pub fn allowed_bits(rate: f64, capacity: usize) -> usize {
    (rate * capacity as f64).floor() as usize
}

/// The first `count` sample indices selected by `distribution` out of `capacity`.
pub fn select_positions(distribution: Distribution, capacity: usize, count: usize) -> Vec<usize> {
    assert!(count <= capacity, "cannot select {count} of {capacity} samples");
    match distribution {
        Distribution::Sequential => (0..count).collect(),
        Distribution::Equidistributed => {
            if count == 0 {
                return Vec::new();
            }
            let stride = capacity / count;
            (0..count).map(|i| i * stride).collect()
        }
        Distribution::Pseudorandom { seed } => {
            // Fisher-Yates, stopped after `count` swaps.
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut indices: Vec<u32> = (0..capacity as u32).collect();
            for i in 0..count {
                let j = rng.random_range(i..capacity);
                indices.swap(i, j);
            }
            indices.truncate(count);
            indices.into_iter().map(|i| i as usize).collect()
        }
    }
}

fn bit(payload: &[u8], i: usize) -> u8 {
    (payload[i / 8] >> (7 - i % 8)) & 1
}

/// Writes `spec.payload` into the LSBs of the selected samples of a copy of `img`.
pub fn lsb_embed(img: &SampleImage, spec: &EmbedSpec) -> Result<SampleImage, EmbedError> {
    if !(spec.target_rate > 0.0 && spec.target_rate <= 1.0) {
        return Err(EmbedError::InvalidRate(spec.target_rate));
    }
    let capacity = img.sample_count();
    let allowed = allowed_bits(spec.target_rate, capacity);
    let bits = spec.payload.len() * 8;
    if bits == 0 || allowed == 0 {
        return Err(EmbedError::EmptyPayload);
    }
    if bits > allowed {
        return Err(EmbedError::PayloadTooLarge { bits, allowed });
    }
    let mut out = img.clone();
    for (i, pos) in select_positions(spec.distribution, capacity, bits)
        .into_iter()
        .enumerate()
    {
        let v = out.sample(pos);
        out.set_sample(pos, (v & !1) | bit(&spec.payload, i));
    }
    Ok(out)
}

/// Reads `len` payload bytes back out of `img`. Used to verify embeddings.
pub fn extract_payload(img: &SampleImage, distribution: Distribution, len: usize) -> Vec<u8> {
    let positions = select_positions(distribution, img.sample_count(), len * 8);
    let mut out = vec![0u8; len];
    for (i, pos) in positions.into_iter().enumerate() {
        out[i / 8] |= (img.sample(pos) & 1) << (7 - i % 8);
    }
    out
}
