//! Fixtures shared by the benchmarks.

use stegofuse_core::embedder::{allowed_bits, lsb_embed, Distribution, EmbedSpec};
use stegofuse_core::synth::{photographic_cover, CoverParams};
use stegofuse_core::SampleImage;

/// A 400x300 RGB cover, about the middle of the desk pool size range.
pub fn cover() -> SampleImage {
    photographic_cover(
        CoverParams {
            width: 400,
            height: 300,
            channels: 3,
        },
        42,
    )
}

/// `cover()` carrying a pseudorandom payload at `rate`.
pub fn stego(rate: f64) -> SampleImage {
    let cover = cover();
    let bytes = allowed_bits(rate, cover.sample_count()) / 8;
    let payload = (0..bytes)
        .map(|i| (i as u32).wrapping_mul(2_654_435_761).rotate_left(13) as u8)
        .collect();
    lsb_embed(
        &cover,
        &EmbedSpec {
            distribution: Distribution::Pseudorandom { seed: 7 },
            payload,
            target_rate: rate,
        },
    )
    .expect("payload fits")
}
