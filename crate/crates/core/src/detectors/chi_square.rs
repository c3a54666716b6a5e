//! Chi-square attack on pairs of values (PoVs).
//!
//! LSB replacement with a uniform payload evens out each histogram pair
//! `(2i, 2i+1)`. The statistic compares the even bins against the pair means
//! and the score is the probability that a χ² variable exceeds it, so an
//! evened histogram scores near 1.

use super::{combine_parts, FailureReason};
use crate::image::SampleImage;
use crate::stats::chi_square_sf;

/// Pairs whose expected count is at or below this are left out.
pub const MIN_EXPECTED: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PovStatistic {
    pub statistic: f64,
    /// Retained pairs minus one.
    pub degrees_of_freedom: usize,
}

impl PovStatistic {
    pub fn p_value(&self) -> f64 {
        chi_square_sf(self.statistic, self.degrees_of_freedom as f64)
    }
}

/// χ² over the PoVs of a 256-bin histogram. Fails when fewer than two pairs
/// clear the expected-count floor, since no degree of freedom remains.
pub fn pov_statistic(histogram: &[u64; 256]) -> Result<PovStatistic, FailureReason> {
    let mut statistic = 0.0;
    let mut retained = 0usize;
    for pair in histogram.chunks_exact(2) {
        let expected = (pair[0] + pair[1]) as f64 / 2.0;
        if expected > MIN_EXPECTED {
            let diff = pair[0] as f64 - expected;
            statistic += diff * diff / expected;
            retained += 1;
        }
    }
    if retained < 2 {
        return Err(FailureReason::DegenerateInput);
    }
    Ok(PovStatistic {
        statistic,
        degrees_of_freedom: retained - 1,
    })
}

fn histogram(plane: &[u8]) -> [u64; 256] {
    let mut h = [0u64; 256];
    for &v in plane {
        h[v as usize] += 1;
    }
    h
}

/// Mean PoV p-value across channels.
pub fn chi_square_attack(img: &SampleImage) -> Result<f64, FailureReason> {
    combine_parts(
        img.planes()
            .iter()
            .map(|plane| pov_statistic(&histogram(plane)).map(|s| s.p_value())),
    )
}
