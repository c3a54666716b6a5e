//! Sample Pair Analysis over trace multisets of horizontally adjacent pairs.
//!
//! A pair `(u, v)` belongs to trace set `C_m` when `|⌊u/2⌋ − ⌊v/2⌋| = m`;
//! LSB replacement never moves a pair between trace sets, only between the
//! multisets inside one. Orienting each pair so the smaller half-value comes
//! first, `C_m` (m ≥ 1) splits by the LSBs `(s, t)` into
//! `X_m = (1, 0)` (difference `2m−1`), `Y_m = (0, 1)` (difference `2m+1`) and
//! the two difference-`2m` multisets. For natural images a pair at distance
//! `2m+1` is as likely to sit in `C_m` as in `C_{m+1}`, i.e. `|Y_m| = |X_{m+1}|`
//! (and `|D_0| = |X_1|` where `D_0` are the unequal pairs of `C_0`). Each
//! identity, rewritten in terms of the observed multisets after flipping
//! each sample with probability `p/2`, yields one quadratic in `p`; the
//! estimate solves their sum.

use super::quadratic::{real_roots, select_rate};
use super::{combine_parts, FailureReason};
use crate::image::SampleImage;

/// Largest trace index that can occur for 8-bit samples.
const MAX_TRACE: usize = 127;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceCounts {
    /// `|C_m|` for m in 0..=127 (index 128 stays zero).
    pub c: Vec<u64>,
    /// `|X_m|`; index 0 holds the unequal pairs of `C_0`.
    pub x: Vec<u64>,
    pub y: Vec<u64>,
}

impl TraceCounts {
    pub fn measure(plane: &[u8], width: usize) -> Self {
        let mut c = vec![0u64; MAX_TRACE + 2];
        let mut x = vec![0u64; MAX_TRACE + 2];
        let mut y = vec![0u64; MAX_TRACE + 2];
        for row in plane.chunks_exact(width) {
            for pair in row.windows(2) {
                let (lo, hi) = if pair[0] >> 1 <= pair[1] >> 1 {
                    (pair[0], pair[1])
                } else {
                    (pair[1], pair[0])
                };
                let m = ((hi >> 1) - (lo >> 1)) as usize;
                c[m] += 1;
                match (lo & 1, hi & 1) {
                    (1, 0) if m > 0 => x[m] += 1,
                    (0, 1) if m > 0 => y[m] += 1,
                    (s, t) if m == 0 && s != t => x[0] += 1,
                    _ => {}
                }
            }
        }
        Self { c, x, y }
    }

    pub fn pairs(&self) -> u64 {
        self.c.iter().sum()
    }

    /// Number of pairs carrying trace information (unequal samples).
    pub fn informative(&self) -> u64 {
        self.pairs() - (self.c[0] - self.x[0])
    }

    /// Coefficients of the summed quadratic over trace sets `0..=m_max`.
    pub fn quadratic(&self, m_max: usize) -> (f64, f64, f64) {
        let m_max = m_max.min(MAX_TRACE);
        let c = |m: usize| self.c[m] as f64;
        let x = |m: usize| self.x[m] as f64;
        let y = |m: usize| self.y[m] as f64;
        let e = |m: usize| x(m) - y(m);
        let (mut qa, mut qb, mut qc) = (
            0.5 * (2.0 * c(0) - c(1)),
            e(1) - (2.0 * c(0) - c(1)),
            2.0 * (x(0) - x(1)),
        );
        for m in 1..=m_max {
            let dc = c(m) - c(m + 1);
            qa += 0.5 * dc;
            qb += e(m) + e(m + 1) - dc;
            qc += 2.0 * (y(m) - x(m + 1));
        }
        (qa, qb, qc)
    }

    pub fn estimate(&self) -> Result<f64, FailureReason> {
        if self.informative() == 0 {
            return Err(FailureReason::DegenerateInput);
        }
        let (a, b, c) = self.quadratic(MAX_TRACE);
        select_rate(&real_roots(a, b, c)?)
    }
}

/// Mean Sample Pair Analysis estimate across channels.
pub fn sample_pairs(img: &SampleImage) -> Result<f64, FailureReason> {
    if img.width() < 2 {
        return Err(FailureReason::DegenerateInput);
    }
    combine_parts(
        img.planes()
            .iter()
            .map(|plane| TraceCounts::measure(plane, img.width()).estimate()),
    )
}
