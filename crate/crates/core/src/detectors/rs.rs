//! RS analysis: counts regular and singular pixel groups under the flipping
//! mask `M = [0, 1, 1, 0]` and its negation, on the image as-is and with
//! every LSB inverted, then solves the RS quadratic for the message length.
//!
//! Groups are 2×2 blocks read in row-major order, so the mask flips the two
//! off-diagonal pixels. Both tilings are measured: every block position
//! (overlapping) and the stride-2 grid (non-overlapping).

use super::quadratic::{real_roots, select_rate};
use super::{combine_parts, FailureReason};
use crate::image::SampleImage;

/// Group tallies for one plane and one tiling.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RsCounts {
    pub groups: u64,
    /// Groups whose discrimination is zero (flat blocks).
    pub flat: u64,
    pub regular_m: u64,
    pub singular_m: u64,
    pub regular_neg_m: u64,
    pub singular_neg_m: u64,
    /// Same tallies with every LSB of the plane inverted.
    pub inv_regular_m: u64,
    pub inv_singular_m: u64,
    pub inv_regular_neg_m: u64,
    pub inv_singular_neg_m: u64,
}

#[inline]
fn discrimination(g: [i32; 4]) -> i32 {
    (g[1] - g[0]).abs() + (g[2] - g[1]).abs() + (g[3] - g[2]).abs()
}

/// Positive flip: 0↔1, 2↔3, ...
#[inline]
fn flip_pos(v: i32) -> i32 {
    v ^ 1
}

/// Negative (shifted) flip: -1↔0, 1↔2, ...
#[inline]
fn flip_neg(v: i32) -> i32 {
    ((v + 1) ^ 1) - 1
}

/// Classifies one group under M and -M. Returns (regular_m, singular_m, regular_-m, singular_-m).
#[inline]
fn classify(g: [i32; 4]) -> (bool, bool, bool, bool, bool) {
    let f0 = discrimination(g);
    let fm = discrimination([g[0], flip_pos(g[1]), flip_pos(g[2]), g[3]]);
    let fn_ = discrimination([g[0], flip_neg(g[1]), flip_neg(g[2]), g[3]]);
    (fm > f0, fm < f0, fn_ > f0, fn_ < f0, f0 == 0)
}

impl RsCounts {
    pub fn measure(plane: &[u8], width: usize, height: usize, overlapping: bool) -> Self {
        let mut c = RsCounts::default();
        if width < 2 || height < 2 {
            return c;
        }
        let step = if overlapping { 1 } else { 2 };
        for y in (0..height - 1).step_by(step) {
            let top = &plane[y * width..(y + 1) * width];
            let bottom = &plane[(y + 1) * width..(y + 2) * width];
            for x in (0..width - 1).step_by(step) {
                let g = [top[x] as i32, top[x + 1] as i32, bottom[x] as i32, bottom[x + 1] as i32];
                c.groups += 1;
                let (rm, sm, rn, sn, flat) = classify(g);
                c.flat += flat as u64;
                c.regular_m += rm as u64;
                c.singular_m += sm as u64;
                c.regular_neg_m += rn as u64;
                c.singular_neg_m += sn as u64;
                let (rm, sm, rn, sn, _) = classify(g.map(|v| v ^ 1));
                c.inv_regular_m += rm as u64;
                c.inv_singular_m += sm as u64;
                c.inv_regular_neg_m += rn as u64;
                c.inv_singular_neg_m += sn as u64;
            }
        }
        c
    }

    /// Coefficients `(a, b, c)` of the RS quadratic in `z`, where the
    /// message length follows as `p = z / (z - 1/2)`.
    pub fn quadratic(&self) -> (f64, f64, f64) {
        let n = self.groups as f64;
        let d0 = (self.regular_m as f64 - self.singular_m as f64) / n;
        let d1 = (self.inv_regular_m as f64 - self.inv_singular_m as f64) / n;
        let dn0 = (self.regular_neg_m as f64 - self.singular_neg_m as f64) / n;
        let dn1 = (self.inv_regular_neg_m as f64 - self.inv_singular_neg_m as f64) / n;
        (2.0 * (d1 + d0), dn0 - dn1 - d1 - 3.0 * d0, d0 - dn0)
    }

    /// Estimated message length as a fraction of the plane's samples.
    pub fn estimate(&self) -> Result<f64, FailureReason> {
        if self.groups == 0 || self.flat == self.groups {
            return Err(FailureReason::DegenerateInput);
        }
        let (a, b, c) = self.quadratic();
        let rates: Vec<f64> = real_roots(a, b, c)?.into_iter().map(|z| z / (z - 0.5)).collect();
        select_rate(&rates)
    }
}

/// Mean RS message-length estimate over all channels and both tilings.
pub fn rs_analysis(img: &SampleImage) -> Result<f64, FailureReason> {
    if img.width() < 2 || img.height() < 2 {
        return Err(FailureReason::DegenerateInput);
    }
    combine_parts(img.planes().iter().flat_map(|plane| {
        [true, false].map(|overlapping| RsCounts::measure(plane, img.width(), img.height(), overlapping).estimate())
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flips_pair_values() {
        assert_eq!((0..6).map(flip_pos).collect::<Vec<_>>(), vec![1, 0, 3, 2, 5, 4]);
        assert_eq!((0..6).map(flip_neg).collect::<Vec<_>>(), vec![-1, 2, 1, 4, 3, 6]);
        assert_eq!(flip_neg(255), 256);
        for v in 0..256 {
            assert_eq!(flip_pos(flip_pos(v)), v);
            assert_eq!(flip_neg(flip_neg(v)), v);
        }
    }

    #[test]
    fn constant_image_is_degenerate() {
        let img = SampleImage::from_planes(8, 8, vec![vec![128; 64]]).unwrap();
        assert_eq!(rs_analysis(&img), Err(FailureReason::DegenerateInput));
    }

    #[test]
    fn too_small_is_degenerate() {
        let img = SampleImage::from_planes(1, 5, vec![vec![3; 5]]).unwrap();
        assert_eq!(rs_analysis(&img), Err(FailureReason::DegenerateInput));
    }

    #[test]
    fn tiling_counts() {
        let plane: Vec<u8> = (0..20).map(|i| (i * 37 % 251) as u8).collect();
        assert_eq!(RsCounts::measure(&plane, 5, 4, true).groups, 12);
        assert_eq!(RsCounts::measure(&plane, 5, 4, false).groups, 4);
    }

    #[test]
    fn single_block_classification() {
        // f([10,12,11,13]) = 2+1+2 = 5; M flips 12->13, 11->10: f = 3+3+3 = 9 (regular).
        // -M flips 12->11, 11->12: f = 1+1+1 = 3 (singular).
        let (rm, sm, rn, sn, flat) = classify([10, 12, 11, 13]);
        assert!(rm && !sm && !rn && sn && !flat);
    }
}
