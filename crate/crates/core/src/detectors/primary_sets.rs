//! Primary-sets analysis over adjacent sample pairs.
//!
//! Pairs `(u, v)` are split into the primary sets
//! `X = {v even, u < v} ∪ {v odd, u > v}`,
//! `Y = {v even, u > v} ∪ {v odd, u < v}`, `Z = {u = v}` and
//! `W = {⌊u/2⌋ = ⌊v/2⌋, u ≠ v} ⊂ Y`. Natural images satisfy `|X| ≈ |Y|`;
//! random LSB flipping at rate `p` breaks that identity in a way that solves
//! to `(|W|+|Z|)/2 · p² + (2|X| − |P|) · p + |Y| − |X| = 0`.
//!
//! Both horizontal and vertical neighbours contribute pairs.

use super::quadratic::{real_roots, select_rate};
use super::{combine_parts, FailureReason};
use crate::image::SampleImage;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PrimarySetCounts {
    pub pairs: u64,
    pub x: u64,
    pub y: u64,
    pub z: u64,
    pub w: u64,
}

impl PrimarySetCounts {
    /// Tallies the pairs `(a[i], b[i])`. Branch-free so it vectorizes; the
    /// set of a pair is unpredictable on noisy images.
    fn tally(&mut self, a: &[u8], b: &[u8]) {
        let (mut x, mut z, mut w) = (0u64, 0u64, 0u64);
        for (&u, &v) in a.iter().zip(b) {
            let eq = (u == v) as u64;
            let in_x = (((v & 1) == 0) == (u < v)) as u64 & (eq ^ 1);
            let in_w = (u >> 1 == v >> 1) as u64 & (eq ^ 1) & (in_x ^ 1);
            x += in_x;
            z += eq;
            w += in_w;
        }
        let n = a.len().min(b.len()) as u64;
        self.pairs += n;
        self.x += x;
        self.z += z;
        self.w += w;
        self.y += n - x - z;
    }

    pub fn measure(plane: &[u8], width: usize, height: usize) -> Self {
        let mut c = Self::default();
        for row in plane.chunks_exact(width) {
            c.tally(&row[..width - 1], &row[1..]);
        }
        for y in 1..height {
            c.tally(&plane[(y - 1) * width..y * width], &plane[y * width..(y + 1) * width]);
        }
        c
    }

    pub fn quadratic(&self) -> (f64, f64, f64) {
        let (p, x, y, z, w) = (
            self.pairs as f64,
            self.x as f64,
            self.y as f64,
            self.z as f64,
            self.w as f64,
        );
        (0.5 * (w + z), 2.0 * x - p, y - x)
    }

    pub fn estimate(&self) -> Result<f64, FailureReason> {
        if self.x + self.y == 0 {
            return Err(FailureReason::DegenerateInput);
        }
        let (a, b, c) = self.quadratic();
        select_rate(&real_roots(a, b, c)?)
    }
}

/// Mean primary-sets embedding-rate estimate across channels.
pub fn primary_sets(img: &SampleImage) -> Result<f64, FailureReason> {
    if img.width() < 2 || img.height() < 2 {
        return Err(FailureReason::DegenerateInput);
    }
    combine_parts(
        img.planes()
            .iter()
            .map(|plane| PrimarySetCounts::measure(plane, img.width(), img.height()).estimate()),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_membership() {
        let mut c = PrimarySetCounts::default();
        // (3,4): X. (5,3): X. (5,4): Y and W. (2,3): Y and W. (1,3): Y. (7,7): Z.
        c.tally(&[3, 5, 5, 2, 1, 7], &[4, 3, 4, 3, 3, 7]);
        assert_eq!(
            c,
            PrimarySetCounts {
                pairs: 6,
                x: 2,
                y: 3,
                z: 1,
                w: 2
            }
        );
    }

    #[test]
    fn pair_count_uses_both_directions() {
        let plane: Vec<u8> = (0..12).collect();
        let c = PrimarySetCounts::measure(&plane, 4, 3);
        assert_eq!(c.pairs, 3 * 3 + 2 * 4);
    }

    #[test]
    fn constant_image_is_degenerate() {
        let img = SampleImage::from_planes(6, 6, vec![vec![200; 36]; 3]).unwrap();
        assert_eq!(primary_sets(&img), Err(FailureReason::DegenerateInput));
    }
}
