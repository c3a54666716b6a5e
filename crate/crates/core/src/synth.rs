//! Synthetic photograph-like covers for desk-scale pools.
//!
//! A cover is built from band-limited fractal texture, a lighting gradient,
//! a handful of soft-edged objects, correlated colour channels and sensor
//! noise, quantized to 8 bits and then passed through a tone curve. The tone
//! curve leaves the combed histograms typical of edited photographs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::image::SampleImage;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverParams {
    pub width: usize,
    pub height: usize,
    pub channels: usize,
}

/// Smooth value noise on a lattice with `cell` pixel spacing.
struct Lattice {
    cols: usize,
    cell: f64,
    values: Vec<f64>,
}

impl Lattice {
    fn new(rng: &mut ChaCha8Rng, width: usize, height: usize, cell: f64) -> Self {
        let cols = (width as f64 / cell).ceil() as usize + 2;
        let rows = (height as f64 / cell).ceil() as usize + 2;
        let values = (0..cols * rows).map(|_| rng.random_range(-1.0..1.0)).collect();
        Self { cols, cell, values }
    }

    fn at(&self, x: f64, y: f64) -> f64 {
        let (gx, gy) = (x / self.cell, y / self.cell);
        let (ix, iy) = (gx.floor() as usize, gy.floor() as usize);
        let smooth = |t: f64| t * t * (3.0 - 2.0 * t);
        let (tx, ty) = (smooth(gx - ix as f64), smooth(gy - iy as f64));
        let v = |cx: usize, cy: usize| self.values[cy * self.cols + cx];
        let top = v(ix, iy) * (1.0 - tx) + v(ix + 1, iy) * tx;
        let bottom = v(ix, iy + 1) * (1.0 - tx) + v(ix + 1, iy + 1) * tx;
        top * (1.0 - ty) + bottom * ty
    }
}

struct Blob {
    cx: f64,
    cy: f64,
    rx: f64,
    ry: f64,
    softness: f64,
    shift: [f64; 3],
}

impl Blob {
    fn weight(&self, x: f64, y: f64) -> f64 {
        let dx = (x - self.cx) / self.rx;
        let dy = (y - self.cy) / self.ry;
        let r = (dx * dx + dy * dy).sqrt();
        // Distance to the rim in pixels, smoothed over `softness`.
        let edge = (1.0 - r) * self.rx.min(self.ry);
        (0.5 + edge / (2.0 * self.softness)).clamp(0.0, 1.0)
    }
}

fn fractal(rng: &mut ChaCha8Rng, width: usize, height: usize) -> Vec<(Lattice, f64)> {
    let roughness = rng.random_range(0.55..0.95);
    let mut octaves = Vec::new();
    let mut cell = (width.max(height) as f64) / rng.random_range(1.5..3.0);
    let mut amp = rng.random_range(35.0..60.0);
    while cell >= 2.0 {
        octaves.push((Lattice::new(rng, width, height, cell), amp));
        cell /= 2.0;
        amp *= roughness * 0.6;
    }
    octaves
}

/// Generates one cover deterministically from `seed`.
pub fn photographic_cover(params: CoverParams, seed: u64) -> SampleImage {
    let CoverParams {
        width,
        height,
        channels,
    } = params;
    assert!(channels == 1 || channels == 3, "covers have 1 or 3 channels");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let luminance = fractal(&mut rng, width, height);
    let chroma: Vec<Vec<(Lattice, f64)>> = (0..channels)
        .map(|_| {
            let cell = width.max(height) as f64 / rng.random_range(1.0..2.5);
            vec![(Lattice::new(&mut rng, width, height, cell), rng.random_range(8.0..25.0))]
        })
        .collect();
    let gains: Vec<f64> = (0..channels).map(|_| rng.random_range(0.8..1.15)).collect();
    let base = rng.random_range(95.0..150.0);
    let (gx, gy) = (rng.random_range(-40.0..40.0), rng.random_range(-40.0..40.0));
    let blobs: Vec<Blob> = (0..rng.random_range(2..9))
        .map(|_| Blob {
            cx: rng.random_range(0.0..width as f64),
            cy: rng.random_range(0.0..height as f64),
            rx: rng.random_range(0.05..0.35) * width as f64,
            ry: rng.random_range(0.05..0.35) * height as f64,
            softness: rng.random_range(0.6..3.0),
            shift: {
                let s = rng.random_range(-55.0..55.0);
                [
                    s + rng.random_range(-12.0..12.0),
                    s + rng.random_range(-12.0..12.0),
                    s + rng.random_range(-12.0..12.0),
                ]
            },
        })
        .collect();
    let noise = Normal::new(0.0, rng.random_range(0.25..2.2)).expect("valid sigma");
    let gamma: f64 = rng.random_range(0.75..1.35);
    let stretch: f64 = rng.random_range(1.02..1.6);
    let lut: Vec<u8> = (0..256)
        .map(|v| {
            let t = (v as f64 / 255.0).powf(gamma);
            (((t - 0.5) * stretch + 0.5) * 255.0).round().clamp(0.0, 255.0) as u8
        })
        .collect();

    let mut planes = vec![vec![0u8; width * height]; channels];
    for y in 0..height {
        for x in 0..width {
            let (fx, fy) = (x as f64, y as f64);
            let mut lum = base + gx * (fx / width as f64 - 0.5) + gy * (fy / height as f64 - 0.5);
            for (lattice, amp) in &luminance {
                lum += amp * lattice.at(fx, fy);
            }
            let mut shift = [0.0; 3];
            for blob in &blobs {
                let w = blob.weight(fx, fy);
                if w > 0.0 {
                    for (s, b) in shift.iter_mut().zip(blob.shift) {
                        *s = *s * (1.0 - w) + b * w;
                    }
                }
            }
            for c in 0..channels {
                let mut v = lum * gains[c] + shift[c];
                for (lattice, amp) in &chroma[c] {
                    v += amp * lattice.at(fx, fy);
                }
                v += noise.sample(&mut rng);
                let q = v.round().clamp(0.0, 255.0) as usize;
                planes[c][y * width + x] = lut[q];
            }
        }
    }
    SampleImage::from_planes(width, height, planes).expect("consistent layout")
}

/// Picks a cover size between `min_pixels` and `max_pixels` with a 4:3-ish aspect.
pub fn random_dimensions(rng: &mut impl Rng, min_pixels: usize, max_pixels: usize) -> (usize, usize) {
    let pixels = rng.random_range(min_pixels as f64..=max_pixels as f64);
    let aspect = rng.random_range(0.66..1.5);
    let width = (pixels * aspect).sqrt().round().max(2.0) as usize;
    let height = (pixels / width as f64).round().max(2.0) as usize;
    (width, height)
}
