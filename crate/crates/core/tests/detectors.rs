use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stegofuse_core::embedder::{allowed_bits, lsb_embed, Distribution, DistributionKind, EmbedSpec};
use stegofuse_core::synth::{photographic_cover, CoverParams};
use stegofuse_core::{run_all_detectors, DetectorId, SampleImage};

fn cover(seed: u64, channels: usize) -> SampleImage {
    photographic_cover(
        CoverParams {
            width: 260,
            height: 200,
            channels,
        },
        seed,
    )
}

fn embed(cover: &SampleImage, rate: f64, distribution: Distribution, seed: u64) -> SampleImage {
    let mut payload = vec![0u8; allowed_bits(rate, cover.sample_count()) / 8];
    ChaCha8Rng::seed_from_u64(seed).fill_bytes(&mut payload);
    lsb_embed(
        cover,
        &EmbedSpec {
            distribution,
            payload,
            target_rate: rate,
        },
    )
    .unwrap()
}

fn score(id: DetectorId, img: &SampleImage) -> f64 {
    id.run(img).score().unwrap_or_else(|| panic!("{id} failed"))
}

#[test]
fn estimators_track_the_embedding_rate() {
    for (id, rate) in [
        (DetectorId::Rs, 0.5),
        (DetectorId::SamplePairs, 0.4),
        (DetectorId::PrimarySets, 0.6),
    ] {
        for seed in 0..5 {
            let stego = embed(&cover(seed, 3), rate, Distribution::Pseudorandom { seed }, seed);
            let s = score(id, &stego);
            assert!((s - rate).abs() < 0.08, "{id} on seed {seed}: {s} vs {rate}");
        }
    }
}

#[test]
fn clean_covers_score_low() {
    for seed in 10..20 {
        let img = cover(seed, 3);
        for outcome in run_all_detectors(&img) {
            if let Some(s) = outcome.score() {
                assert!(s < 0.1, "{} scored {s} on clean cover {seed}", outcome.detector);
            }
        }
    }
}

#[test]
fn primary_sets_succeeds_on_most_images() {
    let mut ok = 0;
    let total = 40;
    for seed in 0..total {
        let rate = [0.0, 0.25, 0.5, 1.0][seed as usize % 4];
        let img = if rate == 0.0 {
            cover(seed, 3)
        } else {
            embed(&cover(seed, 3), rate, Distribution::Sequential, seed)
        };
        ok += usize::from(DetectorId::PrimarySets.run(&img).is_success());
    }
    assert!(ok * 10 >= total as usize * 9, "{ok}/{total}");
}

#[test]
fn estimates_grow_with_the_rate() {
    let base = cover(3, 3);
    for id in [DetectorId::Rs, DetectorId::SamplePairs, DetectorId::PrimarySets] {
        let scores: Vec<f64> = [0.1, 0.3, 0.5, 0.7, 0.9]
            .iter()
            .map(|&r| score(id, &embed(&base, r, Distribution::Equidistributed, 1)))
            .collect();
        assert!(scores.windows(2).all(|w| w[1] > w[0]), "{id}: {scores:?}");
    }
}

#[test]
fn grayscale_and_colour_agree() {
    // One channel of a colour cover analysed alone should estimate the same
    // rate as the colour image, give or take the channel spread.
    let colour = embed(&cover(4, 3), 0.5, Distribution::Pseudorandom { seed: 2 }, 2);
    let grey = SampleImage::from_planes(colour.width(), colour.height(), vec![colour.plane(1).to_vec()]).unwrap();
    for id in [DetectorId::Rs, DetectorId::SamplePairs, DetectorId::PrimarySets] {
        let (c, g) = (score(id, &colour), score(id, &grey));
        assert!((c - g).abs() < 0.1, "{id}: colour {c}, grey {g}");
    }
}

#[test]
fn detectors_are_deterministic() {
    let img = embed(&cover(5, 3), 0.3, DistributionKind::Pseudorandom.with_seed(9), 9);
    let a: Vec<_> = run_all_detectors(&img).iter().map(|o| o.score).collect();
    let b: Vec<_> = run_all_detectors(&img).iter().map(|o| o.score).collect();
    assert_eq!(a, b);
}

#[test]
fn chi_square_separates_full_sequential_embedding() {
    for seed in 0..5 {
        let c = cover(seed, 3);
        assert!(score(DetectorId::ChiSquare, &c) < 0.2);
        assert!(score(DetectorId::ChiSquare, &embed(&c, 1.0, Distribution::Sequential, seed)) > 0.95);
    }
}
