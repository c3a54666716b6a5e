use proptest::prelude::*;
use stegofuse_core::embedder::{extract_payload, lsb_embed, DistributionKind, EmbedSpec};
use stegofuse_core::{decode_image, SampleImage};

fn image(width: usize, height: usize, channels: usize, seed: u8) -> SampleImage {
    let planes = (0..channels)
        .map(|c| {
            (0..width * height)
                .map(|i| (i as u8).wrapping_mul(31).wrapping_add(seed ^ c as u8))
                .collect()
        })
        .collect();
    SampleImage::from_planes(width, height, planes).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn payload_survives_saving(
        (w, h) in (2usize..40, 2usize..40),
        channels in prop::sample::select(vec![1usize, 3]),
        kind in prop::sample::select(DistributionKind::ALL.to_vec()),
        seed in any::<u64>(),
        fill in 0.01f64..1.0,
        bmp in any::<bool>(),
    ) {
        let cover = image(w, h, channels, seed as u8);
        let len = ((cover.sample_count() / 8) as f64 * fill).ceil().max(1.0) as usize;
        prop_assume!(len * 8 <= cover.sample_count());
        let payload: Vec<u8> = (0..len).map(|i| (seed >> (i % 57)) as u8 ^ i as u8).collect();
        let distribution = kind.with_seed(seed);
        let stego = lsb_embed(&cover, &EmbedSpec { distribution, payload: payload.clone(), target_rate: 1.0 }).unwrap();

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join(if bmp && channels == 3 { "s.bmp" } else { "s.png" });
        stego.save(&path).unwrap();
        let reloaded = decode_image(&path).unwrap();
        prop_assert_eq!(reloaded.planes(), stego.planes());
        prop_assert_eq!(extract_payload(&reloaded, distribution, len), payload);
        for (c, s) in cover.planes().iter().zip(reloaded.planes()) {
            prop_assert!(c.iter().zip(s).all(|(a, b)| a >> 1 == b >> 1));
        }
    }
}

#[test]
fn grayscale_bmp_reloads_as_three_equal_channels() {
    let grey = image(9, 7, 1, 4);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.bmp");
    grey.save(&path).unwrap();
    let reloaded = decode_image(&path).unwrap();
    assert_eq!(reloaded.channels(), 3);
    assert!(reloaded.planes().iter().all(|p| p == grey.plane(0)));
}
