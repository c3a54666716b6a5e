use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;
use stegofuse_bench::{cover, stego};
use stegofuse_core::{fuse, ClassicSuite, FusionConfig, FusionMode};

// Fast fusion stops after primary sets on a clean file and runs all four
// stages on a heavily loaded one; standard fusion always runs all four.
fn fusion(c: &mut Criterion) {
    let images = [("clean", cover()), ("stego-1.0", stego(1.0))];
    let mut group = c.benchmark_group("fusion");
    for mode in [FusionMode::Standard, FusionMode::Fast] {
        let config = FusionConfig::new(mode, 0.2);
        for (label, img) in &images {
            group.bench_with_input(BenchmarkId::new(mode.name(), label), img, |b, img| {
                b.iter(|| black_box(fuse(img, &config, &ClassicSuite)))
            });
        }
    }
    group.finish();
}

criterion_group!(benches, fusion);
criterion_main!(benches);
