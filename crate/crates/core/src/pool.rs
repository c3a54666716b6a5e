//! Labelled test pools: clean copies plus LSB-replacement stego variants, with
//! a ground-truth manifest.
//!
//! Payloads are seeded random bytes. Compressed archives, the usual real-world
//! payload, are statistically close to uniform, so this reproduces their
//! effect on the LSB plane.

use std::collections::HashSet;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::embedder::{allowed_bits, lsb_embed, DistributionKind, EmbedError, EmbedSpec};
use crate::image::{decode_image, scan_directory, FileFormat, ImageError, SampleImage};

pub const MANIFEST_FILE: &str = "manifest.csv";
pub const MANIFEST_HEADER: [&str; 6] = ["path", "label", "distribution", "true_rate", "payload_bytes", "seed"];

#[derive(Debug, Error)]
pub enum PoolError {
    #[error("no decodable lossless covers in {0}")]
    NoCovers(PathBuf),
    #[error("cannot write pool output: {0}")]
    UnwritableOutput(String),
    #[error("invalid pool options: {0}")]
    InvalidOptions(String),
    #[error(transparent)]
    Image(#[from] ImageError),
    #[error("embedding into {path} failed: {source}")]
    Embed { path: PathBuf, source: EmbedError },
    #[error("malformed manifest: {0}")]
    Manifest(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Stego,
    Clean,
}

impl Label {
    pub fn name(self) -> &'static str {
        match self {
            Label::Stego => "stego",
            Label::Clean => "clean",
        }
    }

    pub fn is_stego(self) -> bool {
        self == Label::Stego
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ManifestRow {
    /// File name relative to the pool directory.
    pub path: String,
    pub label: Label,
    pub distribution: Option<DistributionKind>,
    pub true_rate: f64,
    pub payload_bytes: u64,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PoolManifest {
    pub rows: Vec<ManifestRow>,
}

fn kind_name(kind: DistributionKind) -> &'static str {
    match kind {
        DistributionKind::Sequential => "sequential",
        DistributionKind::Pseudorandom => "pseudorandom",
        DistributionKind::Equidistributed => "equidistributed",
    }
}

impl PoolManifest {
    pub fn stego_count(&self) -> usize {
        self.rows.iter().filter(|r| r.label.is_stego()).count()
    }

    pub fn clean_count(&self) -> usize {
        self.rows.len() - self.stego_count()
    }

    pub fn get(&self, path: &str) -> Option<&ManifestRow> {
        self.rows.iter().find(|r| r.path == path)
    }

    pub fn to_csv(&self) -> Vec<u8> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(MANIFEST_HEADER).expect("in-memory write");
        for r in &self.rows {
            w.write_record([
                r.path.clone(),
                r.label.name().to_string(),
                r.distribution.map(kind_name).unwrap_or_default().to_string(),
                format!("{:.6}", r.true_rate),
                r.payload_bytes.to_string(),
                r.seed.map(|s| s.to_string()).unwrap_or_default(),
            ])
            .expect("in-memory write");
        }
        w.into_inner().expect("in-memory flush")
    }

    pub fn from_csv(data: &[u8]) -> Result<Self, PoolError> {
        let mut reader = csv::Reader::from_reader(data);
        let bad = |e: String| PoolError::Manifest(e);
        let mut rows = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| bad(e.to_string()))?;
            if record.len() != MANIFEST_HEADER.len() {
                return Err(bad(format!("expected 6 columns, got {}", record.len())));
            }
            let label = match &record[1] {
                "stego" => Label::Stego,
                "clean" => Label::Clean,
                other => return Err(bad(format!("unknown label '{other}'"))),
            };
            let distribution = match &record[2] {
                "" => None,
                s => Some(s.parse::<DistributionKind>().map_err(bad)?),
            };
            let num = |s: &str| s.parse::<f64>().map_err(|e| bad(format!("'{s}': {e}")));
            let int = |s: &str| s.parse::<u64>().map_err(|e| bad(format!("'{s}': {e}")));
            rows.push(ManifestRow {
                path: record[0].to_string(),
                label,
                distribution,
                true_rate: num(&record[3])?,
                payload_bytes: int(&record[4])?,
                seed: match &record[5] {
                    "" => None,
                    s => Some(int(s)?),
                },
            });
        }
        Ok(Self { rows })
    }

    pub fn load(path: &Path) -> Result<Self, PoolError> {
        let data = fs::read(path).map_err(|e| PoolError::Manifest(format!("{}: {e}", path.display())))?;
        Self::from_csv(&data)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PoolOptions {
    pub stego_fraction: f64,
    pub rates: Vec<f64>,
    pub distributions: Vec<DistributionKind>,
    pub seed: u64,
}

struct Cover {
    path: PathBuf,
    image: SampleImage,
}

fn unwritable(path: &Path, e: impl std::fmt::Display) -> PoolError {
    PoolError::UnwritableOutput(format!("{}: {e}", path.display()))
}

/// Builds a labelled pool in `out` from the lossless covers in `covers`.
///
/// A seeded shuffle picks `round(stego_fraction × covers)` files to carry
/// payloads; those take the (rate, distribution) combinations round-robin in
/// file-name order. Clean files are copied byte for byte, stego files are
/// written as PNG. The manifest is written to `out/manifest.csv`.
pub fn generate_pool(covers: &Path, out: &Path, options: &PoolOptions) -> Result<PoolManifest, PoolError> {
    if !(0.0..=1.0).contains(&options.stego_fraction) {
        return Err(PoolError::InvalidOptions(format!(
            "stego fraction {} outside [0, 1]",
            options.stego_fraction
        )));
    }
    if let Some(r) = options.rates.iter().find(|r| !(**r > 0.0 && **r <= 1.0)) {
        return Err(PoolError::InvalidOptions(format!("embedding rate {r} outside (0, 1]")));
    }
    let combos: Vec<(f64, DistributionKind)> = options
        .rates
        .iter()
        .flat_map(|&r| options.distributions.iter().map(move |&d| (r, d)))
        .collect();

    let sources: Vec<Cover> = scan_directory(covers)?
        .into_iter()
        .filter(|t| matches!(t.format, FileFormat::Png | FileFormat::Bmp))
        .filter_map(|t| decode_image(&t.path).ok().map(|image| Cover { path: t.path, image }))
        .collect();
    if sources.is_empty() {
        return Err(PoolError::NoCovers(covers.to_path_buf()));
    }
    let n_stego = (options.stego_fraction * sources.len() as f64).round() as usize;
    if n_stego > 0 && combos.is_empty() {
        return Err(PoolError::InvalidOptions(
            "stego files requested without rates or distributions".into(),
        ));
    }
    fs::create_dir_all(out).map_err(|e| unwritable(out, e))?;

    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let mut order: Vec<usize> = (0..sources.len()).collect();
    for i in (1..order.len()).rev() {
        let j = rng.random_range(0..=i);
        order.swap(i, j);
    }
    let mut stego_idx: Vec<usize> = order[..n_stego].to_vec();
    stego_idx.sort_unstable();
    let file_seeds: Vec<u64> = (0..sources.len()).map(|_| rng.next_u64()).collect();

    // Output names, de-duplicated so a.png and a.bmp cannot collide.
    let mut taken = HashSet::new();
    let names: Vec<String> = sources
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let file_name = c
                .path
                .file_name()
                .and_then(|s| s.to_str())
                .unwrap_or("cover")
                .to_string();
            let stem = c
                .path
                .file_stem()
                .and_then(|s| s.to_str())
                .unwrap_or("cover")
                .to_string();
            let candidate = if stego_idx.binary_search(&i).is_ok() {
                format!("{stem}.png")
            } else {
                file_name
            };
            let mut name = candidate.clone();
            let mut k = 1;
            while !taken.insert(name.clone()) {
                let (base, ext) = candidate.rsplit_once('.').unwrap_or((&candidate, "png"));
                name = format!("{base}_{k}.{ext}");
                k += 1;
            }
            name
        })
        .collect();

    let mut rows: Vec<ManifestRow> = (0..sources.len())
        .into_par_iter()
        .map(|i| {
            let cover = &sources[i];
            let target = out.join(&names[i]);
            match stego_idx.binary_search(&i) {
                Err(_) => {
                    fs::copy(&cover.path, &target).map_err(|e| unwritable(&target, e))?;
                    Ok(ManifestRow {
                        path: names[i].clone(),
                        label: Label::Clean,
                        distribution: None,
                        true_rate: 0.0,
                        payload_bytes: 0,
                        seed: None,
                    })
                }
                Ok(k) => {
                    let (rate, kind) = combos[k % combos.len()];
                    let seed = file_seeds[i];
                    let capacity = cover.image.sample_count();
                    let mut payload = vec![0u8; allowed_bits(rate, capacity) / 8];
                    ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_0fda_7a00).fill_bytes(&mut payload);
                    let distribution = kind.with_seed(seed);
                    let spec = EmbedSpec {
                        distribution,
                        payload,
                        target_rate: rate,
                    };
                    let stego = lsb_embed(&cover.image, &spec).map_err(|source| PoolError::Embed {
                        path: cover.path.clone(),
                        source,
                    })?;
                    stego.save(&target).map_err(|e| unwritable(&target, e))?;
                    let payload_bytes = spec.payload.len() as u64;
                    Ok(ManifestRow {
                        path: names[i].clone(),
                        label: Label::Stego,
                        distribution: Some(kind),
                        // Rounded to the precision the manifest stores.
                        true_rate: ((payload_bytes * 8) as f64 / capacity as f64 * 1e6).round() / 1e6,
                        payload_bytes,
                        seed: distribution.seed(),
                    })
                }
            }
        })
        .collect::<Result<_, PoolError>>()?;
    rows.sort_by(|a, b| a.path.cmp(&b.path));
    let manifest = PoolManifest { rows };
    let manifest_path = out.join(MANIFEST_FILE);
    fs::write(&manifest_path, manifest.to_csv()).map_err(|e| unwritable(&manifest_path, e))?;
    Ok(manifest)
}

/// Writes `count` synthetic covers as PNG files named `cover_0000.png`, ...
pub fn write_synthetic_covers(
    dir: &Path,
    count: usize,
    seed: u64,
    min_pixels: usize,
    max_pixels: usize,
) -> io::Result<Vec<PathBuf>> {
    use crate::synth::{photographic_cover, random_dimensions, CoverParams};
    fs::create_dir_all(dir)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let jobs: Vec<(PathBuf, usize, usize, u64)> = (0..count)
        .map(|i| {
            let (w, h) = random_dimensions(&mut rng, min_pixels, max_pixels);
            (dir.join(format!("cover_{i:04}.png")), w, h, rng.next_u64())
        })
        .collect();
    jobs.par_iter()
        .map(|(path, w, h, s)| {
            photographic_cover(
                CoverParams {
                    width: *w,
                    height: *h,
                    channels: 3,
                },
                *s,
            )
            .save(path)
            .map_err(|e| io::Error::other(e.to_string()))?;
            Ok(path.clone())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedder::extract_payload;

    fn covers(n: usize) -> tempfile::TempDir {
        let dir = tempfile::tempdir().unwrap();
        write_synthetic_covers(dir.path(), n, 17, 1500, 3000).unwrap();
        dir
    }

    fn opts(fraction: f64, rates: Vec<f64>, distributions: Vec<DistributionKind>) -> PoolOptions {
        PoolOptions {
            stego_fraction: fraction,
            rates,
            distributions,
            seed: 2024,
        }
    }

    #[test]
    fn counts_and_round_robin_rates() {
        let src = covers(12);
        let out = tempfile::tempdir().unwrap();
        let m = generate_pool(
            src.path(),
            out.path(),
            &opts(0.5, vec![0.2, 0.5], vec![DistributionKind::Sequential]),
        )
        .unwrap();
        assert_eq!(m.rows.len(), 12);
        assert_eq!((m.clean_count(), m.stego_count()), (6, 6));
        let at = |r: f64| {
            m.rows
                .iter()
                .filter(|row| row.label.is_stego() && (row.true_rate - r).abs() < 0.01)
                .count()
        };
        assert_eq!((at(0.2), at(0.5)), (3, 3));
        for row in &m.rows {
            assert!(out.path().join(&row.path).is_file());
            match row.label {
                Label::Stego => assert!(row.distribution.is_some() && row.true_rate > 0.0 && row.payload_bytes > 0),
                Label::Clean => assert_eq!((row.true_rate, row.payload_bytes, row.distribution), (0.0, 0, None)),
            }
        }
        assert_eq!(PoolManifest::load(&out.path().join(MANIFEST_FILE)).unwrap(), m);
    }

    #[test]
    fn zero_fraction_is_all_clean() {
        let src = covers(4);
        let out = tempfile::tempdir().unwrap();
        let m = generate_pool(
            src.path(),
            out.path(),
            &opts(0.0, vec![0.5], DistributionKind::ALL.to_vec()),
        )
        .unwrap();
        assert_eq!(m.stego_count(), 0);
        for row in &m.rows {
            let a = fs::read(src.path().join(&row.path)).unwrap();
            let b = fs::read(out.path().join(&row.path)).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn same_seed_same_manifest() {
        let src = covers(6);
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        let o = opts(0.5, vec![0.25, 1.0], DistributionKind::ALL.to_vec());
        generate_pool(src.path(), a.path(), &o).unwrap();
        generate_pool(src.path(), b.path(), &o).unwrap();
        assert_eq!(
            fs::read(a.path().join(MANIFEST_FILE)).unwrap(),
            fs::read(b.path().join(MANIFEST_FILE)).unwrap()
        );
    }

    #[test]
    fn stego_files_carry_their_payload() {
        let src = covers(4);
        let out = tempfile::tempdir().unwrap();
        let m = generate_pool(
            src.path(),
            out.path(),
            &opts(1.0, vec![0.5], vec![DistributionKind::Pseudorandom]),
        )
        .unwrap();
        for row in &m.rows {
            let stego = decode_image(&out.path().join(&row.path)).unwrap();
            let cover = decode_image(&src.path().join(&row.path)).unwrap();
            let seed = row.seed.unwrap();
            let mut expected = vec![0u8; row.payload_bytes as usize];
            ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_0fda_7a00).fill_bytes(&mut expected);
            let got = extract_payload(&stego, DistributionKind::Pseudorandom.with_seed(seed), expected.len());
            assert_eq!(got, expected);
            assert!((0..cover.sample_count()).all(|i| cover.sample(i) >> 1 == stego.sample(i) >> 1));
        }
    }

    #[test]
    fn empty_covers_dir_is_an_error() {
        let src = tempfile::tempdir().unwrap();
        fs::write(src.path().join("readme.txt"), "no images").unwrap();
        let out = tempfile::tempdir().unwrap();
        let err = generate_pool(
            src.path(),
            out.path(),
            &opts(0.5, vec![0.5], vec![DistributionKind::Sequential]),
        );
        assert!(matches!(err, Err(PoolError::NoCovers(_))));
    }

    #[test]
    fn invalid_options_are_rejected() {
        let src = covers(2);
        let out = tempfile::tempdir().unwrap();
        for o in [
            opts(1.5, vec![0.5], vec![DistributionKind::Sequential]),
            opts(0.5, vec![0.0], vec![DistributionKind::Sequential]),
            opts(0.5, vec![], vec![]),
        ] {
            assert!(matches!(
                generate_pool(src.path(), out.path(), &o),
                Err(PoolError::InvalidOptions(_))
            ));
        }
    }

    #[test]
    fn manifest_csv_shape() {
        let m = PoolManifest {
            rows: vec![
                ManifestRow {
                    path: "a.png".into(),
                    label: Label::Clean,
                    distribution: None,
                    true_rate: 0.0,
                    payload_bytes: 0,
                    seed: None,
                },
                ManifestRow {
                    path: "b.png".into(),
                    label: Label::Stego,
                    distribution: Some(DistributionKind::Pseudorandom),
                    true_rate: 0.25,
                    payload_bytes: 1200,
                    seed: Some(9),
                },
            ],
        };
        let text = String::from_utf8(m.to_csv()).unwrap();
        assert_eq!(
            text,
            "path,label,distribution,true_rate,payload_bytes,seed\n\
             a.png,clean,,0.000000,0,\n\
             b.png,stego,pseudorandom,0.250000,1200,9\n"
        );
        assert_eq!(PoolManifest::from_csv(text.as_bytes()).unwrap(), m);
    }
}
