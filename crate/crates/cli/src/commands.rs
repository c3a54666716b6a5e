//! Subcommands for building test material and measuring the detectors.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Subcommand};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stegofuse_core::embedder::{allowed_bits, lsb_embed, DistributionKind, EmbedSpec};
use stegofuse_core::evaluation::{
    auc_csv, default_thresholds, labelled, roc_csv, roc_curve, score_pool, speed_benchmark_pool, speed_csv,
    threshold_csv, threshold_table, FusionRule, ScoredImage, SpeedTarget,
};
use stegofuse_core::fusion::DEFAULT_THRESHOLD;
use stegofuse_core::pool::{write_synthetic_covers, MANIFEST_FILE};
use stegofuse_core::{decode_image, generate_pool, FusionConfig, FusionMode, PoolManifest, PoolOptions};

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Hide a payload in the LSBs of a lossless image.
    Embed(EmbedArgs),
    /// Write synthetic photograph-like covers.
    Covers(CoversArgs),
    /// Build a labelled pool of clean and stego images with a manifest.
    Pool(PoolArgs),
    /// Score a pool: ROC curves, AUC per fusion rule, threshold tables and speed trials.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct EmbedArgs {
    /// Lossless cover image (PNG or BMP).
    pub cover: PathBuf,
    /// Output image; the extension selects PNG or BMP.
    pub output: PathBuf,
    /// Embedding rate: fraction of the LSB capacity to use.
    #[arg(long, default_value_t = 1.0)]
    pub rate: f64,
    #[arg(long, default_value = "pseudorandom")]
    pub distribution: DistributionKind,
    /// Seed for pseudorandom selection and for generated payloads.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// File to hide. Without it, random bytes filling the rate are embedded.
    #[arg(long)]
    pub payload: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CoversArgs {
    pub output: PathBuf,
    #[arg(long, default_value_t = 200)]
    pub count: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 50_000)]
    pub min_pixels: usize,
    #[arg(long, default_value_t = 250_000)]
    pub max_pixels: usize,
}

#[derive(Debug, Args)]
pub struct PoolArgs {
    /// Directory of lossless covers.
    pub covers: PathBuf,
    pub output: PathBuf,
    #[arg(long, default_value_t = 0.25)]
    pub stego_fraction: f64,
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.25,0.5,1.0")]
    pub rates: Vec<f64>,
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "sequential,pseudorandom,equidistributed"
    )]
    pub distributions: Vec<DistributionKind>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Pool directory containing manifest.csv.
    pub pool: PathBuf,
    /// Directory for the CSV tables.
    #[arg(long, default_value = "bench-results")]
    pub output: PathBuf,
    #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
    pub threshold: f64,
    /// Skip the timed trials.
    #[arg(long)]
    pub no_speed: bool,
}

/// Runs `command`. `jobs` bounds the scoring threads of `bench`; its speed
/// trials always run on one thread.
pub fn run(command: Command, jobs: Option<usize>, out: &mut dyn Write) -> Result<()> {
    match command {
        Command::Embed(a) => embed(a, out),
        Command::Covers(a) => covers(a, out),
        Command::Pool(a) => pool(a, out),
        Command::Bench(a) => bench(a, jobs.unwrap_or_else(default_workers), out),
    }
}

pub fn default_workers() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

fn embed(a: EmbedArgs, out: &mut dyn Write) -> Result<()> {
    let cover = decode_image(&a.cover)?;
    let payload = match &a.payload {
        Some(path) => fs::read(path).with_context(|| format!("reading payload {}", path.display()))?,
        None => {
            let mut bytes = vec![0u8; allowed_bits(a.rate, cover.sample_count()) / 8];
            ChaCha8Rng::seed_from_u64(a.seed).fill_bytes(&mut bytes);
            bytes
        }
    };
    let spec = EmbedSpec {
        distribution: a.distribution.with_seed(a.seed),
        payload,
        target_rate: a.rate,
    };
    let stego = lsb_embed(&cover, &spec)?;
    stego.save(&a.output)?;
    writeln!(
        out,
        "embedded {} bytes into {} ({:.4} of capacity, {})",
        spec.payload.len(),
        a.output.display(),
        (spec.payload.len() * 8) as f64 / cover.sample_count() as f64,
        spec.distribution
    )?;
    Ok(())
}

fn covers(a: CoversArgs, out: &mut dyn Write) -> Result<()> {
    if a.min_pixels == 0 || a.min_pixels > a.max_pixels {
        bail!("pixel bounds must satisfy 0 < min <= max");
    }
    let written = write_synthetic_covers(&a.output, a.count, a.seed, a.min_pixels, a.max_pixels)?;
    writeln!(out, "wrote {} covers to {}", written.len(), a.output.display())?;
    Ok(())
}

fn pool(a: PoolArgs, out: &mut dyn Write) -> Result<()> {
    let options = PoolOptions {
        stego_fraction: a.stego_fraction,
        rates: a.rates,
        distributions: a.distributions,
        seed: a.seed,
    };
    let manifest = generate_pool(&a.covers, &a.output, &options)?;
    writeln!(
        out,
        "pool {}: {} clean, {} stego; manifest {}",
        a.output.display(),
        manifest.clean_count(),
        manifest.stego_count(),
        a.output.join(MANIFEST_FILE).display()
    )?;
    Ok(())
}

fn write_table(dir: &Path, name: &str, bytes: &[u8]) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))
}

fn bench(a: BenchArgs, workers: usize, out: &mut dyn Write) -> Result<()> {
    let manifest = PoolManifest::load(&a.pool.join(MANIFEST_FILE))?;
    let scored = score_pool(&a.pool, &manifest, workers)?;
    let standard = FusionConfig::new(FusionMode::Standard, a.threshold);
    let fast = FusionConfig::new(FusionMode::Fast, a.threshold);
    let standard_scores = labelled(&scored, |i: &ScoredImage| i.standard_score(&standard).unwrap_or(0.0));
    let fast_scores = labelled(&scored, |i: &ScoredImage| i.fast_score(&fast).unwrap_or(0.0));

    let mut aucs: Vec<(String, f64)> = Vec::new();
    let mut curves = Vec::new();
    for rule in FusionRule::all() {
        let curve = roc_curve(&labelled(&scored, |i| rule.apply(&i.outcomes)))?;
        aucs.push((rule.to_string(), curve.auc));
        curves.push((rule.to_string(), curve));
    }
    let fast_curve = roc_curve(&fast_scores)?;
    aucs.push(("fast fusion".into(), fast_curve.auc));
    curves.push(("fast fusion".into(), fast_curve));

    fs::create_dir_all(&a.output).with_context(|| format!("creating {}", a.output.display()))?;
    write_table(&a.output, "auc.csv", &auc_csv(&aucs))?;
    write_table(&a.output, "roc.csv", &roc_csv(&curves))?;
    write_table(
        &a.output,
        "thresholds_standard.csv",
        &threshold_csv(&threshold_table(&standard_scores, &default_thresholds())),
    )?;
    write_table(
        &a.output,
        "thresholds_fast.csv",
        &threshold_csv(&threshold_table(&fast_scores, &default_thresholds())),
    )?;

    writeln!(
        out,
        "pool: {} clean, {} stego",
        manifest.clean_count(),
        manifest.stego_count()
    )?;
    for (name, auc) in &aucs {
        writeln!(out, "{name:>16}  AUC {auc:.4}")?;
    }
    if !a.no_speed {
        let report = speed_benchmark_pool(&a.pool, &manifest, &SpeedTarget::all(), a.threshold)?;
        write_table(&a.output, "speed.csv", &speed_csv(&report))?;
        for e in &report.entries {
            writeln!(
                out,
                "{:>16}  {:.1} ms mean over {} trials",
                e.target.to_string(),
                e.mean_elapsed_ms(),
                e.trials.len()
            )?;
        }
    }
    writeln!(out, "tables written to {}", a.output.display())?;
    Ok(())
}
