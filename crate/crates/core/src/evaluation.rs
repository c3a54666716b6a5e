//! Pool-based evaluation: ROC curves and AUC, comparison of fusion rules,
//! threshold tables and timed speed trials.

use std::fmt;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use thiserror::Error;

use crate::detectors::{ClassicSuite, DetectorId, DetectorOutcome, DetectorSuite};
use crate::fusion::{fast_fusion, fuse, standard_fusion, FusionConfig, FusionMode};
use crate::image::{decode_image, ImageError, SampleImage};
use crate::pool::{Label, PoolManifest};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("ROC analysis needs both stego and clean samples")]
    SingleClassInput,
    #[error(transparent)]
    Image(#[from] ImageError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RocPoint {
    /// Scores at or above this value are called stego. The first point uses +∞.
    pub threshold: f64,
    pub fall_out: f64,
    pub sensitivity: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RocCurve {
    pub points: Vec<RocPoint>,
    pub auc: f64,
}

/// ROC curve over every distinct score, with the AUC by trapezoidal integration.
/// `samples` pairs a score with whether the file is stego.
pub fn roc_curve(samples: &[(f64, bool)]) -> Result<RocCurve, EvalError> {
    let positives = samples.iter().filter(|s| s.1).count();
    let negatives = samples.len() - positives;
    if positives == 0 || negatives == 0 {
        return Err(EvalError::SingleClassInput);
    }
    let mut sorted: Vec<(f64, bool)> = samples.to_vec();
    sorted.sort_by(|a, b| b.0.total_cmp(&a.0));

    let mut points = vec![RocPoint {
        threshold: f64::INFINITY,
        fall_out: 0.0,
        sensitivity: 0.0,
    }];
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut i = 0;
    while i < sorted.len() {
        let threshold = sorted[i].0;
        while i < sorted.len() && sorted[i].0 == threshold {
            if sorted[i].1 {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        points.push(RocPoint {
            threshold,
            fall_out: fp as f64 / negatives as f64,
            sensitivity: tp as f64 / positives as f64,
        });
    }
    let auc = points
        .windows(2)
        .map(|w| (w[1].fall_out - w[0].fall_out) * (w[1].sensitivity + w[0].sensitivity) / 2.0)
        .sum();
    Ok(RocCurve { points, auc })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdRow {
    pub threshold: f64,
    pub fall_out: f64,
    pub sensitivity: f64,
}

/// Fall-out and sensitivity at each requested threshold (score ≥ threshold is stego).
/// A class absent from `samples` reports a rate of 0.
pub fn threshold_table(samples: &[(f64, bool)], thresholds: &[f64]) -> Vec<ThresholdRow> {
    let positives = samples.iter().filter(|s| s.1).count();
    let negatives = samples.len() - positives;
    let rate = |hits: usize, total: usize| if total == 0 { 0.0 } else { hits as f64 / total as f64 };
    thresholds
        .iter()
        .map(|&threshold| {
            let tp = samples.iter().filter(|s| s.1 && s.0 >= threshold).count();
            let fp = samples.iter().filter(|s| !s.1 && s.0 >= threshold).count();
            ThresholdRow {
                threshold,
                fall_out: rate(fp, negatives),
                sensitivity: rate(tp, positives),
            }
        })
        .collect()
}

/// Thresholds 0.00, 0.05, ..., 1.00.
pub fn default_thresholds() -> Vec<f64> {
    (0..=20).map(|i| i as f64 / 20.0).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FusionRule {
    Max,
    ArithmeticMean,
    GeometricMean,
    Single(DetectorId),
}

impl FusionRule {
    pub fn all() -> Vec<FusionRule> {
        let mut rules = vec![FusionRule::Max, FusionRule::ArithmeticMean, FusionRule::GeometricMean];
        rules.extend(DetectorId::REPORT_ORDER.map(FusionRule::Single));
        rules
    }

    /// Fused score over the successful outcomes. A file with no usable score
    /// scores 0: a detector that cannot grade a file raises no alarm.
    pub fn apply(self, outcomes: &[DetectorOutcome]) -> f64 {
        let scores: Vec<f64> = outcomes.iter().filter_map(|o| o.score()).collect();
        if let FusionRule::Single(id) = self {
            return outcomes
                .iter()
                .find(|o| o.detector == id)
                .and_then(|o| o.score())
                .unwrap_or(0.0);
        }
        if scores.is_empty() {
            return 0.0;
        }
        let n = scores.len() as f64;
        match self {
            FusionRule::Max => scores.iter().copied().fold(0.0, f64::max),
            FusionRule::ArithmeticMean => scores.iter().sum::<f64>() / n,
            FusionRule::GeometricMean => {
                if scores.contains(&0.0) {
                    0.0
                } else {
                    (scores.iter().map(|s| s.ln()).sum::<f64>() / n).exp()
                }
            }
            FusionRule::Single(_) => unreachable!(),
        }
    }
}

impl fmt::Display for FusionRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FusionRule::Max => f.write_str("max"),
            FusionRule::ArithmeticMean => f.write_str("arithmetic mean"),
            FusionRule::GeometricMean => f.write_str("geometric mean"),
            FusionRule::Single(id) => write!(f, "{id}"),
        }
    }
}

/// One pool file with its ground truth and all four detector outcomes.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredImage {
    pub path: String,
    pub label: Label,
    pub true_rate: f64,
    pub file_size: u64,
    /// Report order: primary sets, chi square, sample pairs, RS.
    pub outcomes: Vec<DetectorOutcome>,
}

impl ScoredImage {
    pub fn standard_score(&self, config: &FusionConfig) -> Option<f64> {
        standard_fusion(&self.outcomes, config).fusion_score
    }

    /// Replays the fast cascade over the stored outcomes.
    pub fn fast_score(&self, config: &FusionConfig) -> Option<f64> {
        let replay = Replay(&self.outcomes);
        let dummy = SampleImage::from_planes(1, 1, vec![vec![0]]).expect("1x1 image");
        fast_fusion(&dummy, config, &replay).fusion_score
    }
}

struct Replay<'a>(&'a [DetectorOutcome]);

impl DetectorSuite for Replay<'_> {
    fn run(&self, detector: DetectorId, _img: &SampleImage) -> DetectorOutcome {
        self.0
            .iter()
            .find(|o| o.detector == detector)
            .cloned()
            .expect("outcome for every detector")
    }
}

/// Decodes every manifest file under `pool_dir` and runs all detectors,
/// using up to `workers` threads (1 disables concurrency).
pub fn score_pool(pool_dir: &Path, manifest: &PoolManifest, workers: usize) -> Result<Vec<ScoredImage>, EvalError> {
    let score = |row: &crate::pool::ManifestRow| -> Result<ScoredImage, EvalError> {
        let img = decode_image(&pool_dir.join(&row.path))?;
        Ok(ScoredImage {
            path: row.path.clone(),
            label: row.label,
            true_rate: row.true_rate,
            file_size: img.file_size(),
            outcomes: crate::detectors::run_all_detectors(&img).to_vec(),
        })
    };
    if workers <= 1 {
        return manifest.rows.iter().map(score).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .expect("thread pool");
    pool.install(|| manifest.rows.par_iter().map(score).collect())
}

pub fn labelled(images: &[ScoredImage], score: impl Fn(&ScoredImage) -> f64) -> Vec<(f64, bool)> {
    images.iter().map(|i| (score(i), i.label.is_stego())).collect()
}

/// AUC for every fusion rule and every single detector.
pub fn compare_fusion_rules(images: &[ScoredImage]) -> Result<Vec<(FusionRule, f64)>, EvalError> {
    FusionRule::all()
        .into_iter()
        .map(|rule| Ok((rule, roc_curve(&labelled(images, |i| rule.apply(&i.outcomes)))?.auc)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpeedTarget {
    Detector(DetectorId),
    Fusion(FusionMode),
}

impl SpeedTarget {
    pub fn all() -> Vec<SpeedTarget> {
        let mut t: Vec<_> = DetectorId::REPORT_ORDER.map(SpeedTarget::Detector).to_vec();
        t.push(SpeedTarget::Fusion(FusionMode::Standard));
        t.push(SpeedTarget::Fusion(FusionMode::Fast));
        t
    }
}

impl fmt::Display for SpeedTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpeedTarget::Detector(id) => write!(f, "{id}"),
            SpeedTarget::Fusion(mode) => write!(f, "{mode} fusion"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpeedEntry {
    pub target: SpeedTarget,
    pub trials: Vec<Duration>,
    pub images_processed: usize,
}

impl SpeedEntry {
    pub fn mean_elapsed_ms(&self) -> f64 {
        self.trials.iter().map(|d| d.as_secs_f64() * 1e3).sum::<f64>() / self.trials.len() as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpeedReport {
    pub entries: Vec<SpeedEntry>,
    pub clean_files: usize,
    pub stego_files: usize,
}

impl SpeedReport {
    pub fn entry(&self, target: SpeedTarget) -> Option<&SpeedEntry> {
        self.entries.iter().find(|e| e.target == target)
    }
}

pub const SPEED_TRIALS: usize = 3;

/// Times each target over every file, decode included, on the calling thread
/// only. Each target runs `trials` full passes; trials are interleaved across
/// targets so slow drift in machine load affects all of them alike.
pub fn speed_benchmark(
    files: &[PathBuf],
    targets: &[SpeedTarget],
    trials: usize,
    threshold: f64,
) -> Result<Vec<SpeedEntry>, EvalError> {
    let mut entries: Vec<SpeedEntry> = targets
        .iter()
        .map(|&target| SpeedEntry {
            target,
            trials: Vec::with_capacity(trials),
            images_processed: files.len(),
        })
        .collect();
    for _ in 0..trials {
        for entry in &mut entries {
            let start = Instant::now();
            for file in files {
                let img = decode_image(file)?;
                match entry.target {
                    SpeedTarget::Detector(id) => {
                        std::hint::black_box(id.run(&img));
                    }
                    SpeedTarget::Fusion(mode) => {
                        std::hint::black_box(fuse(&img, &FusionConfig::new(mode, threshold), &ClassicSuite));
                    }
                }
            }
            entry.trials.push(start.elapsed());
        }
    }
    Ok(entries)
}

/// Speed trials over a manifest-described pool, recording its composition.
pub fn speed_benchmark_pool(
    pool_dir: &Path,
    manifest: &PoolManifest,
    targets: &[SpeedTarget],
    threshold: f64,
) -> Result<SpeedReport, EvalError> {
    let files: Vec<PathBuf> = manifest.rows.iter().map(|r| pool_dir.join(&r.path)).collect();
    Ok(SpeedReport {
        entries: speed_benchmark(&files, targets, SPEED_TRIALS, threshold)?,
        clean_files: manifest.clean_count(),
        stego_files: manifest.stego_count(),
    })
}

fn csv_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Vec<u8> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(row).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

pub fn roc_csv(curves: &[(String, RocCurve)]) -> Vec<u8> {
    csv_bytes(
        &["detector", "threshold", "fall_out", "sensitivity"],
        curves.iter().flat_map(|(name, curve)| {
            curve.points.iter().map(move |p| {
                vec![
                    name.clone(),
                    format!("{:.6}", p.threshold),
                    format!("{:.6}", p.fall_out),
                    format!("{:.6}", p.sensitivity),
                ]
            })
        }),
    )
}

pub fn auc_csv(rows: &[(String, f64)]) -> Vec<u8> {
    csv_bytes(
        &["detector", "auc"],
        rows.iter().map(|(n, auc)| vec![n.clone(), format!("{auc:.6}")]),
    )
}

pub fn threshold_csv(rows: &[ThresholdRow]) -> Vec<u8> {
    csv_bytes(
        &["threshold", "fall_out", "sensitivity"],
        rows.iter().map(|r| {
            vec![
                format!("{:.2}", r.threshold),
                format!("{:.6}", r.fall_out),
                format!("{:.6}", r.sensitivity),
            ]
        }),
    )
}

pub fn speed_csv(report: &SpeedReport) -> Vec<u8> {
    csv_bytes(
        &[
            "detector",
            "trial_1_ms",
            "trial_2_ms",
            "trial_3_ms",
            "mean_ms",
            "images",
            "clean",
            "stego",
        ],
        report.entries.iter().map(|e| {
            let mut row = vec![e.target.to_string()];
            row.extend((0..SPEED_TRIALS).map(|i| {
                e.trials
                    .get(i)
                    .map(|d| format!("{:.3}", d.as_secs_f64() * 1e3))
                    .unwrap_or_default()
            }));
            row.push(format!("{:.3}", e.mean_elapsed_ms()));
            row.push(e.images_processed.to_string());
            row.push(report.clean_files.to_string());
            row.push(report.stego_files.to_string());
            row
        }),
    )
}
