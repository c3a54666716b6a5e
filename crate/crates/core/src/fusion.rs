//! Standard fusion (arithmetic mean of the successful detectors) and fast
//! fusion (a four-stage cascade that stops as soon as the running mean drops
//! below the threshold), plus the payload-size estimate.
//!
//! A failed detector carries zero weight in both modes: it is left out of the
//! numerator and the denominator of the mean.

use std::fmt;
use std::str::FromStr;

use crate::detectors::{DetectorId, DetectorOutcome, DetectorSuite};
use crate::image::SampleImage;

pub const DEFAULT_THRESHOLD: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum FusionMode {
    #[default]
    Standard,
    Fast,
}

impl FusionMode {
    pub fn name(self) -> &'static str {
        match self {
            FusionMode::Standard => "standard",
            FusionMode::Fast => "fast",
        }
    }
}

impl fmt::Display for FusionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FusionMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "standard" => Ok(FusionMode::Standard),
            "fast" => Ok(FusionMode::Fast),
            other => Err(format!("unknown speed mode '{other}'")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FusionConfig {
    pub mode: FusionMode,
    threshold: f64,
}

impl FusionConfig {
    /// Thresholds outside `[0, 1]` (or NaN) fall back to the default.
    pub fn new(mode: FusionMode, threshold: f64) -> Self {
        let threshold = if (0.0..=1.0).contains(&threshold) {
            threshold
        } else {
            DEFAULT_THRESHOLD
        };
        Self { mode, threshold }
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }
}

impl Default for FusionConfig {
    fn default() -> Self {
        Self {
            mode: FusionMode::Standard,
            threshold: DEFAULT_THRESHOLD,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Stego,
    Clean,
    /// Every executed detector failed, so no score exists.
    Indeterminate,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Stego => "stego",
            Verdict::Clean => "clean",
            Verdict::Indeterminate => "indeterminate",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitPoint {
    /// The cascade stopped after this 1-based stage; later detectors never ran.
    Early(u8),
    Completed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stage {
    pub outcome: DetectorOutcome,
    /// Mean of the successful scores up to and including this stage.
    pub running_mean: Option<f64>,
}

impl Stage {
    pub fn detector(&self) -> DetectorId {
        self.outcome.detector
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FusionTrace {
    pub mode: FusionMode,
    pub stages: Vec<Stage>,
    pub exit: ExitPoint,
    pub fusion_score: Option<f64>,
    pub verdict: Verdict,
}

impl FusionTrace {
    pub fn detectors_run(&self) -> usize {
        self.stages.len()
    }

    pub fn outcome(&self, detector: DetectorId) -> Option<&DetectorOutcome> {
        self.stages.iter().map(|s| &s.outcome).find(|o| o.detector == detector)
    }
}

#[derive(Debug, Default, Clone, Copy)]
struct RunningMean {
    sum: f64,
    count: usize,
}

impl RunningMean {
    fn push(&mut self, outcome: &DetectorOutcome) -> Option<f64> {
        if let Some(score) = outcome.score() {
            self.sum += score;
            self.count += 1;
        }
        self.mean()
    }

    fn mean(&self) -> Option<f64> {
        (self.count > 0).then(|| self.sum / self.count as f64)
    }
}

fn verdict_for(score: Option<f64>, threshold: f64) -> Verdict {
    match score {
        None => Verdict::Indeterminate,
        Some(s) if s >= threshold => Verdict::Stego,
        Some(_) => Verdict::Clean,
    }
}

/// Arithmetic mean of the successful outcomes, classified against the threshold.
pub fn standard_fusion(outcomes: &[DetectorOutcome], config: &FusionConfig) -> FusionTrace {
    let mut mean = RunningMean::default();
    let stages: Vec<Stage> = outcomes
        .iter()
        .map(|o| Stage {
            outcome: o.clone(),
            running_mean: mean.push(o),
        })
        .collect();
    let fusion_score = mean.mean();
    FusionTrace {
        mode: FusionMode::Standard,
        stages,
        exit: ExitPoint::Completed,
        fusion_score,
        verdict: verdict_for(fusion_score, config.threshold),
    }
}

/// Runs detectors lazily in cascade order (primary sets, sample pairs, chi
/// square, RS). After each stage the running mean of the successful scores
/// is compared with the threshold; a mean below it ends the cascade with a
/// clean verdict. An undefined mean (all failures so far) never exits.
pub fn fast_fusion(img: &SampleImage, config: &FusionConfig, suite: &dyn DetectorSuite) -> FusionTrace {
    let mut mean = RunningMean::default();
    let mut stages = Vec::with_capacity(4);
    for (i, detector) in DetectorId::CASCADE_ORDER.into_iter().enumerate() {
        let outcome = suite.run(detector, img);
        let running_mean = mean.push(&outcome);
        stages.push(Stage { outcome, running_mean });
        let is_last = i + 1 == DetectorId::CASCADE_ORDER.len();
        if let Some(m) = running_mean {
            if m < config.threshold && !is_last {
                return FusionTrace {
                    mode: FusionMode::Fast,
                    stages,
                    exit: ExitPoint::Early(i as u8 + 1),
                    fusion_score: Some(m),
                    verdict: Verdict::Clean,
                };
            }
        }
    }
    let fusion_score = mean.mean();
    FusionTrace {
        mode: FusionMode::Fast,
        stages,
        exit: ExitPoint::Completed,
        fusion_score,
        verdict: verdict_for(fusion_score, config.threshold),
    }
}

/// Runs the configured fusion mode on `img`.
pub fn fuse(img: &SampleImage, config: &FusionConfig, suite: &dyn DetectorSuite) -> FusionTrace {
    match config.mode {
        FusionMode::Standard => {
            let outcomes = DetectorId::REPORT_ORDER.map(|d| suite.run(d, img));
            standard_fusion(&outcomes, config)
        }
        FusionMode::Fast => fast_fusion(img, config, suite),
    }
}

/// Estimated payload in bytes: fusion score × file size / 3, rounded.
pub fn quantify_payload(fusion_score: f64, file_size: u64) -> u64 {
    (fusion_score.clamp(0.0, 1.0) * file_size as f64 / 3.0).round() as u64
}
