//! The four component detectors. Each maps a [`SampleImage`] to an estimate in
//! `[0, 1]` of how likely the image carries an LSB-replacement payload, or to
//! a structured failure when the estimate cannot be computed.

mod chi_square;
mod primary_sets;
mod quadratic;
mod rs;
mod sample_pairs;

use std::fmt;
use std::time::{Duration, Instant};

use crate::image::SampleImage;

pub use chi_square::{chi_square_attack, pov_statistic, PovStatistic};
pub use primary_sets::{primary_sets, PrimarySetCounts};
pub use rs::{rs_analysis, RsCounts};
pub use sample_pairs::{sample_pairs, TraceCounts};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DetectorId {
    PrimarySets,
    ChiSquare,
    SamplePairs,
    Rs,
}

impl DetectorId {
    /// Column order of the full report.
    pub const REPORT_ORDER: [DetectorId; 4] = [
        DetectorId::PrimarySets,
        DetectorId::ChiSquare,
        DetectorId::SamplePairs,
        DetectorId::Rs,
    ];

    /// Stage order of the fast-fusion cascade.
    pub const CASCADE_ORDER: [DetectorId; 4] = [
        DetectorId::PrimarySets,
        DetectorId::SamplePairs,
        DetectorId::ChiSquare,
        DetectorId::Rs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DetectorId::PrimarySets => "primary sets",
            DetectorId::ChiSquare => "chi square",
            DetectorId::SamplePairs => "sample pairs",
            DetectorId::Rs => "rs analysis",
        }
    }

    /// Runs this detector on `img`, timing it.
    pub fn run(self, img: &SampleImage) -> DetectorOutcome {
        let start = Instant::now();
        let score = match self {
            DetectorId::PrimarySets => primary_sets(img),
            DetectorId::ChiSquare => chi_square_attack(img),
            DetectorId::SamplePairs => sample_pairs(img),
            DetectorId::Rs => rs_analysis(img),
        };
        DetectorOutcome {
            detector: self,
            score,
            elapsed: start.elapsed(),
        }
    }
}

impl fmt::Display for DetectorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FailureReason {
    DegenerateInput,
    NumericalInstability,
    NotApplicable,
}

impl fmt::Display for FailureReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FailureReason::DegenerateInput => "degenerate input",
            FailureReason::NumericalInstability => "numerical instability",
            FailureReason::NotApplicable => "not applicable",
        })
    }
}

/// Result of one detector on one image.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectorOutcome {
    pub detector: DetectorId,
    /// `Ok` holds a score in `[0, 1]`.
    pub score: Result<f64, FailureReason>,
    pub elapsed: Duration,
}

impl DetectorOutcome {
    pub fn success(detector: DetectorId, score: f64) -> Self {
        Self {
            detector,
            score: Ok(score.clamp(0.0, 1.0)),
            elapsed: Duration::ZERO,
        }
    }

    pub fn failure(detector: DetectorId, reason: FailureReason) -> Self {
        Self {
            detector,
            score: Err(reason),
            elapsed: Duration::ZERO,
        }
    }

    pub fn score(&self) -> Option<f64> {
        self.score.ok()
    }

    pub fn is_success(&self) -> bool {
        self.score.is_ok()
    }

    pub fn elapsed_ms(&self) -> f64 {
        self.elapsed.as_secs_f64() * 1e3
    }
}

/// Source of detector outcomes for the fusion cascade. The classic suite runs
/// the real detectors; tests substitute scripted or instrumented suites.
pub trait DetectorSuite {
    fn run(&self, detector: DetectorId, img: &SampleImage) -> DetectorOutcome;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ClassicSuite;

impl DetectorSuite for ClassicSuite {
    fn run(&self, detector: DetectorId, img: &SampleImage) -> DetectorOutcome {
        detector.run(img)
    }
}

/// Runs every detector independently, in report order.
pub fn run_all_detectors(img: &SampleImage) -> [DetectorOutcome; 4] {
    DetectorId::REPORT_ORDER.map(|d| d.run(img))
}

/// Averages per-channel (or per-geometry) estimates, ignoring failed parts.
/// When every part failed, the most informative failure wins: numerical
/// trouble on real data outranks degenerate channels.
pub(crate) fn combine_parts(parts: impl IntoIterator<Item = Result<f64, FailureReason>>) -> Result<f64, FailureReason> {
    let mut sum = 0.0;
    let mut n = 0usize;
    let mut failure = None;
    for part in parts {
        match part {
            Ok(v) => {
                sum += v;
                n += 1;
            }
            Err(FailureReason::NumericalInstability) => failure = Some(FailureReason::NumericalInstability),
            Err(reason) => {
                failure.get_or_insert(reason);
            }
        }
    }
    if n == 0 {
        Err(failure.unwrap_or(FailureReason::DegenerateInput))
    } else {
        Ok((sum / n as f64).clamp(0.0, 1.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_image_propagates_degenerate_cases() {
        let img = SampleImage::from_planes(16, 16, vec![vec![128; 256]; 3]).unwrap();
        let out = run_all_detectors(&img);
        let ids: Vec<_> = out.iter().map(|o| o.detector).collect();
        assert_eq!(ids, DetectorId::REPORT_ORDER);
        assert_eq!(out[0].score, Err(FailureReason::DegenerateInput));
        assert_eq!(out[2].score, Err(FailureReason::DegenerateInput));
        assert_eq!(out[3].score, Err(FailureReason::DegenerateInput));
    }

    #[test]
    fn combine_prefers_successes() {
        assert_eq!(
            combine_parts([Ok(0.2), Err(FailureReason::DegenerateInput), Ok(0.4)]),
            Ok(0.30000000000000004)
        );
        assert_eq!(
            combine_parts([
                Err(FailureReason::DegenerateInput),
                Err(FailureReason::NumericalInstability)
            ]),
            Err(FailureReason::NumericalInstability)
        );
        assert_eq!(combine_parts(std::iter::empty()), Err(FailureReason::DegenerateInput));
        assert_eq!(combine_parts([Ok(1.7)]), Ok(1.0));
    }
}
