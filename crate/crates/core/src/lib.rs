//! Core of `stegofuse`: bulk detection of LSB-replacement steganography in
//! lossless images by fusing four classical detectors.
//!
//! The pipeline is [`image::decode_image`] → [`detectors`] → [`fusion`] →
//! [`report`]. [`embedder`] and [`pool`] build labelled stego pools, and
//! [`evaluation`] measures detectors and fusion modes against them.

pub mod detectors;
pub mod embedder;
pub mod evaluation;
pub mod fusion;
pub mod image;
pub mod pool;
pub mod report;
pub mod stats;
pub mod synth;

pub use detectors::{run_all_detectors, ClassicSuite, DetectorId, DetectorOutcome, DetectorSuite, FailureReason};
pub use fusion::{
    fast_fusion, fuse, quantify_payload, standard_fusion, FusionConfig, FusionMode, FusionTrace, Verdict,
};
pub use image::{decode_image, scan_directory, FileFormat, ImageError, SampleImage, ScanTarget};
pub use pool::{generate_pool, Label, PoolManifest, PoolOptions};
pub use report::{FullReportWriter, ReportRow, FULL_REPORT_HEADER};
