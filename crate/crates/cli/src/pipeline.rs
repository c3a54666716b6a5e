//! Directory analysis: scan, decode, fuse, report.
//!
//! Images are analysed by a bounded pool of worker threads. Results pass
//! through a reordering buffer so the single report writer always emits rows
//! in scan order, and every full-report row is flushed before the next one
//! is written.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::mpsc;
use std::thread;

use stegofuse_core::{
    decode_image, fuse, scan_directory, ClassicSuite, FullReportWriter, FusionConfig, ReportRow, ScanTarget, Verdict,
};

use crate::args::CliArgs;

/// When set to `N`, the process aborts right after the `N`th full-report row
/// has been flushed. Used to exercise the crash-safety of the report.
pub const FAILPOINT_ABORT_AFTER: &str = "STEGOFUSE_FAILPOINT_ABORT_AFTER";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Success = 0,
    Usage = 1,
    NoSuchDirectory = 2,
    NoProcessableImages = 3,
    ReportWriteFailure = 4,
}

impl ExitStatus {
    pub fn code(self) -> u8 {
        self as u8
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunSummary {
    pub rows: Vec<ReportRow>,
    /// Files that were recognised as images but could not be decoded.
    pub unreadable: Vec<(String, String)>,
    pub non_images: usize,
}

impl RunSummary {
    fn count(&self, verdict: Verdict) -> usize {
        self.rows.iter().filter(|r| r.classification == verdict).count()
    }
}

enum Analysis {
    Row { row: ReportRow, lossy: bool },
    Unreadable { name: String, reason: String },
}

fn file_name(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn analyse(target: &ScanTarget, config: &FusionConfig) -> Analysis {
    let name = file_name(&target.path);
    match decode_image(&target.path) {
        Ok(img) => {
            let trace = fuse(&img, config, &ClassicSuite);
            Analysis::Row {
                row: ReportRow::from_trace(name, &trace, img.file_size()),
                lossy: img.is_lossy_source(),
            }
        }
        Err(e) => Analysis::Unreadable {
            name,
            reason: e.to_string(),
        },
    }
}

/// Feeds analyses to `emit` in target order. `emit` returning an error stops
/// the workers from picking up further files.
fn analyse_in_order<E>(
    targets: &[ScanTarget],
    config: &FusionConfig,
    workers: usize,
    mut emit: impl FnMut(Analysis) -> Result<(), E>,
) -> Result<(), E> {
    if workers <= 1 || targets.len() <= 1 {
        return targets.iter().try_for_each(|t| emit(analyse(t, config)));
    }
    let next = AtomicUsize::new(0);
    let stop = AtomicBool::new(false);
    thread::scope(|scope| {
        let (tx, rx) = mpsc::sync_channel::<(usize, Analysis)>(workers * 2);
        for _ in 0..workers.min(targets.len()) {
            let tx = tx.clone();
            let (next, stop) = (&next, &stop);
            scope.spawn(move || {
                while !stop.load(Ordering::Relaxed) {
                    let i = next.fetch_add(1, Ordering::Relaxed);
                    let Some(target) = targets.get(i) else { break };
                    if tx.send((i, analyse(target, config))).is_err() {
                        break;
                    }
                }
            });
        }
        drop(tx);

        let mut pending = BTreeMap::new();
        let mut expected = 0;
        for (i, analysis) in rx {
            pending.insert(i, analysis);
            while let Some(ready) = pending.remove(&expected) {
                expected += 1;
                if let Err(e) = emit(ready) {
                    stop.store(true, Ordering::Relaxed);
                    return Err(e);
                }
            }
        }
        Ok(())
    })
}

fn failpoint() -> Option<usize> {
    std::env::var(FAILPOINT_ABORT_AFTER).ok()?.parse().ok()
}

/// Runs the analysis described by `args`. The console report goes to `out`,
/// warnings and progress to `diag`.
pub fn run_pipeline(
    args: &CliArgs,
    workers: usize,
    out: &mut dyn Write,
    diag: &mut dyn Write,
) -> (ExitStatus, RunSummary) {
    let mut summary = RunSummary::default();
    let targets = match scan_directory(&args.directory) {
        Ok(t) => t,
        Err(e) => {
            let _ = writeln!(diag, "error: {e}");
            return (ExitStatus::NoSuchDirectory, summary);
        }
    };
    let (images, others): (Vec<ScanTarget>, Vec<ScanTarget>) = targets.into_iter().partition(|t| t.format.is_image());
    summary.non_images = others.len();

    let mut report = match &args.csv_file {
        Some(path) => match File::create(path).and_then(|f| FullReportWriter::new(BufWriter::new(f))) {
            Ok(w) => Some(w),
            Err(e) => {
                let _ = writeln!(diag, "error: cannot write report {}: {e}", path.display());
                return (ExitStatus::ReportWriteFailure, summary);
            }
        },
        None => None,
    };
    if images.is_empty() {
        let _ = writeln!(diag, "error: no images found in {}", args.directory.display());
        return (ExitStatus::NoProcessableImages, summary);
    }

    let config = FusionConfig::new(args.speed, args.threshold);
    let abort_after = failpoint();
    let result = analyse_in_order(&images, &config, workers, |analysis| -> io::Result<()> {
        match analysis {
            Analysis::Unreadable { name, reason } => {
                let _ = writeln!(diag, "warning: skipping {name}: {reason}");
                summary.unreadable.push((name, reason));
            }
            Analysis::Row { row, lossy } => {
                if lossy {
                    let _ = writeln!(
                        diag,
                        "warning: {} is lossy-compressed; LSB results are unreliable",
                        row.file_name
                    );
                }
                match report.as_mut() {
                    Some(w) => {
                        w.write_row(&row)?;
                        if abort_after == Some(summary.rows.len() + 1) {
                            std::process::abort();
                        }
                    }
                    None if row.classification == Verdict::Stego => {
                        writeln!(out, "{}", row.console_line())?;
                    }
                    None => {}
                }
                summary.rows.push(row);
            }
        }
        Ok(())
    });
    if let Err(e) = result {
        let what = if report.is_some() { "report" } else { "console report" };
        let _ = writeln!(diag, "error: cannot write {what}: {e}");
        return (ExitStatus::ReportWriteFailure, summary);
    }
    if let Some(w) = report {
        if let Err(e) = w.into_inner().and_then(|mut b| b.flush()) {
            let _ = writeln!(diag, "error: cannot write report: {e}");
            return (ExitStatus::ReportWriteFailure, summary);
        }
    }

    let indeterminate: Vec<&ReportRow> = summary
        .rows
        .iter()
        .filter(|r| r.classification == Verdict::Indeterminate)
        .collect();
    if !indeterminate.is_empty() {
        let _ = writeln!(
            diag,
            "warning: {} file(s) could not be classified because every detector failed",
            indeterminate.len()
        );
        if args.csv_file.is_none() {
            for row in &indeterminate {
                if writeln!(out, "{} could not be classified: every detector failed.", row.file_name).is_err() {
                    return (ExitStatus::ReportWriteFailure, summary);
                }
            }
        }
    }
    let _ = writeln!(
        diag,
        "analysed {} image(s): {} stego, {} clean, {} indeterminate; skipped {} unreadable and {} non-image file(s)",
        summary.rows.len(),
        summary.count(Verdict::Stego),
        summary.count(Verdict::Clean),
        indeterminate.len(),
        summary.unreadable.len(),
        summary.non_images
    );
    if summary.rows.is_empty() {
        return (ExitStatus::NoProcessableImages, summary);
    }
    (ExitStatus::Success, summary)
}
