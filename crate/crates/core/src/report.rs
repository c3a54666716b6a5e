//! Report records: the full CSV report and the console (standard) report.

use std::io::{self, Write};

use crate::detectors::DetectorId;
use crate::fusion::{quantify_payload, FusionTrace, Verdict};

pub const FULL_REPORT_HEADER: &str =
    "file name,classification,quantitative steganalysis,primary sets,chi square,sample pairs,rs analysis,fusion";

/// A detector column: a score, or empty when the detector failed or was
/// skipped by an early exit.
pub type DetectorField = Option<f64>;

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub file_name: String,
    pub classification: Verdict,
    pub payload_estimate_bytes: Option<u64>,
    pub primary_sets: DetectorField,
    pub chi_square: DetectorField,
    pub sample_pairs: DetectorField,
    pub rs_analysis: DetectorField,
    pub fusion: Option<f64>,
}

impl ReportRow {
    pub fn from_trace(file_name: impl Into<String>, trace: &FusionTrace, file_size: u64) -> Self {
        let field = |id: DetectorId| trace.outcome(id).and_then(|o| o.score());
        Self {
            file_name: file_name.into(),
            classification: trace.verdict,
            payload_estimate_bytes: trace.fusion_score.map(|s| quantify_payload(s, file_size)),
            primary_sets: field(DetectorId::PrimarySets),
            chi_square: field(DetectorId::ChiSquare),
            sample_pairs: field(DetectorId::SamplePairs),
            rs_analysis: field(DetectorId::Rs),
            fusion: trace.fusion_score,
        }
    }

    pub fn to_record(&self) -> [String; 8] {
        let score = |s: Option<f64>| s.map(|v| format!("{v:.6}")).unwrap_or_default();
        [
            self.file_name.clone(),
            self.classification.name().to_string(),
            self.payload_estimate_bytes.map(|b| b.to_string()).unwrap_or_default(),
            score(self.primary_sets),
            score(self.chi_square),
            score(self.sample_pairs),
            score(self.rs_analysis),
            score(self.fusion),
        ]
    }

    /// Console line for a file classified stego.
    pub fn console_line(&self) -> String {
        format!(
            "{} is suspicious. Approximate amount of hidden data is {} bytes.",
            self.file_name,
            self.payload_estimate_bytes.unwrap_or(0)
        )
    }
}

/// CSV sink for the full report: LF line endings, one flush per record.
pub struct FullReportWriter<W: Write> {
    inner: csv::Writer<W>,
}

impl<W: Write> FullReportWriter<W> {
    /// Writes and flushes the header row.
    pub fn new(sink: W) -> io::Result<Self> {
        let mut inner = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .has_headers(false)
            .from_writer(sink);
        inner.write_record(FULL_REPORT_HEADER.split(','))?;
        inner.flush()?;
        Ok(Self { inner })
    }

    pub fn write_row(&mut self, row: &ReportRow) -> io::Result<()> {
        write_full_report_row(row, &mut self.inner)
    }

    pub fn into_inner(self) -> io::Result<W> {
        self.inner.into_inner().map_err(|e| e.into_error())
    }
}

/// Appends one record and flushes it through to the sink.
pub fn write_full_report_row<W: Write>(row: &ReportRow, sink: &mut csv::Writer<W>) -> io::Result<()> {
    sink.write_record(row.to_record())?;
    sink.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detectors::{DetectorOutcome, FailureReason};
    use crate::fusion::{standard_fusion, FusionConfig};

    fn trace(ps: Option<f64>) -> FusionTrace {
        let outcomes: Vec<_> = DetectorId::REPORT_ORDER
            .into_iter()
            .zip([ps, Some(0.01), Some(0.1), Some(0.12)])
            .map(|(d, s)| match s {
                Some(s) => DetectorOutcome::success(d, s),
                None => DetectorOutcome::failure(d, FailureReason::NumericalInstability),
            })
            .collect();
        standard_fusion(&outcomes, &FusionConfig::default())
    }

    fn render(rows: &[ReportRow]) -> String {
        let mut w = FullReportWriter::new(Vec::new()).unwrap();
        for r in rows {
            w.write_row(r).unwrap();
        }
        String::from_utf8(w.into_inner().unwrap()).unwrap()
    }

    #[test]
    fn header_spelling() {
        assert_eq!(render(&[]), format!("{FULL_REPORT_HEADER}\n"));
    }

    #[test]
    fn all_columns_populated_for_clean_file() {
        let row = ReportRow::from_trace("a.png", &trace(Some(0.05)), 3000);
        assert_eq!(row.classification, Verdict::Clean);
        let text = render(&[row]);
        let line = text.lines().nth(1).unwrap();
        assert_eq!(line, "a.png,clean,70,0.050000,0.010000,0.100000,0.120000,0.070000");
        assert_eq!(line.split(',').filter(|f| !f.is_empty()).count(), 8);
    }

    #[test]
    fn failed_detector_serializes_empty() {
        let row = ReportRow::from_trace("b.png", &trace(None), 3000);
        let line = render(&[row]).lines().nth(1).unwrap().to_string();
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields[3], "");
        assert!(fields.iter().enumerate().all(|(i, f)| i == 3 || !f.is_empty()));
    }

    #[test]
    fn names_with_commas_are_quoted() {
        let row = ReportRow::from_trace("x,y.png", &trace(Some(0.9)), 30);
        assert!(render(&[row]).lines().nth(1).unwrap().starts_with("\"x,y.png\",stego,"));
    }

    #[test]
    fn indeterminate_row_has_no_fusion() {
        let outcomes: Vec<_> = DetectorId::REPORT_ORDER
            .map(|d| DetectorOutcome::failure(d, FailureReason::DegenerateInput))
            .to_vec();
        let row = ReportRow::from_trace("c.png", &standard_fusion(&outcomes, &FusionConfig::default()), 10);
        assert_eq!(row.classification, Verdict::Indeterminate);
        assert_eq!(row.fusion, None);
        assert_eq!(render(&[row]).lines().nth(1).unwrap(), "c.png,indeterminate,,,,,,");
    }

    #[test]
    fn console_line_reports_payload() {
        let row = ReportRow::from_trace("s.png", &trace(Some(0.9)), 900);
        assert_eq!(row.classification, Verdict::Stego);
        assert_eq!(
            row.console_line(),
            format!(
                "s.png is suspicious. Approximate amount of hidden data is {} bytes.",
                row.payload_estimate_bytes.unwrap()
            )
        );
    }
}
