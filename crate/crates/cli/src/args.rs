//! The positional argument contract: `<directory> [speed] [threshold] [csv file]`.
//!
//! Parsing is forgiving. An unknown speed falls back to standard and an
//! unusable threshold falls back to 0.2; both produce a warning rather than
//! an error. Only a missing directory is fatal.

use std::path::PathBuf;

use stegofuse_core::fusion::DEFAULT_THRESHOLD;
use stegofuse_core::FusionMode;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq)]
pub struct CliArgs {
    pub directory: PathBuf,
    pub speed: FusionMode,
    pub threshold: f64,
    pub csv_file: Option<PathBuf>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ArgsError {
    #[error("missing directory argument")]
    MissingDirectory,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParsedArgs {
    pub args: CliArgs,
    /// Diagnostics about replaced or ignored arguments.
    pub warnings: Vec<String>,
}

const DEFAULT_TOKEN: &str = "default";

fn parse_speed(token: &str, warnings: &mut Vec<String>) -> FusionMode {
    if token.eq_ignore_ascii_case(DEFAULT_TOKEN) {
        return FusionMode::Standard;
    }
    token.parse().unwrap_or_else(|_| {
        warnings.push(format!("unknown speed '{token}', using standard"));
        FusionMode::Standard
    })
}

fn parse_threshold(token: &str, warnings: &mut Vec<String>) -> f64 {
    if token.eq_ignore_ascii_case(DEFAULT_TOKEN) {
        return DEFAULT_THRESHOLD;
    }
    match token.parse::<f64>() {
        Ok(t) if (0.0..=1.0).contains(&t) => t,
        Ok(_) => {
            warnings.push(format!(
                "threshold {token} is outside [0, 1], using {DEFAULT_THRESHOLD}"
            ));
            DEFAULT_THRESHOLD
        }
        Err(_) => {
            warnings.push(format!(
                "threshold '{token}' is not a number, using {DEFAULT_THRESHOLD}"
            ));
            DEFAULT_THRESHOLD
        }
    }
}

pub fn parse_args<S: AsRef<str>>(argv: &[S]) -> Result<ParsedArgs, ArgsError> {
    let mut warnings = Vec::new();
    let mut tokens = argv.iter().map(AsRef::as_ref);
    let directory = tokens.next().map(PathBuf::from).ok_or(ArgsError::MissingDirectory)?;
    let speed = tokens
        .next()
        .map_or(FusionMode::Standard, |t| parse_speed(t, &mut warnings));
    let threshold = tokens
        .next()
        .map_or(DEFAULT_THRESHOLD, |t| parse_threshold(t, &mut warnings));
    let csv_file = tokens.next().map(PathBuf::from);
    let extra: Vec<&str> = tokens.collect();
    if !extra.is_empty() {
        warnings.push(format!("ignoring extra arguments: {}", extra.join(" ")));
    }
    Ok(ParsedArgs {
        args: CliArgs {
            directory,
            speed,
            threshold,
            csv_file,
        },
        warnings,
    })
}
