//! Command-line layer of `stegofuse`: the positional analysis contract, the
//! directory pipeline with its reports, and the auxiliary subcommands.

pub mod args;
pub mod commands;
pub mod pipeline;

pub use args::{parse_args, ArgsError, CliArgs, ParsedArgs};
pub use pipeline::{run_pipeline, ExitStatus, RunSummary, FAILPOINT_ABORT_AFTER};
