//! Command-line front end: suite dispatch, configuration and report output.

pub mod config;
pub mod emit;
pub mod error;
pub mod family;
pub mod suites;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;
use complab_core::VerificationReport;

pub use config::{Cli, Command, FileConfig, Format, GridSpec, Suite, SuiteConfig, VerifyArgs};
pub use emit::{emit_report, render};
pub use error::{CliError, CliResult};
pub use suites::run_suite;

pub const EXIT_FAILED_CHECK: u8 = 1;
pub const EXIT_ERROR: u8 = 2;

/// 1 if any check failed outright, 0 otherwise.
pub fn exit_code(report: &VerificationReport) -> u8 {
    if report.failures().next().is_some() {
        EXIT_FAILED_CHECK
    } else {
        0
    }
}

/// Resolves the configuration for a `verify` invocation, reading the config
/// file if one is named.
pub fn resolve(args: VerifyArgs, env_tol: Option<&str>) -> CliResult<SuiteConfig> {
    let file = args.config.as_deref().map(FileConfig::load).transpose()?;
    SuiteConfig::resolve(args, file, env_tol)
}

/// Runs one command line. Reports go to `--out` or `out`, diagnostics to
/// `err`; the return value is the process exit code.
pub fn execute<I, T>(argv: I, env_tol: Option<&str>, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                return EXIT_ERROR;
            }
            let _ = write!(out, "{}", e.render());
            return 0;
        }
    };
    let result = match cli.command {
        Command::Verify(args) => resolve(args, env_tol).and_then(|cfg| {
            let report = run_suite(&cfg)?;
            emit_report(&report, cfg.format, cfg.out.as_deref(), out)?;
            Ok(exit_code(&report))
        }),
    };
    result.unwrap_or_else(|e| {
        let _ = writeln!(err, "complab: {e}");
        EXIT_ERROR
    })
}
