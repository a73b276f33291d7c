//! Command-line surface over the `c3rotor` solvers.
//!
//! Every command produces a [`Report`]: a table plus a few header fields,
//! rendered as commented CSV or as JSON.

mod commands;
mod config;
mod error;
mod figures;
mod report;
mod svg;

use std::fs;
use std::io::Write;

use clap::error::ErrorKind;
use clap::Parser;

pub use config::{Cli, Command, FileConfig, Format, PRECISION_ENV};
pub use error::CliError;
pub use report::{plain_decimal, Cell, Report};

/// Parses `argv`, runs the command and writes its output.
pub fn run(argv: &[String]) -> Result<(), CliError> {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return Ok(());
        }
        Err(e) => return Err(CliError::Usage(e.render().to_string())),
    };
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let env = std::env::var(PRECISION_ENV).ok();
    let format = cli.format.or(file.format).unwrap_or(Format::Csv);
    let output = cli.output.clone().or_else(|| file.output.clone());
    let report = execute(&cli.command, &file, env.as_deref())?;
    let text = report.render(format);
    match output {
        Some(path) => fs::write(&path, text).map_err(|e| CliError::Io(path.display().to_string(), e.to_string()))?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|e| CliError::Io("stdout".into(), e.to_string()))?;
        }
    }
    Ok(())
}

/// Runs one command with file defaults and the precision variable applied.
pub fn execute(command: &Command, file: &FileConfig, env_precision: Option<&str>) -> Result<Report, CliError> {
    match command {
        Command::Spectrum(a) => commands::spectrum(&a.merged(&file.spectrum), file, env_precision),
        Command::Series(a) => commands::series(&a.merged(&file.series)),
        Command::Splitting(a) => commands::splitting(&a.merged(&file.splitting), file, env_precision),
        Command::Ep(a) => commands::ep(&a.merged(&file.ep)),
        Command::Figure(a) => figures::figure(&a.merged(&file.figure)),
    }
}
