use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Deserializer};

use crate::error::CliError;

/// Environment variable holding the default working precision in digits.
pub const PRECISION_ENV: &str = "C3ROTOR_PRECISION";

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "c3rotor", version, about = "Spectra, perturbation series and exceptional points of the C3 hindered rotor")]
pub struct Cli {
    /// TOML file with defaults; explicit flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Output file (default: stdout).
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Lowest eigenvalues of one symmetry block at a real barrier.
    Spectrum(SpectrumArgs),
    /// Exact perturbation coefficients of one level.
    Series(SeriesArgs),
    /// Tunneling splittings of the A doublets.
    Splitting(SplittingArgs),
    /// Exceptional points of the imaginary-barrier rotor.
    Ep(EpArgs),
    /// Plot data: 1 characteristic value, 2 level curves, 3 coalescence, 4 real levels.
    Figure(FigureArgs),
}

/// Accepts a TOML number or string and keeps its decimal text, so that
/// extended-precision runs parse the literal rather than a rounded double.
fn decimal_text<'de, D: Deserializer<'de>>(d: D) -> Result<Option<String>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Int(i64),
        Float(f64),
        Text(String),
    }
    Ok(Option::<Raw>::deserialize(d)?.map(|r| match r {
        Raw::Int(i) => i.to_string(),
        Raw::Float(x) => x.to_string(),
        Raw::Text(s) => s,
    }))
}

fn decimal_list<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<String>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Int(i64),
        Float(f64),
        Text(String),
    }
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum OneOrMany {
        Many(Vec<Raw>),
        One(Raw),
    }
    let text = |r: Raw| match r {
        Raw::Int(i) => i.to_string(),
        Raw::Float(x) => x.to_string(),
        Raw::Text(s) => s,
    };
    Ok(match Option::<OneOrMany>::deserialize(d)? {
        None => Vec::new(),
        Some(OneOrMany::One(r)) => vec![text(r)],
        Some(OneOrMany::Many(v)) => v.into_iter().map(text).collect(),
    })
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectrumArgs {
    /// A+, A-, EA, EB or rawA.
    #[arg(long)]
    pub species: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(deserialize_with = "decimal_text")]
    pub lambda: Option<String>,
    #[arg(long)]
    pub levels: Option<usize>,
    #[arg(long)]
    #[serde(deserialize_with = "decimal_text")]
    pub tol: Option<String>,
    /// Fixed basis truncation N (default: chosen automatically).
    #[arg(long)]
    pub truncation: Option<usize>,
    /// Working precision in significant digits (<= 15 doubles, <= 31 double-double).
    #[arg(long)]
    pub precision: Option<u32>,
}

impl SpectrumArgs {
    pub fn merged(&self, file: &Self) -> Self {
        Self {
            species: self.species.clone().or_else(|| file.species.clone()),
            lambda: self.lambda.clone().or_else(|| file.lambda.clone()),
            levels: self.levels.or(file.levels),
            tol: self.tol.clone().or_else(|| file.tol.clone()),
            truncation: self.truncation.or(file.truncation),
            precision: self.precision.or(file.precision),
        }
    }
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SeriesArgs {
    /// A+, A-, EA or EB.
    #[arg(long)]
    pub species: Option<String>,
    #[arg(long)]
    pub level: Option<usize>,
    /// Highest power of the coupling (even).
    #[arg(long)]
    pub order: Option<usize>,
}

impl SeriesArgs {
    pub fn merged(&self, file: &Self) -> Self {
        Self {
            species: self.species.clone().or_else(|| file.species.clone()),
            level: self.level.or(file.level),
            order: self.order.or(file.order),
        }
    }
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SplittingArgs {
    /// Doublet index (>= 1).
    #[arg(long)]
    pub n: Option<usize>,
    /// Comma-separated barrier heights.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    #[serde(deserialize_with = "decimal_list")]
    pub lambda: Vec<String>,
    /// Report the log-log slope of the splitting against the barrier.
    #[arg(long)]
    pub fit: bool,
    #[arg(long)]
    #[serde(deserialize_with = "decimal_text")]
    pub tol: Option<String>,
    #[arg(long)]
    pub precision: Option<u32>,
}

impl SplittingArgs {
    pub fn merged(&self, file: &Self) -> Self {
        Self {
            n: self.n.or(file.n),
            lambda: if self.lambda.is_empty() { file.lambda.clone() } else { self.lambda.clone() },
            fit: self.fit || file.fit,
            tol: self.tol.clone().or_else(|| file.tol.clone()),
            precision: self.precision.or(file.precision),
        }
    }
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EpArgs {
    /// EA, EB, A+, A-, or A for both parity blocks.
    #[arg(long)]
    pub species: Option<String>,
    /// Coalescing levels, e.g. 0,1.
    #[arg(long)]
    pub pair: Option<String>,
    /// Significant digits of the result (<= 31).
    #[arg(long)]
    pub digits: Option<u32>,
    /// Seed-scan interval for g, e.g. 0:20.
    #[arg(long)]
    pub scan: Option<String>,
    /// Seed-scan step in g.
    #[arg(long)]
    pub step: Option<f64>,
}

impl EpArgs {
    pub fn merged(&self, file: &Self) -> Self {
        Self {
            species: self.species.clone().or_else(|| file.species.clone()),
            pair: self.pair.clone().or_else(|| file.pair.clone()),
            digits: self.digits.or(file.digits),
            scan: self.scan.clone().or_else(|| file.scan.clone()),
            step: self.step.or(file.step),
        }
    }
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FigureArgs {
    /// Figure number, 1 to 4.
    #[arg(long)]
    pub id: Option<u8>,
    /// Also write an SVG plot to this path.
    #[arg(long)]
    pub plot: Option<PathBuf>,
    /// Upper end of the barrier axis for figure 2.
    #[arg(long)]
    pub lambda_max: Option<f64>,
}

impl FigureArgs {
    pub fn merged(&self, file: &Self) -> Self {
        Self {
            id: self.id.or(file.id),
            plot: self.plot.clone().or_else(|| file.plot.clone()),
            lambda_max: self.lambda_max.or(file.lambda_max),
        }
    }
}

/// Contents of a `--config` file. Top-level keys apply to every command;
/// tables named after a command hold that command's flags.
#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub format: Option<Format>,
    pub output: Option<PathBuf>,
    pub precision: Option<u32>,
    #[serde(deserialize_with = "decimal_text")]
    pub tol: Option<String>,
    pub spectrum: SpectrumArgs,
    pub series: SeriesArgs,
    pub splitting: SplittingArgs,
    pub ep: EpArgs,
    pub figure: FigureArgs,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text =
            std::fs::read_to_string(path).map_err(|e| CliError::Io(path.display().to_string(), e.to_string()))?;
        Self::parse(&text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.message().to_owned())
    }
}
