//! Command-line driver for the `systole-lab` verification suites.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails, 2 for usage
//! or input errors.

pub mod constants;
pub mod report;
pub mod suites;

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use systole_lab::{FlatTorus, NormSpec};

use report::RunReport;
use suites::{GammaMode, TorusSource};

pub const THREADS_ENV: &str = "SYSTOLE_LAB_THREADS";

#[derive(Debug, Parser)]
#[command(name = "systole-lab", version, about = "Numerical checks for stable systolic inequalities")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Number of random samples (at least 1).
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub samples: Option<u64>,
    /// Master seed; sample i uses stream i of this seed.
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    /// Half-dimension: forms on R^{2n} for lemma31, T^{2n} for torus.
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Which gamma suite to run.
    #[arg(long, global = true, value_enum)]
    pub mode: Option<ModeArg>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Record wall-clock time in the report (breaks byte-identical reruns).
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Wedge-comass bound n! on random 2-forms.
    Lemma31,
    /// Gamma products of plane lattices.
    Gamma,
    /// John ellipsoid of a plane norm given as JSON.
    John { file: PathBuf },
    /// Stable 2-systole and bound chain of flat tori.
    Torus {
        /// Torus JSON `{n, gram}`.
        #[arg(conflicts_with = "random")]
        file: Option<PathBuf>,
        /// Number of random tori with det G = 1.
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        random: Option<u64>,
    },
    /// Reference constants.
    Constants,
    /// Exploratory |a∧b| / (|a||b|) for 4-forms on R^8.
    #[command(name = "hp2-fuzz")]
    Hp2Fuzz,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Euclid2,
    Mahler,
    Speyer,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug)]
pub enum CliError {
    /// Bad flags or input; exit code 2.
    Usage(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
        }
    }
}

impl From<systole_lab::Error> for CliError {
    fn from(e: systole_lab::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

/// Runs one subcommand and returns its report.
pub fn run(cli: &Cli) -> Result<RunReport, CliError> {
    let start = Instant::now();
    let mut report = match &cli.command {
        Command::Lemma31 => {
            let n = cli.n.unwrap_or(2);
            if !(1..=3).contains(&n) {
                return Err(CliError::Usage(format!("--n {n}: lemma31 supports n in 1..=3")));
            }
            suites::lemma31(n, cli.samples.unwrap_or(10_000), cli.seed)?
        }
        Command::Gamma => {
            let mode = match cli.mode {
                Some(ModeArg::Euclid2) => GammaMode::Euclid2,
                Some(ModeArg::Mahler) => GammaMode::Mahler,
                Some(ModeArg::Speyer) => GammaMode::Speyer,
                None => return Err(CliError::Usage("gamma needs --mode euclid2|mahler|speyer".into())),
            };
            let default = if mode == GammaMode::Speyer { 1_000 } else { 10_000 };
            suites::gamma(mode, cli.samples.unwrap_or(default), cli.seed)?
        }
        Command::John { file } => {
            let norm: NormSpec = read_json(file)?;
            suites::john(&norm)?
        }
        Command::Torus { file, random } => {
            let source = match (file, random) {
                (Some(path), None) => TorusSource::Given(read_json::<FlatTorus>(path)?),
                (None, Some(count)) => {
                    let n = cli.n.unwrap_or(2);
                    if !(1..=2).contains(&n) {
                        return Err(CliError::Usage(format!("--n {n}: torus supports n in 1..=2")));
                    }
                    TorusSource::Random { count: *count, n }
                }
                _ => return Err(CliError::Usage("torus needs a file or --random COUNT".into())),
            };
            suites::torus(source, cli.seed)?
        }
        Command::Constants => suites::constants(),
        Command::Hp2Fuzz => suites::hp2_fuzz(cli.samples.unwrap_or(100), cli.seed)?,
    };
    if cli.timing {
        report.wall_clock_seconds = Some(start.elapsed().as_secs_f64());
    }
    Ok(report)
}

/// Report text in the requested format.
pub fn render(report: &RunReport, format: Format) -> String {
    match format {
        Format::Json => report.to_json(),
        Format::Csv => report.csv.clone().unwrap_or_default(),
    }
}

/// Sizes the rayon pool from `SYSTOLE_LAB_THREADS` when set.
pub fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| CliError::Usage(format!("{THREADS_ENV}={value:?} is not a positive integer")))?;
    // A second initialization (e.g. in tests) keeps the first pool.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    Ok(())
}
