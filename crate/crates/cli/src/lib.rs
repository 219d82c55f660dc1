//! Command-line front end: flag parsing, output-format selection and the
//! wiring between growth runs / ensembles and the export formats.
//!
//! Exit codes are structured so scripts can tell failure classes apart:
//! 0 success, 2 malformed usage (unknown flag), 3 invalid or out-of-range
//! value, 4 missing required argument, 5 runtime error, 6 I/O error.

use clap::error::ErrorKind;
use clap::{Parser, ValueEnum};
use leafgrow::analysis::{ensemble, EnsembleSummary};
use leafgrow::branching::{SharpenKind, SharpenSpec};
use leafgrow::error::Error as CoreError;
use leafgrow::export::{
    canonical_json, export_dot, export_frames, export_metrics_csv, export_trajectory_json,
    RunManifest,
};
use leafgrow::growth::{run, BranchWeighting, GrowthConfig, MixtureSchedule, Policy, Prior};
use leafgrow::inference::OscillatingQ;
use std::ffi::OsString;
use std::path::PathBuf;

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INVALID_VALUE: i32 = 3;
pub const EXIT_MISSING_ARGUMENT: i32 = 4;
pub const EXIT_RUNTIME: i32 = 5;
pub const EXIT_IO: i32 = 6;

/// Environment variable consulted when `--out` is not given.
pub const OUT_ENV: &str = "LEAFGROW_OUT";

#[derive(Debug)]
pub struct CliError {
    pub exit_code: i32,
    pub message: String,
}

impl CliError {
    fn invalid(message: impl Into<String>) -> Self {
        CliError {
            exit_code: EXIT_INVALID_VALUE,
            message: message.into(),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(err: CoreError) -> Self {
        let exit_code = match &err {
            CoreError::Io { .. } => EXIT_IO,
            CoreError::InvalidConfig(_) => EXIT_INVALID_VALUE,
            _ => EXIT_RUNTIME,
        };
        CliError {
            exit_code,
            message: err.to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    /// Sample from the prior/posterior pipeline.
    Bayes,
    /// Sample from a degree-based branching distribution.
    Branch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BranchWeightsArg {
    Unit,
    Indeg,
    Cumindeg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SharpenArg {
    Power,
    Exp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, ValueEnum)]
pub enum Format {
    /// Canonical trajectory JSON (ensemble summary JSON when --runs > 1).
    Json,
    /// DOT digraph of the final tree with attachment weights.
    Dot,
    /// Long-format ensemble metrics CSV.
    Csv,
    /// Per-interval frame files for external plotting.
    Frames,
}

fn parse_oscillation(text: &str) -> Result<OscillatingQ, String> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 3 {
        return Err("expected MIN,MAX,PERIOD".into());
    }
    let q_min: f64 = parts[0].trim().parse().map_err(|_| "MIN must be a number")?;
    let q_max: f64 = parts[1].trim().parse().map_err(|_| "MAX must be a number")?;
    let period: u32 = parts[2]
        .trim()
        .parse()
        .map_err(|_| "PERIOD must be a positive integer")?;
    let params = OscillatingQ {
        q_min,
        q_max,
        period,
    };
    params.validate().map_err(|e| e.to_string())?;
    Ok(params)
}

/// Grows a time-ordered rooted tree by probabilistic leaf attachment and
/// exports trajectories, frames and ensemble metrics.
#[derive(Debug, Parser)]
#[command(name = "leafgrow", version, about)]
pub struct Cli {
    /// Number of time intervals (t = 0..N-1; the root occupies interval 0).
    #[arg(long, value_name = "N")]
    pub intervals: u32,

    /// Mean of the per-interval Poisson batch size.
    #[arg(long, value_name = "MU", default_value_t = 2.0)]
    pub poisson_mean: f64,

    /// Leaf-distribution family.
    #[arg(long, value_enum, default_value_t = Mode::Bayes)]
    pub mode: Mode,

    /// Bayes case: 0 = prior, 1 = posterior with the global likelihood,
    /// 2 = posterior with the local likelihood.
    #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u8).range(0..=2))]
    pub bayes: u8,

    /// Vertex weighting for --mode branch.
    #[arg(long, value_enum, default_value_t = BranchWeightsArg::Unit)]
    pub branch_weights: BranchWeightsArg,

    /// Sharpening applied to branch weights.
    #[arg(long, value_enum, default_value_t = SharpenArg::Power)]
    pub sharpen: SharpenArg,

    /// Sharpening exponent/rate (power alpha = 1 leaves weights unchanged).
    #[arg(long, value_name = "A", default_value_t = 1.0)]
    pub alpha: f64,

    /// Constant mixture weight toward the prior (0 = pure posterior).
    #[arg(long, value_name = "Q", default_value_t = 0.0)]
    pub q: f64,

    /// Oscillating mixture weight as MIN,MAX,PERIOD (overrides --q).
    #[arg(long, value_name = "MIN,MAX,PERIOD", conflicts_with = "q", value_parser = parse_oscillation)]
    pub q_oscillate: Option<OscillatingQ>,

    /// RNG seed; all randomness derives from it.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Number of independent runs (an ensemble when greater than 1).
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    pub runs: u32,

    /// Output directory (falls back to $LEAFGROW_OUT; stdout when neither is
    /// set).
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,

    /// Output formats, comma separated.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "json")]
    pub format: Vec<Format>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputOptions {
    pub runs: u32,
    pub out: Option<PathBuf>,
    pub formats: Vec<Format>,
}

fn config_from_cli(cli: &Cli) -> Result<GrowthConfig, CliError> {
    let policy = match cli.mode {
        Mode::Bayes => match cli.bayes {
            0 => Policy::Bayes0,
            1 => Policy::Bayes1,
            _ => Policy::Bayes2,
        },
        Mode::Branch => {
            let weighting = match cli.branch_weights {
                BranchWeightsArg::Unit => BranchWeighting::Unit,
                BranchWeightsArg::Indeg => BranchWeighting::WeightedInDegree,
                BranchWeightsArg::Cumindeg => BranchWeighting::CumulativeInDegree,
            };
            let kind = match cli.sharpen {
                SharpenArg::Power => SharpenKind::Power,
                SharpenArg::Exp => SharpenKind::Exponential,
            };
            let sharpening = if kind == SharpenKind::Power && cli.alpha == 1.0 {
                None
            } else {
                Some(SharpenSpec {
                    kind,
                    alpha: cli.alpha,
                })
            };
            Policy::Branch {
                weighting,
                sharpening,
            }
        }
    };
    let q = match cli.q_oscillate {
        Some(params) => MixtureSchedule::Oscillating(params),
        None => MixtureSchedule::Constant(cli.q),
    };
    let config = GrowthConfig {
        intervals: cli.intervals,
        poisson_mean: cli.poisson_mean,
        policy,
        q,
        prior: Prior::Uniform,
        seed: cli.seed,
    };
    config
        .validate()
        .map_err(|e| CliError::invalid(e.to_string()))?;
    Ok(config)
}

/// Parses argv into a growth configuration and output options. Clap errors
/// are mapped onto the structured exit codes.
pub fn parse_cli<I, T>(args: I) -> Result<(GrowthConfig, OutputOptions), CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|err| {
        let exit_code = match err.kind() {
            ErrorKind::DisplayHelp
            | ErrorKind::DisplayVersion
            | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
                // Help/version are not failures; the full rendering goes to
                // stdout.
                return CliError {
                    exit_code: 0,
                    message: err.render().to_string(),
                };
            }
            ErrorKind::MissingRequiredArgument => EXIT_MISSING_ARGUMENT,
            ErrorKind::InvalidValue
            | ErrorKind::ValueValidation
            | ErrorKind::InvalidUtf8
            | ErrorKind::TooFewValues
            | ErrorKind::TooManyValues
            | ErrorKind::WrongNumberOfValues => EXIT_INVALID_VALUE,
            _ => EXIT_USAGE,
        };
        let message = err
            .render()
            .to_string()
            .lines()
            .next()
            .unwrap_or("invalid arguments")
            .trim_start_matches("error: ")
            .to_string();
        CliError { exit_code, message }
    })?;

    let config = config_from_cli(&cli)?;
    let out = cli
        .out
        .clone()
        .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from));
    let mut formats = Vec::new();
    for f in &cli.format {
        if !formats.contains(f) {
            formats.push(*f);
        }
    }
    let options = OutputOptions {
        runs: cli.runs,
        out,
        formats,
    };

    if options.runs > 1 {
        if let Some(bad) = options
            .formats
            .iter()
            .find(|f| matches!(f, Format::Dot | Format::Frames))
        {
            return Err(CliError::invalid(format!(
                "format '{}' exports a single trajectory and cannot be combined with --runs {}",
                match bad {
                    Format::Dot => "dot",
                    _ => "frames",
                },
                options.runs
            )));
        }
    }
    if options.out.is_none() {
        if options.formats.len() != 1 {
            return Err(CliError::invalid(
                "writing to stdout supports exactly one --format; pass --out for multiple",
            ));
        }
        if options.formats[0] == Format::Frames {
            return Err(CliError::invalid(
                "frames require an output directory (--out or $LEAFGROW_OUT)",
            ));
        }
    }
    Ok((config, options))
}

fn summary_json(summary: &EnsembleSummary) -> String {
    let value = serde_json::to_value(summary).expect("summary serializes");
    let mut out = canonical_json(&value);
    out.push('\n');
    out
}

/// Executes the run(s) and emits the requested formats. Returns what was
/// written to stdout (empty in directory mode) so tests can call it directly.
pub fn execute(config: &GrowthConfig, options: &OutputOptions) -> Result<String, CliError> {
    let trajectory = if options.runs == 1 {
        Some(run(config)?)
    } else {
        None
    };
    let needs_summary = options.formats.contains(&Format::Csv)
        || (options.formats.contains(&Format::Json) && trajectory.is_none());
    let summary = if needs_summary {
        Some(ensemble(config, options.runs)?)
    } else {
        None
    };

    let render = |format: Format| -> Result<String, CliError> {
        Ok(match format {
            Format::Json => match &trajectory {
                Some(traj) => export_trajectory_json(traj),
                None => summary_json(summary.as_ref().expect("summary computed")),
            },
            Format::Dot => {
                let traj = trajectory.as_ref().expect("single run");
                export_dot(&traj.tree, Some(&traj.tree.attachment_weights()))
            }
            Format::Csv => export_metrics_csv(summary.as_ref().expect("summary computed")),
            Format::Frames => unreachable!("frames are handled separately"),
        })
    };

    match &options.out {
        None => render(options.formats[0]),
        Some(dir) => {
            let mut manifest = RunManifest::new(config);
            for format in &options.formats {
                match format {
                    Format::Json => {
                        let name = if trajectory.is_some() {
                            "trajectory.json"
                        } else {
                            "summary.json"
                        };
                        manifest.write_file(dir, name, &render(Format::Json)?)?;
                    }
                    Format::Dot => manifest.write_file(dir, "tree.dot", &render(Format::Dot)?)?,
                    Format::Csv => {
                        manifest.write_file(dir, "metrics.csv", &render(Format::Csv)?)?
                    }
                    Format::Frames => {
                        let traj = trajectory.as_ref().expect("single run");
                        let frames_dir = dir.join("frames");
                        let frame_manifest = export_frames(traj, &frames_dir)?;
                        for mut entry in frame_manifest.files {
                            entry.name = format!("frames/{}", entry.name);
                            manifest.files.push(entry);
                        }
                    }
                }
            }
            let manifest_text = manifest.to_canonical_json();
            let path = dir.join("manifest.json");
            std::fs::write(&path, manifest_text).map_err(|source| CoreError::Io {
                path,
                source,
            })?;
            Ok(String::new())
        }
    }
}

/// Full CLI entry point; returns the process exit code.
pub fn main_impl<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match parse_cli(args).and_then(|(config, options)| execute(&config, &options)) {
        Ok(stdout) => {
            print!("{stdout}");
            0
        }
        Err(err) if err.exit_code == 0 => {
            print!("{}", err.message);
            0
        }
        Err(err) => {
            eprintln!("error: {}", err.message);
            err.exit_code
        }
    }
}
