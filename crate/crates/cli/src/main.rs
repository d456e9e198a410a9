//! `pblab`: runs the robust-pacbayes experiments and writes JSON + CSV
//! artifacts.
//!
//! Exit codes: 0 success, 2 config or validation error, 3 I/O error.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use robust_pacbayes::format::to_json_string;
use robust_pacbayes::intervals::{width_table, width_table_csv, IntervalModel, WidthRow};
use robust_pacbayes::montecarlo::{
    bound_violation_experiment, coverage_experiment, gibbs_comparison_experiment, mom_demo_experiment,
    union_blowup_experiment, BoundCheckConfig, CoverageConfig, ExperimentConfig, GibbsConfig, MomDemoConfig,
    UnionConfig,
};
use robust_pacbayes::Error;

#[derive(Parser)]
#[command(name = "pblab", version, about = "Robust mean estimation and PAC-Bayes bound experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Interval-width comparison table on a log-spaced delta grid.
    Fig1(Fig1Args),
    /// Coverage of a confidence interval (or a failure probe).
    Coverage(RunArgs),
    /// Violation frequency of a PAC-Bayes bound.
    BoundCheck(RunArgs),
    /// Joint failure of K_hyp per-hypothesis MoM statements.
    UnionBlowup(RunArgs),
    /// Empirical-mean vs MoM Gibbs posteriors.
    Gibbs(RunArgs),
    /// MoM coverage across block counts.
    MomDemo(RunArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Fig1(_) => "fig1",
            Command::Coverage(_) => "coverage",
            Command::BoundCheck(_) => "bound-check",
            Command::UnionBlowup(_) => "union-blowup",
            Command::Gibbs(_) => "gibbs",
            Command::MomDemo(_) => "mom-demo",
        }
    }
}

#[derive(Args)]
struct RunArgs {
    /// JSON experiment config.
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Overrides `master_seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    workers: Option<usize>,
    /// Overrides `trials`.
    #[arg(long)]
    trials: Option<usize>,
}

#[derive(Args)]
struct Fig1Args {
    /// Optional JSON with `delta_min`, `delta_max`, `points`; flags win.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long, allow_negative_numbers = true)]
    delta_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    delta_max: Option<f64>,
    #[arg(long)]
    points: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Fig1Config {
    #[serde(default = "default_delta_min")]
    delta_min: f64,
    #[serde(default = "default_delta_max")]
    delta_max: f64,
    #[serde(default = "default_points")]
    points: usize,
}

fn default_delta_min() -> f64 {
    1e-8
}

fn default_delta_max() -> f64 {
    0.5
}

fn default_points() -> usize {
    200
}

#[derive(Serialize)]
struct Fig1Report<'a> {
    config: &'a Fig1Config,
    rows: &'a [WidthRow],
}

#[derive(Debug)]
enum CliError {
    Config(String),
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Io(m) => write!(f, "I/O error: {m}"),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

/// A config file kept alongside its text so errors can cite line numbers.
struct Source {
    path: PathBuf,
    text: String,
}

impl Source {
    fn read(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Ok(Self {
            path: path.to_path_buf(),
            text,
        })
    }

    fn parse<T: DeserializeOwned>(&self) -> CliResult<T> {
        serde_json::from_str(&self.text).map_err(|e| {
            CliError::Config(format!("{}:{}:{}: {e}", self.path.display(), e.line(), e.column()))
        })
    }

    /// Line of the first `"key"` naming the top-level part of `field`.
    fn line_of(&self, field: &str) -> Option<usize> {
        let key = field.split(['.', '[']).next().unwrap_or(field);
        let needle = format!("\"{key}\"");
        self.text.lines().position(|l| l.contains(&needle)).map(|i| i + 1)
    }

    fn error(&self, err: Error, overridden: &[&str]) -> CliError {
        let path = self.path.display();
        match &err {
            Error::Config { field, .. } if overridden.contains(&field.as_str()) => {
                CliError::Config(format!("--{field}: {err}"))
            }
            Error::Config { field, .. } => match self.line_of(field) {
                Some(line) => CliError::Config(format!("{path}:{line}: {err}")),
                None => CliError::Config(format!("{path}: {err}")),
            },
            _ => CliError::Config(format!("{path}: {err}")),
        }
    }
}

/// Writes `contents` to `dir/name` through a temp file in the same directory.
fn write_atomic(dir: &Path, name: &str, contents: &str) -> CliResult<PathBuf> {
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", dir.join(name).display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents.as_bytes()).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    let target = dir.join(name);
    tmp.persist(&target).map_err(|e| io(e.error))?;
    Ok(target)
}

fn write_outputs(out: &Path, stem: &str, json: &str, csv: &str) -> CliResult<PathBuf> {
    fs::create_dir_all(out).map_err(|e| CliError::Io(format!("{}: {e}", out.display())))?;
    let json_path = write_atomic(out, &format!("{stem}.json"), json)?;
    write_atomic(out, &format!("{stem}.csv"), csv)?;
    Ok(json_path)
}

fn workers(requested: Option<usize>) -> CliResult<usize> {
    match requested {
        Some(0) => Err(CliError::Config("--workers must be >= 1".into())),
        Some(w) => Ok(w),
        None => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

/// Parses the config, applies flag overrides and validates.
fn load<T: DeserializeOwned + ExperimentConfig>(args: &RunArgs) -> CliResult<(Source, T, Vec<&'static str>)> {
    let source = Source::read(&args.config)?;
    let mut config: T = source.parse()?;
    let mut overridden = Vec::new();
    if let Some(seed) = args.seed {
        *config.master_seed_mut() = seed;
        overridden.push("master_seed");
    }
    if let Some(trials) = args.trials {
        *config.trials_mut() = trials;
        overridden.push("trials");
    }
    config.validate().map_err(|e| source.error(e, &overridden))?;
    Ok((source, config, overridden))
}

fn run_fig1(args: &Fig1Args) -> CliResult<String> {
    let mut config: Fig1Config = match &args.config {
        Some(path) => Source::read(path)?.parse()?,
        None => Fig1Config {
            delta_min: default_delta_min(),
            delta_max: default_delta_max(),
            points: default_points(),
        },
    };
    if let Some(v) = args.delta_min {
        config.delta_min = v;
    }
    if let Some(v) = args.delta_max {
        config.delta_max = v;
    }
    if let Some(v) = args.points {
        config.points = v;
    }
    let rows = width_table(config.delta_min, config.delta_max, config.points)
        .map_err(|e| CliError::Config(format!("invalid grid: {e}")))?;
    let json = to_json_string(&Fig1Report {
        config: &config,
        rows: &rows,
    });
    let path = write_outputs(&args.out, "fig1", &json, &width_table_csv(&rows))?;
    Ok(format!("fig1: {} rows -> {}", rows.len(), path.display()))
}

fn run(command: &Command) -> CliResult<String> {
    let name = command.name();
    match command {
        Command::Fig1(args) => run_fig1(args),
        Command::Coverage(args) => {
            let (source, config, overridden) = load::<CoverageConfig>(args)?;
            let report =
                coverage_experiment(&config, workers(args.workers)?).map_err(|e| source.error(e, &overridden))?;
            let key = match config.interval {
                IntervalModel::Mom => config.k.expect("validated") as f64,
                _ => report.delta,
            };
            let path = write_outputs(&args.out, name, &to_json_string(&report), &report.to_csv(key))?;
            let verdict = match report.under_coverage {
                Some(true) => ", under-covers",
                Some(false) => ", covers",
                None => "",
            };
            Ok(format!(
                "{name}: coverage {} (nominal {}) over {} trials{verdict} -> {}",
                report.coverage,
                report.nominal,
                report.trials,
                path.display()
            ))
        }
        Command::BoundCheck(args) => {
            let (source, config, overridden) = load::<BoundCheckConfig>(args)?;
            let report = bound_violation_experiment(&config, workers(args.workers)?)
                .map_err(|e| source.error(e, &overridden))?;
            let path = write_outputs(&args.out, name, &to_json_string(&report), &report.to_csv())?;
            let worst = report.arms.iter().map(|a| a.violation_rate).fold(0.0, f64::max);
            Ok(format!(
                "{name}: {} arms, max violation rate {worst} (delta {}) -> {}",
                report.arms.len(),
                report.delta,
                path.display()
            ))
        }
        Command::UnionBlowup(args) => {
            let (source, config, overridden) = load::<UnionConfig>(args)?;
            let report =
                union_blowup_experiment(&config, workers(args.workers)?).map_err(|e| source.error(e, &overridden))?;
            let path = write_outputs(&args.out, name, &to_json_string(&report), &report.to_csv())?;
            let vacuous = report
                .vacuous_from
                .map_or("none".to_string(), |k| format!("K_hyp >= {k}"));
            Ok(format!(
                "{name}: {} grid points, vacuous regime {vacuous} -> {}",
                report.rows.len(),
                path.display()
            ))
        }
        Command::Gibbs(args) => {
            let (source, config, overridden) = load::<GibbsConfig>(args)?;
            let report = gibbs_comparison_experiment(&config, workers(args.workers)?)
                .map_err(|e| source.error(e, &overridden))?;
            let path = write_outputs(&args.out, name, &to_json_string(&report), &report.to_csv())?;
            Ok(format!(
                "{name}: MoM win fraction {} at gamma {} -> {}",
                report.mid_win_fraction,
                report.mid_gamma,
                path.display()
            ))
        }
        Command::MomDemo(args) => {
            let (source, config, overridden) = load::<MomDemoConfig>(args)?;
            let report =
                mom_demo_experiment(&config, workers(args.workers)?).map_err(|e| source.error(e, &overridden))?;
            let path = write_outputs(&args.out, name, &to_json_string(&report), &report.to_csv())?;
            Ok(format!("{name}: {} block counts -> {}", report.rows.len(), path.display()))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli.command) {
        Ok(summary) => {
            eprintln!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("pblab {}: {e}", cli.command.name());
            ExitCode::from(e.exit_code())
        }
    }
}
