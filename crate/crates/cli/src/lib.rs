//! Argument parsing and command execution for the `dscluster` binary.
//!
//! Exit codes: 0 on success, 1 on a usage error, 2 on a runtime error.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use dscluster::bench::{emit_reports, run_experiment, Family, ProblemSpec, ReportFormat};
use dscluster::calibrate::{calibrate, CalibrationGrid};
use dscluster::{run_single, EvidenceSet, Method, NetworkParams, RunOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;

/// Fully parsed invocation. Nothing else influences the output.
#[derive(Debug, Clone, PartialEq, Parser)]
#[command(name = "dscluster", version, about = "Metaconflict clustering of simple support functions")]
pub struct CliConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, PartialEq, Subcommand)]
pub enum Command {
    /// Generate an evidence set file.
    Gen(GenArgs),
    /// Run one solver on an evidence set and write its run report.
    Run(RunArgs),
    /// Run seeded experiments and write aggregate and raw reports.
    Bench(BenchArgs),
    /// Write the per-iteration metaconflict series of one run as CSV.
    Trace(RunArgs),
    /// Grid-search the network constants and write the best parameter file.
    Calibrate(CalibrateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Exhaustive,
    Random,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Exhaustive => Family::Exhaustive,
            FamilyArg::Random => Family::Random,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for ReportFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => ReportFormat::Csv,
            FormatArg::Json => ReportFormat::Json,
        }
    }
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse::<Method>().map_err(|e| e.to_string())
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct GenArgs {
    #[arg(long, value_enum, default_value = "exhaustive")]
    pub family: FamilyArg,
    /// Exhaustive family: frame size and cluster count.
    #[arg(long)]
    pub clusters: Option<usize>,
    /// Random family: frame size.
    #[arg(long, default_value_t = 6)]
    pub frame: usize,
    /// Random family: number of pieces of evidence.
    #[arg(long)]
    pub size: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct RunArgs {
    #[arg(long, value_parser = parse_method, default_value = "hybrid")]
    pub method: Method,
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub clusters: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Network parameter file; shipped defaults when absent.
    #[arg(long)]
    pub params: Option<PathBuf>,
    /// Record the network-phase metaconflict at every iteration.
    #[arg(long)]
    pub trace: bool,
    /// Record wall time (makes output non-reproducible).
    #[arg(long)]
    pub timing: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct BenchArgs {
    #[arg(long, value_enum, default_value = "exhaustive")]
    pub family: FamilyArg,
    /// Methods to compare; all three when absent.
    #[arg(long, value_parser = parse_method, value_delimiter = ',')]
    pub method: Vec<Method>,
    /// Cluster count (exhaustive) or evidence count (random).
    #[arg(long, conflicts_with = "sizes")]
    pub size: Option<usize>,
    /// Comma-separated list of sizes.
    #[arg(long, value_delimiter = ',')]
    pub sizes: Vec<usize>,
    /// Random family: cluster count, defaults to the frame size.
    #[arg(long)]
    pub clusters: Option<usize>,
    /// Random family: frame size.
    #[arg(long, default_value_t = 6)]
    pub frame: usize,
    #[arg(long, default_value_t = 10)]
    pub repeats: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub params: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: FormatArg,
    #[arg(long)]
    pub trace: bool,
    #[arg(long)]
    pub timing: bool,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Report file. Raw runs go to `<out>.runs.jsonl`.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct CalibrateArgs {
    #[arg(long, default_value_t = 3)]
    pub clusters: usize,
    /// Instances scored per grid cell.
    #[arg(long, default_value_t = 20)]
    pub repeats: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Base parameters for the dimensions outside the grid.
    #[arg(long)]
    pub params: Option<PathBuf>,
    /// Best parameters; stdout when absent. The full grid goes to `<out>.cells.json`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Rejected command line. `is_info` marks `--help` and `--version`.
#[derive(Debug)]
pub struct UsageError {
    pub message: String,
    pub is_info: bool,
}

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for UsageError {}

#[derive(Debug, thiserror::Error)]
pub enum RuntimeError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Input { path: PathBuf, source: dscluster::Error },
    #[error(transparent)]
    Core(#[from] dscluster::Error),
    #[error("{0}")]
    Invalid(String),
}

/// Parses `argv` (including the program name).
pub fn parse_args<I, T>(argv: I) -> Result<CliConfig, UsageError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    CliConfig::try_parse_from(argv).map_err(|e| UsageError {
        is_info: matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion),
        message: e.render().to_string(),
    })
}

/// Runs a parsed command and returns the process exit code.
pub fn execute(config: &CliConfig) -> i32 {
    match run_command(config) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_RUNTIME
        }
    }
}

/// Parses and executes; the whole binary.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match parse_args(argv) {
        Ok(config) => execute(&config),
        Err(e) if e.is_info => {
            print!("{e}");
            EXIT_OK
        }
        Err(e) => {
            eprint!("{e}");
            EXIT_USAGE
        }
    }
}

pub fn run_command(config: &CliConfig) -> Result<(), RuntimeError> {
    match &config.command {
        Command::Gen(args) => gen(args),
        Command::Run(args) => run(args),
        Command::Bench(args) => bench(args),
        Command::Trace(args) => trace(args),
        Command::Calibrate(args) => calibrate_cmd(args),
    }
}

fn read_file(path: &Path) -> Result<String, RuntimeError> {
    fs::read_to_string(path).map_err(|source| RuntimeError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), RuntimeError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|source| RuntimeError::Io {
            path: p.to_path_buf(),
            source,
        }),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|source| RuntimeError::Io {
                    path: PathBuf::from("<stdout>"),
                    source,
                })
        }
    }
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn load_params(path: Option<&Path>) -> Result<NetworkParams, RuntimeError> {
    match path {
        None => Ok(NetworkParams::default()),
        Some(p) => NetworkParams::from_json(&read_file(p)?).map_err(|source| RuntimeError::Input {
            path: p.to_path_buf(),
            source,
        }),
    }
}

fn load_evidence(path: &Path) -> Result<EvidenceSet, RuntimeError> {
    EvidenceSet::from_json(&read_file(path)?).map_err(|source| RuntimeError::Input {
        path: path.to_path_buf(),
        source,
    })
}

fn gen(args: &GenArgs) -> Result<(), RuntimeError> {
    let spec = match args.family {
        FamilyArg::Exhaustive => {
            let r = args
                .clusters
                .ok_or_else(|| RuntimeError::Invalid("exhaustive family needs --clusters".into()))?;
            ProblemSpec::exhaustive(r, args.seed)?
        }
        FamilyArg::Random => {
            let m = args
                .size
                .ok_or_else(|| RuntimeError::Invalid("random family needs --size".into()))?;
            ProblemSpec::random(args.frame, args.clusters.unwrap_or(args.frame), m, args.seed)?
        }
    };
    // same instance as repeat 0 of a bench with this seed
    let set = spec.instance(0)?;
    write_output(args.out.as_deref(), &(set.to_json() + "\n"))
}

fn single(args: &RunArgs, trace: bool) -> Result<dscluster::RunReport, RuntimeError> {
    let set = load_evidence(&args.input)?;
    let params = load_params(args.params.as_deref())?;
    let opts = RunOptions {
        trace,
        timing: args.timing,
        ..RunOptions::default()
    };
    Ok(run_single(args.method, &set.evidence, args.clusters, &params, args.seed, &opts)?)
}

fn run(args: &RunArgs) -> Result<(), RuntimeError> {
    let report = single(args, args.trace)?;
    write_output(args.out.as_deref(), &(report.to_json_line() + "\n"))
}

fn trace(args: &RunArgs) -> Result<(), RuntimeError> {
    let report = single(args, true)?;
    let mut csv = String::from("phase,iteration,mcf\n");
    for p in &report.mcf_trace {
        csv.push_str(&format!("{},{},{}\n", p.phase.as_str(), p.iteration, p.mcf));
    }
    write_output(args.out.as_deref(), &csv)
}

fn bench(args: &BenchArgs) -> Result<(), RuntimeError> {
    let params = load_params(args.params.as_deref())?;
    let methods = if args.method.is_empty() {
        Method::ALL.to_vec()
    } else {
        args.method.clone()
    };
    let sizes: Vec<usize> = match (args.size, args.sizes.is_empty()) {
        (Some(s), _) => vec![s],
        (None, false) => args.sizes.clone(),
        (None, true) => return Err(RuntimeError::Invalid("bench needs --size or --sizes".into())),
    };
    let opts = RunOptions {
        trace: args.trace,
        timing: args.timing,
        ..RunOptions::default()
    };
    let mut reports = Vec::new();
    let mut raw = String::new();
    for &size in &sizes {
        let spec = match args.family {
            FamilyArg::Exhaustive => ProblemSpec::exhaustive(size, args.seed)?,
            FamilyArg::Random => {
                ProblemSpec::random(args.frame, args.clusters.unwrap_or(args.frame), size, args.seed)?
            }
        };
        let experiment = run_experiment(&spec, &methods, args.repeats, &params, &opts, args.jobs)?;
        for run in &experiment.runs {
            raw.push_str(&run.to_json_line());
            raw.push('\n');
        }
        for f in &experiment.report.failures {
            eprintln!("warning: repeat {} method {}: {}", f.repeat, f.method, f.error);
        }
        reports.push(experiment.report);
    }
    let mut text = emit_reports(&reports, args.format.into());
    if !text.ends_with('\n') {
        text.push('\n');
    }
    write_output(Some(&args.out), &text)?;
    write_output(Some(&with_suffix(&args.out, ".runs.jsonl")), &raw)
}

fn calibrate_cmd(args: &CalibrateArgs) -> Result<(), RuntimeError> {
    let base = load_params(args.params.as_deref())?;
    let result = calibrate(&CalibrationGrid::default(), &base, args.clusters, args.repeats, args.seed)?;
    write_output(args.out.as_deref(), &(result.best.params.to_json() + "\n"))?;
    if let Some(out) = &args.out {
        let cells = serde_json::to_string_pretty(&result.cells).expect("scores serialize");
        write_output(Some(&with_suffix(out, ".cells.json")), &(cells + "\n"))?;
    }
    Ok(())
}
