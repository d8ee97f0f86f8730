//! Command-line front end.
//!
//! Every command reads its inputs, writes instrument-keyed artifacts under
//! `--out`, and finishes with `manifest.json`. Exit status is 0 on
//! success, 1 on a computation error and 2 on a usage error.

mod commands;

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fluctuation::{AnalysisConfig, GridKind};
use crate::ingest::{SessionSpec, TradeFormat};
use crate::scaling::DEFAULT_DT_GRID;

pub const EXIT_OK: i32 = 0;
pub const EXIT_COMPUTATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "volscale", version, about = "Scaling analysis of trading volume")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub args: RunArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Aggregate tick files into volume series
    Ingest,
    /// Intraday volume pattern per instrument and across instruments
    Pattern,
    /// DFA Hurst index of original and deseasonalized series
    Dfa,
    /// MF-DFA spectra of original and deseasonalized series
    Mfdfa,
    /// Taylor mean-variance scaling and its time-scale trend
    Taylor,
    /// Write synthetic series
    Synth,
    /// Per-instrument summary table
    Report,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SynthKind {
    Fgn,
    Cascade,
    Iid,
    Universe,
    Modulated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GridArg {
    Log,
    Dyadic,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Input files (trade files for `ingest`, series files otherwise)
    #[arg(long, global = true, num_args = 1.., value_delimiter = ',', env = "VOLSCALE_INPUT")]
    pub input: Vec<PathBuf>,

    /// Continuous session windows
    #[arg(long, global = true, default_value = "09:30-11:30,13:00-15:00", env = "VOLSCALE_SESSION")]
    pub session: String,

    /// Time scales in trading minutes
    #[arg(long, global = true, value_delimiter = ',', env = "VOLSCALE_DT")]
    pub dt: Vec<u32>,

    #[arg(long, global = true, default_value_t = -4.0, allow_negative_numbers = true, env = "VOLSCALE_QMIN")]
    pub qmin: f64,
    #[arg(long, global = true, default_value_t = 4.0, allow_negative_numbers = true, env = "VOLSCALE_QMAX")]
    pub qmax: f64,
    #[arg(long, global = true, default_value_t = 0.25, env = "VOLSCALE_QSTEP")]
    pub qstep: f64,

    #[arg(long, global = true, default_value_t = 20, env = "VOLSCALE_SMIN")]
    pub smin: usize,
    /// Largest window; defaults to a quarter of the series length
    #[arg(long, global = true, env = "VOLSCALE_SMAX")]
    pub smax: Option<usize>,
    #[arg(long, global = true, default_value_t = 30, env = "VOLSCALE_NSCALES")]
    pub nscales: usize,
    #[arg(long, global = true, value_enum, default_value = "log", env = "VOLSCALE_GRID")]
    pub grid: GridArg,

    #[arg(long = "detrend-order", global = true, default_value_t = 1, env = "VOLSCALE_DETREND_ORDER")]
    pub detrend_order: usize,

    #[arg(long, global = true, default_value_t = 0, env = "VOLSCALE_SEED")]
    pub seed: u64,

    #[arg(long, global = true, default_value = "out", env = "VOLSCALE_OUT")]
    pub out: PathBuf,

    /// Significant digits in tables
    #[arg(long, global = true, default_value_t = 6, env = "VOLSCALE_PRECISION")]
    pub precision: usize,

    /// Trade file delimiter
    #[arg(long, global = true, default_value = ",", env = "VOLSCALE_DELIMITER")]
    pub delimiter: char,
    /// Trade files start with a header row
    #[arg(long, global = true, env = "VOLSCALE_HEADER")]
    pub header: bool,
    #[arg(long = "timestamp-format", global = true, default_value = "%Y-%m-%d %H:%M:%S%.f", env = "VOLSCALE_TIMESTAMP_FORMAT")]
    pub timestamp_format: String,

    #[arg(long, global = true, value_enum, default_value = "fgn", env = "VOLSCALE_KIND")]
    pub kind: SynthKind,
    #[arg(long, global = true, default_value_t = 0.8, env = "VOLSCALE_HURST")]
    pub hurst: f64,
    /// Cascade multiplier
    #[arg(long, global = true, default_value_t = 0.3, env = "VOLSCALE_P")]
    pub p: f64,
    #[arg(long, global = true, default_value_t = 16, env = "VOLSCALE_LEVELS")]
    pub levels: u32,
    /// Randomize cascade weight order
    #[arg(long, global = true, env = "VOLSCALE_RANDOMIZE")]
    pub randomize: bool,
    #[arg(long, global = true, default_value_t = 1 << 16, env = "VOLSCALE_LENGTH")]
    pub length: usize,
    #[arg(long, global = true, default_value_t = 0.75, env = "VOLSCALE_BETA")]
    pub beta: f64,
    #[arg(long, global = true, default_value_t = 50, env = "VOLSCALE_INSTRUMENTS")]
    pub instruments: usize,
    #[arg(long = "mean-lo", global = true, default_value_t = 10.0, env = "VOLSCALE_MEAN_LO")]
    pub mean_lo: f64,
    #[arg(long = "mean-hi", global = true, default_value_t = 1000.0, env = "VOLSCALE_MEAN_HI")]
    pub mean_hi: f64,
    #[arg(long, global = true, default_value_t = 250, env = "VOLSCALE_DAYS")]
    pub days: usize,
    /// Log-volatility of modulated volumes
    #[arg(long, global = true, default_value_t = 0.5, env = "VOLSCALE_SIGMA")]
    pub sigma: f64,
}

/// Validated settings for one run. Serialized verbatim into the manifest.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub inputs: Vec<PathBuf>,
    pub session: SessionSpec,
    pub dt: Vec<u32>,
    pub analysis: AnalysisConfig,
    pub trade_format: TradeFormat,
    pub seed: u64,
    pub out: PathBuf,
    pub precision: usize,
    pub synth: SynthConfig,
}

#[derive(Debug, Clone, Serialize)]
pub struct SynthConfig {
    pub kind: SynthKind,
    pub hurst: f64,
    pub p: f64,
    pub levels: u32,
    pub randomize: bool,
    pub length: usize,
    pub beta: f64,
    pub instruments: usize,
    pub mean_lo: f64,
    pub mean_hi: f64,
    pub days: usize,
    pub sigma: f64,
}

impl RunConfig {
    pub fn from_args(command: Command, a: &RunArgs) -> Result<Self> {
        let session: SessionSpec = a.session.parse()?;
        let analysis = AnalysisConfig {
            q_min: a.qmin,
            q_max: a.qmax,
            q_step: a.qstep,
            s_min: a.smin,
            s_max: a.smax,
            n_scales: a.nscales,
            grid: match a.grid {
                GridArg::Log => GridKind::Log,
                GridArg::Dyadic => GridKind::Dyadic,
            },
            detrend_order: a.detrend_order,
        };
        if !a.delimiter.is_ascii() {
            return Err(Error::Config("delimiter must be a single ASCII character".into()));
        }
        let dt = if a.dt.is_empty() {
            match command {
                Command::Taylor => DEFAULT_DT_GRID.to_vec(),
                _ => vec![1],
            }
        } else {
            a.dt.clone()
        };
        let cfg = RunConfig {
            command,
            inputs: a.input.clone(),
            session,
            dt,
            analysis,
            trade_format: TradeFormat {
                delimiter: a.delimiter as u8,
                has_header: a.header,
                timestamp_column: 0,
                size_column: 1,
                timestamp_format: a.timestamp_format.clone(),
            },
            seed: a.seed,
            out: a.out.clone(),
            precision: a.precision,
            synth: SynthConfig {
                kind: a.kind,
                hurst: a.hurst,
                p: a.p,
                levels: a.levels,
                randomize: a.randomize,
                length: a.length,
                beta: a.beta,
                instruments: a.instruments,
                mean_lo: a.mean_lo,
                mean_hi: a.mean_hi,
                days: a.days,
                sigma: a.sigma,
            },
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks module preconditions that do not depend on input data.
    pub fn validate(&self) -> Result<()> {
        let a = &self.analysis;
        a.q_grid()?;
        if a.s_min < 4 {
            return Err(Error::Config(format!("--smin must be at least 4, got {}", a.s_min)));
        }
        if a.s_min < a.detrend_order + 2 {
            return Err(Error::Config(format!(
                "--smin {} too small for detrend order {}",
                a.s_min, a.detrend_order
            )));
        }
        if a.s_max.is_some_and(|m| m < a.s_min) {
            return Err(Error::Config("--smax is below --smin".into()));
        }
        if a.n_scales < 2 {
            return Err(Error::Config("--nscales must be at least 2".into()));
        }
        if self.precision == 0 || self.precision > 17 {
            return Err(Error::Config("--precision must be in 1..=17".into()));
        }
        if self.dt.contains(&0) {
            return Err(Error::Config("--dt values must be positive".into()));
        }
        if self.command != Command::Synth && self.inputs.is_empty() {
            return Err(Error::Config(format!("{:?} needs --input", self.command).to_lowercase()));
        }
        for p in &self.inputs {
            if !p.is_file() {
                return Err(Error::Config(format!("input {} does not exist", p.display())));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Failure {
    pub instrument: String,
    pub kind: &'static str,
    pub message: String,
}

/// Collects artifacts and per-instrument failures during a run.
#[derive(Debug)]
pub struct RunContext {
    pub config: RunConfig,
    outputs: Vec<String>,
    failures: Vec<Failure>,
    notes: Vec<String>,
}

impl RunContext {
    fn new(config: RunConfig) -> Self {
        RunContext {
            config,
            outputs: Vec::new(),
            failures: Vec::new(),
            notes: Vec::new(),
        }
    }

    /// Writes `contents` to `out/<rel>` and records it.
    pub fn write(&mut self, rel: impl AsRef<Path>, contents: impl AsRef<[u8]>) -> Result<()> {
        let rel = rel.as_ref();
        let path = self.config.out.join(rel);
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
        fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
        self.outputs.push(rel.to_string_lossy().replace('\\', "/"));
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, rel: impl AsRef<Path>, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write(rel, text)
    }

    pub fn fail(&mut self, instrument: &str, err: &Error) {
        self.failures.push(Failure {
            instrument: instrument.to_string(),
            kind: err.kind(),
            message: err.to_string(),
        });
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    config: &'a RunConfig,
    seeds: Vec<u64>,
    timestamps: Timestamps,
    outputs: &'a [String],
    failures: &'a [Failure],
    notes: &'a [String],
}

#[derive(Serialize)]
struct Timestamps {
    started: String,
    finished: String,
}

/// Wall clock, or `SOURCE_DATE_EPOCH` when set so that reruns are
/// byte-identical.
fn now() -> String {
    let fixed = std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|v| v.trim().parse::<i64>().ok())
        .and_then(|secs| DateTime::<Utc>::from_timestamp(secs, 0));
    fixed.unwrap_or_else(Utc::now).to_rfc3339()
}

#[derive(Serialize)]
struct ErrorDocument<'a> {
    error: &'a str,
    message: String,
}

/// Runs a parsed command line, returning the process exit status.
pub fn execute(cli: Cli) -> i32 {
    let config = match RunConfig::from_args(cli.command, &cli.args) {
        Ok(c) => c,
        Err(e) => {
            report_error(&cli.args.out, &e);
            return EXIT_USAGE;
        }
    };
    let started = now();
    let mut ctx = RunContext::new(config);
    let outcome = commands::dispatch(&mut ctx);
    let written = write_manifest(&ctx, started);
    match outcome.and(written) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            report_error(&ctx.config.out, &e);
            EXIT_COMPUTATION
        }
    }
}

/// Written after every run that got past configuration, failed or not.
fn write_manifest(ctx: &RunContext, started: String) -> Result<()> {
    let mut outputs = ctx.outputs.clone();
    outputs.sort();
    let manifest = Manifest {
        tool: "volscale",
        version: env!("CARGO_PKG_VERSION"),
        config: &ctx.config,
        seeds: vec![ctx.config.seed],
        timestamps: Timestamps {
            started,
            finished: now(),
        },
        outputs: &outputs,
        failures: &ctx.failures,
        notes: &ctx.notes,
    };
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    let out = &ctx.config.out;
    fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let path = out.join("manifest.json");
    fs::write(&path, text).map_err(|e| Error::io(&path, e))
}

fn report_error(out: &Path, e: &Error) {
    let doc = ErrorDocument {
        error: e.kind(),
        message: e.to_string(),
    };
    let text = serde_json::to_string_pretty(&doc).unwrap_or_else(|_| e.to_string());
    eprintln!("{text}");
    if fs::create_dir_all(out).is_ok() {
        let _ = fs::write(out.join("error.json"), format!("{text}\n"));
    }
}

/// Parses `args` and runs. Usage errors print clap's message and return 2.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(cli),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            code
        }
    }
}
