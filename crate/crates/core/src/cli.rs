//! Command-line front end.
//!
//! Module errors exit with status 1 and a single line
//! `error code=<code> message=<text>` on stderr; configuration errors
//! (bad flags, unreadable or unparsable inputs, a missing seed) exit with 2.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bodies::Body;
use crate::enumerate::enumerate_in_body;
use crate::error::Error;
use crate::gaussian::{poisson_check, prob_zero, theta, GaussianParam, ThetaResult};
use crate::io::{self, ReportRow};
use crate::lattice::Lattice;
use crate::sampler::{ExactSampler, KleinSampler};
use crate::slicing::{
    best_slice_dual_search, best_slice_exact, run_randomized, verify_prepared, FinderConfig, SliceResult,
    SlicingInstance,
};
use crate::suite::{calibrate, run_suite, standard_suite, DEFAULT_BIG_C_GRID, DEFAULT_SMALL_C_GRID};
use crate::VERSION;

pub const THREADS_ENV: &str = "LATSLICE_THREADS";

#[derive(Debug, Parser)]
#[command(name = "latslice", version, about = "Lattice points, discrete Gaussians and hyperplane slices")]
pub struct Cli {
    /// JSON file with default constants and seed; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the lattice points of a body.
    Enumerate(InputArgs),
    /// Theta series and the Poisson summation residual.
    Theta {
        #[command(flatten)]
        lattice: LatticeArgs,
        #[arg(long)]
        s: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Draw from the discrete Gaussian.
    Sample {
        #[command(flatten)]
        lattice: LatticeArgs,
        #[arg(long)]
        s: f64,
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, value_enum, default_value_t = SamplerKind::Exact)]
        sampler: SamplerKind,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Randomized search for a heavy hyperplane slice.
    SliceRandom {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        constants: ConstantArgs,
    },
    /// Deterministic best slice.
    SliceBest {
        #[arg(value_enum)]
        oracle: OracleKind,
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        norm_bound: Option<f64>,
    },
    /// Full pipeline on one body.
    Verify {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        constants: ConstantArgs,
    },
    /// Full pipeline on the standard suite over Z^d.
    Suite {
        #[command(flatten)]
        constants: ConstantArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Grid over (big_C, small_c) on the standard suite.
    Calibrate {
        #[command(flatten)]
        constants: ConstantArgs,
        #[arg(long, value_delimiter = ',')]
        big_c_grid: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',')]
        small_c_grid: Option<Vec<f64>>,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SamplerKind {
    Exact,
    Klein,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OracleKind {
    Exact,
    Dual,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct LatticeArgs {
    /// `integer` for Z^d, or a JSON file `{"dim": d, "basis": [[...], ...]}`.
    #[arg(long, default_value = "integer")]
    pub lattice: String,
    /// Dimension of Z^d when no body fixes it.
    #[arg(long)]
    pub dim: Option<usize>,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Body file, inline JSON, or shorthand such as `cube:3`, `cross:4`, `ball:2:1.5`, `box:1,0.5`.
    #[arg(long)]
    pub body: String,
    #[command(flatten)]
    pub lattice: LatticeArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ConstantArgs {
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long = "big-C")]
    pub big_c: Option<f64>,
    #[arg(long = "small-c")]
    pub small_c: Option<f64>,
    #[arg(long)]
    pub max_attempts: Option<u64>,
    #[arg(long = "baseline-c")]
    pub baseline_c: Option<f64>,
}

/// Optional configuration file.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: Option<u64>,
    pub big_c: Option<f64>,
    pub small_c: Option<f64>,
    pub max_attempts: Option<u64>,
    pub baseline_c: Option<f64>,
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Module(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Module(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Module(_) => 1,
        }
    }

    pub fn line(&self) -> String {
        let (code, msg) = match self {
            CliError::Config(m) => ("config", m.clone()),
            CliError::Module(e) => (e.code(), e.to_string()),
        };
        format!("error code={code} message={}", msg.replace('\n', " "))
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn config_err(e: impl std::fmt::Display) -> CliError {
    CliError::Config(e.to_string())
}

fn load_config(path: Option<&Path>) -> CliResult<ExperimentConfig> {
    match path {
        None => Ok(ExperimentConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| config_err(format!("{}: {e}", p.display())))?;
            serde_json::from_str(&text).map_err(|e| config_err(format!("{}: {e}", p.display())))
        }
    }
}

fn finder_config(args: &ConstantArgs, file: &ExperimentConfig) -> CliResult<FinderConfig> {
    let d = FinderConfig::default();
    let seed = args
        .seed
        .or(file.seed)
        .ok_or_else(|| config_err("randomized commands require --seed"))?;
    let cfg = FinderConfig {
        big_c: args.big_c.or(file.big_c).unwrap_or(d.big_c),
        small_c: args.small_c.or(file.small_c).unwrap_or(d.small_c),
        max_attempts: args.max_attempts.or(file.max_attempts),
        seed,
        baseline_c: args.baseline_c.or(file.baseline_c).unwrap_or(d.baseline_c),
    };
    cfg.validate().map_err(config_err)?;
    Ok(cfg)
}

fn threads() -> CliResult<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(config_err(format!("{THREADS_ENV} must be a positive integer, got {v:?}"))),
        },
    }
}

fn load_body(arg: &str) -> CliResult<Body> {
    io::parse_body_arg(arg).map_err(config_err)
}

fn load_lattice(args: &LatticeArgs, body_dim: Option<usize>) -> CliResult<Lattice> {
    if args.lattice == "integer" {
        let d = match (args.dim, body_dim) {
            (Some(a), Some(b)) if a != b => {
                return Err(config_err(format!("--dim {a} does not match the body dimension {b}")))
            }
            (Some(a), _) | (None, Some(a)) => a,
            (None, None) => return Err(config_err("--dim is required for the integer lattice")),
        };
        if d == 0 {
            return Err(config_err("--dim must be positive"));
        }
        return Ok(Lattice::integer(d));
    }
    let lat = io::read_lattice(Path::new(&args.lattice)).map_err(|e| config_err(format!("{}: {e}", args.lattice)))?;
    if let Some(d) = args.dim.or(body_dim) {
        if d != lat.dim() {
            return Err(config_err(format!("lattice has dimension {}, expected {d}", lat.dim())));
        }
    }
    Ok(lat)
}

fn load_input(input: &InputArgs) -> CliResult<(Lattice, Body)> {
    let body = load_body(&input.body)?;
    let lat = load_lattice(&input.lattice, Some(body.dim()))?;
    Ok((lat, body))
}

fn sink(out: &OutputArgs) -> CliResult<Box<dyn Write>> {
    match &out.out {
        None => Ok(Box::new(std::io::stdout().lock())),
        Some(p) => {
            let f = File::create(p).map_err(|e| config_err(format!("{}: {e}", p.display())))?;
            Ok(Box::new(BufWriter::new(f)))
        }
    }
}

fn emit_json<T: Serialize>(out: &OutputArgs, value: &T) -> CliResult<()> {
    let mut w = sink(out)?;
    let text = serde_json::to_string_pretty(value).map_err(Error::from)?;
    writeln!(w, "{text}").map_err(Error::from)?;
    w.flush().map_err(Error::from)?;
    Ok(())
}

#[derive(Serialize)]
struct Versioned<'a, T: Serialize> {
    version: &'a str,
    #[serde(flatten)]
    inner: T,
}

fn versioned<T: Serialize>(inner: T) -> Versioned<'static, T> {
    Versioned { version: VERSION, inner }
}

#[derive(Serialize)]
struct ThetaOutput {
    dim: usize,
    s: f64,
    theta: ThetaResult,
    poisson_residual: f64,
}

#[derive(Serialize)]
struct SampleSummary {
    sampler: &'static str,
    s: f64,
    n: usize,
    seed: u64,
    zero_frequency: f64,
    prob_zero: f64,
}

#[derive(Serialize)]
struct SampleOutput {
    #[serde(flatten)]
    summary: SampleSummary,
    samples: Vec<Vec<i64>>,
}

#[derive(Serialize)]
struct SliceOutput {
    #[serde(flatten)]
    result: SliceResult,
    s: Option<f64>,
    p: Option<f64>,
    sampler: Option<&'static str>,
}

pub fn run(cli: Cli) -> CliResult<()> {
    let file = load_config(cli.config.as_deref())?;
    match cli.command {
        Command::Enumerate(input) => {
            let (lat, body) = load_input(&input)?;
            let ps = enumerate_in_body(&lat, &body)?;
            match input.out.format.unwrap_or(Format::Csv) {
                Format::Csv => {
                    let w = sink(&input.out)?;
                    io::write_point_set_csv(w, &lat, &ps)?;
                }
                Format::Json => emit_json(&input.out, &versioned(serde_json::json!({ "coeffs": ps.coeffs() })))?,
            }
        }
        Command::Theta { lattice, s, out } => {
            let lat = load_lattice(&lattice, None)?;
            let gp = GaussianParam::new(s).map_err(config_err)?;
            let result = ThetaOutput { dim: lat.dim(), s, theta: theta(&lat, gp)?, poisson_residual: poisson_check(&lat, gp)? };
            emit_json(&out, &versioned(result))?;
        }
        Command::Sample { lattice, s, n, sampler, seed, out } => {
            let lat = load_lattice(&lattice, None)?;
            let gp = GaussianParam::new(s).map_err(config_err)?;
            let seed = seed.or(file.seed).ok_or_else(|| config_err("sample requires --seed"))?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let samples: Vec<Vec<i64>> = match sampler {
                SamplerKind::Exact => {
                    let e = ExactSampler::new(&lat, gp)?;
                    (0..n).map(|_| e.sample_coeffs(&mut rng)).collect()
                }
                SamplerKind::Klein => {
                    let k = KleinSampler::new(&lat, gp)?;
                    (0..n).map(|_| k.sample_coeffs(&mut rng)).collect()
                }
            };
            let zeros = samples.iter().filter(|z| z.iter().all(|&v| v == 0)).count();
            let summary = SampleSummary {
                sampler: match sampler {
                    SamplerKind::Exact => "exact",
                    SamplerKind::Klein => "klein",
                },
                s,
                n,
                seed,
                zero_frequency: if n == 0 { 0.0 } else { zeros as f64 / n as f64 },
                prob_zero: prob_zero(&lat, gp)?,
            };
            match out.format.unwrap_or(Format::Csv) {
                Format::Csv => {
                    io::write_samples_csv(sink(&out)?, &lat, &samples)?;
                    eprintln!(
                        "{}",
                        serde_json::to_string(&versioned(summary)).map_err(Error::from)?
                    );
                }
                Format::Json => emit_json(&out, &versioned(SampleOutput { summary, samples }))?,
            }
        }
        Command::SliceRandom { input, constants } => {
            let (lat, body) = load_input(&input)?;
            let cfg = finder_config(&constants, &file)?;
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let inst = SlicingInstance::prepare(&lat, &body, &cfg, &mut rng)?;
            let (result, sampler) = run_randomized(&inst, &cfg, &mut rng)?;
            emit_json(&input.out, &versioned(SliceOutput { result, s: Some(inst.s), p: Some(inst.p), sampler: Some(sampler) }))?;
        }
        Command::SliceBest { oracle, input, norm_bound } => {
            let (lat, body) = load_input(&input)?;
            let result = match oracle {
                OracleKind::Exact => best_slice_exact(&lat, &body)?,
                OracleKind::Dual => {
                    let nb = norm_bound.unwrap_or_else(|| crate::slicing::default_dual_norm_bound(&lat));
                    best_slice_dual_search(&lat, &body, nb)?
                }
            };
            emit_json(&input.out, &versioned(SliceOutput { result, s: None, p: None, sampler: None }))?;
        }
        Command::Verify { input, constants } => {
            let (lat, body) = load_input(&input)?;
            let cfg = finder_config(&constants, &file)?;
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let inst = SlicingInstance::prepare(&lat, &body, &cfg, &mut rng)?;
            let report = verify_prepared(&inst, &cfg, &mut rng, &input.body)?;
            match input.out.format.unwrap_or(Format::Json) {
                Format::Json => emit_json(&input.out, &report)?,
                Format::Csv => io::write_report_rows_csv(sink(&input.out)?, &[ReportRow::from_report(&report)])?,
            }
        }
        Command::Suite { constants, out } => {
            let cfg = finder_config(&constants, &file)?;
            let suite = standard_suite();
            let outcomes = run_suite(&suite, &cfg, threads()?)?;
            match out.format.unwrap_or(Format::Csv) {
                Format::Csv => {
                    let rows: Vec<ReportRow> = outcomes
                        .iter()
                        .zip(&suite)
                        .map(|(o, e)| match &o.result {
                            Ok(r) => ReportRow::from_report(r),
                            Err(err) => ReportRow::from_error(&o.id, e.dim(), err),
                        })
                        .collect();
                    io::write_report_rows_csv(sink(&out)?, &rows)?;
                }
                Format::Json => {
                    let items: Vec<serde_json::Value> = outcomes
                        .iter()
                        .map(|o| match &o.result {
                            Ok(r) => serde_json::to_value(r).expect("report serializes"),
                            Err(err) => serde_json::json!({
                                "version": VERSION,
                                "body_id": o.id,
                                "error": { "code": err.code(), "message": err.to_string() },
                            }),
                        })
                        .collect();
                    emit_json(&out, &items)?;
                }
            }
            for o in &outcomes {
                if let Err(e) = &o.result {
                    log::warn!("{}: {}", o.id, e);
                }
            }
        }
        Command::Calibrate { constants, big_c_grid, small_c_grid, out } => {
            let cfg = finder_config(&constants, &file)?;
            let big = big_c_grid.unwrap_or_else(|| DEFAULT_BIG_C_GRID.to_vec());
            let small = small_c_grid.unwrap_or_else(|| DEFAULT_SMALL_C_GRID.to_vec());
            for &b in &big {
                if !(b >= 1.0 && b.is_finite()) {
                    return Err(config_err(format!("big_C grid value {b} must be >= 1")));
                }
            }
            for &c in &small {
                if !(c > 0.0 && c <= 1.0) {
                    return Err(config_err(format!("small_c grid value {c} must lie in (0, 1]")));
                }
            }
            let report = calibrate(&standard_suite(), &big, &small, &cfg, threads()?)?;
            emit_json(&out, &report)?;
        }
    }
    Ok(())
}

/// Parses arguments, runs, and maps the outcome to a process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}", e.line());
            e.exit_code()
        }
    }
}
