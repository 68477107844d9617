//! Command-line front end: delay evaluation, equilibrium enumeration,
//! welfare optimization, simulation, and parameter sweeps emitted as CSV.
//!
//! Interface contract:
//! - subcommands `delay | equilibria | welfare | sweep | simulate`;
//! - parameters come from flags or from a plain `key=value` config file
//!   (`--config`); flags win over the file, both win over preset defaults;
//! - CSV output is comma-separated UTF-8 with a header row and LF line
//!   endings; numbers use 12-significant-digit scientific notation and
//!   non-finite values render as empty fields;
//! - exit codes: 0 success, 2 usage error, 3 domain/instability error,
//!   4 convergence error. Failures print a single line
//!   `error[<class>]: <message>` to stderr.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::delay::DelayFunction;
use crate::equilibrium::find_equilibria;
use crate::error::QueueError;
use crate::model::{Market, ServicePolicy};
use crate::sim::{simulate, SimConfig};
use crate::welfare::optimize_welfare;

const EXIT_OK: i32 = 0;
const EXIT_USAGE: i32 = 2;
const EXIT_DOMAIN: i32 = 3;
const EXIT_CONVERGENCE: i32 = 4;

const DEFAULT_TOL: f64 = 1e-10;
const DEFAULT_GRID: usize = 200;
const DEFAULT_HORIZON: u64 = 100_000;
const DELAY_GRID_MAX: f64 = 0.99;

/// Entry point used by the binary; returns the process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            if matches!(err.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{err}");
                return EXIT_OK;
            }
            let first_line = err.to_string();
            let first_line = first_line.lines().next().unwrap_or("bad arguments");
            eprintln!("error[usage]: {first_line}");
            return EXIT_USAGE;
        }
    };
    match execute(cli) {
        Ok(()) => EXIT_OK,
        Err(err) => {
            eprintln!("{}", err.render());
            err.exit_code()
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Queue(QueueError),
    Io(std::io::Error),
}

impl CliError {
    fn render(&self) -> String {
        match self {
            CliError::Usage(msg) => format!("error[usage]: {msg}"),
            CliError::Queue(e @ QueueError::NoConvergence { .. }) => {
                format!("error[convergence]: {e}")
            }
            CliError::Queue(e @ QueueError::Internal(_)) => format!("error[convergence]: {e}"),
            CliError::Queue(e) => format!("error[domain]: {e}"),
            CliError::Io(e) => format!("error[io]: {e}"),
        }
    }

    fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Queue(QueueError::NoConvergence { .. } | QueueError::Internal(_)) => {
                EXIT_CONVERGENCE
            }
            CliError::Queue(_) => EXIT_DOMAIN,
            CliError::Io(_) => EXIT_DOMAIN,
        }
    }
}

impl From<QueueError> for CliError {
    fn from(e: QueueError) -> Self {
        CliError::Queue(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "threshold-queue",
    version,
    about = "Equilibrium and welfare analysis of an unobservable M/M/1 queue with a congestion-threshold service rate"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Tabulate the expected sojourn time over an arrival-rate grid (CSV).
    Delay(Params),
    /// Enumerate equilibrium arrival rates with stability labels (CSV).
    Equilibria(Params),
    /// Maximize the welfare flow (key = value report).
    Welfare(Params),
    /// Sweep one parameter and tabulate equilibria/welfare/etc. (CSV).
    Sweep(Params),
    /// Run the discrete-event simulation (key = value report).
    Simulate(Params),
}

#[derive(Args, Debug, Default, Clone)]
struct Params {
    /// Service threshold (slow at or below it, fast above).
    #[arg(long = "T")]
    threshold: Option<u32>,
    /// Low service rate in (0, 1).
    #[arg(long = "mu-l")]
    mu_l: Option<f64>,
    /// Service reward.
    #[arg(long = "R")]
    reward: Option<f64>,
    /// Potential arrival rate (default 1).
    #[arg(long = "Lambda")]
    potential: Option<f64>,
    /// Indifference-residual tolerance for root finding (default 1e-10).
    #[arg(long)]
    tol: Option<f64>,
    /// Simulation seed (default 0).
    #[arg(long)]
    seed: Option<u64>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Parameter bundle reproducing one of the survey studies.
    #[arg(long, value_enum)]
    preset: Option<Preset>,
    /// Grid size: points on the delay grid / sweep points (default 200).
    #[arg(long)]
    grid: Option<usize>,
    /// Effective arrival rate (simulate; also the varied axis in sweeps).
    #[arg(long)]
    lambda: Option<f64>,
    /// Customers to serve in a simulation run (default 100000).
    #[arg(long)]
    horizon: Option<u64>,
    /// Customers discarded as warmup (default horizon / 100).
    #[arg(long)]
    warmup: Option<u64>,
    /// Swept parameter.
    #[arg(long, value_enum)]
    vary: Option<VaryParam>,
    /// Sweep range start.
    #[arg(long)]
    from: Option<f64>,
    /// Sweep range end.
    #[arg(long)]
    to: Option<f64>,
    /// Comma-separated sweep outputs: delay,equilibria,welfare,simulation.
    #[arg(long)]
    outputs: Option<String>,
    /// key=value file supplying any of the above; flags win.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Preset {
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum VaryParam {
    #[value(name = "T")]
    T,
    #[value(name = "R")]
    R,
    #[value(name = "mu-l")]
    MuL,
    #[value(name = "lambda")]
    Lambda,
}

impl Params {
    /// Field-wise precedence merge; `self` wins.
    fn or(self, fallback: Params) -> Params {
        Params {
            threshold: self.threshold.or(fallback.threshold),
            mu_l: self.mu_l.or(fallback.mu_l),
            reward: self.reward.or(fallback.reward),
            potential: self.potential.or(fallback.potential),
            tol: self.tol.or(fallback.tol),
            seed: self.seed.or(fallback.seed),
            out: self.out.or(fallback.out),
            preset: self.preset.or(fallback.preset),
            grid: self.grid.or(fallback.grid),
            lambda: self.lambda.or(fallback.lambda),
            horizon: self.horizon.or(fallback.horizon),
            warmup: self.warmup.or(fallback.warmup),
            vary: self.vary.or(fallback.vary),
            from: self.from.or(fallback.from),
            to: self.to.or(fallback.to),
            outputs: self.outputs.or(fallback.outputs),
            config: self.config.or(fallback.config),
        }
    }

    fn resolve_with_config(self) -> Result<Params, CliError> {
        match &self.config {
            None => Ok(self),
            Some(path) => {
                let text = fs::read_to_string(path)?;
                let from_file = parse_config(&text)?;
                Ok(self.or(from_file))
            }
        }
    }
}

fn parse_config(text: &str) -> Result<Params, CliError> {
    let mut p = Params::default();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Usage(format!("config line {} is not key=value", lineno + 1))
        })?;
        let key = key.trim();
        let value = value.trim();
        let bad = |what: &str| {
            CliError::Usage(format!(
                "config line {}: bad value {value:?} for {what}",
                lineno + 1
            ))
        };
        match key {
            "T" => p.threshold = Some(value.parse().map_err(|_| bad("T"))?),
            "mu-l" => p.mu_l = Some(value.parse().map_err(|_| bad("mu-l"))?),
            "R" => p.reward = Some(value.parse().map_err(|_| bad("R"))?),
            "Lambda" => p.potential = Some(value.parse().map_err(|_| bad("Lambda"))?),
            "tol" => p.tol = Some(value.parse().map_err(|_| bad("tol"))?),
            "seed" => p.seed = Some(value.parse().map_err(|_| bad("seed"))?),
            "out" => p.out = Some(PathBuf::from(value)),
            "preset" => {
                p.preset = Some(
                    Preset::from_str(value, true).map_err(|_| bad("preset"))?,
                )
            }
            "grid" => p.grid = Some(value.parse().map_err(|_| bad("grid"))?),
            "lambda" => p.lambda = Some(value.parse().map_err(|_| bad("lambda"))?),
            "horizon" => p.horizon = Some(value.parse().map_err(|_| bad("horizon"))?),
            "warmup" => p.warmup = Some(value.parse().map_err(|_| bad("warmup"))?),
            "vary" => {
                p.vary = Some(VaryParam::from_str(value, false).map_err(|_| bad("vary"))?)
            }
            "from" => p.from = Some(value.parse().map_err(|_| bad("from"))?),
            "to" => p.to = Some(value.parse().map_err(|_| bad("to"))?),
            "outputs" => p.outputs = Some(value.to_string()),
            other => {
                return Err(CliError::Usage(format!(
                    "config line {}: unknown key {other:?}",
                    lineno + 1
                )))
            }
        }
    }
    Ok(p)
}

fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Delay(p) => {
            let p = p.resolve_with_config()?;
            let policy = required_policy(&p)?;
            let grid = p.grid.unwrap_or(DEFAULT_GRID);
            let text = render_delay(policy, grid)?;
            emit(&p, text)
        }
        Command::Equilibria(p) => {
            let p = p.resolve_with_config()?;
            let policy = required_policy(&p)?;
            let market = required_market(&p)?;
            let tol = p.tol.unwrap_or(DEFAULT_TOL);
            let text = render_equilibria(policy, market, tol)?;
            emit(&p, text)
        }
        Command::Welfare(p) => {
            let p = p.resolve_with_config()?;
            let policy = required_policy(&p)?;
            let market = required_market(&p)?;
            let text = render_welfare(policy, market)?;
            emit(&p, text)
        }
        Command::Simulate(p) => {
            let p = p.resolve_with_config()?;
            let policy = required_policy(&p)?;
            let lambda = require(p.lambda, "lambda")?;
            let horizon = p.horizon.unwrap_or(DEFAULT_HORIZON);
            let warmup = p.warmup.unwrap_or(horizon / 100);
            let seed = p.seed.unwrap_or(0);
            let config = SimConfig::new(policy, lambda, horizon, warmup, seed)?;
            let text = render_simulation(&config)?;
            emit(&p, text)
        }
        Command::Sweep(p) => {
            let p = p.resolve_with_config()?;
            let p = match p.preset {
                Some(preset) => p.or(preset_params(preset)),
                None => p,
            };
            let spec = build_sweep_spec(&p)?;
            let text = run_sweep(&spec)?;
            emit(&p, text)
        }
    }
}

fn emit(p: &Params, text: String) -> Result<(), CliError> {
    match &p.out {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn require<T>(value: Option<T>, name: &str) -> Result<T, CliError> {
    value.ok_or_else(|| {
        CliError::Usage(format!(
            "missing required parameter {name} (flag --{name} or config file)"
        ))
    })
}

fn required_policy(p: &Params) -> Result<ServicePolicy, CliError> {
    let t = require(p.threshold, "T")?;
    let mu = require(p.mu_l, "mu-l")?;
    Ok(ServicePolicy::new(t, mu)?)
}

fn required_market(p: &Params) -> Result<Market, CliError> {
    let r = require(p.reward, "R")?;
    let cap = p.potential.unwrap_or(1.0);
    Ok(Market::new(r, cap)?)
}

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

/// Fixed-precision scientific notation with 12 significant digits;
/// non-finite values render as the empty field.
pub fn format_field(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.11e}")
    } else {
        String::new()
    }
}

fn render_delay(policy: ServicePolicy, grid: usize) -> Result<String, CliError> {
    if grid == 0 {
        return Err(CliError::Usage("grid must have at least one point".into()));
    }
    let df = DelayFunction::new(policy);
    let mut out = String::from("lambda,W\n");
    for i in 0..grid {
        let lambda = if grid == 1 {
            0.0
        } else {
            DELAY_GRID_MAX * i as f64 / (grid - 1) as f64
        };
        let w = df.sojourn(lambda)?;
        writeln!(out, "{},{}", format_field(lambda), format_field(w)).unwrap();
    }
    Ok(out)
}

fn render_equilibria(
    policy: ServicePolicy,
    market: Market,
    tol: f64,
) -> Result<String, CliError> {
    let set = find_equilibria(policy, market, tol)?;
    let mut out = String::from("rate,kind,stability,residual\n");
    for p in set.points() {
        writeln!(
            out,
            "{},{},{},{}",
            format_field(p.rate),
            p.kind,
            p.stability,
            format_field(p.residual)
        )
        .unwrap();
    }
    Ok(out)
}

fn render_welfare(policy: ServicePolicy, market: Market) -> Result<String, CliError> {
    let opt = optimize_welfare(policy, market)?;
    let maxima = opt
        .local_maxima
        .iter()
        .map(|m| format!("{}:{}", format_field(m.rate), format_field(m.value)))
        .collect::<Vec<_>>()
        .join(";");
    let mut out = String::new();
    writeln!(out, "lambda_star = {}", format_field(opt.rate)).unwrap();
    writeln!(out, "welfare = {}", format_field(opt.value)).unwrap();
    writeln!(out, "foc_residual = {}", format_field(opt.foc_residual)).unwrap();
    writeln!(out, "bimodal = {}", opt.bimodal).unwrap();
    writeln!(out, "boundary = {}", opt.boundary).unwrap();
    writeln!(out, "local_maxima = {maxima}").unwrap();
    Ok(out)
}

fn render_simulation(config: &SimConfig) -> Result<String, CliError> {
    let est = simulate(config)?;
    let mut out = String::new();
    writeln!(out, "mean_sojourn = {}", format_field(est.mean_sojourn)).unwrap();
    writeln!(out, "half_width_95 = {}", format_field(est.half_width_95)).unwrap();
    writeln!(out, "customers_served = {}", est.customers_served).unwrap();
    writeln!(
        out,
        "fraction_time_low_rate = {}",
        format_field(est.fraction_time_low_rate)
    )
    .unwrap();
    writeln!(
        out,
        "fraction_half_width_95 = {}",
        format_field(est.fraction_half_width_95)
    )
    .unwrap();
    writeln!(out, "seed = {}", config.seed).unwrap();
    Ok(out)
}

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

/// Which model parameter a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVariable {
    Threshold,
    Reward,
    LowRate,
    Lambda,
}

impl SweepVariable {
    fn column_name(self) -> &'static str {
        match self {
            SweepVariable::Threshold => "T",
            SweepVariable::Reward => "R",
            SweepVariable::LowRate => "mu_l",
            SweepVariable::Lambda => "lambda",
        }
    }
}

/// Output column groups of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SweepOutputs {
    pub delay: bool,
    pub equilibria: bool,
    pub welfare: bool,
    pub simulation: bool,
}

impl Default for SweepOutputs {
    fn default() -> Self {
        Self {
            delay: false,
            equilibria: true,
            welfare: true,
            simulation: false,
        }
    }
}

/// A fully resolved sweep description.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub vary: SweepVariable,
    pub start: f64,
    pub stop: f64,
    /// Grid size for real-valued parameters; integer thresholds enumerate
    /// `start..=stop` directly.
    pub points: usize,
    pub threshold: u32,
    pub low_rate: f64,
    pub reward: f64,
    pub potential: f64,
    pub outputs: SweepOutputs,
    pub tol: f64,
    pub seed: u64,
    pub horizon: u64,
    pub warmup: u64,
}

fn parse_outputs(text: &str) -> Result<SweepOutputs, CliError> {
    let mut outputs = SweepOutputs {
        delay: false,
        equilibria: false,
        welfare: false,
        simulation: false,
    };
    for item in text.split(',') {
        match item.trim() {
            "delay" => outputs.delay = true,
            "equilibria" => outputs.equilibria = true,
            "welfare" => outputs.welfare = true,
            "simulation" => outputs.simulation = true,
            other => {
                return Err(CliError::Usage(format!(
                    "unknown sweep output {other:?} (expected delay, equilibria, welfare, simulation)"
                )))
            }
        }
    }
    Ok(outputs)
}

fn preset_params(preset: Preset) -> Params {
    let mut p = Params::default();
    match preset {
        // Sensitivity to the service threshold.
        Preset::Fig2 => {
            p.vary = Some(VaryParam::T);
            p.from = Some(1.0);
            p.to = Some(40.0);
            p.reward = Some(25.0);
            p.mu_l = Some(0.25);
        }
        // Sensitivity to the reward at threshold 10.
        Preset::Fig3 => {
            p.vary = Some(VaryParam::R);
            p.from = Some(1.0);
            p.to = Some(40.0);
            p.threshold = Some(10);
            p.mu_l = Some(0.2);
        }
        // Sensitivity to the low rate at threshold 10.
        Preset::Fig4 => {
            p.vary = Some(VaryParam::MuL);
            p.from = Some(0.02);
            p.to = Some(0.98);
            p.threshold = Some(10);
            p.reward = Some(20.0);
        }
        // Sensitivity to the reward at threshold 3.
        Preset::Fig5 => {
            p.vary = Some(VaryParam::R);
            p.from = Some(1.0);
            p.to = Some(30.0);
            p.threshold = Some(3);
            p.mu_l = Some(0.1);
        }
        // Sensitivity to the low rate at threshold 3.
        Preset::Fig6 => {
            p.vary = Some(VaryParam::MuL);
            p.from = Some(0.02);
            p.to = Some(0.98);
            p.threshold = Some(3);
            p.reward = Some(5.0);
        }
        // Threshold-1 delay curve.
        Preset::Fig7 => {
            p.vary = Some(VaryParam::Lambda);
            p.from = Some(0.0);
            p.to = Some(0.99);
            p.threshold = Some(1);
            p.mu_l = Some(0.25);
            p.reward = Some(3.0);
            p.outputs = Some("delay".to_string());
        }
    }
    p
}

fn build_sweep_spec(p: &Params) -> Result<SweepSpec, CliError> {
    let vary = match require(p.vary, "vary")? {
        VaryParam::T => SweepVariable::Threshold,
        VaryParam::R => SweepVariable::Reward,
        VaryParam::MuL => SweepVariable::LowRate,
        VaryParam::Lambda => SweepVariable::Lambda,
    };
    let start = require(p.from, "from")?;
    let stop = require(p.to, "to")?;
    if stop < start {
        return Err(CliError::Usage(format!(
            "empty sweep range: from {start} to {stop}"
        )));
    }
    let points = p.grid.unwrap_or(DEFAULT_GRID);
    if points == 0 {
        return Err(CliError::Usage("grid must have at least one point".into()));
    }
    let outputs = match &p.outputs {
        Some(text) => parse_outputs(text)?,
        None => SweepOutputs::default(),
    };
    // Fixed parameters; the varied one may be omitted (a placeholder that
    // individual sweep points overwrite is used instead).
    let threshold = match vary {
        SweepVariable::Threshold => p.threshold.unwrap_or(1),
        _ => require(p.threshold, "T")?,
    };
    let low_rate = match vary {
        SweepVariable::LowRate => p.mu_l.unwrap_or(0.5),
        _ => require(p.mu_l, "mu-l")?,
    };
    let needs_market = outputs.equilibria || outputs.welfare || outputs.simulation;
    let reward = match (vary, needs_market) {
        (SweepVariable::Reward, _) => p.reward.unwrap_or(1.0),
        (_, true) => require(p.reward, "R")?,
        (_, false) => p.reward.unwrap_or(1.0),
    };
    let horizon = p.horizon.unwrap_or(DEFAULT_HORIZON);
    Ok(SweepSpec {
        vary,
        start,
        stop,
        points,
        threshold,
        low_rate,
        reward,
        potential: p.potential.unwrap_or(1.0),
        outputs,
        tol: p.tol.unwrap_or(DEFAULT_TOL),
        seed: p.seed.unwrap_or(0),
        horizon,
        warmup: p.warmup.unwrap_or(horizon / 100),
    })
}

/// Values taken by the varied parameter.
fn sweep_values(spec: &SweepSpec) -> Vec<f64> {
    match spec.vary {
        SweepVariable::Threshold => {
            let lo = spec.start.round().max(1.0) as u32;
            let hi = spec.stop.round().max(1.0) as u32;
            (lo..=hi).map(f64::from).collect()
        }
        _ => {
            if spec.points == 1 {
                vec![spec.start]
            } else {
                (0..spec.points)
                    .map(|i| {
                        spec.start
                            + (spec.stop - spec.start) * i as f64 / (spec.points - 1) as f64
                    })
                    .collect()
            }
        }
    }
}

/// Run a sweep and render it as CSV.
///
/// Points are evaluated concurrently; rows are emitted in sweep order
/// regardless of completion order, and simulation seeds derive from the base
/// seed plus the point index, so identical invocations produce identical
/// bytes.
pub fn run_sweep(spec: &SweepSpec) -> Result<String, QueueError> {
    let mut header: Vec<&str> = vec![spec.vary.column_name()];
    if spec.outputs.delay {
        header.push("W");
    }
    if spec.outputs.equilibria {
        header.extend(["eq_count", "eq_min", "eq_max", "eq_kinds", "eq_stabilities"]);
    }
    if spec.outputs.welfare {
        header.extend(["lambda_star", "welfare_star", "bimodal"]);
    }
    if spec.outputs.simulation {
        header.extend(["sim_mean", "sim_half_width"]);
    }

    let values = sweep_values(spec);
    let rows: Result<Vec<String>, QueueError> = values
        .par_iter()
        .enumerate()
        .map(|(index, &value)| sweep_row(spec, index, value))
        .collect();
    let rows = rows?;

    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row);
        out.push('\n');
    }
    Ok(out)
}

fn sweep_row(spec: &SweepSpec, index: usize, value: f64) -> Result<String, QueueError> {
    let threshold = match spec.vary {
        SweepVariable::Threshold => value as u32,
        _ => spec.threshold,
    };
    let low_rate = match spec.vary {
        SweepVariable::LowRate => value,
        _ => spec.low_rate,
    };
    let reward = match spec.vary {
        SweepVariable::Reward => value,
        _ => spec.reward,
    };
    let policy = ServicePolicy::new(threshold, low_rate)?;
    let market = Market::new(reward, spec.potential)?;

    let mut fields: Vec<String> = Vec::new();
    match spec.vary {
        SweepVariable::Threshold => fields.push(format!("{threshold}")),
        _ => fields.push(format_field(value)),
    }

    if spec.outputs.delay {
        let w = match spec.vary {
            SweepVariable::Lambda => DelayFunction::new(policy).sojourn(value)?,
            _ => f64::NAN,
        };
        fields.push(format_field(w));
    }

    let need_equilibria = spec.outputs.equilibria || spec.outputs.simulation;
    let set = if need_equilibria {
        Some(find_equilibria(policy, market, spec.tol)?)
    } else {
        None
    };

    if spec.outputs.equilibria {
        let set = set.as_ref().unwrap();
        fields.push(format!("{}", set.len()));
        fields.push(format_field(set.min_rate().unwrap_or(f64::NAN)));
        fields.push(format_field(set.max_rate().unwrap_or(f64::NAN)));
        let kinds = set
            .points()
            .iter()
            .map(|p| p.kind.to_string())
            .collect::<Vec<_>>()
            .join(";");
        let stabilities = set
            .points()
            .iter()
            .map(|p| p.stability.to_string())
            .collect::<Vec<_>>()
            .join(";");
        fields.push(kinds);
        fields.push(stabilities);
    }

    if spec.outputs.welfare {
        let opt = optimize_welfare(policy, market)?;
        fields.push(format_field(opt.rate));
        fields.push(format_field(opt.value));
        fields.push(format!("{}", opt.bimodal));
    }

    if spec.outputs.simulation {
        // Simulate at the swept rate when the sweep varies lambda, otherwise
        // at the largest equilibrium rate (the rate the system settles at).
        let sim_lambda = match spec.vary {
            SweepVariable::Lambda => value,
            _ => set.as_ref().and_then(|s| s.max_rate()).unwrap_or(0.0),
        };
        let estimate = if sim_lambda > 0.0 && sim_lambda < 1.0 {
            SimConfig::new(
                policy,
                sim_lambda,
                spec.horizon,
                spec.warmup,
                spec.seed.wrapping_add(index as u64),
            )
            .and_then(|cfg| simulate(&cfg))
            .ok()
        } else {
            None
        };
        match estimate {
            Some(est) => {
                fields.push(format_field(est.mean_sojourn));
                fields.push(format_field(est.half_width_95));
            }
            None => {
                fields.push(String::new());
                fields.push(String::new());
            }
        }
    }

    Ok(fields.join(","))
}

/// Resolved sweep spec for one of the bundled study presets; exposed so
/// examples and tests can run the studies without going through the flag
/// parser.
pub fn preset_sweep_spec(name: &str) -> Option<SweepSpec> {
    let preset = match name {
        "fig2" => Preset::Fig2,
        "fig3" => Preset::Fig3,
        "fig4" => Preset::Fig4,
        "fig5" => Preset::Fig5,
        "fig6" => Preset::Fig6,
        "fig7" => Preset::Fig7,
        _ => return None,
    };
    build_sweep_spec(&preset_params(preset)).ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_formatting_contract() {
        assert_eq!(format_field(0.99), "9.90000000000e-1");
        assert_eq!(format_field(10.0), "1.00000000000e1");
        assert_eq!(format_field(0.0), "0.00000000000e0");
        assert_eq!(format_field(f64::NAN), "");
        assert_eq!(format_field(f64::INFINITY), "");
    }

    #[test]
    fn config_file_round_trip() {
        let text = "# comment\nT = 3\nmu-l = 0.1\nR = 9\nLambda = 1.0\nseed = 7\noutputs = welfare\n";
        let p = parse_config(text).unwrap();
        assert_eq!(p.threshold, Some(3));
        assert_eq!(p.mu_l, Some(0.1));
        assert_eq!(p.reward, Some(9.0));
        assert_eq!(p.seed, Some(7));
        assert_eq!(p.outputs.as_deref(), Some("welfare"));
    }

    #[test]
    fn config_rejects_unknown_keys_and_bad_values() {
        assert!(matches!(
            parse_config("bogus = 1\n"),
            Err(CliError::Usage(_))
        ));
        assert!(matches!(
            parse_config("T = notanumber\n"),
            Err(CliError::Usage(_))
        ));
        assert!(matches!(parse_config("just a line\n"), Err(CliError::Usage(_))));
    }

    #[test]
    fn flags_win_over_config() {
        let flags = Params {
            threshold: Some(5),
            ..Params::default()
        };
        let file = parse_config("T = 3\nmu-l = 0.25\n").unwrap();
        let merged = flags.or(file);
        assert_eq!(merged.threshold, Some(5));
        assert_eq!(merged.mu_l, Some(0.25));
    }

    #[test]
    fn presets_resolve_to_full_specs() {
        for name in ["fig2", "fig3", "fig4", "fig5", "fig6", "fig7"] {
            let spec = preset_sweep_spec(name).unwrap_or_else(|| panic!("{name}"));
            assert!(spec.points >= 1);
            assert!(spec.stop >= spec.start);
        }
        assert!(preset_sweep_spec("fig1").is_none());
        let fig2 = preset_sweep_spec("fig2").unwrap();
        assert_eq!(fig2.vary, SweepVariable::Threshold);
        assert_eq!(fig2.reward, 25.0);
        assert_eq!(fig2.low_rate, 0.25);
        let fig7 = preset_sweep_spec("fig7").unwrap();
        assert!(fig7.outputs.delay);
        assert!(!fig7.outputs.equilibria);
    }

    #[test]
    fn threshold_sweeps_enumerate_integers() {
        let mut spec = preset_sweep_spec("fig2").unwrap();
        spec.start = 1.0;
        spec.stop = 5.0;
        let values = sweep_values(&spec);
        assert_eq!(values, vec![1.0, 2.0, 3.0, 4.0, 5.0]);
    }

    #[test]
    fn sweep_rows_are_deterministic() {
        let mut spec = preset_sweep_spec("fig5").unwrap();
        spec.points = 7;
        spec.outputs.simulation = true;
        spec.horizon = 4_000;
        spec.warmup = 40;
        let a = run_sweep(&spec).unwrap();
        let b = run_sweep(&spec).unwrap();
        assert_eq!(a, b);
        let lines: Vec<&str> = a.lines().collect();
        assert_eq!(lines.len(), 8);
        assert_eq!(
            lines[0],
            "R,eq_count,eq_min,eq_max,eq_kinds,eq_stabilities,lambda_star,welfare_star,bimodal,sim_mean,sim_half_width"
        );
    }

    #[test]
    fn delay_rendering_single_point() {
        let policy = ServicePolicy::new(3, 0.1).unwrap();
        let text = render_delay(policy, 1).unwrap();
        assert_eq!(text, "lambda,W\n0.00000000000e0,1.00000000000e1\n");
    }

    #[test]
    fn outputs_parser_rejects_unknown_names() {
        assert!(parse_outputs("delay,equilibria").is_ok());
        assert!(parse_outputs("plots").is_err());
    }
}
