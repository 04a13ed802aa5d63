//! Command-line front end: parameter ingestion, subcommand dispatch, and
//! byte-stable tabular output.
//!
//! Parameters come from `key = value` lines in an INI-style config file
//! (`--config`), overridden by command-line flags of the same names
//! (kebab-case). Grid bounds are interpreted in units of the supplied group
//! velocity; parameters are canonicalized to `v_g = 1` before any engine
//! runs. A negative `x0` is folded to `|x0|` with the incidence directions
//! relabeled in every output.
//!
//! Exit codes: 0 success, 1 computational failure (including a failed
//! `validate`), 2 usage errors (unknown keys, malformed values, missing
//! command).

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::model::{validate_params, GeneralizedCouplings, SystemParams};
use crate::oracle::{
    cross_validate, wavepacket_run, CrossValidateOptions, ValidationTolerances, WavepacketConfig,
};
use crate::solver::Direction;
use crate::sweep::{
    find_features, isolation_map, linear_grid, spectrum, CellFlag, Engine, IsolationMap,
    SpectrumTable,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_COMPUTE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Error, PartialEq)]
pub enum CliError {
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("malformed value: {0}")]
    MalformedValue(String),
    #[error("missing command (expected one of: spectrum, map, features, wavepacket, validate)")]
    MissingCommand,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Spectrum,
    Map,
    Features,
    Wavepacket,
    Validate,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl GridSpec {
    pub fn points(&self) -> Vec<f64> {
        linear_grid(self.min, self.max, self.steps)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Fully resolved run description.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: GeneralizedCouplings,
    /// Set when a negative `x0` was folded; outputs relabel directions.
    pub direction_flipped: bool,
    pub command: CommandKind,
    pub delta: GridSpec,
    pub phi_grid: GridSpec,
    pub direction: Direction,
    pub engine: Engine,
    pub sigma: f64,
    pub dx: f64,
    pub k0: Option<f64>,
    pub sigma_x: f64,
    pub t_max: Option<f64>,
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
}

#[derive(Parser, Debug)]
#[command(
    name = "wqed",
    version,
    about = "single-photon scattering in a cavity-emitter-waveguide loop",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Option<CliCommand>,
    #[command(flatten)]
    keys: KeyArgs,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum CliCommand {
    /// Transmission/reflection spectra over a detuning grid (CSV or JSON).
    Spectrum,
    /// Isolation-ratio map over a (detuning, phase) grid (CSV or JSON).
    Map,
    /// Refined transmission zeros, unit peaks, isolation extrema (JSON).
    Features,
    /// One time-domain wavepacket run (JSON).
    Wavepacket,
    /// Cross-check every computational route; exits 1 on tolerance failure.
    Validate,
}

#[derive(Args, Debug, Default)]
struct KeyArgs {
    /// INI-style config file (`key = value`, `#` comments); flags override.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    omega_a: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    omega_e: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    lambda: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    phi: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    f: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    g: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    v_g: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    x0: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    gamma_a: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    gamma_e: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    theta_f: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    theta_g: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    delta_min: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    delta_max: Option<f64>,
    #[arg(long, global = true)]
    delta_steps: Option<usize>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    phi_min: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    phi_max: Option<f64>,
    #[arg(long, global = true)]
    phi_steps: Option<usize>,
    /// Incidence side for wavepacket runs: left | right.
    #[arg(long, global = true)]
    direction: Option<String>,
    /// Evaluation engine for spectra: analytic | solver.
    #[arg(long, global = true)]
    engine: Option<String>,
    /// Gaussian width of the regularized oracle (validate).
    #[arg(long, global = true, allow_negative_numbers = true)]
    sigma: Option<f64>,
    /// Wavepacket grid spacing.
    #[arg(long, global = true, allow_negative_numbers = true)]
    dx: Option<f64>,
    /// Wavepacket carrier wavenumber (defaults to the node frequency).
    #[arg(long, global = true, allow_negative_numbers = true)]
    k0: Option<f64>,
    /// Wavepacket spatial width.
    #[arg(long, global = true, allow_negative_numbers = true)]
    sigma_x: Option<f64>,
    /// Wavepacket evolution time (defaults to an automatic clearance time).
    #[arg(long, global = true, allow_negative_numbers = true)]
    t_max: Option<f64>,
    /// Output path (stdout when omitted). Writes are atomic.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Output format: csv | json.
    #[arg(long, global = true)]
    format: Option<String>,
}

/// `key = value` text, `#` comments, blank lines allowed.
fn parse_ini(text: &str) -> Result<Vec<(String, String)>, CliError> {
    let mut pairs = Vec::new();
    for raw in text.lines() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::MalformedValue(format!("expected `key = value`, got `{line}`"))
        })?;
        pairs.push((key.trim().to_string(), value.trim().to_string()));
    }
    Ok(pairs)
}

struct Merger {
    file: Vec<(String, String)>,
}

impl Merger {
    fn lookup(&self, key: &str) -> Option<&str> {
        // last occurrence wins, matching usual INI semantics
        self.file.iter().rev().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    fn float(&self, key: &str, flag: Option<f64>, default: f64) -> Result<f64, CliError> {
        if let Some(v) = flag {
            return Ok(v);
        }
        match self.lookup(key) {
            Some(s) => s.parse::<f64>().map_err(|_| {
                CliError::MalformedValue(format!("key `{key}`: `{s}` is not a number"))
            }),
            None => Ok(default),
        }
    }

    fn float_opt(&self, key: &str, flag: Option<f64>) -> Result<Option<f64>, CliError> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.lookup(key) {
            Some(s) => s.parse::<f64>().map(Some).map_err(|_| {
                CliError::MalformedValue(format!("key `{key}`: `{s}` is not a number"))
            }),
            None => Ok(None),
        }
    }

    fn int(&self, key: &str, flag: Option<usize>, default: usize) -> Result<usize, CliError> {
        if let Some(v) = flag {
            return Ok(v);
        }
        match self.lookup(key) {
            Some(s) => s.parse::<usize>().map_err(|_| {
                CliError::MalformedValue(format!(
                    "key `{key}`: `{s}` is not a non-negative integer"
                ))
            }),
            None => Ok(default),
        }
    }

    fn word(&self, key: &str, flag: Option<&str>, default: &str) -> String {
        flag.map(str::to_string)
            .or_else(|| self.lookup(key).map(str::to_string))
            .unwrap_or_else(|| default.to_string())
    }
}

const KNOWN_KEYS: &[&str] = &[
    "omega_a", "omega_e", "lambda", "phi", "f", "g", "v_g", "x0", "gamma_a", "gamma_e",
    "theta_f", "theta_g", "delta_min", "delta_max", "delta_steps", "phi_min", "phi_max",
    "phi_steps", "direction", "engine", "sigma", "dx", "k0", "sigma_x", "t_max", "output",
    "format",
];

/// Parse argv plus an optional config-file text into a validated
/// [`RunConfig`]. When `file` is `None` and `--config` names a path, the
/// text is read from disk.
pub fn parse_config(argv: &[String], file: Option<&str>) -> Result<RunConfig, CliError> {
    let cli = Cli::try_parse_from(argv)
        .map_err(|e| CliError::MalformedValue(e.render().to_string()))?;
    build_config(cli, file)
}

fn build_config(cli: Cli, file: Option<&str>) -> Result<RunConfig, CliError> {
    let command = match cli.command {
        None => return Err(CliError::MissingCommand),
        Some(CliCommand::Spectrum) => CommandKind::Spectrum,
        Some(CliCommand::Map) => CommandKind::Map,
        Some(CliCommand::Features) => CommandKind::Features,
        Some(CliCommand::Wavepacket) => CommandKind::Wavepacket,
        Some(CliCommand::Validate) => CommandKind::Validate,
    };
    let keys = cli.keys;

    let text_owned;
    let text = match (file, &keys.config) {
        (Some(t), _) => Some(t),
        (None, Some(path)) => {
            text_owned = std::fs::read_to_string(path).map_err(|e| {
                CliError::MalformedValue(format!("config `{}`: {e}", path.display()))
            })?;
            Some(text_owned.as_str())
        }
        (None, None) => None,
    };
    let file_pairs = text.map(parse_ini).transpose()?.unwrap_or_default();
    for (k, _) in &file_pairs {
        if !KNOWN_KEYS.contains(&k.as_str()) {
            return Err(CliError::UnknownKey(k.clone()));
        }
    }
    let m = Merger { file: file_pairs };

    let raw = SystemParams {
        omega_a: m.float("omega_a", keys.omega_a, 1.0)?,
        omega_e: m.float("omega_e", keys.omega_e, 1.0)?,
        lambda_mag: m.float("lambda", keys.lambda, 0.1)?,
        phi: m.float("phi", keys.phi, 0.0)?,
        f: m.float("f", keys.f, 0.3)?,
        g: m.float("g", keys.g, 0.2)?,
        v_g: m.float("v_g", keys.v_g, 1.0)?,
        x0: m.float("x0", keys.x0, 0.0)?,
        gamma_a: m.float("gamma_a", keys.gamma_a, 0.0)?,
        gamma_e: m.float("gamma_e", keys.gamma_e, 0.0)?,
    };
    let normalized =
        validate_params(&raw).map_err(|e| CliError::MalformedValue(e.to_string()))?;
    let params = GeneralizedCouplings {
        base: normalized.params,
        theta_f: m.float("theta_f", keys.theta_f, 0.0)?,
        theta_g: m.float("theta_g", keys.theta_g, 0.0)?,
    };

    let default_delta_steps = if command == CommandKind::Validate { 101 } else { 801 };
    let delta = GridSpec {
        min: m.float("delta_min", keys.delta_min, -0.4)?,
        max: m.float("delta_max", keys.delta_max, 0.4)?,
        steps: m.int("delta_steps", keys.delta_steps, default_delta_steps)?,
    };
    let phi_grid = GridSpec {
        min: m.float("phi_min", keys.phi_min, 0.0)?,
        max: m.float("phi_max", keys.phi_max, std::f64::consts::PI)?,
        steps: m.int("phi_steps", keys.phi_steps, 601)?,
    };
    for (name, spec) in [("delta", &delta), ("phi", &phi_grid)] {
        if spec.steps < 2 {
            return Err(CliError::MalformedValue(format!(
                "{name}_steps must be >= 2, got {}",
                spec.steps
            )));
        }
        if spec.min.is_nan() || spec.max.is_nan() || spec.min >= spec.max {
            return Err(CliError::MalformedValue(format!(
                "{name} grid needs min < max, got [{}, {}]",
                spec.min, spec.max
            )));
        }
    }

    let direction = match m.word("direction", keys.direction.as_deref(), "left").as_str() {
        "left" => Direction::LeftIncidence,
        "right" => Direction::RightIncidence,
        other => {
            return Err(CliError::MalformedValue(format!(
                "direction must be `left` or `right`, got `{other}`"
            )))
        }
    };
    let engine = match m.word("engine", keys.engine.as_deref(), "solver").as_str() {
        "analytic" => Engine::Analytic,
        "solver" => Engine::Solver,
        other => {
            return Err(CliError::MalformedValue(format!(
                "engine must be `analytic` or `solver`, got `{other}`"
            )))
        }
    };
    let default_format = match command {
        CommandKind::Spectrum | CommandKind::Map => "csv",
        _ => "json",
    };
    let format = match m.word("format", keys.format.as_deref(), default_format).as_str() {
        "csv" => OutputFormat::Csv,
        "json" => OutputFormat::Json,
        other => {
            return Err(CliError::MalformedValue(format!(
                "format must be `csv` or `json`, got `{other}`"
            )))
        }
    };
    if format == OutputFormat::Csv
        && matches!(
            command,
            CommandKind::Features | CommandKind::Wavepacket | CommandKind::Validate
        )
    {
        return Err(CliError::MalformedValue(
            "csv output is only defined for `spectrum` and `map`".into(),
        ));
    }

    Ok(RunConfig {
        params,
        direction_flipped: normalized.direction_flipped,
        command,
        delta,
        phi_grid,
        direction,
        engine,
        sigma: m.float("sigma", keys.sigma, 4e-3)?,
        dx: m.float("dx", keys.dx, 0.1)?,
        k0: m.float_opt("k0", keys.k0)?,
        sigma_x: m.float("sigma_x", keys.sigma_x, 60.0)?,
        t_max: m.float_opt("t_max", keys.t_max)?,
        output: keys.output.or_else(|| m.lookup("output").map(PathBuf::from)),
        format,
    })
}

/// C-style `%.12e` so files diff byte-identically across platforms.
pub fn fmt_sci(x: f64) -> String {
    let s = format!("{x:.12e}");
    let (mantissa, exp) = s.split_once('e').expect("float format always has exponent");
    let e: i32 = exp.parse().expect("exponent is an integer");
    format!("{mantissa}e{}{:02}", if e < 0 { '-' } else { '+' }, e.abs())
}

fn spectrum_csv(table: &SpectrumTable) -> String {
    let mut out = String::with_capacity(table.rows.len() * 160 + 64);
    out.push_str("delta,E,T_LR,R_LR,T_RL,R_RL,loss_LR,loss_RL\n");
    for r in &table.rows {
        let cols = [r.delta, r.e, r.t_lr, r.r_lr, r.t_rl, r.r_rl, r.loss_lr, r.loss_rl];
        let line: Vec<String> = cols.iter().map(|&v| fmt_sci(v)).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

fn map_csv(map: &IsolationMap) -> String {
    let mut out = String::new();
    out.push_str("phi\\delta");
    for d in &map.delta_axis {
        out.push(',');
        out.push_str(&fmt_sci(*d));
    }
    out.push('\n');
    for (i, phi) in map.phi_axis.iter().enumerate() {
        out.push_str(&fmt_sci(*phi));
        for (j, v) in map.values_db[i].iter().enumerate() {
            out.push(',');
            out.push_str(&fmt_sci(*v));
            if map.flags[i][j] == CellFlag::SaturatedZero {
                out.push('*');
            }
        }
        out.push('\n');
    }
    out
}

fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path)?;
    Ok(())
}

fn emit(config: &RunConfig, content: &str) -> Result<(), String> {
    match &config.output {
        None => {
            print!("{content}");
            Ok(())
        }
        Some(path) => write_atomic(path, content.as_bytes())
            .map_err(|e| format!("writing `{}`: {e}", path.display())),
    }
}

/// Swap direction labels (used when a negative `x0` was folded: the
/// normalized system's left is the user's right).
fn flip_table(mut table: SpectrumTable) -> SpectrumTable {
    for r in &mut table.rows {
        std::mem::swap(&mut r.t_lr, &mut r.t_rl);
        std::mem::swap(&mut r.r_lr, &mut r.r_rl);
        std::mem::swap(&mut r.loss_lr, &mut r.loss_rl);
    }
    table
}

fn flip_map(mut map: IsolationMap) -> IsolationMap {
    for row in &mut map.values_db {
        for v in row.iter_mut() {
            *v = -*v;
        }
    }
    map
}

/// Execute a resolved run. Computational failures return [`EXIT_COMPUTE`]
/// with a single-line diagnostic on stderr.
pub fn run(config: &RunConfig) -> i32 {
    match execute(config) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            EXIT_COMPUTE
        }
    }
}

fn execute(config: &RunConfig) -> Result<i32, String> {
    let gp = &config.params;
    match config.command {
        CommandKind::Spectrum => {
            let mut table =
                spectrum(gp, &config.delta.points(), config.engine).map_err(|e| e.to_string())?;
            if config.direction_flipped {
                table = flip_table(table);
            }
            let content = match config.format {
                OutputFormat::Csv => spectrum_csv(&table),
                OutputFormat::Json => to_json(&table)?,
            };
            emit(config, &content)?;
            Ok(EXIT_OK)
        }
        CommandKind::Map => {
            let mut map = isolation_map(gp, &config.delta.points(), &config.phi_grid.points())
                .map_err(|e| e.to_string())?;
            if config.direction_flipped {
                map = flip_map(map);
            }
            let content = match config.format {
                OutputFormat::Csv => map_csv(&map),
                OutputFormat::Json => to_json(&map)?,
            };
            emit(config, &content)?;
            Ok(EXIT_OK)
        }
        CommandKind::Features => {
            let mut table =
                spectrum(gp, &config.delta.points(), config.engine).map_err(|e| e.to_string())?;
            if config.direction_flipped {
                table = flip_table(table);
            }
            let features = find_features(&table, gp);
            emit(config, &to_json(&features)?)?;
            Ok(EXIT_OK)
        }
        CommandKind::Wavepacket => {
            let k0 = config.k0.unwrap_or(gp.base.omega() / gp.base.v_g);
            let mut cfg = WavepacketConfig::auto(gp, k0, config.sigma_x, config.dx);
            if let Some(t_max) = config.t_max {
                cfg.t_max = t_max;
            }
            let mut direction = config.direction;
            if config.direction_flipped {
                direction = direction.flipped();
            }
            let result = wavepacket_run(gp, &cfg, direction).map_err(|e| e.to_string())?;
            emit(config, &to_json(&result)?)?;
            Ok(EXIT_OK)
        }
        CommandKind::Validate => {
            let omega = gp.base.omega();
            let grid: Vec<f64> = config
                .delta
                .points()
                .iter()
                .map(|d| omega + d)
                .filter(|&e| e > 0.0)
                .collect();
            let opts = CrossValidateOptions { sigma: config.sigma, ..Default::default() };
            let report = cross_validate(gp, &grid, &ValidationTolerances::default(), &opts)
                .map_err(|e| e.to_string())?;
            let s = &report.summary;
            let mut summary = String::new();
            let _ = writeln!(
                summary,
                "analytic vs solver : max deviation {} (tol {})",
                fmt_sci(s.max_analytic_vs_solver),
                fmt_sci(s.tolerances.analytic_vs_solver),
            );
            let _ = writeln!(
                summary,
                "oracle vs solver   : max deviation {} (tol {})",
                fmt_sci(s.max_oracle_vs_solver),
                fmt_sci(s.tolerances.oracle_vs_solver),
            );
            let _ = writeln!(summary, "sub-errors         : {}", s.n_errors);
            let _ =
                writeln!(summary, "verdict            : {}", if s.pass { "PASS" } else { "FAIL" });
            eprint!("{summary}");
            if config.output.is_some() {
                emit(config, &to_json(&report)?)?;
            }
            Ok(if s.pass { EXIT_OK } else { EXIT_COMPUTE })
        }
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> Result<String, String> {
    serde_json::to_string_pretty(value).map(|mut s| {
        s.push('\n');
        s
    })
    .map_err(|e| e.to_string())
}

/// Entry point for the binary: thread-pool setup, parsing, dispatch.
pub fn main_entry() -> i32 {
    if let Ok(threads) = std::env::var("WQED_THREADS") {
        if let Ok(n) = threads.trim().parse::<usize>() {
            if n > 0 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match build_config(cli, None) {
        Ok(config) => run(&config),
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}
