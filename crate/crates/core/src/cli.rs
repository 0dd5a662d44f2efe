//! The `wpen` command line: deterministic CSV/JSON tables over the library.
//!
//! Exit codes: 0 success, 2 usage error, 3 numeric failure. Failures print
//! `{"error": {"code": ..., "message": ...}}` on standard error.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::catalog::{build_model, builtin_instances, catalog, find_entry};
use crate::error::{Error, Outcome, Result};
use crate::model::{WeibullTypeModel, GAMMA_SERIES_CUTOFF, INVERSE_REL_TOL};
use crate::norming::{norming, NormingConstants, LOCATION_CONVENTION};
use crate::numerics::DiffConfig;
use crate::penultimate::{
    error_comparison, penultimate_index, ErrorComparison, GammaMode, GridSpec, PenultimateIndex,
    REMAINDER_CUTOFF,
};
use crate::vonmises::{
    condition_sweep, log_grid, ConditionReport, Verdict, DECAY_ABS_BOUND, DECAY_SHRINK_FACTOR,
    LIMIT_REL_TOL, MAX_FAILURE_SHARE, MIN_GRID_DECADES, MIN_GRID_POINTS,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

/// Column order of `penultimate --format csv`.
pub const PENULTIMATE_HEADER: [&str; 7] = [
    "log_n",
    "gamma_exact",
    "gamma_asymptotic",
    "classification",
    "rate_ultimate",
    "rate_penultimate",
    "gamma_prime_exact",
];
pub const NORMING_HEADER: [&str; 4] = ["log_n", "b_exact", "b_asymptotic", "a_scale"];
pub const ERRORS_HEADER: [&str; 12] = [
    "log_n",
    "gamma_mode",
    "gamma_used",
    "b_exact",
    "a_scale",
    "sup_error_ultimate",
    "argmax_ultimate",
    "sup_error_penultimate",
    "argmax_penultimate",
    "clipped_penultimate",
    "unsupported_points",
    "remainder_max_deviation",
];
pub const VONMISES_HEADER: [&str; 6] = [
    "t",
    "first_order",
    "second_order",
    "penultimate_cond",
    "anderson",
    "gomes84",
];
pub const VERDICT_HEADER: [&str; 4] = ["condition", "verdict", "value", "reason"];
pub const MODELS_HEADER: [&str; 7] = [
    "name",
    "params",
    "family",
    "theta",
    "theta_is_one",
    "support_lower",
    "label",
];

const DEFAULT_LOG_N: [f64; 3] = [10.0, 20.0, 40.0];

#[derive(Debug, Parser)]
#[command(
    name = "wpen",
    version,
    about = "Penultimate extreme-value approximation for Weibull-type tails"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List built-in models with their reference theta
    Models(OutputArgs),
    /// Norming constants b_n and a_n
    Norming(RunArgs),
    /// Penultimate index gamma_n and rate terms
    Penultimate(RunArgs),
    /// Ultimate vs penultimate sup errors of normalized maxima
    Errors(RunArgs),
    /// Limit functionals along a diverging grid
    Vonmises(RunArgs),
    /// All of the above for one model as a single JSON document
    Report(RunArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
enum GammaModeArg {
    #[default]
    Exact,
    Asymptotic,
}

impl From<GammaModeArg> for GammaMode {
    fn from(m: GammaModeArg) -> Self {
        match m {
            GammaModeArg::Exact => GammaMode::Exact,
            GammaModeArg::Asymptotic => GammaMode::Asymptotic,
        }
    }
}

#[derive(Debug, Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t)]
    format: Format,
    /// Write to this file instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Catalog name (see `wpen models`)
    #[arg(long)]
    model: String,
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    shape: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    delta: Option<f64>,
    /// Any other model parameter, as name=value
    #[arg(long = "param", value_name = "NAME=VALUE", allow_hyphen_values = true)]
    params: Vec<String>,
    /// Comma-separated log n values
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    log_n: Vec<f64>,
    /// Comma-separated block sizes n >= 2, converted to log n
    #[arg(long, value_delimiter = ',')]
    n: Vec<u64>,
    /// Error grid as lo:hi:count
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    /// Comma-separated ascending grid for the condition sweep
    #[arg(long, value_delimiter = ',')]
    t_grid: Vec<f64>,
    #[arg(long, value_enum, default_value_t)]
    gamma_mode: GammaModeArg,
    #[command(flatten)]
    output: OutputArgs,
}

/// Everything a run needs, resolved from the flags.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub model_name: String,
    pub model_params: BTreeMap<String, f64>,
    pub log_n_list: Vec<f64>,
    pub grid: GridSpec,
    pub t_grid: Vec<f64>,
    pub gamma_mode: GammaMode,
}

impl RunArgs {
    fn params(&self) -> Result<BTreeMap<String, f64>> {
        let mut p = BTreeMap::new();
        let flags = [
            ("theta", self.theta),
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("shape", self.shape),
            ("lambda", self.lambda),
            ("delta", self.delta),
        ];
        for (k, v) in flags {
            if let Some(v) = v {
                p.insert(k.to_string(), v);
            }
        }
        for kv in &self.params {
            let (k, v) = kv.split_once('=').ok_or_else(|| {
                Error::InvalidParameter(format!("--param expects NAME=VALUE, got {kv}"))
            })?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("--param {k}: not a number: {v}")))?;
            if p.insert(k.trim().to_string(), v).is_some() {
                return Err(Error::InvalidParameter(format!(
                    "parameter {k} given twice"
                )));
            }
        }
        Ok(p)
    }

    fn config(&self, model: &WeibullTypeModel) -> Result<RunConfig> {
        let log_n_list = match (self.log_n.is_empty(), self.n.is_empty()) {
            (false, false) => {
                return Err(Error::InvalidParameter(
                    "give --log-n or --n, not both".into(),
                ))
            }
            (false, true) => self.log_n.clone(),
            (true, false) => {
                let mut out = Vec::new();
                for &n in &self.n {
                    if n < 2 {
                        return Err(Error::InvalidParameter(format!(
                            "--n must be >= 2, got {n}"
                        )));
                    }
                    out.push((n as f64).ln());
                }
                out
            }
            (true, true) => DEFAULT_LOG_N.to_vec(),
        };
        let grid = match &self.grid {
            Some(g) => parse_grid(g)?,
            None => GridSpec::default(),
        };
        let t_grid = if self.t_grid.is_empty() {
            default_t_grid(model)
        } else {
            self.t_grid.clone()
        };
        Ok(RunConfig {
            model_name: self.model.clone(),
            model_params: self.params()?,
            log_n_list,
            grid,
            t_grid,
            gamma_mode: self.gamma_mode.into(),
        })
    }
}

fn parse_grid(s: &str) -> Result<GridSpec> {
    let bad = || Error::InvalidParameter(format!("--grid expects lo:hi:count, got {s}"));
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, count] = parts.as_slice() else {
        return Err(bad());
    };
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    let count: usize = count.trim().parse().map_err(|_| bad())?;
    GridSpec::new(lo, hi, count)
}

/// Five log-spaced points over eight decades from `1e2`, shifted up when
/// the tail region starts later.
pub fn default_t_grid(model: &WeibullTypeModel) -> Vec<f64> {
    let lo = (model.support_lower() * 1.5).log10().max(2.0);
    log_grid(lo, lo + 8.0, 5)
}

/// 17 significant digits; empty for absent values.
fn num(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

fn meta() -> Value {
    json!({
        "tool": "wpen",
        "version": env!("CARGO_PKG_VERSION"),
        "location_convention": LOCATION_CONVENTION,
    })
}

fn tolerances() -> Value {
    let diff = DiffConfig::default();
    json!({
        "inverse_rel_tol": INVERSE_REL_TOL,
        "gev_gamma_series_cutoff": GAMMA_SERIES_CUTOFF,
        "remainder_cutoff": REMAINDER_CUTOFF,
        "richardson_levels": diff.richardson_levels,
        "richardson_levels_classical_numeric": 4,
        "decay_abs_bound": DECAY_ABS_BOUND,
        "decay_shrink_factor": DECAY_SHRINK_FACTOR,
        "limit_rel_tol": LIMIT_REL_TOL,
        "max_failure_share": MAX_FAILURE_SHARE,
        "min_grid_points": MIN_GRID_POINTS,
        "min_grid_decades": MIN_GRID_DECADES,
    })
}

fn model_json(cfg: &RunConfig, m: &WeibullTypeModel) -> Value {
    json!({
        "name": cfg.model_name,
        "params": cfg.model_params,
        "label": m.label(),
        "family": m.family(),
        "theta": m.theta(),
        "theta_is_one": m.theta_is_one(),
        "support_lower": m.support_lower(),
    })
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .flexible(true)
        .from_writer(Vec::new())
}

fn finish_csv(w: csv::Writer<Vec<u8>>) -> Vec<u8> {
    w.into_inner().expect("in-memory csv writer")
}

fn to_json(v: &Value) -> Vec<u8> {
    let mut s = serde_json::to_vec_pretty(v).expect("serializable value");
    s.push(b'\n');
    s
}

fn norming_csv(rows: &[NormingConstants]) -> Vec<u8> {
    let mut w = csv_writer();
    w.write_record(NORMING_HEADER).expect("in-memory write");
    for r in rows {
        w.write_record([
            num(r.log_n),
            num(r.b_exact),
            num(r.b_asymptotic),
            num(r.a_scale),
        ])
        .expect("in-memory write");
    }
    finish_csv(w)
}

fn penultimate_csv(rows: &[PenultimateIndex]) -> Vec<u8> {
    let mut w = csv_writer();
    w.write_record(PENULTIMATE_HEADER).expect("in-memory write");
    for r in rows {
        let a = r.asymptotic;
        w.write_record([
            num(r.log_n),
            num(r.gamma_exact),
            opt(a.map(|a| a.gamma_asymptotic)),
            r.classification.as_str().to_string(),
            opt(a.map(|a| a.rate_ultimate)),
            opt(a.map(|a| a.rate_penultimate)),
            num(r.gamma_prime_exact),
        ])
        .expect("in-memory write");
    }
    finish_csv(w)
}

fn errors_csv(rows: &[ErrorComparison]) -> Vec<u8> {
    let mut w = csv_writer();
    w.write_record(ERRORS_HEADER).expect("in-memory write");
    for r in rows {
        let mode = match r.gamma_mode {
            GammaMode::Exact => "exact",
            GammaMode::Asymptotic => "asymptotic",
        };
        w.write_record([
            num(r.log_n),
            mode.to_string(),
            num(r.gamma_used),
            num(r.norming.b_exact),
            num(r.norming.a_scale),
            num(r.sup_error_ultimate),
            num(r.argmax_ultimate),
            num(r.sup_error_penultimate),
            num(r.argmax_penultimate),
            r.clipped_penultimate.to_string(),
            r.unsupported_points.to_string(),
            opt(r.remainder_max_deviation),
        ])
        .expect("in-memory write");
    }
    finish_csv(w)
}

/// Per-point table, a blank line, then one verdict row per condition.
fn vonmises_csv(r: &ConditionReport) -> Vec<u8> {
    let mut w = csv_writer();
    w.write_record(VONMISES_HEADER).expect("in-memory write");
    for (i, &t) in r.t_grid.iter().enumerate() {
        w.write_record([
            num(t),
            opt(r.first_order[i]),
            opt(r.second_order[i]),
            opt(r.penultimate_cond[i]),
            opt(r.anderson[i]),
            opt(r.gomes84[i]),
        ])
        .expect("in-memory write");
    }
    let mut out = finish_csv(w);
    out.push(b'\n');
    let mut w = csv_writer();
    w.write_record(VERDICT_HEADER).expect("in-memory write");
    let v = &r.verdicts;
    for (name, verdict) in [
        ("first_order", &v.first_order),
        ("second_order", &v.second_order),
        ("penultimate_cond", &v.penultimate_cond),
        ("anderson", &v.anderson),
        ("gomes84", &v.gomes84),
    ] {
        let (value, reason) = match verdict {
            Verdict::ConfirmedLimit { value } => (num(*value), String::new()),
            Verdict::NotConfirmed { reason } => (String::new(), reason.clone()),
            Verdict::ConfirmedDecaying => (String::new(), String::new()),
        };
        w.write_record([name.to_string(), verdict.label().to_string(), value, reason])
            .expect("in-memory write");
    }
    out.extend(finish_csv(w));
    out
}

fn models_output(format: Format) -> Result<Vec<u8>> {
    let mut rows = Vec::new();
    for inst in builtin_instances() {
        let m = inst.build()?;
        rows.push((inst, m));
    }
    let params_text = |p: &BTreeMap<String, f64>| {
        p.iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(";")
    };
    Ok(match format {
        Format::Csv => {
            let mut w = csv_writer();
            w.write_record(MODELS_HEADER).expect("in-memory write");
            for (inst, m) in &rows {
                w.write_record([
                    inst.name.to_string(),
                    params_text(&inst.params),
                    m.family().to_string(),
                    num(m.theta()),
                    m.theta_is_one().to_string(),
                    num(m.support_lower()),
                    m.label().to_string(),
                ])
                .expect("in-memory write");
            }
            finish_csv(w)
        }
        Format::Json => {
            let builtins: Vec<Value> = rows
                .iter()
                .map(|(inst, m)| {
                    json!({
                        "name": inst.name,
                        "params": inst.params,
                        "family": m.family(),
                        "theta": m.theta(),
                        "theta_is_one": m.theta_is_one(),
                        "support_lower": m.support_lower(),
                        "label": m.label(),
                    })
                })
                .collect();
            to_json(&json!({ "meta": meta(), "catalog": catalog(), "builtins": builtins }))
        }
    })
}

fn collect<T>(cfg: &RunConfig, f: impl Fn(f64) -> Result<T>) -> Result<Vec<T>> {
    cfg.log_n_list.iter().map(|&l| f(l)).collect()
}

fn outcomes<T>(cfg: &RunConfig, f: impl Fn(f64) -> Result<T>) -> Vec<Outcome<T>> {
    cfg.log_n_list.iter().map(|&l| f(l).into()).collect()
}

/// The aggregated report document.
pub fn report(cfg: &RunConfig, m: &WeibullTypeModel) -> Value {
    let mut tol = tolerances();
    tol["grid"] = json!(cfg.grid);
    json!({
        "meta": { "tool": "wpen", "version": env!("CARGO_PKG_VERSION"),
                  "location_convention": LOCATION_CONVENTION,
                  "number_format": "shortest round-trip decimal",
                  "tolerances": tol },
        "model": model_json(cfg, m),
        "config": {
            "log_n_list": cfg.log_n_list,
            "grid": cfg.grid,
            "t_grid": cfg.t_grid,
            "gamma_mode": cfg.gamma_mode,
        },
        "norming": outcomes(cfg, |l| norming(m, l)),
        "penultimate": outcomes(cfg, |l| penultimate_index(m, l)),
        "errors": outcomes(cfg, |l| error_comparison(m, l, &cfg.grid, cfg.gamma_mode)),
        "vonmises": Outcome::from(condition_sweep(m, &cfg.t_grid)),
    })
}

fn run_command(cmd: &Command) -> Result<(Vec<u8>, Option<&PathBuf>)> {
    let args = match cmd {
        Command::Models(o) => return Ok((models_output(o.format)?, o.out.as_ref())),
        Command::Norming(a)
        | Command::Penultimate(a)
        | Command::Errors(a)
        | Command::Vonmises(a)
        | Command::Report(a) => a,
    };
    find_entry(&args.model)?;
    let m = build_model(&args.model, &args.params()?)?;
    let cfg = args.config(&m)?;
    let format = args.output.format;
    let envelope = |rows: Value| {
        to_json(&json!({ "meta": meta(), "model": model_json(&cfg, &m), "rows": rows }))
    };
    let body = match cmd {
        Command::Norming(_) => {
            let rows = collect(&cfg, |l| norming(&m, l))?;
            match format {
                Format::Csv => norming_csv(&rows),
                Format::Json => envelope(json!(rows)),
            }
        }
        Command::Penultimate(_) => {
            let rows = collect(&cfg, |l| penultimate_index(&m, l))?;
            match format {
                Format::Csv => penultimate_csv(&rows),
                Format::Json => envelope(json!(rows)),
            }
        }
        Command::Errors(_) => {
            let rows = collect(&cfg, |l| error_comparison(&m, l, &cfg.grid, cfg.gamma_mode))?;
            match format {
                Format::Csv => errors_csv(&rows),
                Format::Json => envelope(json!(rows)),
            }
        }
        Command::Vonmises(_) => {
            let r = condition_sweep(&m, &cfg.t_grid)?;
            match format {
                Format::Csv => vonmises_csv(&r),
                Format::Json => {
                    to_json(&json!({ "meta": meta(), "model": model_json(&cfg, &m), "report": r }))
                }
            }
        }
        Command::Report(_) => to_json(&report(&cfg, &m)),
        Command::Models(_) => unreachable!(),
    };
    Ok((body, args.output.out.as_ref()))
}

fn error_object(e: &Error) -> Vec<u8> {
    to_json(&json!({ "error": e.info() }))
}

/// Runs the CLI on `args` (program name first) and returns the exit code.
pub fn run_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = stderr.write_all(text.as_bytes());
                EXIT_USAGE
            } else {
                let _ = stdout.write_all(text.as_bytes());
                EXIT_OK
            };
        }
    };
    match run_command(&cli.command) {
        Ok((body, out)) => {
            let written = match out {
                Some(path) => File::create(path).and_then(|mut f| f.write_all(&body)),
                None => stdout.write_all(&body),
            };
            match written {
                Ok(()) => EXIT_OK,
                Err(e) => {
                    let err = Error::InvalidParameter(format!("cannot write output: {e}"));
                    let _ = stderr.write_all(&error_object(&err));
                    EXIT_USAGE
                }
            }
        }
        Err(e) => {
            let _ = stderr.write_all(&error_object(&e));
            if e.is_usage() {
                EXIT_USAGE
            } else {
                EXIT_NUMERIC
            }
        }
    }
}

/// Runs the CLI on the process arguments.
pub fn run() -> i32 {
    run_with(
        std::env::args_os(),
        &mut io::stdout().lock(),
        &mut io::stderr().lock(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut full = vec!["wpen"];
        full.extend_from_slice(args);
        let code = run_with(full, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn number_format_round_trips() {
        for v in [0.04, 1.0 / 3.0, -2.5e-10, 625.0] {
            let s = num(v);
            assert_eq!(s.parse::<f64>().unwrap(), v);
        }
        assert_eq!(num(0.04), "4.0000000000000001e-2");
    }

    #[test]
    fn grid_parsing() {
        assert_eq!(parse_grid("-3:6:1000").unwrap(), GridSpec::default());
        assert!(parse_grid("-3:6").is_err());
        assert_eq!(parse_grid("0:1:5").unwrap_err().code(), "insufficient_grid");
    }

    #[test]
    fn usage_errors_exit_two() {
        let (code, _, err) = call(&["penultimate", "--model", "cauchy", "--log-n", "10"]);
        assert_eq!(code, EXIT_USAGE);
        let v: Value = serde_json::from_str(&err).unwrap();
        assert_eq!(v["error"]["code"], "unknown_model");
        let (code, _, _) = call(&["penultimate"]);
        assert_eq!(code, EXIT_USAGE);
        let (code, _, _) = call(&["norming", "--model", "normal", "--log-n", "5", "--n", "100"]);
        assert_eq!(code, EXIT_USAGE);
    }

    #[test]
    fn numeric_errors_exit_three() {
        let (code, _, err) = call(&[
            "norming",
            "--model",
            "pure-weibull",
            "--theta",
            "2",
            "--log-n",
            "-1",
        ]);
        assert_eq!(code, EXIT_NUMERIC);
        let v: Value = serde_json::from_str(&err).unwrap();
        assert_eq!(v["error"]["code"], "invalid_block_size");
    }

    #[test]
    fn n_converts_to_log_n() {
        let (_, a, _) = call(&["norming", "--model", "normal", "--n", "1000"]);
        let (_, b, _) = call(&[
            "norming",
            "--model",
            "normal",
            "--log-n",
            &1000f64.ln().to_string(),
        ]);
        assert_eq!(a, b);
    }

    #[test]
    fn default_t_grids_span_four_decades() {
        for inst in builtin_instances() {
            let m = inst.build().unwrap();
            let g = default_t_grid(&m);
            assert!(g[0] > m.support_lower() && g[4] / g[0] >= 1e4 * (1.0 - 1e-12));
        }
    }
}
