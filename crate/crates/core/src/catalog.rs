//! Named built-in models and their parameters.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Exponential, Family, Gamma, Logistic, StandardNormal, WeibullTypeModel};
use crate::slowly_varying::SlowlyVaryingSpec;

/// One parameter accepted by a catalog entry.
#[derive(Debug, Clone, Serialize)]
pub struct ParamSpec {
    pub name: &'static str,
    pub default: Option<f64>,
    pub about: &'static str,
}

/// A catalog entry: a parametrised model family under a fixed name.
#[derive(Debug, Clone, Serialize)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub family: Family,
    pub params: Vec<ParamSpec>,
    /// Reference theta, as a number or in terms of the parameters.
    pub theta: &'static str,
    pub about: &'static str,
}

const fn param(name: &'static str, default: Option<f64>, about: &'static str) -> ParamSpec {
    ParamSpec {
        name,
        default,
        about,
    }
}

/// Every model name known to [`build_model`].
pub fn catalog() -> Vec<CatalogEntry> {
    vec![
        CatalogEntry {
            name: "pure-weibull",
            family: Family::TailExp,
            params: vec![
                param("theta", None, "Weibull-tail coefficient (or give alpha)"),
                param("alpha", None, "Weibull shape, theta = 1/alpha"),
                param("lambda", Some(1.0), "scale"),
            ],
            theta: "1/alpha",
            about: "1 - F = exp(-(x/lambda)^alpha)",
        },
        CatalogEntry {
            name: "weibull-log",
            family: Family::TailExp,
            params: vec![
                param("theta", None, "Weibull-tail coefficient"),
                param("beta", Some(1.0), "power of log x"),
            ],
            theta: "theta",
            about: "H = x^(1/theta) (log x)^beta",
        },
        CatalogEntry {
            name: "weibull-inverse-log",
            family: Family::TailExp,
            params: vec![
                param("theta", None, "Weibull-tail coefficient"),
                param("c", Some(1.0), "constant term"),
                param("d", Some(1.0), "coefficient of 1/log x"),
            ],
            theta: "theta",
            about: "H = x^(1/theta) (c + d / log x)",
        },
        CatalogEntry {
            name: "extended-weibull",
            family: Family::TailExp,
            params: vec![
                param("beta", None, "exponent of the Weibull factor"),
                param("delta", Some(1.0), "power-law prefactor exponent"),
            ],
            theta: "1/beta",
            about: "1 - F = x^delta exp(-x^beta) in the tail",
        },
        CatalogEntry {
            name: "log-cdf-weibull",
            family: Family::LogCdfExp,
            params: vec![param("theta", None, "Weibull-tail coefficient")],
            theta: "theta",
            about: "-log F = exp(-x^(1/theta))",
        },
        CatalogEntry {
            name: "gumbel-fixture",
            family: Family::LogCdfExp,
            params: vec![],
            theta: "1",
            about: "-log F = exp(-x), exactly Gumbel",
        },
        CatalogEntry {
            name: "normal",
            family: Family::Classical,
            params: vec![],
            theta: "0.5",
            about: "standard normal",
        },
        CatalogEntry {
            name: "exponential",
            family: Family::Classical,
            params: vec![],
            theta: "1",
            about: "unit-rate exponential",
        },
        CatalogEntry {
            name: "logistic",
            family: Family::Classical,
            params: vec![],
            theta: "1",
            about: "standard logistic",
        },
        CatalogEntry {
            name: "gamma",
            family: Family::Classical,
            params: vec![param("shape", Some(2.0), "shape, unit rate")],
            theta: "1",
            about: "gamma(shape, 1)",
        },
    ]
}

pub fn find_entry(name: &str) -> Result<CatalogEntry> {
    catalog()
        .into_iter()
        .find(|e| e.name == name)
        .ok_or_else(|| Error::UnknownModel(name.to_string()))
}

/// Validated parameters for one entry: defaults filled, unknown names rejected.
fn resolve(
    entry: &CatalogEntry,
    given: &BTreeMap<String, f64>,
) -> Result<BTreeMap<&'static str, f64>> {
    for key in given.keys() {
        if !entry.params.iter().any(|p| p.name == key) {
            return Err(Error::InvalidParameter(format!(
                "model {} takes no parameter {key}",
                entry.name
            )));
        }
    }
    let mut out = BTreeMap::new();
    for p in &entry.params {
        if let Some(&v) = given.get(p.name) {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "{} must be finite",
                    p.name
                )));
            }
            out.insert(p.name, v);
        } else if let Some(d) = p.default {
            out.insert(p.name, d);
        }
    }
    Ok(out)
}

fn required(p: &BTreeMap<&'static str, f64>, name: &str, model: &str) -> Result<f64> {
    p.get(name)
        .copied()
        .ok_or_else(|| Error::InvalidParameter(format!("model {model} needs parameter {name}")))
}

fn positive(v: f64, name: &str) -> Result<f64> {
    if v > 0.0 {
        Ok(v)
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} must be positive, got {v}"
        )))
    }
}

/// Tries the tail model with lower bounds `start, 2 start, 4 start, ...`
/// until `H` is increasing from the bound on.
fn tail_from<F>(start: f64, build: F) -> Result<WeibullTypeModel>
where
    F: Fn(f64) -> Result<WeibullTypeModel>,
{
    let mut lower = start;
    let mut last = None;
    for _ in 0..60 {
        match build(lower) {
            Ok(m) => return Ok(m),
            Err(e @ Error::InvalidParameter(_)) | Err(e @ Error::DomainError { .. }) => {
                last = Some(e)
            }
            Err(e) => return Err(e),
        }
        lower *= 2.0;
    }
    Err(last.unwrap_or_else(|| Error::InvalidParameter("no tail region found".into())))
}

/// The model `name` with parameters `params` (missing ones take defaults).
pub fn build_model(name: &str, params: &BTreeMap<String, f64>) -> Result<WeibullTypeModel> {
    let entry = find_entry(name)?;
    let p = resolve(&entry, params)?;
    match entry.name {
        "pure-weibull" => {
            let theta = match (p.get("theta"), p.get("alpha")) {
                (Some(_), Some(_)) => {
                    return Err(Error::InvalidParameter(
                        "give either theta or alpha, not both".into(),
                    ))
                }
                (Some(&t), None) => positive(t, "theta")?,
                (None, Some(&a)) => 1.0 / positive(a, "alpha")?,
                (None, None) => {
                    return Err(Error::InvalidParameter(
                        "model pure-weibull needs parameter theta or alpha".into(),
                    ))
                }
            };
            let lambda = positive(p["lambda"], "lambda")?;
            let l = SlowlyVaryingSpec::constant(lambda.powf(-1.0 / theta))?;
            let label = format!("pure-weibull(theta={theta}, lambda={lambda})");
            WeibullTypeModel::tail_exp(theta, l, 0.0, label)
        }
        "weibull-log" => {
            let theta = positive(required(&p, "theta", name)?, "theta")?;
            let beta = p["beta"];
            let l = SlowlyVaryingSpec::log_power(beta);
            let label = format!("weibull-log(theta={theta}, beta={beta})");
            tail_from(l.domain_lower(), |lo| {
                WeibullTypeModel::tail_exp(theta, l.clone(), lo, label.clone())
            })
        }
        "weibull-inverse-log" => {
            let theta = positive(required(&p, "theta", name)?, "theta")?;
            let (c, d) = (p["c"], p["d"]);
            let l = SlowlyVaryingSpec::inverse_log_shift(c, d)?;
            let label = format!("weibull-inverse-log(theta={theta}, c={c}, d={d})");
            tail_from(l.domain_lower(), |lo| {
                WeibullTypeModel::tail_exp(theta, l.clone(), lo, label.clone())
            })
        }
        "extended-weibull" => {
            let beta = positive(required(&p, "beta", name)?, "beta")?;
            let delta = p["delta"];
            let start = if delta > 0.0 {
                (2.0 * delta / beta).powf(1.0 / beta).max(1.0)
            } else {
                1.0
            };
            let label = format!("extended-weibull(beta={beta}, delta={delta})");
            tail_from(start, |lo| {
                let l = SlowlyVaryingSpec::power_log_correction(beta, delta, lo);
                if !(l.value(lo) > 0.0) {
                    return Err(Error::DomainError { x: lo });
                }
                WeibullTypeModel::tail_exp(1.0 / beta, l, lo, label.clone())
            })
        }
        "log-cdf-weibull" => {
            let theta = positive(required(&p, "theta", name)?, "theta")?;
            let l = SlowlyVaryingSpec::constant(1.0)?;
            WeibullTypeModel::log_cdf_exp(theta, l, 0.0, format!("log-cdf-weibull(theta={theta})"))
        }
        "gumbel-fixture" => {
            let l = SlowlyVaryingSpec::constant(1.0)?;
            WeibullTypeModel::log_cdf_exp(1.0, l, 0.0, "gumbel-fixture")
        }
        "normal" => WeibullTypeModel::classical(Arc::new(StandardNormal), 0.5, 0.0, "normal"),
        "exponential" => {
            WeibullTypeModel::classical(Arc::new(Exponential), 1.0, 0.0, "exponential")
        }
        "logistic" => WeibullTypeModel::classical(Arc::new(Logistic), 1.0, 0.0, "logistic"),
        "gamma" => {
            let shape = p["shape"];
            let dist = Gamma::new(shape).ok_or_else(|| {
                Error::InvalidParameter(format!("gamma shape must be positive, got {shape}"))
            })?;
            WeibullTypeModel::classical(Arc::new(dist), 1.0, 0.0, format!("gamma(shape={shape})"))
        }
        other => Err(Error::UnknownModel(other.to_string())),
    }
}

/// A concrete built-in instance: catalog name plus parameter values.
#[derive(Debug, Clone, Serialize)]
pub struct BuiltinInstance {
    pub name: &'static str,
    pub params: BTreeMap<String, f64>,
}

impl BuiltinInstance {
    pub fn build(&self) -> Result<WeibullTypeModel> {
        build_model(self.name, &self.params)
    }
}

fn instance(name: &'static str, params: &[(&str, f64)]) -> BuiltinInstance {
    BuiltinInstance {
        name,
        params: params.iter().map(|&(k, v)| (k.to_string(), v)).collect(),
    }
}

/// The pure-Weibull thetas used throughout the checks.
pub const PURE_WEIBULL_THETAS: [f64; 4] = [0.25, 0.5, 2.0, 4.0];

/// The reference set of concrete models.
pub fn builtin_instances() -> Vec<BuiltinInstance> {
    vec![
        instance("pure-weibull", &[("alpha", 4.0)]),
        instance("pure-weibull", &[("alpha", 2.0)]),
        instance("pure-weibull", &[("alpha", 0.5)]),
        instance("pure-weibull", &[("alpha", 0.25)]),
        instance("weibull-log", &[("theta", 2.0), ("beta", 1.0)]),
        instance("weibull-log", &[("theta", 4.0), ("beta", -1.0)]),
        instance(
            "weibull-inverse-log",
            &[("theta", 2.0), ("c", 1.0), ("d", 1.0)],
        ),
        instance("extended-weibull", &[("beta", 2.0), ("delta", 1.0)]),
        instance("log-cdf-weibull", &[("theta", 2.0)]),
        instance("gumbel-fixture", &[]),
        instance("normal", &[]),
        instance("exponential", &[]),
        instance("logistic", &[]),
        instance("gamma", &[("shape", 2.0)]),
    ]
}

/// Pure-Weibull models with unit scale at the given theta.
pub fn pure_weibull(theta: f64) -> Result<WeibullTypeModel> {
    build_model(
        "pure-weibull",
        &BTreeMap::from([("theta".to_string(), theta)]),
    )
}
