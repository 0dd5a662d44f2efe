//! Slowly varying functions `l` with up to four derivatives, and the decay
//! checks `x^j l^(j)(x) / l(x) -> 0` that Weibull-type tails rely on.
//!
//! A monotone `l` already forces the `j = 1` ratio to vanish, but every
//! condition is verified numerically here regardless.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{derivative, DiffConfig};

/// Shared real function handle.
pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Where the j-th derivative of `l` comes from.
#[derive(Clone)]
pub enum DerivativeSource {
    Analytic(RealFn),
    /// Synthesized from the value function by Richardson differentiation.
    Numeric,
}

impl DerivativeSource {
    pub fn is_analytic(&self) -> bool {
        matches!(self, DerivativeSource::Analytic(_))
    }
}

/// A slowly varying function together with its first four derivatives.
#[derive(Clone)]
pub struct SlowlyVaryingSpec {
    value: RealFn,
    derivatives: [DerivativeSource; 4],
    domain_lower: f64,
    label: String,
    constant: Option<f64>,
}

impl fmt::Debug for SlowlyVaryingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let analytic: Vec<bool> = self.derivatives.iter().map(|d| d.is_analytic()).collect();
        f.debug_struct("SlowlyVaryingSpec")
            .field("label", &self.label)
            .field("domain_lower", &self.domain_lower)
            .field("analytic", &analytic)
            .finish()
    }
}

fn falling(a: f64, m: usize) -> f64 {
    (0..m).map(|i| a - i as f64).product()
}

impl SlowlyVaryingSpec {
    /// A spec whose derivatives are all synthesized numerically.
    pub fn new<F>(label: impl Into<String>, domain_lower: f64, value: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        SlowlyVaryingSpec {
            value: Arc::new(value),
            derivatives: std::array::from_fn(|_| DerivativeSource::Numeric),
            domain_lower,
            label: label.into(),
            constant: None,
        }
    }

    /// Attaches an analytic `j`-th derivative, `j` in `1..=4`.
    pub fn with_derivative<F>(mut self, j: usize, f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        assert!((1..=4).contains(&j), "derivative index {j} outside 1..=4");
        self.derivatives[j - 1] = DerivativeSource::Analytic(Arc::new(f));
        self
    }

    /// `l(x) = g(log x)`, given `g` and its first four derivatives in `u = log x`.
    ///
    /// Uses `x^j l^(j)(x) = sum_i s(j, i) g^(i)(log x)` with signed Stirling
    /// numbers of the first kind.
    pub fn from_log_scale(label: impl Into<String>, domain_lower: f64, g: [RealFn; 5]) -> Self {
        const STIRLING: [[f64; 4]; 4] = [
            [1.0, 0.0, 0.0, 0.0],
            [-1.0, 1.0, 0.0, 0.0],
            [2.0, -3.0, 1.0, 0.0],
            [-6.0, 11.0, -6.0, 1.0],
        ];
        let g0 = g[0].clone();
        let mut spec = SlowlyVaryingSpec::new(label, domain_lower, move |x| g0(x.ln()));
        for j in 1..=4 {
            let g = g.clone();
            spec = spec.with_derivative(j, move |x| {
                let u = x.ln();
                let s: f64 = (1..=j).map(|i| STIRLING[j - 1][i - 1] * g[i](u)).sum();
                s / x.powi(j as i32)
            });
        }
        spec
    }

    /// `l = c` for a positive constant.
    pub fn constant(c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "constant slowly varying function needs c > 0, got {c}"
            )));
        }
        let mut spec = SlowlyVaryingSpec::new(format!("constant({c})"), 0.0, move |_| c);
        for j in 1..=4 {
            spec = spec.with_derivative(j, |_| 0.0);
        }
        spec.constant = Some(c);
        Ok(spec)
    }

    /// `l = log x` on `[e, inf)`.
    pub fn log() -> Self {
        let mut spec = Self::log_power(1.0);
        spec.label = "log(x)".into();
        spec
    }

    /// `l = (log x)^beta` on `[e, inf)`.
    pub fn log_power(beta: f64) -> Self {
        let g: [RealFn; 5] = std::array::from_fn(|i| -> RealFn {
            Arc::new(move |u: f64| falling(beta, i) * u.powf(beta - i as f64))
        });
        Self::from_log_scale(format!("log(x)^{beta}"), std::f64::consts::E, g)
    }

    /// `l = c + d / log x`, positive on its domain.
    pub fn inverse_log_shift(c: f64, d: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite() && d.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "c + d/log(x) needs c > 0 and finite d, got c = {c}, d = {d}"
            )));
        }
        let lower = if d < 0.0 {
            (-2.0 * d / c).exp().max(std::f64::consts::E)
        } else {
            std::f64::consts::E
        };
        let g: [RealFn; 5] = std::array::from_fn(|i| -> RealFn {
            if i == 0 {
                Arc::new(move |u: f64| c + d / u)
            } else {
                Arc::new(move |u: f64| d * falling(-1.0, i) * u.powi(-1 - i as i32))
            }
        });
        Ok(Self::from_log_scale(format!("{c}+{d}/log(x)"), lower, g))
    }

    /// `l = 1 - delta * x^(-beta) * log x`, so that `x^beta l(x) = x^beta - delta log x`
    /// (a Weibull tail with a power-law prefactor `x^delta`).
    pub fn power_log_correction(beta: f64, delta: f64, domain_lower: f64) -> Self {
        let p = -beta;
        // d^j/dx^j [x^p log x] = x^(p-j) (P_j log x + Q_j)
        let mut coef = [(1.0, 0.0); 5];
        for j in 0..4 {
            let (pj, qj) = coef[j];
            let a = p - j as f64;
            coef[j + 1] = (a * pj, a * qj + pj);
        }
        let mut spec = SlowlyVaryingSpec::new(
            format!("1-{delta}x^-{beta}log(x)"),
            domain_lower,
            move |x| 1.0 - delta * x.powf(p) * x.ln(),
        );
        for (j, &(pj, qj)) in coef.iter().enumerate().skip(1) {
            spec = spec.with_derivative(j, move |x| {
                -delta * x.powf(p - j as f64) * (pj * x.ln() + qj)
            });
        }
        spec
    }

    /// Built-in slowly varying functions.
    pub fn builtins() -> Vec<SlowlyVaryingSpec> {
        vec![
            Self::constant(1.0).expect("positive constant"),
            Self::log(),
            Self::log_power(-1.0),
            Self::log_power(2.0),
            Self::inverse_log_shift(1.0, 1.0).expect("valid parameters"),
        ]
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn domain_lower(&self) -> f64 {
        self.domain_lower
    }

    /// `Some(c)` when `l` is the constant `c`.
    pub fn constant_value(&self) -> Option<f64> {
        self.constant
    }

    pub fn value(&self, x: f64) -> f64 {
        (self.value)(x)
    }

    pub fn has_analytic(&self, j: usize) -> bool {
        (1..=4).contains(&j) && self.derivatives[j - 1].is_analytic()
    }

    /// `l^(j)(x)` from the analytic form when present, else numerically.
    pub fn derivative(&self, j: usize, x: f64) -> Result<f64> {
        check_index(j)?;
        match &self.derivatives[j - 1] {
            DerivativeSource::Analytic(f) => Ok(f(x)),
            DerivativeSource::Numeric => self.numeric_derivative(j, x),
        }
    }

    /// `l^(j)(x)` by Richardson differentiation of the value function.
    pub fn numeric_derivative(&self, j: usize, x: f64) -> Result<f64> {
        check_index(j)?;
        if self.constant.is_some() {
            return Ok(0.0);
        }
        let value = self.value.clone();
        Ok(derivative(move |t| value(t), x, j, &DiffConfig::default())?.value)
    }
}

fn check_index(j: usize) -> Result<()> {
    if (1..=4).contains(&j) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "derivative index {j} outside 1..=4"
        )))
    }
}

fn checked_value(spec: &SlowlyVaryingSpec, x: f64) -> Result<f64> {
    if x < spec.domain_lower {
        return Err(Error::BelowSupport {
            x,
            lower: spec.domain_lower,
        });
    }
    let l = spec.value(x);
    if l.is_finite() && l > 0.0 {
        Ok(l)
    } else {
        Err(Error::DomainError { x })
    }
}

/// `x^j l^(j)(x) / l(x)`.
pub fn sv_ratio(spec: &SlowlyVaryingSpec, j: usize, x: f64) -> Result<f64> {
    let l = checked_value(spec, x)?;
    let d = spec.derivative(j, x)?;
    Ok(x.powi(j as i32) * d / l)
}

/// All four ratios `x^j l^(j)(x) / l(x)`, `j = 1..=4`.
pub fn sv_ratios(spec: &SlowlyVaryingSpec, x: f64) -> Result<[f64; 4]> {
    let l = checked_value(spec, x)?;
    let mut out = [0.0; 4];
    for (j, slot) in (1..=4).zip(out.iter_mut()) {
        *slot = x.powi(j as i32) * spec.derivative(j, x)? / l;
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SvVerdict {
    Decaying,
    NotConfirmed,
}

/// Ratio sequence for one derivative order along a grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SvCheck {
    pub j: usize,
    pub ratios: Vec<f64>,
    pub verdict: SvVerdict,
}

/// Relative shrink the last ratio must show against the first.
pub const SV_SHRINK_FACTOR: f64 = 0.5;
/// Absolute bound on the last ratio.
pub const SV_ABS_BOUND: f64 = 0.1;

pub(crate) fn validate_diverging_grid(
    grid: &[f64],
    min_points: usize,
    min_decades: f64,
) -> Result<()> {
    if grid.len() < min_points {
        return Err(Error::InsufficientGrid {
            reason: format!("{} points, need at least {min_points}", grid.len()),
        });
    }
    if grid.windows(2).any(|w| !(w[0] < w[1])) || !(grid[0] > 0.0) {
        return Err(Error::InsufficientGrid {
            reason: "grid must be positive and strictly ascending".into(),
        });
    }
    let decades = (grid[grid.len() - 1] / grid[0]).log10();
    if decades < min_decades - 1e-9 {
        return Err(Error::InsufficientGrid {
            reason: format!("grid spans {decades:.2} decades, need {min_decades}"),
        });
    }
    Ok(())
}

/// Evaluates every decay condition along `t_grid` (at least 4 ascending
/// points over 3 decades) and grades each sequence.
pub fn check_sv_conditions(spec: &SlowlyVaryingSpec, t_grid: &[f64]) -> Result<Vec<SvCheck>> {
    validate_diverging_grid(t_grid, 4, 3.0)?;
    let rows = t_grid
        .iter()
        .map(|&t| sv_ratios(spec, t))
        .collect::<Result<Vec<_>>>()?;
    Ok((0..4)
        .map(|idx| {
            let ratios: Vec<f64> = rows.iter().map(|r| r[idx]).collect();
            let first = ratios[0].abs();
            let last = ratios[ratios.len() - 1].abs();
            let decaying = last < SV_ABS_BOUND && (last == 0.0 || last < SV_SHRINK_FACTOR * first);
            SvCheck {
                j: idx + 1,
                ratios,
                verdict: if decaying {
                    SvVerdict::Decaying
                } else {
                    SvVerdict::NotConfirmed
                },
            }
        })
        .collect())
}

/// `|l(2t) / l(t) - 1|` along the grid.
pub fn slow_variation_profile(spec: &SlowlyVaryingSpec, t_grid: &[f64]) -> Result<Vec<f64>> {
    t_grid
        .iter()
        .map(|&t| Ok((checked_value(spec, 2.0 * t)? / checked_value(spec, t)? - 1.0).abs()))
        .collect()
}
