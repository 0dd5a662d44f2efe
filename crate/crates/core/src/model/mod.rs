//! Weibull-type tail models and the k-function
//! `k(x) = d/dx [-log(-log F(x))]` with its first three derivatives.
//!
//! Three families are supported:
//!
//! * [`Family::TailExp`]: `1 - F(x) = exp(-H(x))`, `H(x) = x^(1/theta) l(x)`;
//! * [`Family::LogCdfExp`]: `-log F(x) = exp(-H(x))`, for which `k = H'` exactly;
//! * [`Family::Classical`]: a cdf and density supplied directly.
//!
//! All tail quantities are carried in log space; `F` itself is only formed
//! on request.

mod classical;
mod gev;

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

pub use classical::{ClassicalTail, Exponential, Gamma, Logistic, StandardNormal};
pub use gev::{gev_cdf, gev_cdf_at, gev_density, gev_density_at, GevPoint, GAMMA_SERIES_CUTOFF};

use crate::error::{Error, Result};
use crate::numerics::{
    derivative, hazard_at_level, hazard_deficit, log_cdf_power, log_neg_log_cdf_from_hazard,
    solve_increasing, Bracket, DiffConfig,
};
use crate::slowly_varying::{sv_ratios, SlowlyVaryingSpec};

/// Relative residual used for every `H^{-1}` root solve.
pub const INVERSE_REL_TOL: f64 = 1e-15;
/// Largest upper bracket tried when growing a root bracket.
pub const BRACKET_CAP: f64 = 1e300;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    TailExp,
    LogCdfExp,
    Classical,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::TailExp => "tail_exp",
            Family::LogCdfExp => "log_cdf_exp",
            Family::Classical => "classical",
        })
    }
}

#[derive(Clone)]
enum Kind {
    TailExp(SlowlyVaryingSpec),
    LogCdfExp(SlowlyVaryingSpec),
    Classical(Arc<dyn ClassicalTail>),
}

/// Which route produced a k-derivative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DerivPath {
    Analytic,
    Numeric,
}

/// `k` and its first three derivatives at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KJet {
    pub x: f64,
    pub k: f64,
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
    pub path: DerivPath,
    /// Richardson error estimates for `d1..d3` on the numeric path.
    pub error_estimates: Option<[f64; 3]>,
    pub low_confidence: bool,
}

impl KJet {
    pub fn derivative(&self, order: usize) -> f64 {
        match order {
            0 => self.k,
            1 => self.d1,
            2 => self.d2,
            3 => self.d3,
            _ => f64::NAN,
        }
    }

    /// `phi = (1/k)' = -k'/k^2`.
    pub fn phi(&self) -> f64 {
        // + 0.0 turns -0.0 into 0.0
        -self.d1 / (self.k * self.k) + 0.0
    }

    /// `phi' = (2k'^2 - k k'') / k^3`.
    pub fn phi_prime(&self) -> f64 {
        (2.0 * self.d1 * self.d1 - self.k * self.d2) / self.k.powi(3)
    }
}

/// One k-derivative with its provenance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KDerivative {
    pub value: f64,
    pub path: DerivPath,
    pub error_estimate: Option<f64>,
    pub low_confidence: bool,
}

/// A Weibull-type distribution.
#[derive(Clone)]
pub struct WeibullTypeModel {
    kind: Kind,
    theta: f64,
    support_lower: f64,
    label: String,
}

impl fmt::Debug for WeibullTypeModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WeibullTypeModel")
            .field("label", &self.label)
            .field("family", &self.family())
            .field("theta", &self.theta)
            .field("support_lower", &self.support_lower)
            .finish()
    }
}

/// `rho(H)` and its first three H-derivatives, where `k = H' rho(H)` for
/// the `TailExp` family: `rho = v / s`, `v = 1 / (e^H - 1)`, `s = -log(1 - e^-H)`.
fn tail_rho(hazard: f64) -> [f64; 4] {
    let u = (-hazard).exp();
    let v = if u < 1e-3 {
        u / (1.0 - u)
    } else {
        1.0 / hazard.exp_m1()
    };
    let rho_m1 = if u < 1e-3 {
        // (v - s) / s with v - s = sum_{n>=2} (1 - 1/n) u^n and s = sum_{n>=1} u^n / n
        let mut a = 0.0;
        let mut b = 0.0;
        let mut pow = 1.0;
        for n in 1..=12 {
            let nf = n as f64;
            b += pow / nf;
            let m = nf + 1.0;
            a += (1.0 - 1.0 / m) * pow;
            pow *= u;
        }
        u * a / b
    } else {
        let s = -(-u).ln_1p();
        v / s - 1.0
    };
    let rho = 1.0 + rho_m1;
    let dv = -v * (1.0 + v);
    let d2v = v * (1.0 + v) * (1.0 + 2.0 * v);
    let c = rho_m1 - v;
    let r1 = rho * c;
    let c1 = r1 - dv;
    let r2 = r1 * c + rho * c1;
    let c2 = r2 - d2v;
    let r3 = r2 * c + 2.0 * r1 * c1 + rho * c2;
    [rho, r1, r2, r3]
}

/// `k, k', k'', k'''` for `1 - F = exp(-H)` from `[H, H', .., H'''']`:
/// `k = H' rho(H)` differentiated by Faa di Bruno.
fn k_jet_from_hazard([h0, h1, h2, h3, h4]: [f64; 5]) -> [f64; 4] {
    let [r0, r1, r2, r3] = tail_rho(h0);
    [
        h1 * r0,
        h2 * r0 + scaled(h1 * h1, r1),
        h3 * r0 + scaled(3.0 * h1 * h2, r1) + scaled(h1.powi(3), r2),
        h4 * r0
            + scaled(4.0 * h1 * h3 + 3.0 * h2 * h2, r1)
            + scaled(6.0 * h1 * h1 * h2, r2)
            + scaled(h1.powi(4), r3),
    ]
}

/// `coef * factor`, treating an exactly-zero factor as annihilating even an
/// overflowed coefficient.
fn scaled(coef: f64, factor: f64) -> f64 {
    if factor == 0.0 {
        0.0
    } else {
        coef * factor
    }
}

impl WeibullTypeModel {
    /// `1 - F = exp(-x^(1/theta) l(x))` on `[support_lower, inf)`.
    pub fn tail_exp(
        theta: f64,
        l: SlowlyVaryingSpec,
        support_lower: f64,
        label: impl Into<String>,
    ) -> Result<Self> {
        Self::with_hazard(Kind::TailExp(l), theta, support_lower, label.into())
    }

    /// `-log F = exp(-x^(1/theta) l(x))` on `[support_lower, inf)`.
    pub fn log_cdf_exp(
        theta: f64,
        l: SlowlyVaryingSpec,
        support_lower: f64,
        label: impl Into<String>,
    ) -> Result<Self> {
        Self::with_hazard(Kind::LogCdfExp(l), theta, support_lower, label.into())
    }

    /// A distribution given by cdf and density with reference tail
    /// coefficient `theta`. `support_lower` is the start of the tail region.
    pub fn classical(
        dist: Arc<dyn ClassicalTail>,
        theta: f64,
        support_lower: f64,
        label: impl Into<String>,
    ) -> Result<Self> {
        validate_common(theta, support_lower)?;
        Ok(WeibullTypeModel {
            kind: Kind::Classical(dist),
            theta,
            support_lower,
            label: label.into(),
        })
    }

    fn with_hazard(kind: Kind, theta: f64, support_lower: f64, label: String) -> Result<Self> {
        validate_common(theta, support_lower)?;
        let l = match &kind {
            Kind::TailExp(l) | Kind::LogCdfExp(l) => l,
            Kind::Classical(_) => unreachable!(),
        };
        let support_lower = support_lower.max(l.domain_lower());
        let model = WeibullTypeModel {
            kind,
            theta,
            support_lower,
            label,
        };
        // H must increase on the support; spot-check H' on a log-spaced sweep.
        for i in -2..=12 {
            let x = support_lower + 10f64.powi(i);
            let h1 = model.hazard_jet(x)?[1];
            if !(h1 > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "H is not strictly increasing near x = {x} (H' = {h1})"
                )));
            }
        }
        Ok(model)
    }

    pub fn family(&self) -> Family {
        match self.kind {
            Kind::TailExp(_) => Family::TailExp,
            Kind::LogCdfExp(_) => Family::LogCdfExp,
            Kind::Classical(_) => Family::Classical,
        }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Whether the asymptotic penultimate results are excluded (`theta = 1`).
    pub fn theta_is_one(&self) -> bool {
        self.theta == 1.0
    }

    pub fn support_lower(&self) -> f64 {
        self.support_lower
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// The slowly varying part `l`, absent for classical models.
    pub fn slowly_varying(&self) -> Option<&SlowlyVaryingSpec> {
        match &self.kind {
            Kind::TailExp(l) | Kind::LogCdfExp(l) => Some(l),
            Kind::Classical(_) => None,
        }
    }

    pub fn classical_distribution(&self) -> Option<&Arc<dyn ClassicalTail>> {
        match &self.kind {
            Kind::Classical(d) => Some(d),
            _ => None,
        }
    }

    /// Whether closed-form k-derivatives exist for this model.
    pub fn has_analytic_k(&self) -> bool {
        match &self.kind {
            Kind::TailExp(_) | Kind::LogCdfExp(_) => true,
            Kind::Classical(d) => d.hazard_derivatives(self.support_lower.max(1.0)).is_some(),
        }
    }

    fn check_support(&self, x: f64) -> Result<()> {
        if x < self.support_lower || x.is_nan() {
            Err(Error::BelowSupport {
                x,
                lower: self.support_lower,
            })
        } else {
            Ok(())
        }
    }

    /// `[H, H', H'', H''', H'''']` by Leibniz' rule on `x^a l(x)`, `a = 1/theta`:
    /// `H^(j) = x^(a-j) l sum_i C(j,i) (a)_(j-i) x^i l^(i) / l`.
    pub fn hazard_jet(&self, x: f64) -> Result<[f64; 5]> {
        let l = match &self.kind {
            Kind::TailExp(l) | Kind::LogCdfExp(l) => l,
            Kind::Classical(_) => {
                return Err(Error::InvalidParameter(
                    "classical models carry no closed-form H".into(),
                ))
            }
        };
        self.check_support(x)?;
        let a = 1.0 / self.theta;
        let lv = l.value(x);
        if !(lv.is_finite() && lv > 0.0) {
            return Err(Error::DomainError { x });
        }
        let mut r = [1.0; 5];
        if l.constant_value().is_none() {
            let ratios = sv_ratios(l, x)?;
            r[1..].copy_from_slice(&ratios);
        } else {
            r[1..].fill(0.0);
        }
        const BINOM: [[f64; 5]; 5] = [
            [1.0, 0.0, 0.0, 0.0, 0.0],
            [1.0, 1.0, 0.0, 0.0, 0.0],
            [1.0, 2.0, 1.0, 0.0, 0.0],
            [1.0, 3.0, 3.0, 1.0, 0.0],
            [1.0, 4.0, 6.0, 4.0, 1.0],
        ];
        let falling = |m: usize| -> f64 { (0..m).map(|i| a - i as f64).product() };
        let mut out = [0.0; 5];
        for (j, slot) in out.iter_mut().enumerate() {
            let poly: f64 = (0..=j).map(|i| BINOM[j][i] * falling(j - i) * r[i]).sum();
            *slot = if poly == 0.0 {
                0.0
            } else {
                x.powf(a - j as f64) * lv * poly
            };
        }
        Ok(out)
    }

    /// `H(x)`; for classical models `H = -log(1 - F)`.
    pub fn cumulative_hazard(&self, x: f64) -> Result<f64> {
        self.check_support(x)?;
        match &self.kind {
            Kind::TailExp(_) | Kind::LogCdfExp(_) => Ok(self.hazard_jet_value(x)?),
            Kind::Classical(d) => Ok(-d.log_sf(x)),
        }
    }

    fn hazard_jet_value(&self, x: f64) -> Result<f64> {
        let l = self.slowly_varying().expect("hazard family");
        let lv = l.value(x);
        if !(lv.is_finite() && lv > 0.0) {
            return Err(Error::DomainError { x });
        }
        Ok(x.powf(1.0 / self.theta) * lv)
    }

    /// Grows `[support_lower, hi]` by doubling `hi` until `f(hi) >= target`,
    /// then solves `f(x) = target`.
    fn grow_and_solve<F: Fn(f64) -> f64>(&self, f: F, target: f64) -> Result<f64> {
        let mut lo = self.support_lower;
        let f_lo = f(lo);
        if f_lo > target {
            return Err(Error::BelowRange {
                y: target,
                min: f_lo,
            });
        }
        if f_lo == target {
            return Ok(lo);
        }
        let mut hi = (2.0 * self.support_lower).max(2.0);
        loop {
            let f_hi = f(hi);
            if f_hi.is_nan() {
                return Err(Error::EvalFailure { x: hi });
            }
            if f_hi >= target {
                break;
            }
            if hi >= BRACKET_CAP {
                return Err(Error::BracketMiss { target, f_lo, f_hi });
            }
            lo = hi;
            hi = (2.0 * hi).min(BRACKET_CAP);
        }
        solve_increasing(f, target, Bracket::new(lo, hi)?, INVERSE_REL_TOL)
    }

    /// `H^{-1}(y)`; closed form `(y / c)^theta` when `l` is the constant `c`.
    pub fn cumulative_hazard_inverse(&self, y: f64) -> Result<f64> {
        if let Some(c) = self.slowly_varying().and_then(|l| l.constant_value()) {
            let min = self.cumulative_hazard(self.support_lower)?;
            if !(y >= min) {
                return Err(Error::BelowRange { y, min });
            }
            return Ok((y / c).powf(self.theta));
        }
        self.cumulative_hazard_inverse_by_root(y)
    }

    /// `H^{-1}(y)` by bracketed root finding, regardless of closed forms.
    pub fn cumulative_hazard_inverse_by_root(&self, y: f64) -> Result<f64> {
        self.grow_and_solve(|x| self.cumulative_hazard(x).unwrap_or(f64::NAN), y)
    }

    /// `F(x)`.
    pub fn cdf(&self, x: f64) -> Result<f64> {
        self.check_support(x)?;
        match &self.kind {
            Kind::TailExp(_) => Ok(-(-self.cumulative_hazard(x)?).exp_m1()),
            Kind::LogCdfExp(_) => Ok((-(-self.cumulative_hazard(x)?).exp()).exp()),
            Kind::Classical(d) => Ok(d.cdf(x)),
        }
    }

    /// `log F(x)`.
    pub fn log_cdf(&self, x: f64) -> Result<f64> {
        self.check_support(x)?;
        match &self.kind {
            Kind::TailExp(_) => Ok((-(-self.cumulative_hazard(x)?).exp()).ln_1p()),
            Kind::LogCdfExp(_) => Ok(-(-self.cumulative_hazard(x)?).exp()),
            Kind::Classical(d) => Ok(d.log_cdf(x)),
        }
    }

    /// `log(-log F(x))`, the quantity [`crate::numerics::log_cdf_power`] consumes.
    pub fn log_neg_log_cdf(&self, x: f64) -> Result<f64> {
        self.check_support(x)?;
        match &self.kind {
            Kind::TailExp(_) => Ok(-log_neg_log_cdf_from_hazard(self.cumulative_hazard(x)?)?),
            Kind::LogCdfExp(_) => Ok(-self.cumulative_hazard(x)?),
            Kind::Classical(d) => Ok(log_neg_log_from_log_sf(d.log_sf(x))),
        }
    }

    /// `log F(y)^n` with `n = exp(log_n)`. Below `support_lower` a classical
    /// model falls back to its full distribution and a hazard model with
    /// `H(support_lower) = 0` has no mass; otherwise the point is rejected.
    pub fn log_cdf_power_at(&self, y: f64, log_n: f64) -> Result<f64> {
        if let Kind::Classical(d) = &self.kind {
            if y.is_nan() {
                return Err(Error::EvalFailure { x: y });
            }
            return Ok(log_cdf_power(log_neg_log_from_log_sf(d.log_sf(y)), log_n));
        }
        if y < self.support_lower {
            return if self.cumulative_hazard(self.support_lower)? == 0.0 {
                Ok(f64::NEG_INFINITY)
            } else {
                Err(Error::BelowSupport {
                    x: y,
                    lower: self.support_lower,
                })
            };
        }
        if self.family() == Family::TailExp && self.cumulative_hazard(y)? == 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        Ok(log_cdf_power(self.log_neg_log_cdf(y)?, log_n))
    }

    /// `f(x)`.
    pub fn density(&self, x: f64) -> Result<f64> {
        self.check_support(x)?;
        match &self.kind {
            Kind::TailExp(_) => {
                let jet = self.hazard_jet(x)?;
                Ok(jet[1] * (-jet[0]).exp())
            }
            Kind::LogCdfExp(_) => {
                let jet = self.hazard_jet(x)?;
                let tail = (-jet[0]).exp();
                Ok(jet[1] * tail * (-tail).exp())
            }
            Kind::Classical(d) => Ok(d.log_density(x).exp()),
        }
    }

    /// The point `x` with `-log(-log F(x)) = level`.
    pub fn level_inverse(&self, level: f64) -> Result<f64> {
        match &self.kind {
            Kind::TailExp(_) => self.cumulative_hazard_inverse(hazard_at_level(level)),
            Kind::LogCdfExp(_) => self.cumulative_hazard_inverse(level),
            Kind::Classical(_) => self.grow_and_solve(
                |x| self.log_neg_log_cdf(x).map(|v| -v).unwrap_or(f64::NAN),
                level,
            ),
        }
    }

    /// `k(x) = d/dx [-log(-log F(x))]`.
    pub fn k_function(&self, x: f64) -> Result<f64> {
        self.check_support(x)?;
        let k = match &self.kind {
            Kind::TailExp(_) => {
                let jet = self.hazard_jet(x)?;
                jet[1] * tail_rho(jet[0])[0]
            }
            Kind::LogCdfExp(_) => self.hazard_jet(x)?[1],
            Kind::Classical(d) => classical_k(d.as_ref(), x)?,
        };
        if k.is_finite() {
            Ok(k)
        } else {
            Err(Error::TailUnderflow { x })
        }
    }

    /// Closed-form `k, k', k'', k'''`.
    pub fn k_jet_analytic(&self, x: f64) -> Result<KJet> {
        self.check_support(x)?;
        let [k, d1, d2, d3] = match &self.kind {
            Kind::TailExp(_) => k_jet_from_hazard(self.hazard_jet(x)?),
            Kind::LogCdfExp(_) => {
                let h = self.hazard_jet(x)?;
                [h[1], h[2], h[3], h[4]]
            }
            Kind::Classical(d) => {
                let [h1, h2, h3, h4] = d.hazard_derivatives(x).ok_or_else(|| {
                    Error::InvalidParameter(format!(
                        "{} has no closed-form density derivatives",
                        d.name()
                    ))
                })?;
                let h0 = -d.log_sf(x);
                if !(h0 > 0.0 && h0.is_finite()) {
                    return Err(Error::TailUnderflow { x });
                }
                k_jet_from_hazard([h0, h1, h2, h3, h4])
            }
        };
        if ![k, d1, d2, d3].iter().all(|v| v.is_finite()) {
            return Err(Error::TailUnderflow { x });
        }
        Ok(KJet {
            x,
            k,
            d1,
            d2,
            d3,
            path: DerivPath::Analytic,
            error_estimates: None,
            low_confidence: false,
        })
    }

    /// `k, k', k'', k'''` by Richardson differentiation of [`Self::k_function`].
    pub fn k_jet_numeric(&self, x: f64, cfg: &DiffConfig) -> Result<KJet> {
        let k = self.k_function(x)?;
        let f = |t: f64| self.k_function(t).unwrap_or(f64::NAN);
        let mut vals = [0.0; 3];
        let mut errs = [0.0; 3];
        let mut low = false;
        for order in 1..=3 {
            let d = derivative(f, x, order, cfg)?;
            vals[order - 1] = d.value;
            errs[order - 1] = d.error_estimate;
            low |= d.low_confidence;
        }
        Ok(KJet {
            x,
            k,
            d1: vals[0],
            d2: vals[1],
            d3: vals[2],
            path: DerivPath::Numeric,
            error_estimates: Some(errs),
            low_confidence: low,
        })
    }

    /// Analytic jet when available, numeric otherwise.
    pub fn k_jet(&self, x: f64) -> Result<KJet> {
        if self.has_analytic_k() {
            self.k_jet_analytic(x)
        } else {
            self.k_jet_numeric(x, &DiffConfig::default().with_levels(4))
        }
    }

    /// `k^(order)(x)`, `order` in `1..=3`, along the requested path.
    pub fn k_derivative(&self, x: f64, order: usize, path: DerivPath) -> Result<KDerivative> {
        if !(1..=3).contains(&order) {
            return Err(Error::InvalidParameter(format!(
                "k derivative order {order} outside 1..=3"
            )));
        }
        match path {
            DerivPath::Analytic => Ok(KDerivative {
                value: self.k_jet_analytic(x)?.derivative(order),
                path,
                error_estimate: None,
                low_confidence: false,
            }),
            DerivPath::Numeric => {
                self.check_support(x)?;
                let f = |t: f64| self.k_function(t).unwrap_or(f64::NAN);
                let d = derivative(f, x, order, &DiffConfig::default())?;
                Ok(KDerivative {
                    value: d.value,
                    path,
                    error_estimate: Some(d.error_estimate),
                    low_confidence: d.low_confidence,
                })
            }
        }
    }

    /// `(x k'/k, x^2 k''/k, x^3 k'''/k)`; these tend to `(a-1)`, `(a-1)(a-2)`
    /// and `(a-1)(a-2)(a-3)` with `a = 1/theta`.
    pub fn rv_ratios(&self, x: f64) -> Result<(f64, f64, f64)> {
        let j = self.k_jet(x)?;
        Ok((x * j.d1 / j.k, x * x * j.d2 / j.k, x.powi(3) * j.d3 / j.k))
    }

    /// `1 / (1 + x k'(x)/k(x))`, which tends to `theta`.
    pub fn theta_diagnostic(&self, x: f64) -> Result<f64> {
        Ok(1.0 / (1.0 + self.rv_ratios(x)?.0))
    }
}

fn validate_common(theta: f64, support_lower: f64) -> Result<()> {
    if !(theta > 0.0 && theta.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "theta must be positive, got {theta}"
        )));
    }
    if !(support_lower >= 0.0 && support_lower.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "support_lower must be a finite value >= 0, got {support_lower}"
        )));
    }
    Ok(())
}

/// `log(-log F)` from `log(1 - F)`; `+inf` where `F = 0`.
fn log_neg_log_from_log_sf(log_sf: f64) -> f64 {
    match hazard_deficit(-log_sf) {
        Ok(deficit) => log_sf + deficit,
        Err(_) => f64::INFINITY,
    }
}

/// `k = f / (F (-log F))`, written as `k = h / (F r)` with hazard
/// `h = f / (1 - F)` and `r = -log F / (1 - F)` so nothing cancels deep in
/// the tail.
fn classical_k(d: &dyn ClassicalTail, x: f64) -> Result<f64> {
    let log_sf = d.log_sf(x);
    let log_h = d.log_hazard(x);
    let log_cdf = d.log_cdf(x);
    let log_r = hazard_deficit(-log_sf).map_err(|_| Error::TailUnderflow { x })?;
    let k = (log_h - log_r - log_cdf).exp();
    if k.is_finite() && k > 0.0 {
        Ok(k)
    } else {
        Err(Error::TailUnderflow { x })
    }
}
