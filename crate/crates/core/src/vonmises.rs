//! Limit functionals along a diverging grid: von Mises first and second
//! order, the penultimate condition, Anderson's class `A_1`, and the
//! Gomes (1984) functional `phi' / (k phi^2)`.

use serde::Serialize;

use crate::error::{Error, ErrorInfo, Result};
use crate::model::{DerivPath, KJet, WeibullTypeModel};
use crate::slowly_varying::validate_diverging_grid;

/// A zero-limit sequence is decaying when its last magnitude is below this...
pub const DECAY_ABS_BOUND: f64 = 0.05;
/// ...and below this fraction of its first magnitude.
pub const DECAY_SHRINK_FACTOR: f64 = 0.5;
/// Relative agreement of the last two values for a confirmed limit.
pub const LIMIT_REL_TOL: f64 = 0.05;
/// A condition is not confirmed when more than this share of points fail.
pub const MAX_FAILURE_SHARE: f64 = 0.2;
pub const MIN_GRID_POINTS: usize = 5;
pub const MIN_GRID_DECADES: f64 = 4.0;

/// `phi(x) = (1/k)'(x) = -k'(x) / k(x)^2`.
pub fn phi(model: &WeibullTypeModel, x: f64) -> Result<f64> {
    Ok(model.k_jet(x)?.phi())
}

/// `1 / (1 - theta)`, the limit of the Gomes functional.
pub fn gomes84_closed_form(theta: f64) -> Result<f64> {
    if !(theta > 0.0 && theta.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "theta must be positive, got {theta}"
        )));
    }
    if theta == 1.0 {
        return Err(Error::ThetaOneExcluded);
    }
    Ok(1.0 / (1.0 - theta))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    ConfirmedDecaying,
    ConfirmedLimit { value: f64 },
    NotConfirmed { reason: String },
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::ConfirmedDecaying => "confirmed_decaying",
            Verdict::ConfirmedLimit { .. } => "confirmed_limit",
            Verdict::NotConfirmed { .. } => "not_confirmed",
        }
    }

    pub fn is_confirmed(&self) -> bool {
        !matches!(self, Verdict::NotConfirmed { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdicts {
    pub first_order: Verdict,
    pub second_order: Verdict,
    pub penultimate_cond: Verdict,
    pub anderson: Verdict,
    pub gomes84: Verdict,
}

/// Why a point of one sequence carries no value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointFailure {
    pub t: f64,
    pub condition: &'static str,
    pub error: ErrorInfo,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport {
    pub t_grid: Vec<f64>,
    /// `phi`
    pub first_order: Vec<Option<f64>>,
    /// `phi' / (k phi)`
    pub second_order: Vec<Option<f64>>,
    /// `phi'' / (k phi')`
    pub penultimate_cond: Vec<Option<f64>>,
    /// `k'' / (k k')`
    pub anderson: Vec<Option<f64>>,
    /// `phi' / (k phi^2)`
    pub gomes84: Vec<Option<f64>>,
    pub verdicts: Verdicts,
    /// `1 / (1 - theta)` when `theta != 1`.
    pub gomes84_theory: Option<f64>,
    pub derivative_path: DerivPath,
    /// Largest Richardson error estimate seen on the numeric path.
    pub max_error_estimate: Option<f64>,
    pub failures: Vec<PointFailure>,
}

/// The five functionals from one jet; `None` marks `0/0`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Functionals {
    first: f64,
    second: Option<f64>,
    penultimate: Option<f64>,
    anderson: Option<f64>,
    gomes: Option<f64>,
}

fn ratio(num: f64, den: f64) -> Option<f64> {
    if den == 0.0 {
        None
    } else {
        Some(num / den)
    }
}

fn functionals(j: &KJet) -> Functionals {
    let (k, k1, k2, k3) = (j.k, j.d1, j.d2, j.d3);
    // phi' = (2k'^2 - k k'') / k^3, phi'' = (6 k k' k'' - 6 k'^3 - k^2 k''') / k^4
    let phi_num = 2.0 * k1 * k1 - k * k2;
    Functionals {
        first: j.phi(),
        second: ratio(k2, k * k1).map(|a| a - 2.0 * k1 / (k * k)),
        penultimate: ratio(
            6.0 * k * k1 * k2 - 6.0 * k1.powi(3) - k * k * k3,
            k * k * phi_num,
        ),
        anderson: ratio(k2, k * k1),
        gomes: ratio(phi_num, k1 * k1),
    }
}

fn decaying(values: &[Option<f64>], failures: usize) -> Verdict {
    if let Some(v) = too_many_failures(values.len(), failures) {
        return v;
    }
    let present: Vec<f64> = values.iter().flatten().copied().collect();
    let (Some(&first), Some(&last)) = (present.first(), present.last()) else {
        return not_confirmed("no evaluable points");
    };
    if present.iter().all(|&v| v == 0.0) {
        return Verdict::ConfirmedDecaying;
    }
    if last.abs() < DECAY_ABS_BOUND && last.abs() < DECAY_SHRINK_FACTOR * first.abs() {
        Verdict::ConfirmedDecaying
    } else {
        not_confirmed(&format!(
            "terminal magnitude {:e} from initial {:e}",
            last.abs(),
            first.abs()
        ))
    }
}

fn limit(values: &[Option<f64>], failures: usize) -> Verdict {
    if let Some(v) = too_many_failures(values.len(), failures) {
        return v;
    }
    let present: Vec<f64> = values.iter().flatten().copied().collect();
    match present.as_slice() {
        [.., a, b] if (a - b).abs() <= LIMIT_REL_TOL * b.abs() => {
            Verdict::ConfirmedLimit { value: *b }
        }
        [.., a, b] => not_confirmed(&format!("last two values {a:e} and {b:e} disagree")),
        _ => not_confirmed("fewer than two evaluable points"),
    }
}

fn too_many_failures(n: usize, failures: usize) -> Option<Verdict> {
    (failures as f64 > MAX_FAILURE_SHARE * n as f64)
        .then(|| not_confirmed(&format!("{failures} of {n} points not evaluable")))
}

fn not_confirmed(reason: &str) -> Verdict {
    Verdict::NotConfirmed {
        reason: reason.to_string(),
    }
}

fn degenerate_error() -> ErrorInfo {
    ErrorInfo {
        code: "degenerate".into(),
        message: "0/0: k' vanishes identically at this point".into(),
    }
}

/// Evaluates the five functionals on `t_grid` and issues verdicts.
pub fn condition_sweep(model: &WeibullTypeModel, t_grid: &[f64]) -> Result<ConditionReport> {
    validate_diverging_grid(t_grid, MIN_GRID_POINTS, MIN_GRID_DECADES)?;
    if let Some(&t) = t_grid.iter().find(|&&t| t <= model.support_lower()) {
        return Err(Error::BelowSupport {
            x: t,
            lower: model.support_lower(),
        });
    }
    let n = t_grid.len();
    let mut seqs: [Vec<Option<f64>>; 5] = std::array::from_fn(|_| Vec::with_capacity(n));
    let mut fails = [0usize; 5];
    let mut failures = Vec::new();
    let mut max_err: Option<f64> = None;
    let mut path = if model.has_analytic_k() {
        DerivPath::Analytic
    } else {
        DerivPath::Numeric
    };
    const NAMES: [&str; 5] = [
        "first_order",
        "second_order",
        "penultimate_cond",
        "anderson",
        "gomes84",
    ];

    for &t in t_grid {
        match model.k_jet(t) {
            Ok(jet) => {
                path = jet.path;
                if let Some(e) = jet.error_estimates {
                    let m = e.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
                    max_err = Some(max_err.map_or(m, |x| x.max(m)));
                }
                let f = functionals(&jet);
                let vals = [Some(f.first), f.second, f.penultimate, f.anderson, f.gomes];
                for (i, v) in vals.into_iter().enumerate() {
                    let v = v.filter(|v| v.is_finite());
                    if v.is_none() {
                        fails[i] += 1;
                        failures.push(PointFailure {
                            t,
                            condition: NAMES[i],
                            error: degenerate_error(),
                        });
                    }
                    seqs[i].push(v);
                }
            }
            Err(e) => {
                for (i, s) in seqs.iter_mut().enumerate() {
                    s.push(None);
                    fails[i] += 1;
                    failures.push(PointFailure {
                        t,
                        condition: NAMES[i],
                        error: e.info(),
                    });
                }
            }
        }
    }

    let degenerate_all = |i: usize| {
        fails[i] == n
            && failures
                .iter()
                .filter(|f| f.condition == NAMES[i])
                .all(|f| f.error.code == "degenerate")
    };
    let verdict = |i: usize, v: Verdict| {
        if degenerate_all(i) {
            not_confirmed("degenerate: 0/0 at every point (k' vanishes identically)")
        } else {
            v
        }
    };
    let verdicts = Verdicts {
        first_order: decaying(&seqs[0], fails[0]),
        second_order: verdict(1, decaying(&seqs[1], fails[1])),
        penultimate_cond: verdict(2, decaying(&seqs[2], fails[2])),
        anderson: verdict(3, decaying(&seqs[3], fails[3])),
        gomes84: verdict(4, limit(&seqs[4], fails[4])),
    };
    let [first_order, second_order, penultimate_cond, anderson, gomes84] = seqs;
    Ok(ConditionReport {
        t_grid: t_grid.to_vec(),
        first_order,
        second_order,
        penultimate_cond,
        anderson,
        gomes84,
        verdicts,
        gomes84_theory: gomes84_closed_form(model.theta()).ok(),
        derivative_path: path,
        max_error_estimate: max_err,
        failures,
    })
}

/// `10^lo, ..., 10^hi` with `count` log-spaced points.
pub fn log_grid(lo_exp: f64, hi_exp: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|i| 10f64.powf(lo_exp + (hi_exp - lo_exp) * i as f64 / (count - 1) as f64))
        .collect()
}
