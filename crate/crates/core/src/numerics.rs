//! Numerical kernel: Richardson-extrapolated central differences, a
//! safeguarded root finder for increasing functions, and log-space tail
//! arithmetic.

use crate::error::{Error, Result};

/// Settings for [`derivative`].
#[derive(Debug, Clone, PartialEq)]
pub struct DiffConfig {
    /// Starting step as a fraction of `max(|x|, min_abs_scale)`. `None`
    /// picks `2 * eps^(1 / (order + 2 + 2 * richardson_levels))`, which
    /// balances the extrapolated truncation error against round-off at the
    /// finest step.
    pub base_step_scale: Option<f64>,
    /// Number of step halvings folded into the Richardson tableau.
    pub richardson_levels: usize,
    pub max_order: usize,
    /// Absolute floor applied to `|x|` when sizing the step.
    pub min_abs_scale: f64,
    /// When set, estimates whose error exceeds it are flagged `low_confidence`.
    pub tolerance: Option<f64>,
}

impl Default for DiffConfig {
    fn default() -> Self {
        DiffConfig {
            base_step_scale: None,
            richardson_levels: 3,
            max_order: 4,
            min_abs_scale: 1.0,
            tolerance: None,
        }
    }
}

impl DiffConfig {
    pub fn with_levels(mut self, levels: usize) -> Self {
        self.richardson_levels = levels;
        self
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tolerance = Some(tol);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(s) = self.base_step_scale {
            if !(s > 0.0 && s.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "base_step_scale must be positive, got {s}"
                )));
            }
        }
        if self.richardson_levels < 1 {
            return Err(Error::InvalidParameter(
                "richardson_levels must be at least 1".into(),
            ));
        }
        if !(1..=4).contains(&self.max_order) {
            return Err(Error::InvalidParameter(format!(
                "max_order must be in [1, 4], got {}",
                self.max_order
            )));
        }
        if !(self.min_abs_scale > 0.0) {
            return Err(Error::InvalidParameter(
                "min_abs_scale must be positive".into(),
            ));
        }
        Ok(())
    }

    fn step_scale(&self, order: usize) -> f64 {
        self.base_step_scale.unwrap_or_else(|| {
            2.0 * f64::EPSILON.powf(1.0 / (order + 2 + 2 * self.richardson_levels) as f64)
        })
    }
}

/// A derivative estimate with the magnitude of the last Richardson correction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivativeEstimate {
    pub value: f64,
    pub error_estimate: f64,
    pub low_confidence: bool,
}

/// Second-order central difference for derivative `order` with step `h`.
fn central_difference<F: Fn(f64) -> f64>(f: &F, x: f64, order: usize, h: f64) -> Result<f64> {
    let eval = |t: f64| {
        let v = f(t);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::StencilFailure { x })
        }
    };
    let d = match order {
        1 => (eval(x + h)? - eval(x - h)?) / (2.0 * h),
        2 => (eval(x + h)? - 2.0 * eval(x)? + eval(x - h)?) / (h * h),
        3 => {
            (eval(x + 2.0 * h)? - 2.0 * eval(x + h)? + 2.0 * eval(x - h)? - eval(x - 2.0 * h)?)
                / (2.0 * h * h * h)
        }
        4 => {
            (eval(x + 2.0 * h)? - 4.0 * eval(x + h)? + 6.0 * eval(x)? - 4.0 * eval(x - h)?
                + eval(x - 2.0 * h)?)
                / (h * h * h * h)
        }
        _ => unreachable!("order validated by caller"),
    };
    Ok(d)
}

/// Estimates the `order`-th derivative of `f` at `x`.
///
/// Central differences are evaluated at `richardson_levels + 1` successively
/// halved steps and combined in a Richardson tableau, eliminating the even
/// powers of `h` in the truncation error. The error estimate is the gap
/// between the final two diagonal entries.
pub fn derivative<F: Fn(f64) -> f64>(
    f: F,
    x: f64,
    order: usize,
    cfg: &DiffConfig,
) -> Result<DerivativeEstimate> {
    cfg.validate()?;
    if order == 0 || order > cfg.max_order {
        return Err(Error::InvalidParameter(format!(
            "derivative order {order} outside [1, {}]",
            cfg.max_order
        )));
    }
    let h0 = cfg.step_scale(order) * x.abs().max(cfg.min_abs_scale);
    let levels = cfg.richardson_levels;
    let mut prev: Vec<f64> = Vec::with_capacity(levels + 1);
    let mut last_diag = f64::NAN;
    let mut diag = f64::NAN;
    for i in 0..=levels {
        let h = h0 / f64::powi(2.0, i as i32);
        let mut row = Vec::with_capacity(i + 1);
        row.push(central_difference(&f, x, order, h)?);
        for j in 1..=i {
            let factor = f64::powi(4.0, j as i32) - 1.0;
            let v = row[j - 1] + (row[j - 1] - prev[j - 1]) / factor;
            row.push(v);
        }
        last_diag = diag;
        diag = row[i];
        prev = row;
    }
    let error_estimate = (diag - last_diag).abs();
    let low_confidence = cfg.tolerance.is_some_and(|tol| !(error_estimate <= tol));
    Ok(DerivativeEstimate {
        value: diag,
        error_estimate,
        low_confidence,
    })
}

/// A search interval `[lo, hi]` with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    lo: f64,
    hi: f64,
}

impl Bracket {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo < hi && lo.is_finite() && hi.is_finite() {
            Ok(Bracket { lo, hi })
        } else {
            Err(Error::InvalidParameter(format!(
                "bracket requires finite lo < hi, got [{lo}, {hi}]"
            )))
        }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }
}

fn split_point(lo: f64, hi: f64) -> f64 {
    // Geometric split on wide positive brackets keeps the iteration count
    // logarithmic in the bracket ratio.
    if lo > 0.0 && hi / lo > 4.0 {
        (lo.sqrt() * hi.sqrt()).clamp(lo, hi)
    } else if hi < 0.0 && lo / hi > 4.0 {
        -((-lo).sqrt() * (-hi).sqrt())
    } else {
        lo + 0.5 * (hi - lo)
    }
}

/// Finds `x` in the bracket with `f(x) = target` for increasing `f`.
///
/// Secant steps are taken while they at least halve the bracket; otherwise
/// the next step bisects. Stops when `|f(x) - target| / max(1, |target|)`
/// falls below `rel_tol` or the bracket collapses to adjacent floats, in
/// which case the endpoint with the smaller residual is returned.
pub fn solve_increasing<F: Fn(f64) -> f64>(
    f: F,
    target: f64,
    bracket: Bracket,
    rel_tol: f64,
) -> Result<f64> {
    let (mut lo, mut hi) = (bracket.lo, bracket.hi);
    let eval = |x: f64| {
        let v = f(x) - target;
        if v.is_nan() {
            Err(Error::EvalFailure { x })
        } else {
            Ok(v)
        }
    };
    let mut flo = eval(lo)?;
    let mut fhi = eval(hi)?;
    if flo > 0.0 || fhi < 0.0 {
        return Err(Error::BracketMiss {
            target,
            f_lo: flo + target,
            f_hi: fhi + target,
        });
    }
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    let scale = target.abs().max(1.0);
    let mut use_secant = true;
    for _ in 0..400 {
        let width = hi - lo;
        let mid = split_point(lo, hi);
        let mut x = if use_secant && flo.is_finite() && fhi.is_finite() {
            lo - flo * (hi - lo) / (fhi - flo)
        } else {
            mid
        };
        if !(x > lo && x < hi) {
            x = mid;
        }
        if !(x > lo && x < hi) {
            break;
        }
        let fx = eval(x)?;
        if fx.abs() / scale <= rel_tol {
            return Ok(x);
        }
        if fx < 0.0 {
            lo = x;
            flo = fx;
        } else {
            hi = x;
            fhi = fx;
        }
        use_secant = hi - lo < 0.5 * width;
    }
    Ok(if flo.abs() <= fhi.abs() { lo } else { hi })
}

/// `H - (-log(-log F))` for `1 - F = exp(-H)`; strictly positive and close
/// to `exp(-H) / 2` once `H` is moderately large.
pub fn hazard_deficit(hazard: f64) -> Result<f64> {
    if !(hazard > 0.0) {
        return Err(Error::OutsideTailRegion { h: hazard });
    }
    let u = (-hazard).exp();
    let deficit = if u < 1e-4 {
        // -log1p(-u)/u = 1 + u/2 + u^2/3 + u^3/4 + ...
        (u * (0.5 + u * (1.0 / 3.0 + u * (0.25 + u * 0.2)))).ln_1p()
    } else {
        (-(-u).ln_1p() / u).ln()
    };
    Ok(deficit)
}

/// `-log(-log F)` for a tail `1 - F = exp(-H)`, evaluated without forming `F`.
pub fn log_neg_log_cdf_from_hazard(hazard: f64) -> Result<f64> {
    Ok(hazard - hazard_deficit(hazard)?)
}

/// Inverse of [`log_neg_log_cdf_from_hazard`]: the hazard `H` with
/// `-log(-log F) = level`, i.e. `H = -log(1 - exp(-exp(-level)))`.
pub fn hazard_at_level(level: f64) -> f64 {
    let eps = (-level).exp();
    if eps < 1e-5 {
        // -log(-expm1(-e)) = -log e - log(1 - e/2 + e^2/6 - ...)
        level + eps * (0.5 - eps / 24.0)
    } else {
        -(-(-eps).exp_m1()).ln()
    }
}

/// `log(F^n)` from `log(-log F)` and `log n`, i.e. `-exp(log n + log(-log F))`.
pub fn log_cdf_power(log_neg_log_f: f64, log_n: f64) -> f64 {
    -(log_n + log_neg_log_f).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cfg() -> DiffConfig {
        DiffConfig::default()
    }

    #[test]
    fn derivative_of_square_is_exact() {
        let d = derivative(|x| x * x, 3.0, 1, &cfg()).unwrap();
        assert!((d.value - 6.0).abs() < 1e-12);
        assert!(d.error_estimate < 1e-10);
    }

    #[test]
    fn second_derivative_of_exp_at_zero() {
        let d = derivative(f64::exp, 0.0, 2, &cfg()).unwrap();
        assert!((d.value - 1.0).abs() < 1e-8, "{d:?}");
    }

    #[test]
    fn first_derivative_of_sqrt() {
        let d = derivative(f64::sqrt, 100.0, 1, &cfg()).unwrap();
        assert!((d.value - 0.05).abs() < 1e-9, "{d:?}");
    }

    #[test]
    fn higher_orders_of_log() {
        let x: f64 = 50.0;
        let expect = [1.0 / x, -1.0 / (x * x), 2.0 / x.powi(3), -6.0 / x.powi(4)];
        for (order, want) in (1..=4).zip(expect) {
            let d = derivative(f64::ln, x, order, &cfg()).unwrap();
            let rel = (d.value - want).abs() / want.abs();
            assert!(rel < 1e-6, "order {order}: {} vs {want} ({rel})", d.value);
        }
    }

    #[test]
    fn stencil_failure_is_reported() {
        let err = derivative(f64::ln, 1e-3, 1, &cfg()).unwrap_err();
        assert_eq!(err.code(), "stencil_failure");
    }

    #[test]
    fn low_confidence_flag() {
        let noisy = |x: f64| (1e6 * x).sin() * 1e-3 + x;
        let d = derivative(noisy, 1.0, 2, &cfg().with_tolerance(1e-12)).unwrap();
        assert!(d.low_confidence);
        let d = derivative(|x| x * x, 1.0, 1, &cfg().with_tolerance(1e-6)).unwrap();
        assert!(!d.low_confidence);
    }

    #[test]
    fn order_above_max_is_rejected() {
        let c = DiffConfig {
            max_order: 2,
            ..cfg()
        };
        assert!(derivative(f64::exp, 0.0, 3, &c).is_err());
        assert!(derivative(f64::exp, 0.0, 0, &c).is_err());
        assert!(DiffConfig {
            richardson_levels: 0,
            ..cfg()
        }
        .validate()
        .is_err());
    }

    #[test]
    fn solver_examples() {
        let r = solve_increasing(f64::sqrt, 5.0, Bracket::new(0.0, 100.0).unwrap(), 1e-14).unwrap();
        assert!((r - 25.0).abs() < 1e-12);
        let r = solve_increasing(|x| x, 0.0, Bracket::new(-1.0, 1.0).unwrap(), 1e-14).unwrap();
        assert!(r.abs() < 1e-14);
        // Oracle: fixed-point iteration x = 10 - ln x at 50 digits.
        let r = solve_increasing(
            |x| x + x.ln(),
            10.0,
            Bracket::new(1.0, 20.0).unwrap(),
            1e-15,
        )
        .unwrap();
        assert!((r - 7.929_420_095_019_697).abs() < 1e-13, "{r}");
    }

    #[test]
    fn solver_errors() {
        let e = solve_increasing(f64::sqrt, 50.0, Bracket::new(0.0, 100.0).unwrap(), 1e-12)
            .unwrap_err();
        assert_eq!(e.code(), "bracket_miss");
        let e = solve_increasing(
            |x| if x > 0.5 { f64::NAN } else { x },
            0.7,
            Bracket::new(0.0, 1.0).unwrap(),
            1e-12,
        )
        .unwrap_err();
        assert_eq!(e.code(), "eval_failure");
        assert!(Bracket::new(1.0, 1.0).is_err());
    }

    #[test]
    fn solver_handles_huge_brackets() {
        let r = solve_increasing(
            |x| x.powf(0.25),
            316.0,
            Bracket::new(1.0, 1e300).unwrap(),
            1e-15,
        )
        .unwrap();
        assert!((r.powf(0.25) - 316.0).abs() < 1e-12);
    }

    #[test]
    fn log_neg_log_at_median() {
        let v = log_neg_log_cdf_from_hazard(std::f64::consts::LN_2).unwrap();
        assert!((v - 0.366_512_920_581_664_3).abs() < 1e-15);
    }

    #[test]
    fn log_neg_log_large_hazard() {
        let v = log_neg_log_cdf_from_hazard(50.0).unwrap();
        assert!(v <= 50.0 && v > 50.0 - 1e-13);
        let d = hazard_deficit(50.0).unwrap();
        assert!(d > 0.0 && d < 1e-20);
    }

    #[test]
    fn log_neg_log_matches_high_precision() {
        // 50-digit evaluation of -log(-log(1 - e^-2)).
        let v = log_neg_log_cdf_from_hazard(2.0).unwrap();
        assert!((v - 1.928_174_160_608_414_4).abs() < 1e-13, "{v}");
    }

    #[test]
    fn log_neg_log_rejects_nonpositive() {
        assert_eq!(
            log_neg_log_cdf_from_hazard(0.0).unwrap_err().code(),
            "outside_tail_region"
        );
        assert!(log_neg_log_cdf_from_hazard(700.0).unwrap().is_finite());
    }

    #[test]
    fn hazard_at_level_inverts() {
        for level in [-2.0, 0.0, 1.5, 8.0, 25.0, 300.0] {
            let h = hazard_at_level(level);
            let back = log_neg_log_cdf_from_hazard(h).unwrap();
            assert!(
                (back - level).abs() < 1e-13 * level.abs().max(1.0),
                "{level}: {back}"
            );
        }
    }

    #[test]
    fn cdf_power_examples() {
        let ln = 12.5;
        assert!((log_cdf_power(-ln, ln) + 1.0).abs() < 1e-15);
        assert_eq!(log_cdf_power(0.3, 0.0), -(0.3f64.exp()));
        let p = log_cdf_power(-100.0 + 2f64.ln(), 100.0).exp();
        assert!((p - (-2.0f64).exp()).abs() < 1e-14);
        assert_eq!(log_cdf_power(f64::NEG_INFINITY, 300.0), 0.0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn solve_recovers_target(p in 0.2f64..4.0, shift in -5.0f64..5.0, slope in 0.1f64..10.0, t in 0.0f64..1.0) {
            let f = |x: f64| slope * x.powf(p) + shift;
            let (lo, hi) = (0.0, 50.0);
            let target = f(lo) + t * (f(hi) - f(lo));
            let x = solve_increasing(f, target, Bracket::new(lo, hi).unwrap(), 1e-12).unwrap();
            prop_assert!((f(x) - target).abs() / target.abs().max(1.0) <= 1e-12);
        }
    }

    proptest! {
        #[test]
        fn polynomial_exactness(c in prop::collection::vec(-3.0f64..3.0, 5), x in -4.0f64..4.0, order in 1usize..=3) {
            // degree order + 1
            let deg = order + 1;
            let p = |t: f64| (0..=deg).map(|i| c[i] * t.powi(i as i32)).sum::<f64>();
            let exact: f64 = (order..=deg)
                .map(|i| {
                    let falling: f64 = (0..order).map(|m| (i - m) as f64).product();
                    c[i] * falling * x.powi((i - order) as i32)
                })
                .sum();
            let d = derivative(p, x, order, &DiffConfig::default()).unwrap();
            let scale = exact.abs().max(c.iter().map(|v| v.abs()).sum::<f64>() * x.abs().max(1.0).powi(deg as i32));
            // third differences are round-off bound at eps * |p| / h^3
            let tol = if order <= 2 { 1e-10 } else { 1e-9 };
            prop_assert!((d.value - exact).abs() <= tol * scale, "{} vs {}", d.value, exact);
        }

        #[test]
        fn cdf_power_identity_at_n_one(f in 1e-12f64..(1.0 - 1e-12)) {
            let v = (-f.ln()).ln();
            let back = log_cdf_power(v, 0.0).exp();
            prop_assert!((back - f).abs() <= 1e-15);
        }

        #[test]
        fn deficit_is_positive_and_small(h in 1e-3f64..700.0) {
            let d = hazard_deficit(h).unwrap();
            prop_assert!(d > 0.0 || (-h).exp() < 1e-300);
            if h >= 1.0 {
                prop_assert!(d < 2.0 * (-h).exp());
            }
        }
    }
}
