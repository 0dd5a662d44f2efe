//! The penultimate tail index `gamma_n = -k'(b_n) / k(b_n)^2` and the error
//! of approximating `F^n(a_n x + b_n)` by `G_0` versus `G_{gamma_n}`.

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::model::{gev_cdf_at, gev_density_at, Family, WeibullTypeModel};
use crate::norming::{check_log_n, norming, NormingConstants};

/// Denominators of the remainder ratio below this magnitude are skipped.
pub const REMAINDER_CUTOFF: f64 = 1e-12;

/// Sign class of `gamma_n` for large `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Frechet,
    WeibullClass,
    ExcludedThetaOne,
}

impl Classification {
    pub fn of_theta(theta: f64) -> Self {
        if theta > 1.0 {
            Classification::Frechet
        } else if theta < 1.0 {
            Classification::WeibullClass
        } else {
            Classification::ExcludedThetaOne
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Classification::Frechet => "frechet",
            Classification::WeibullClass => "weibull_class",
            Classification::ExcludedThetaOne => "excluded_theta_one",
        }
    }
}

/// Leading-order quantities, defined only for `theta != 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymptoticIndex {
    /// `(theta - 1) / log n`
    pub gamma_asymptotic: f64,
    /// `(1 - theta) / log n`
    pub rate_ultimate: f64,
    /// `2 theta (1 - theta) / (log n)^2`
    pub rate_penultimate: f64,
    /// `(1 - theta) / (log n)^2`, the leading term of `d gamma_n / d log n`.
    pub gamma_prime_asymptotic: f64,
}

pub fn asymptotic_index(theta: f64, log_n: f64) -> Result<AsymptoticIndex> {
    check_log_n(log_n)?;
    if theta == 1.0 {
        return Err(Error::ThetaOneExcluded);
    }
    Ok(AsymptoticIndex {
        gamma_asymptotic: (theta - 1.0) / log_n,
        rate_ultimate: (1.0 - theta) / log_n,
        rate_penultimate: 2.0 * theta * (1.0 - theta) / (log_n * log_n),
        gamma_prime_asymptotic: (1.0 - theta) / (log_n * log_n),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PenultimateIndex {
    pub log_n: f64,
    pub b_exact: f64,
    /// `-k'(b_n) / k(b_n)^2`
    pub gamma_exact: f64,
    pub classification: Classification,
    /// `(2(1/theta - 1)^2 - (1/theta - 1)(1/theta - 2)) / (b k(b))^2`
    pub gamma_prime_exact: f64,
    /// `d gamma_n / d log n = phi'(b_n) / k(b_n)`, from the k-jet.
    pub gamma_prime_direct: f64,
    #[serde(serialize_with = "asymptotic_or_error")]
    pub asymptotic: Option<AsymptoticIndex>,
}

fn asymptotic_or_error<S: Serializer>(
    v: &Option<AsymptoticIndex>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(a) => a.serialize(s),
        None => {
            #[derive(Serialize)]
            struct Failed {
                error: crate::error::ErrorInfo,
            }
            Failed {
                error: Error::ThetaOneExcluded.info(),
            }
            .serialize(s)
        }
    }
}

impl PenultimateIndex {
    /// The asymptotic part, or `theta_one_excluded`.
    pub fn asymptotic(&self) -> Result<AsymptoticIndex> {
        self.asymptotic.ok_or(Error::ThetaOneExcluded)
    }
}

/// The point where `gamma(t)` is evaluated: `H^{-1}(t)`, or for classical
/// models the level `-log(-log F(x)) = t`.
fn gamma_abscissa(model: &WeibullTypeModel, t: f64) -> Result<f64> {
    match model.family() {
        Family::Classical => model.level_inverse(t),
        _ => model.cumulative_hazard_inverse(t),
    }
}

/// `gamma(t) = phi(H^{-1}(t))`.
pub fn gamma_of_t(model: &WeibullTypeModel, t: f64) -> Result<f64> {
    let x = gamma_abscissa(model, t)?;
    Ok(model.k_jet(x)?.phi())
}

pub fn penultimate_index(model: &WeibullTypeModel, log_n: f64) -> Result<PenultimateIndex> {
    let c = norming(model, log_n)?;
    let jet = model.k_jet(c.b_exact)?;
    let a = 1.0 / model.theta();
    let bk = c.b_exact * jet.k;
    Ok(PenultimateIndex {
        log_n,
        b_exact: c.b_exact,
        gamma_exact: jet.phi(),
        classification: Classification::of_theta(model.theta()),
        gamma_prime_exact: (2.0 * (a - 1.0).powi(2) - (a - 1.0) * (a - 2.0)) / (bk * bk),
        gamma_prime_direct: jet.phi_prime() / jet.k,
        asymptotic: asymptotic_index(model.theta(), log_n).ok(),
    })
}

/// Which `gamma_n` feeds the penultimate error curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GammaMode {
    #[default]
    Exact,
    Asymptotic,
}

/// Equispaced grid `lo, ..., hi` with `count` points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl GridSpec {
    pub const MIN_COUNT: usize = 100;

    pub fn new(lo: f64, hi: f64, count: usize) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InsufficientGrid {
                reason: format!("need finite lo < hi, got {lo}..{hi}"),
            });
        }
        if count < Self::MIN_COUNT {
            return Err(Error::InsufficientGrid {
                reason: format!("need at least {} points, got {count}", Self::MIN_COUNT),
            });
        }
        Ok(GridSpec { lo, hi, count })
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        let step = (self.hi - self.lo) / (self.count - 1) as f64;
        (0..self.count).map(move |i| {
            if i + 1 == self.count {
                self.hi
            } else {
                self.lo + step * i as f64
            }
        })
    }
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            lo: -3.0,
            hi: 6.0,
            count: 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorComparison {
    pub log_n: f64,
    pub grid: GridSpec,
    pub gamma_mode: GammaMode,
    pub gamma_used: f64,
    pub norming: NormingConstants,
    /// `sup |F^n(a x + b) - G_0(x)|`
    pub sup_error_ultimate: f64,
    pub argmax_ultimate: f64,
    /// `sup |F^n(a x + b) - G_{gamma_n}(x)|` over points with `1 + gamma_n x > 0`.
    pub sup_error_penultimate: f64,
    pub argmax_penultimate: f64,
    /// Points dropped from the penultimate sup by the GEV support constraint.
    pub clipped_penultimate: usize,
    /// Points where `a x + b` falls below the model's tail region.
    pub unsupported_points: usize,
    /// `max |R(x) - 1|`; absent when every remainder denominator is degenerate.
    pub remainder_max_deviation: Option<f64>,
}

/// `F^n(a x + b)` on the grid, `None` where the model is not evaluable.
fn maxima_cdf(
    model: &WeibullTypeModel,
    c: &NormingConstants,
    grid: &GridSpec,
) -> Vec<(f64, Option<f64>)> {
    grid.points()
        .map(|x| {
            let y = c.a_scale * x + c.b_exact;
            let v = model.log_cdf_power_at(y, c.log_n).ok().map(f64::exp);
            (x, v)
        })
        .collect()
}

/// First point of maximal `|err|` and its value.
fn sup_abs(points: impl Iterator<Item = (f64, f64)>) -> Option<(f64, f64)> {
    let mut best: Option<(f64, f64)> = None;
    for (x, e) in points {
        let e = e.abs();
        if best.map_or(true, |(_, b)| e > b) {
            best = Some((x, e));
        }
    }
    best
}

pub fn error_comparison(
    model: &WeibullTypeModel,
    log_n: f64,
    grid: &GridSpec,
    mode: GammaMode,
) -> Result<ErrorComparison> {
    GridSpec::new(grid.lo, grid.hi, grid.count)?;
    let c = norming(model, log_n)?;
    let gamma = match mode {
        GammaMode::Exact => model.k_jet(c.b_exact)?.phi(),
        GammaMode::Asymptotic => asymptotic_index(model.theta(), log_n)?.gamma_asymptotic,
    };
    let values = maxima_cdf(model, &c, grid);
    let unsupported = values.iter().filter(|(_, v)| v.is_none()).count();
    let supported = || values.iter().filter_map(|&(x, v)| v.map(|v| (x, v)));

    let (argmax_u, sup_u) = sup_abs(
        supported().map(|(x, v)| (x, v - gev_cdf_at(0.0, x).expect("gumbel has full support"))),
    )
    .ok_or(Error::GridSupportEmpty)?;

    let mut clipped = 0;
    let (argmax_p, sup_p) = sup_abs(supported().filter_map(|(x, v)| match gev_cdf_at(gamma, x) {
        Ok(g) => Some((x, v - g)),
        Err(_) => {
            clipped += 1;
            None
        }
    }))
    .ok_or(Error::GridSupportEmpty)?;

    let remainder = remainder_from_values(model, &c, &values)
        .ok()
        .map(|r| r.max_deviation);
    Ok(ErrorComparison {
        log_n,
        grid: *grid,
        gamma_mode: mode,
        gamma_used: gamma,
        norming: c,
        sup_error_ultimate: sup_u,
        argmax_ultimate: argmax_u,
        sup_error_penultimate: sup_p,
        argmax_penultimate: argmax_p,
        clipped_penultimate: clipped,
        unsupported_points: unsupported,
        remainder_max_deviation: remainder,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RemainderProfile {
    pub max_deviation: f64,
    pub argmax: f64,
    pub points_used: usize,
}

fn remainder_from_values(
    model: &WeibullTypeModel,
    c: &NormingConstants,
    values: &[(f64, Option<f64>)],
) -> Result<RemainderProfile> {
    let jet = model.k_jet(c.b_exact)?;
    let slope = jet.d1 / (jet.k * jet.k);
    let mut used = 0;
    let best = sup_abs(values.iter().filter_map(|&(x, v)| {
        let v = v?;
        let denom = 0.5 * x * x * slope * gev_density_at(0.0, x).ok()?;
        if denom.abs() <= REMAINDER_CUTOFF {
            return None;
        }
        used += 1;
        let r = (v - gev_cdf_at(0.0, x).ok()?) / denom;
        Some((x, r - 1.0))
    }));
    let (argmax, max_deviation) = best.ok_or(Error::DegenerateProfile)?;
    Ok(RemainderProfile {
        max_deviation,
        argmax,
        points_used: used,
    })
}

/// `max |R(x) - 1|` with
/// `R(x) = (F^n(a x + b) - G_0(x)) / ((x^2 / 2) (k'(b) / k(b)^2) g_0(x))`.
pub fn remainder_profile(
    model: &WeibullTypeModel,
    log_n: f64,
    grid: &GridSpec,
) -> Result<RemainderProfile> {
    GridSpec::new(grid.lo, grid.hi, grid.count)?;
    let c = norming(model, log_n)?;
    let values = maxima_cdf(model, &c, grid);
    remainder_from_values(model, &c, &values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{build_model, pure_weibull, PURE_WEIBULL_THETAS};
    use std::collections::BTreeMap;

    fn named(name: &str) -> WeibullTypeModel {
        build_model(name, &BTreeMap::new()).unwrap()
    }

    #[test]
    fn gamma_of_t_examples() {
        assert_eq!(gamma_of_t(&named("gumbel-fixture"), 5.0).unwrap(), 0.0);
        let g = gamma_of_t(&pure_weibull(2.0).unwrap(), 25.0).unwrap();
        assert!((g / 0.04 - 1.0).abs() < 0.02, "{g}");
        let g = gamma_of_t(&pure_weibull(0.5).unwrap(), 25.0).unwrap();
        assert!((g / -0.02 - 1.0).abs() < 0.02, "{g}");
    }

    #[test]
    fn asymptotic_examples() {
        let a = asymptotic_index(2.0, 25.0).unwrap();
        assert_eq!(a.gamma_asymptotic, 0.04);
        assert_eq!(a.rate_ultimate, -0.04);
        assert_eq!(a.rate_penultimate, -0.0064);
        let a = asymptotic_index(0.5, 10.0).unwrap();
        assert_eq!(a.gamma_asymptotic, -0.05);
        assert_eq!(a.rate_penultimate, 0.005);
        assert_eq!(
            asymptotic_index(1.0, 10.0).unwrap_err(),
            Error::ThetaOneExcluded
        );
    }

    #[test]
    fn index_classification() {
        let p = penultimate_index(&pure_weibull(2.0).unwrap(), 25.0).unwrap();
        assert_eq!(p.classification, Classification::Frechet);
        let p = penultimate_index(&pure_weibull(0.5).unwrap(), 10.0).unwrap();
        assert_eq!(p.classification, Classification::WeibullClass);
        let p = penultimate_index(&named("exponential"), 10.0).unwrap();
        assert_eq!(p.classification, Classification::ExcludedThetaOne);
        assert_eq!(p.asymptotic().unwrap_err().code(), "theta_one_excluded");
        assert!(p.gamma_exact.is_finite());
        let json = serde_json::to_value(p).unwrap();
        assert_eq!(json["asymptotic"]["error"]["code"], "theta_one_excluded");
    }

    #[test]
    fn gamma_exact_sign_and_asymptote() {
        for theta in PURE_WEIBULL_THETAS {
            let m = pure_weibull(theta).unwrap();
            for l in [5.0, 10.0, 25.0, 50.0] {
                let g = penultimate_index(&m, l).unwrap().gamma_exact;
                assert_eq!(g > 0.0, theta > 1.0);
                assert!(g != 0.0);
            }
            let devs: Vec<f64> = [10.0, 20.0, 50.0]
                .iter()
                .map(|&l| {
                    let g = penultimate_index(&m, l).unwrap().gamma_exact;
                    (g * l / (theta - 1.0) - 1.0).abs()
                })
                .collect();
            assert!(
                devs[2] < 0.1 && devs[1] < devs[0] && devs[2] < devs[1],
                "{theta}: {devs:?}"
            );
        }
    }

    #[test]
    fn gamma_prime_closed_form_matches_derivative() {
        for theta in PURE_WEIBULL_THETAS {
            let m = pure_weibull(theta).unwrap();
            let l = 50.0;
            let p = penultimate_index(&m, l).unwrap();
            let h = 1e-3;
            let fd = (penultimate_index(&m, l + h).unwrap().gamma_exact
                - penultimate_index(&m, l - h).unwrap().gamma_exact)
                / (2.0 * h);
            assert!((p.gamma_prime_direct / fd - 1.0).abs() < 1e-5, "{theta}");
            let asym = p.asymptotic().unwrap().gamma_prime_asymptotic;
            assert!((p.gamma_prime_exact / asym - 1.0).abs() < 0.1, "{theta}");
            assert!((p.gamma_prime_direct / asym - 1.0).abs() < 0.1, "{theta}");
        }
    }

    #[test]
    fn gumbel_fixture_has_no_error() {
        let m = named("gumbel-fixture");
        for l in [5.0, 10.0, 40.0] {
            let e = error_comparison(&m, l, &GridSpec::default(), GammaMode::Exact).unwrap();
            assert_eq!(e.gamma_used, 0.0);
            // only the rounding of a x + b remains
            assert!(
                e.sup_error_ultimate < 1e-14 && e.sup_error_penultimate < 1e-14,
                "{e:?}"
            );
            assert_eq!(e.remainder_max_deviation, None);
        }
        assert_eq!(
            remainder_profile(&m, 10.0, &GridSpec::default()).unwrap_err(),
            Error::DegenerateProfile
        );
    }

    #[test]
    fn normal_penultimate_beats_ultimate() {
        let e = error_comparison(
            &named("normal"),
            1000f64.ln(),
            &GridSpec::default(),
            GammaMode::Exact,
        )
        .unwrap();
        assert!(e.sup_error_penultimate < e.sup_error_ultimate, "{e:?}");
        assert_eq!(e.unsupported_points, 0);
    }

    #[test]
    fn remainder_shrinks() {
        for theta in [0.5, 2.0] {
            let m = pure_weibull(theta).unwrap();
            let g = GridSpec::new(-2.0, 4.0, 400).unwrap();
            let r10 = remainder_profile(&m, 10.0, &g).unwrap().max_deviation;
            let r40 = remainder_profile(&m, 40.0, &g).unwrap().max_deviation;
            assert!(r40 < r10, "theta {theta}: {r10} {r40}");
        }
    }

    #[test]
    fn no_underflow_up_to_log_n_300() {
        for m in [
            pure_weibull(2.0).unwrap(),
            pure_weibull(0.5).unwrap(),
            named("normal"),
        ] {
            let e = error_comparison(&m, 300.0, &GridSpec::default(), GammaMode::Exact).unwrap();
            assert!(
                e.sup_error_ultimate.is_finite() && e.sup_error_ultimate < 0.05,
                "{}",
                m.label()
            );
        }
    }

    #[test]
    fn clipping_is_recorded() {
        let m = pure_weibull(0.25).unwrap();
        let e = error_comparison(&m, 5.0, &GridSpec::default(), GammaMode::Exact).unwrap();
        // gamma_n < 0 puts the GEV upper endpoint at -1/gamma_n
        let endpoint = -1.0 / e.gamma_used;
        let expected = GridSpec::default()
            .points()
            .filter(|&x| x >= endpoint)
            .count();
        assert_eq!(e.clipped_penultimate, expected);
    }

    #[test]
    fn grid_validation() {
        assert_eq!(
            GridSpec::new(0.0, 1.0, 99).unwrap_err().code(),
            "insufficient_grid"
        );
        assert!(GridSpec::new(1.0, 0.0, 200).is_err());
        let pts: Vec<f64> = GridSpec::default().points().collect();
        assert_eq!((pts[0], pts[999], pts.len()), (-3.0, 6.0, 1000));
    }

    #[test]
    fn asymptotic_mode_refuses_theta_one() {
        let e = error_comparison(
            &named("logistic"),
            10.0,
            &GridSpec::default(),
            GammaMode::Asymptotic,
        );
        assert_eq!(e.unwrap_err(), Error::ThetaOneExcluded);
        assert!(error_comparison(
            &named("logistic"),
            10.0,
            &GridSpec::default(),
            GammaMode::Exact
        )
        .is_ok());
    }
}
