use serde::Serialize;

use crate::error::{Error, Result};

/// Shapes below this magnitude use the series-corrected Gumbel branch.
pub const GAMMA_SERIES_CUTOFF: f64 = 1e-8;

/// A point `x` of the GEV law with tail index `gamma`, inside its support.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GevPoint {
    gamma: f64,
    x: f64,
}

impl GevPoint {
    pub fn new(gamma: f64, x: f64) -> Result<Self> {
        if !(gamma.is_finite() && x.is_finite()) || !(1.0 + gamma * x > 0.0) {
            return Err(Error::OutsideSupport { gamma, x });
        }
        Ok(GevPoint { gamma, x })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    /// `(1 + gamma x)^(-1/gamma)`, or `exp(-x)` at `gamma = 0`.
    fn t(&self) -> f64 {
        let (g, x) = (self.gamma, self.x);
        if g.abs() < GAMMA_SERIES_CUTOFF {
            // log(1 + g x) / g = x - g x^2 / 2 + g^2 x^3 / 3 - ...
            (-(x * (1.0 - g * x * (0.5 - g * x / 3.0)))).exp()
        } else {
            (-(g * x).ln_1p() / g).exp()
        }
    }
}

/// `G_gamma(x) = exp(-(1 + gamma x)^(-1/gamma))`.
pub fn gev_cdf(p: &GevPoint) -> f64 {
    (-p.t()).exp()
}

/// `g_gamma(x) = G_gamma(x) (1 + gamma x)^(-1/gamma - 1)`.
pub fn gev_density(p: &GevPoint) -> f64 {
    let t = p.t();
    (-t).exp() * t / (1.0 + p.gamma * p.x)
}

/// Convenience for callers holding raw numbers.
pub fn gev_cdf_at(gamma: f64, x: f64) -> Result<f64> {
    Ok(gev_cdf(&GevPoint::new(gamma, x)?))
}

pub fn gev_density_at(gamma: f64, x: f64) -> Result<f64> {
    Ok(gev_density(&GevPoint::new(gamma, x)?))
}
