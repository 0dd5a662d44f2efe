//! Norming constants `b_n` (location) and `a_n` (scale) for block maxima.
//!
//! `b_n` is the level with `F(b_n) = exp(-1/n)`, i.e. `-log(-log F(b_n)) = log n`;
//! the asymptotic location is `H^{-1}(log n)`. The scale is `a_n = 1 / k(b_n)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::WeibullTypeModel;

/// The convention used for `b_n`, recorded in reports.
pub const LOCATION_CONVENTION: &str = "F(b_n) = exp(-1/n)";

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormingConstants {
    pub log_n: f64,
    pub b_exact: f64,
    pub b_asymptotic: f64,
    pub a_scale: f64,
}

pub(crate) fn check_log_n(log_n: f64) -> Result<()> {
    if log_n > 0.0 && log_n.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidBlockSize { log_n })
    }
}

/// `(b_exact, b_asymptotic)` for block size `n = exp(log_n)`.
pub fn location(model: &WeibullTypeModel, log_n: f64) -> Result<(f64, f64)> {
    check_log_n(log_n)?;
    let b_exact = model.level_inverse(log_n)?;
    let b_asymptotic = model.cumulative_hazard_inverse(log_n)?;
    Ok((b_exact, b_asymptotic))
}

/// `a = 1 / k(b)`.
pub fn scale(model: &WeibullTypeModel, b: f64) -> Result<f64> {
    Ok(1.0 / model.k_function(b)?)
}

pub fn norming(model: &WeibullTypeModel, log_n: f64) -> Result<NormingConstants> {
    let (b_exact, b_asymptotic) = location(model, log_n)?;
    Ok(NormingConstants {
        log_n,
        b_exact,
        b_asymptotic,
        a_scale: scale(model, b_exact)?,
    })
}
