//! Standard normal density and distribution function.
//!
//! The distribution function goes through `libm::erfc`, which is accurate to
//! a few ulp across the whole tail. The denominators of the local-volatility
//! expressions amplify tail errors, so the usual polynomial CDF
//! approximations (1e-7 absolute) are not good enough here.

use crate::math::prelude::*;

/// 1 / sqrt(2 pi)
const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;
/// 1 / sqrt(2)
const FRAC_1_SQRT_2: f64 = core::f64::consts::FRAC_1_SQRT_2;

/// Standard normal probability density.
pub fn norm_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() * FRAC_1_SQRT_2PI
}

/// Standard normal cumulative distribution function.
pub fn norm_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}
