//! Shared numerical utilities: normal distribution, cubic splines, and a
//! small damped least-squares solver.

mod float;
pub mod lsq;
pub mod normal;
pub mod spline;

/// Internal prelude bringing `libm`-backed float methods into scope on
/// `no_std` builds. Empty under `std`.
pub(crate) mod prelude {
    #[cfg(not(feature = "std"))]
    pub(crate) use super::float::FloatExt as _;
}

use prelude::*;

/// Numerically stable `(1 - exp(-x)) / x`, equal to 1 at `x = 0`.
pub fn one_minus_exp_over(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        -(-x).exp_m1() / x
    }
}
