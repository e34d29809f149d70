//! Transcendental float methods for `no_std` builds.
//!
//! Without `std` the inherent `f64` math methods are unavailable, so this
//! extension trait routes them through `libm`. Under `std` the inherent
//! methods take precedence during method resolution and the trait is unused.

#[cfg(not(feature = "std"))]
pub(crate) trait FloatExt: Sized {
    fn exp(self) -> Self;
    fn exp_m1(self) -> Self;
    fn ln(self) -> Self;
    fn ln_1p(self) -> Self;
    fn sqrt(self) -> Self;
    fn powi(self, n: i32) -> Self;
}

#[cfg(not(feature = "std"))]
impl FloatExt for f64 {
    fn exp(self) -> f64 {
        libm::exp(self)
    }
    fn exp_m1(self) -> f64 {
        libm::expm1(self)
    }
    fn ln(self) -> f64 {
        libm::log(self)
    }
    fn ln_1p(self) -> f64 {
        libm::log1p(self)
    }
    fn sqrt(self) -> f64 {
        libm::sqrt(self)
    }
    fn powi(self, n: i32) -> f64 {
        libm::pow(self, n as f64)
    }
}
