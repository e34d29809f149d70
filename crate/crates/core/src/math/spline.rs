//! Natural cubic spline with analytic first and second derivatives.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::prelude::*;

/// Natural cubic spline through `(x_i, y_i)` knots.
///
/// Inside the knot range the spline is C2; outside it continues linearly
/// with the one-sided boundary slope (second derivative zero, consistent
/// with the natural boundary condition).
#[derive(Debug, Clone, PartialEq)]
pub struct CubicSpline {
    xs: Vec<f64>,
    ys: Vec<f64>,
    /// Second derivatives at the knots (zero at both ends).
    m: Vec<f64>,
}

impl CubicSpline {
    /// Fits a natural cubic spline. Requires at least two knots with
    /// strictly increasing, finite abscissae.
    pub fn natural(xs: &[f64], ys: &[f64]) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::InvalidInput("spline knot arrays differ in length".into()));
        }
        if xs.len() < 2 {
            return Err(Error::InsufficientQuotes { need: 2, got: xs.len() });
        }
        for (i, w) in xs.windows(2).enumerate() {
            if !(w[1] > w[0]) {
                return Err(Error::InvalidInput(alloc::format!(
                    "spline abscissae not strictly increasing at index {i}"
                )));
            }
        }
        if xs.iter().chain(ys.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("spline knots must be finite".into()));
        }
        let m = second_derivatives(xs, ys);
        Ok(Self { xs: xs.to_vec(), ys: ys.to_vec(), m })
    }

    pub fn x_min(&self) -> f64 {
        self.xs[0]
    }

    pub fn x_max(&self) -> f64 {
        *self.xs.last().unwrap()
    }

    fn segment(&self, x: f64) -> usize {
        // Index i such that x in [xs[i], xs[i+1]); clamped to valid segments.
        let n = self.xs.len();
        self.xs.partition_point(|&k| k < x).clamp(1, n - 1) - 1
    }

    /// Spline value, linearly extrapolated outside the knot range.
    pub fn value(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if x <= self.xs[0] {
            return self.ys[0] + self.boundary_slope_left() * (x - self.xs[0]);
        }
        if x >= self.xs[n - 1] {
            return self.ys[n - 1] + self.boundary_slope_right() * (x - self.xs[n - 1]);
        }
        let i = self.segment(x);
        let h = self.xs[i + 1] - self.xs[i];
        let a = (self.xs[i + 1] - x) / h;
        let b = (x - self.xs[i]) / h;
        a * self.ys[i]
            + b * self.ys[i + 1]
            + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / 6.0
    }

    /// First derivative, constant outside the knot range.
    pub fn derivative(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if x <= self.xs[0] {
            return self.boundary_slope_left();
        }
        if x >= self.xs[n - 1] {
            return self.boundary_slope_right();
        }
        let i = self.segment(x);
        let h = self.xs[i + 1] - self.xs[i];
        let a = (self.xs[i + 1] - x) / h;
        let b = (x - self.xs[i]) / h;
        (self.ys[i + 1] - self.ys[i]) / h
            + ((3.0 * b * b - 1.0) * self.m[i + 1] - (3.0 * a * a - 1.0) * self.m[i]) * h / 6.0
    }

    /// Second derivative, zero outside the knot range.
    pub fn second_derivative(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if x <= self.xs[0] || x >= self.xs[n - 1] {
            return 0.0;
        }
        let i = self.segment(x);
        let h = self.xs[i + 1] - self.xs[i];
        let a = (self.xs[i + 1] - x) / h;
        let b = (x - self.xs[i]) / h;
        a * self.m[i] + b * self.m[i + 1]
    }

    /// One-sided slope at the left boundary.
    pub fn boundary_slope_left(&self) -> f64 {
        let h = self.xs[1] - self.xs[0];
        (self.ys[1] - self.ys[0]) / h - h * self.m[1] / 6.0
    }

    /// One-sided slope at the right boundary.
    pub fn boundary_slope_right(&self) -> f64 {
        let n = self.xs.len();
        let h = self.xs[n - 1] - self.xs[n - 2];
        (self.ys[n - 1] - self.ys[n - 2]) / h + h * self.m[n - 2] / 6.0
    }
}

/// Second derivatives for the natural spline (Thomas algorithm).
fn second_derivatives(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    if n <= 2 {
        return vec![0.0; n];
    }

    let mut lower = vec![0.0; n];
    let mut diag = vec![1.0; n];
    let mut upper = vec![0.0; n];
    let mut rhs = vec![0.0; n];

    for i in 1..(n - 1) {
        let h_prev = x[i] - x[i - 1];
        let h_next = x[i + 1] - x[i];
        lower[i] = h_prev;
        diag[i] = 2.0 * (h_prev + h_next);
        upper[i] = h_next;
        rhs[i] = 6.0 * ((y[i + 1] - y[i]) / h_next - (y[i] - y[i - 1]) / h_prev);
    }

    for i in 1..n {
        let w = lower[i] / diag[i - 1];
        diag[i] -= w * upper[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }

    let mut m = vec![0.0; n];
    m[n - 1] = rhs[n - 1] / diag[n - 1];
    for i in (0..(n - 1)).rev() {
        m[i] = (rhs[i] - upper[i] * m[i + 1]) / diag[i];
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interpolates_knots_exactly() {
        let xs = [-0.2, 0.0, 0.2, 0.5];
        let ys = [0.0625, 0.04, 0.0484, 0.06];
        let s = CubicSpline::natural(&xs, &ys).unwrap();
        for (x, y) in xs.iter().zip(ys.iter()) {
            assert!((s.value(*x) - y).abs() < 1e-15, "knot at {x}");
        }
    }

    #[test]
    fn reproduces_straight_line() {
        let xs: Vec<f64> = (0..6).map(|i| i as f64 * 0.3).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 - 0.5 * x).collect();
        let s = CubicSpline::natural(&xs, &ys).unwrap();
        for i in 0..100 {
            let x = -0.5 + i as f64 * 0.03;
            assert!((s.value(x) - (2.0 - 0.5 * x)).abs() < 1e-13);
            assert!((s.derivative(x) + 0.5).abs() < 1e-13);
            assert!(s.second_derivative(x).abs() < 1e-12);
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let xs = [-0.4, -0.2, -0.05, 0.0, 0.15, 0.3, 0.45];
        let ys = [0.09, 0.066, 0.052, 0.05, 0.055, 0.068, 0.09];
        let s = CubicSpline::natural(&xs, &ys).unwrap();
        let h = 1e-6;
        for i in 0..80 {
            let x = -0.38 + i as f64 * 0.01;
            let fd1 = (s.value(x + h) - s.value(x - h)) / (2.0 * h);
            let fd2 = (s.value(x + h) - 2.0 * s.value(x) + s.value(x - h)) / (h * h);
            assert!((s.derivative(x) - fd1).abs() < 1e-8, "d1 at {x}");
            assert!((s.second_derivative(x) - fd2).abs() < 1e-3, "d2 at {x}");
        }
    }

    #[test]
    fn extrapolates_linearly() {
        let xs = [0.0, 1.0, 2.0];
        let ys = [1.0, 2.0, 1.5];
        let s = CubicSpline::natural(&xs, &ys).unwrap();
        let sl = s.boundary_slope_left();
        let sr = s.boundary_slope_right();
        assert!((s.value(-1.0) - (1.0 - sl)).abs() < 1e-14);
        assert!((s.value(3.0) - (1.5 + sr)).abs() < 1e-14);
        assert_eq!(s.second_derivative(-1.0), 0.0);
        assert_eq!(s.second_derivative(3.0), 0.0);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(CubicSpline::natural(&[0.0], &[1.0]).is_err());
        assert!(CubicSpline::natural(&[0.0, 0.0], &[1.0, 2.0]).is_err());
        assert!(CubicSpline::natural(&[0.0, 1.0], &[1.0, f64::NAN]).is_err());
    }
}
