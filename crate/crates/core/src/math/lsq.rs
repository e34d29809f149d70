//! Damped least squares (Levenberg-Marquardt) for small dense problems.
//!
//! The backbone fit has three free parameters and a handful of residuals,
//! so a hand-rolled solver with a numerical Jacobian and a Gaussian
//! elimination on the normal equations is all that is needed.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::prelude::*;

/// Options for [`levenberg_marquardt`].
#[derive(Debug, Clone, Copy)]
pub struct LsqOptions {
    pub max_iterations: usize,
    /// Stop when the cost improvement falls below this relative threshold.
    pub cost_tolerance: f64,
    /// Stop when the step norm falls below this threshold.
    pub step_tolerance: f64,
}

impl Default for LsqOptions {
    fn default() -> Self {
        Self { max_iterations: 200, cost_tolerance: 1e-14, step_tolerance: 1e-12 }
    }
}

/// Solver output: parameters at the best cost seen.
#[derive(Debug, Clone)]
pub struct LsqFit {
    pub params: Vec<f64>,
    pub cost: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Minimizes `0.5 * |r(p)|^2` starting from `x0`.
///
/// `residuals` fills the slice and returns `false` when the parameters are
/// outside the admissible region; such steps are rejected and the damping
/// increased, which keeps the iterates inside the region without explicit
/// bounds.
pub fn levenberg_marquardt<F>(
    mut residuals: F,
    x0: &[f64],
    n_residuals: usize,
    opts: &LsqOptions,
) -> Result<LsqFit>
where
    F: FnMut(&[f64], &mut [f64]) -> bool,
{
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut r = vec![0.0; n_residuals];
    if !residuals(&x, &mut r) || r.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameterRegion(
            "initial guess outside admissible region".into(),
        ));
    }
    let mut cost = 0.5 * dot(&r, &r);
    let mut lambda = 1e-3;
    let mut jac = vec![0.0; n_residuals * n];
    let mut r_trial = vec![0.0; n_residuals];
    let mut converged = false;
    let mut iterations = 0;

    for iter in 0..opts.max_iterations {
        iterations = iter + 1;
        // Forward-difference Jacobian.
        for k in 0..n {
            let h = 1e-7 * (1.0 + x[k].abs());
            let mut xp = x.clone();
            xp[k] += h;
            if !residuals(&xp, &mut r_trial) || r_trial.iter().any(|v| !v.is_finite()) {
                // Try the other side before giving up on this column.
                xp[k] = x[k] - h;
                if !residuals(&xp, &mut r_trial) {
                    return Err(Error::NonConvergence { iterations, cost });
                }
                for i in 0..n_residuals {
                    jac[i * n + k] = (r[i] - r_trial[i]) / h;
                }
            } else {
                for i in 0..n_residuals {
                    jac[i * n + k] = (r_trial[i] - r[i]) / h;
                }
            }
        }

        // Normal equations: (J^T J + lambda * diag(J^T J)) step = -J^T r
        let mut jtj = vec![0.0; n * n];
        let mut jtr = vec![0.0; n];
        for i in 0..n_residuals {
            for a in 0..n {
                jtr[a] += jac[i * n + a] * r[i];
                for b in 0..n {
                    jtj[a * n + b] += jac[i * n + a] * jac[i * n + b];
                }
            }
        }

        let mut improved = false;
        for _ in 0..24 {
            let mut a = jtj.clone();
            for k in 0..n {
                let d = jtj[k * n + k];
                a[k * n + k] += lambda * if d > 0.0 { d } else { 1.0 };
            }
            let rhs: Vec<f64> = jtr.iter().map(|v| -v).collect();
            let step = match solve_dense(&mut a, &rhs) {
                Some(s) => s,
                None => {
                    lambda *= 10.0;
                    continue;
                }
            };
            let x_trial: Vec<f64> = x.iter().zip(&step).map(|(a, b)| a + b).collect();
            if residuals(&x_trial, &mut r_trial) && r_trial.iter().all(|v| v.is_finite()) {
                let cost_trial = 0.5 * dot(&r_trial, &r_trial);
                if cost_trial < cost {
                    let rel_drop = (cost - cost_trial) / cost.max(1e-300);
                    let step_norm = dot(&step, &step).sqrt();
                    x = x_trial;
                    r.copy_from_slice(&r_trial);
                    cost = cost_trial;
                    lambda = (lambda * 0.3).max(1e-12);
                    improved = true;
                    if rel_drop < opts.cost_tolerance || step_norm < opts.step_tolerance {
                        converged = true;
                    }
                    break;
                }
            }
            lambda *= 10.0;
        }

        if converged {
            break;
        }
        if !improved {
            // Stuck: either at a minimum or the damping saturated.
            converged = cost.is_finite();
            break;
        }
    }

    Ok(LsqFit { params: x, cost, iterations, converged })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Gaussian elimination with partial pivoting on a row-major n x n system.
fn solve_dense(a: &mut [f64], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    let mut x = b.to_vec();
    for col in 0..n {
        let mut pivot = col;
        for row in (col + 1)..n {
            if a[row * n + col].abs() > a[pivot * n + col].abs() {
                pivot = row;
            }
        }
        if a[pivot * n + col].abs() < 1e-300 {
            return None;
        }
        if pivot != col {
            for k in 0..n {
                a.swap(col * n + k, pivot * n + k);
            }
            x.swap(col, pivot);
        }
        let d = a[col * n + col];
        for row in (col + 1)..n {
            let factor = a[row * n + col] / d;
            if factor == 0.0 {
                continue;
            }
            for k in col..n {
                a[row * n + k] -= factor * a[col * n + k];
            }
            x[row] -= factor * x[col];
        }
    }
    for col in (0..n).rev() {
        for k in (col + 1)..n {
            x[col] -= a[col * n + k] * x[k];
        }
        x[col] /= a[col * n + col];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_linear_system() {
        let mut a = vec![2.0, 1.0, -1.0, -3.0, -1.0, 2.0, -2.0, 1.0, 2.0];
        let b = [8.0, -11.0, -3.0];
        let x = solve_dense(&mut a, &b).unwrap();
        let expected = [2.0, 3.0, -1.0];
        for (got, want) in x.iter().zip(expected.iter()) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn fits_exponential_decay() {
        // Data from y = 2.5 * exp(-1.3 t) + 0.4, recover the three parameters.
        let ts: Vec<f64> = (0..20).map(|i| i as f64 * 0.25).collect();
        let truth = [2.5, 1.3, 0.4];
        let data: Vec<f64> = ts.iter().map(|t| truth[0] * (-truth[1] * t).exp() + truth[2]).collect();
        let fit = levenberg_marquardt(
            |p, out| {
                if p[1] < 0.0 {
                    return false;
                }
                for (i, t) in ts.iter().enumerate() {
                    out[i] = p[0] * (-p[1] * t).exp() + p[2] - data[i];
                }
                true
            },
            &[1.0, 1.0, 0.0],
            ts.len(),
            &LsqOptions::default(),
        )
        .unwrap();
        assert!(fit.converged, "no convergence: {fit:?}");
        for (got, want) in fit.params.iter().zip(truth.iter()) {
            assert!((got - want).abs() < 1e-6, "got {got}, want {want}");
        }
    }

    #[test]
    fn rejects_invalid_start() {
        let err = levenberg_marquardt(|_, _| false, &[1.0], 1, &LsqOptions::default());
        assert!(err.is_err());
    }
}
