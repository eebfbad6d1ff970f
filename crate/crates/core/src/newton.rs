//! Damped Newton iteration with finite-difference Jacobians.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug)]
pub struct NewtonOptions {
    /// Converged once the Euclidean residual norm is at or below this.
    pub tol: f64,
    pub max_iter: usize,
    /// Relative forward-difference step.
    pub fd_step: f64,
    /// Smallest damping factor tried in the backtracking line search.
    pub min_damping: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self { tol: 1e-10, max_iter: 40, fd_step: 1e-7, min_damping: 1.0 / 1024.0 }
    }
}

#[derive(Clone, Debug)]
pub struct NewtonOutcome {
    pub x: Vec<f64>,
    pub residual: Vec<f64>,
    pub residual_norm: f64,
    pub iterations: usize,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn fd_increment(x: f64, rel: f64) -> f64 {
    rel * x.abs().max(1.0)
}

/// Forward-difference Jacobian `∂f_i/∂x_j` around `x` with `f(x) = f0`.
pub fn jacobian_forward<F>(f: &mut F, x: &[f64], f0: &[f64], rel: f64) -> Result<DMatrix<f64>>
where
    F: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    let n = x.len();
    let m = f0.len();
    let mut jac = DMatrix::zeros(m, n);
    let mut xp = x.to_vec();
    for j in 0..n {
        let h = fd_increment(x[j], rel);
        xp[j] = x[j] + h;
        let fp = f(&xp)?;
        xp[j] = x[j];
        for i in 0..m {
            jac[(i, j)] = (fp[i] - f0[i]) / h;
        }
    }
    Ok(jac)
}

/// Central-difference Jacobian; second-order accurate, twice the cost.
pub fn jacobian_central<F>(f: &mut F, x: &[f64], rel: f64) -> Result<DMatrix<f64>>
where
    F: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    let n = x.len();
    let mut cols = Vec::with_capacity(n);
    let mut xp = x.to_vec();
    for j in 0..n {
        let h = fd_increment(x[j], rel);
        xp[j] = x[j] + h;
        let fp = f(&xp)?;
        xp[j] = x[j] - h;
        let fm = f(&xp)?;
        xp[j] = x[j];
        cols.push(fp.iter().zip(&fm).map(|(p, q)| (p - q) / (2.0 * h)).collect::<Vec<_>>());
    }
    let m = cols.first().map_or(0, Vec::len);
    Ok(DMatrix::from_fn(m, n, |i, j| cols[j][i]))
}

/// Solves `f(x) = 0` for square systems.
pub fn solve<F>(mut f: F, x0: &[f64], opts: &NewtonOptions) -> Result<NewtonOutcome>
where
    F: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    let mut x = x0.to_vec();
    let mut fx = f(&x)?;
    if fx.len() != x.len() {
        return Err(Error::DimensionMismatch { expected: x.len(), got: fx.len() });
    }
    let mut fnorm = norm(&fx);

    for it in 0..=opts.max_iter {
        if fnorm <= opts.tol {
            return Ok(NewtonOutcome { x, residual: fx, residual_norm: fnorm, iterations: it });
        }
        if it == opts.max_iter {
            break;
        }
        let jac = jacobian_forward(&mut f, &x, &fx, opts.fd_step)?;
        let rhs = -DVector::from_column_slice(&fx);
        let step = jac.lu().solve(&rhs).ok_or(Error::SingularJacobian { last_norm: fnorm })?;
        if step.iter().any(|s| !s.is_finite()) {
            return Err(Error::SingularJacobian { last_norm: fnorm });
        }

        let mut lambda = 1.0;
        loop {
            let trial: Vec<f64> = x.iter().zip(step.iter()).map(|(xi, si)| xi + lambda * si).collect();
            let accepted = match f(&trial) {
                Ok(ft) => {
                    let n = norm(&ft);
                    if n.is_finite() && n < (1.0 - 0.25 * lambda) * fnorm.max(f64::MIN_POSITIVE) {
                        x = trial;
                        fx = ft;
                        fnorm = n;
                        true
                    } else {
                        false
                    }
                }
                Err(_) => false,
            };
            if accepted {
                break;
            }
            lambda *= 0.5;
            if lambda < opts.min_damping {
                return Err(Error::NoConvergence { iterations: it + 1, last_norm: fnorm });
            }
        }
    }
    Err(Error::NoConvergence { iterations: opts.max_iter, last_norm: fnorm })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rosen(x: &[f64]) -> Result<Vec<f64>> {
        Ok(vec![10.0 * (x[1] - x[0] * x[0]), 1.0 - x[0]])
    }

    #[test]
    fn solves_rosenbrock_system() {
        let out = solve(rosen, &[-1.2, 1.0], &NewtonOptions::default()).unwrap();
        assert!((out.x[0] - 1.0).abs() < 1e-9);
        assert!((out.x[1] - 1.0).abs() < 1e-9);
        assert!(out.residual_norm <= 1e-10);
    }

    #[test]
    fn already_converged_takes_zero_iterations() {
        let out = solve(rosen, &[1.0, 1.0], &NewtonOptions::default()).unwrap();
        assert_eq!(out.iterations, 0);
    }

    #[test]
    fn no_root_reports_no_convergence() {
        let r = solve(|x: &[f64]| Ok(vec![x[0] * x[0] + 1.0]), &[0.3], &NewtonOptions::default());
        assert!(matches!(r, Err(Error::NoConvergence { .. }) | Err(Error::SingularJacobian { .. })));
    }

    #[test]
    fn forward_and_central_jacobians_agree() {
        let mut f = |x: &[f64]| Ok(vec![x[0].sin() * x[1], x[0] * x[0] - x[1].exp()]);
        let x = [0.7, -0.3];
        let f0 = f(&x).unwrap();
        let jf = jacobian_forward(&mut f, &x, &f0, 1e-7).unwrap();
        let jc = jacobian_central(&mut f, &x, 1e-5).unwrap();
        let exact = [[0.7f64.cos() * -0.3, 0.7f64.sin()], [1.4, -(-0.3f64).exp()]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((jc[(i, j)] - exact[i][j]).abs() < 1e-9);
                assert!((jf[(i, j)] - exact[i][j]).abs() < 1e-6);
            }
        }
    }
}
