//! The 3×3 toy matrix whose EP2 at `y = 1` hides an EP3 that a perturbation
//! `ε` of its (1,1) entry exposes through cube-root splitting.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix3};

/// ```text
/// ⎛ 2+ε  −1   0 ⎞
/// ⎜ 2+y  −1  −y ⎟
/// ⎝ −1    0   2 ⎠
/// ```
pub fn appendix_matrix(y: Complex64, eps: Complex64) -> CMatrix3 {
    let c = |v: f64| Complex64::new(v, 0.0);
    CMatrix3::new(c(2.0) + eps, c(-1.0), c(0.0), c(2.0) + y, c(-1.0), -y, c(-1.0), c(0.0), c(2.0))
}

/// Eigenvalues of [`appendix_matrix`], computed as `1 + μ` from the
/// characteristic polynomial of the shifted matrix so that the small
/// splittings near `μ = 0` keep full relative accuracy.
pub fn appendix_spectrum(y: Complex64, eps: Complex64) -> [Complex64; 3] {
    let shifted = appendix_matrix(y, eps) - CMatrix3::identity();
    let (c2, c1, c0) = linalg::characteristic(&shifted);
    linalg::cubic_roots(c2, c1, c0).map(|mu| mu + 1.0)
}

/// Unperturbed levels `1, 1 + √(1−y), 1 − √(1−y)`.
pub fn appendix_unperturbed(y: Complex64) -> [Complex64; 3] {
    let r = (1.0 - y).sqrt();
    let one = Complex64::new(1.0, 0.0);
    [one, one + r, one - r]
}

/// First-order coefficients `dE_k/dε` at `ε = 0`, in the order of
/// [`appendix_unperturbed`]:
///
/// ```text
/// 2/(1−y),   −(1+y)/(2(1−y)) ± 1/(2√(1−y)).
/// ```
///
/// They sum to 1, the derivative of the trace.
pub fn appendix_linear_response(y: f64) -> Result<[Complex64; 3]> {
    if !(y < 1.0) {
        return Err(Error::InvalidConfig(format!("linear response needs y < 1, got {y}")));
    }
    let r = (1.0 - y).sqrt();
    let mid = -(1.0 + y) / (2.0 * (1.0 - y));
    let side = 1.0 / (2.0 * r);
    Ok([2.0 / (1.0 - y), mid + side, mid - side].map(|v| Complex64::new(v, 0.0)))
}

/// Central finite differences of the exact spectrum with step `h`, branches
/// attributed to the nearest unperturbed level.
pub fn appendix_finite_difference(y: f64, h: f64) -> [Complex64; 3] {
    let yc = Complex64::new(y, 0.0);
    let base = appendix_unperturbed(yc);
    let near = |eps: f64| {
        let s = appendix_spectrum(yc, Complex64::new(eps, 0.0));
        base.map(|b| *s.iter().min_by(|x, z| (*x - b).norm().total_cmp(&(*z - b).norm())).unwrap())
    };
    let (p, m) = (near(h), near(-h));
    [0, 1, 2].map(|k| (p[k] - m[k]) / (2.0 * h))
}

/// Outcome of a log-log fit of level shifts against ε.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpansionFit {
    /// Mean least-squares slope of `log|E_k − E_k(0)|` against `log ε`.
    pub slope: f64,
    /// Per-branch slopes.
    pub slopes: Vec<f64>,
    /// Leading coefficients `c_k` of `E_k = 1 − c_k ε^{1/3}`, extrapolated to
    /// ε → 0 and ordered by argument near `0, +2π/3, −2π/3`.
    pub prefactors: Vec<Complex64>,
    /// Largest RMS residual of the per-branch fits.
    pub residual: f64,
}

/// Residual threshold of the log-log fits.
pub const FIT_TOLERANCE: f64 = 0.05;

fn fit_line(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rms = (xs.iter().zip(ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum::<f64>() / n).sqrt();
    (slope, intercept, rms)
}

fn check_grid(eps_grid: &[f64], max: f64) -> Result<Vec<f64>> {
    let mut grid = eps_grid.to_vec();
    if grid.len() < 3 || grid.iter().any(|&e| !(e > 0.0 && e <= max)) {
        return Err(Error::InvalidConfig(format!("ε grid needs ≥ 3 values in (0, {max:e}]")));
    }
    grid.sort_by(f64::total_cmp);
    if grid[grid.len() - 1] / grid[0] < 1e3 * (1.0 - 1e-12) {
        return Err(Error::InvalidConfig("ε grid must span at least three decades".into()));
    }
    Ok(grid)
}

/// Fits the splitting of the triple level at `y = 1`: the slope should be
/// 1/3 and the prefactors `2^{1/3}·{1, e^{2πi/3}, e^{−2πi/3}}`.
pub fn appendix_expansion_check(eps_grid: &[f64]) -> Result<ExpansionFit> {
    let grid = check_grid(eps_grid, 1e-5)?;
    let y = Complex64::new(1.0, 0.0);
    let targets = [0.0, 2.0 * PI / 3.0, -2.0 * PI / 3.0];
    // coefficients[k][i] = c_k at grid[i]
    let mut coefficients = vec![Vec::with_capacity(grid.len()); 3];
    for &eps in &grid {
        let t = eps.cbrt();
        let cs = appendix_spectrum(y, Complex64::new(eps, 0.0)).map(|e| (1.0 - e) / t);
        for (k, &target) in targets.iter().enumerate() {
            let nearest = cs
                .iter()
                .min_by(|a, b| arg_distance(a.arg(), target).total_cmp(&arg_distance(b.arg(), target)))
                .unwrap();
            coefficients[k].push(*nearest);
        }
    }
    let logs: Vec<f64> = grid.iter().map(|e| e.ln()).collect();
    let mut slopes = Vec::new();
    let mut residual: f64 = 0.0;
    for k in 0..3 {
        let ys: Vec<f64> = grid.iter().zip(&coefficients[k]).map(|(e, c)| (c * e.cbrt()).norm().ln()).collect();
        let (slope, _, rms) = fit_line(&logs, &ys);
        slopes.push(slope);
        residual = residual.max(rms);
    }
    if !(residual <= FIT_TOLERANCE) {
        return Err(Error::FitFailure { residual });
    }
    // c(ε) = c₀ + c₁ε^{1/3} + …: eliminate the first correction with the two
    // smallest ε.
    let (t1, t2) = (grid[0].cbrt(), grid[1].cbrt());
    let prefactors = coefficients.iter().map(|c| (c[0] * t2 - c[1] * t1) / (t2 - t1)).collect();
    Ok(ExpansionFit { slope: slopes.iter().sum::<f64>() / 3.0, slopes, prefactors, residual })
}

fn arg_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d)
}

/// Log-log slopes of `|E_k(ε) − E_k(0)|` at fixed `y ≠ 1`, in the order of
/// [`appendix_unperturbed`]; all are 1 away from the critical point.
pub fn appendix_slope(y: f64, eps_grid: &[f64]) -> Result<Vec<f64>> {
    if y == 1.0 {
        return Err(Error::InvalidConfig("use appendix_expansion_check at y = 1".into()));
    }
    let grid = check_grid(eps_grid, 1e-2)?;
    let yc = Complex64::new(y, 0.0);
    let base = appendix_unperturbed(yc);
    let logs: Vec<f64> = grid.iter().map(|e| e.ln()).collect();
    let mut shifts = vec![Vec::new(); 3];
    for &eps in &grid {
        let s = appendix_spectrum(yc, Complex64::new(eps, 0.0));
        for (k, b) in base.iter().enumerate() {
            let e = s.iter().min_by(|x, z| (*x - b).norm().total_cmp(&(*z - b).norm())).unwrap();
            shifts[k].push((e - b).norm().ln());
        }
    }
    shifts
        .iter()
        .map(|ys| {
            let (slope, _, rms) = fit_line(&logs, ys);
            if rms > FIT_TOLERANCE {
                Err(Error::FitFailure { residual: rms })
            } else {
                Ok(slope)
            }
        })
        .collect()
}
