//! Exactly solvable 3×3 model of the triple point.
//!
//! The eigenvalues
//!
//! ```text
//! E1,2 = ∓√(1−γ²),   E3,4 = g/2 ∓ γX,   X = √((1 − γ² − g²/4)/(γ² + g²/4))
//! ```
//!
//! stem from the analytically continued two-mode condensate. The model
//! Hamiltonian `ham = s·diag(E2, E3, E4)·s⁻¹` couples the three upper levels
//! through an explicit similarity matrix `s` that loses rank 2 at
//! `γ_cr = √(1 − g²/4)`, where `ham` becomes a single 3×3 Jordan block.
//! All square roots use the principal branch.

use nalgebra::Vector3;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix3};

/// Relative singular-value threshold used for numerical ranks.
pub const RANK_TOL: f64 = 1e-8;

/// Default δ sequence `1e−3·2^{−k}`, `k = 0..6`, for [`limit_ham`].
pub fn default_deltas() -> Vec<f64> {
    (0..=6).map(|k| 1e-3 * 0.5f64.powi(k)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelParams {
    pub g: f64,
    pub gamma: Complex64,
}

impl ModelParams {
    pub fn new(g: f64, gamma: f64) -> Self {
        Self { g, gamma: Complex64::new(gamma, 0.0) }
    }

    pub fn with_gamma(self, gamma: Complex64) -> Self {
        Self { gamma, ..self }
    }

    /// `γ_cr = √(1 − g²/4)`, defined for `0 ≤ g ≤ 2`.
    pub fn critical_gamma(g: f64) -> Result<f64> {
        if !(0.0..=2.0).contains(&g) {
            return Err(Error::InvalidConfig(format!("critical point needs 0 ≤ g ≤ 2, got {g}")));
        }
        Ok((1.0 - g * g / 4.0).sqrt())
    }

    fn check(&self) -> Result<()> {
        if !(self.g >= 0.0) || !self.g.is_finite() || !self.gamma.is_finite() {
            return Err(Error::InvalidConfig(format!("g = {}, γ = {}", self.g, self.gamma)));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelSpectrum {
    pub e1: Complex64,
    pub e2: Complex64,
    pub e3: Complex64,
    pub e4: Complex64,
}

impl ModelSpectrum {
    /// The three levels kept in the 3×3 model, in the order `E2, E3, E4`.
    pub fn upper(&self) -> [Complex64; 3] {
        [self.e2, self.e3, self.e4]
    }
}

struct Roots {
    r: Complex64,
    gx: Complex64,
    sg: Complex64,
}

fn roots(p: &ModelParams) -> Result<Roots> {
    p.check()?;
    let g = Complex64::new(p.g, 0.0);
    let gam = p.gamma;
    let den = gam * gam + g * g / 4.0;
    if den.norm() == 0.0 {
        return Err(Error::DegenerateDenominator);
    }
    let mut num = 1.0 - gam * gam - g * g / 4.0;
    // At γ_cr the numerator is pure rounding noise of its terms; E3,4 depend
    // on it through a square root, so noise of 1e−17 would move them by 1e−8.
    if num.norm() <= 4.0 * f64::EPSILON * (1.0 + gam.norm_sqr() + p.g * p.g / 4.0) {
        num = Complex64::new(0.0, 0.0);
    }
    let x = (num / den).sqrt();
    Ok(Roots { r: (1.0 - gam * gam).sqrt(), gx: gam * x, sg: (g / 2.0).sqrt() })
}

/// The four closed-form levels.
pub fn eigenvalues(p: &ModelParams) -> Result<ModelSpectrum> {
    let Roots { r, gx, .. } = roots(p)?;
    let half_g = Complex64::new(p.g / 2.0, 0.0);
    Ok(ModelSpectrum { e1: -r, e2: r, e3: half_g - gx, e4: half_g + gx })
}

/// The similarity matrix whose columns are the unnormalised eigenvectors of
/// `E2, E3, E4`.
pub fn similarity_matrix(p: &ModelParams) -> Result<CMatrix3> {
    let Roots { r, gx, sg } = roots(p)?;
    let one = Complex64::new(1.0, 0.0);
    let half_g = Complex64::new(p.g / 2.0, 0.0);
    let m = (sg - gx) * (sg - gx);
    let q = (sg + gx) * (sg + gx);
    Ok(CMatrix3::new(one, r, r, one, half_g - gx, half_g + gx, one, m, q))
}

/// `ham = s·diag(E2, E3, E4)·s⁻¹`.
///
/// At `γ = 0` with `g > 0` the columns of `E3` and `E4` coincide, yet `ham`
/// is even in γ and extends continuously; it is then obtained as
/// `lim_{δ→0} ham(δ)` by extrapolation. Everywhere else a singular `s`
/// (in particular at `γ_cr`) fails with `SingularSimilarity`; use
/// [`limit_ham`] at the critical point.
pub fn build_ham(p: &ModelParams) -> Result<CMatrix3> {
    match direct_ham(p) {
        Err(Error::SingularSimilarity) if p.gamma.norm() == 0.0 && p.g > 0.0 => {
            symmetric_limit(p.g, 0.0, &default_deltas())
        }
        other => other,
    }
}

fn direct_ham(p: &ModelParams) -> Result<CMatrix3> {
    let s = similarity_matrix(p)?;
    let sv = linalg::singular_values3(&s);
    if !(sv[2] > 1e-13 * sv[0]) {
        return Err(Error::SingularSimilarity);
    }
    let inv = s.try_inverse().ok_or(Error::SingularSimilarity)?;
    let e = eigenvalues(p)?;
    let j = CMatrix3::from_diagonal(&Vector3::new(e.e2, e.e3, e.e4));
    Ok(s * j * inv)
}

/// `ham` at `γ_cr(g)`, obtained by averaging `ham(γ_cr ± δ)` and
/// Richardson-extrapolating in δ² over the given decreasing sequence.
///
/// `p.gamma` is ignored; the critical point is computed from `p.g`.
pub fn limit_ham(p: &ModelParams, deltas: &[f64]) -> Result<CMatrix3> {
    let gc = ModelParams::critical_gamma(p.g)?;
    if p.g == 0.0 {
        return Err(Error::InvalidConfig("the critical point needs g > 0".into()));
    }
    if deltas.len() < 2 || deltas.windows(2).any(|w| !(w[1] < w[0])) || !(deltas[deltas.len() - 1] > 0.0) {
        return Err(Error::InvalidConfig("δ sequence must be positive and strictly decreasing".into()));
    }
    symmetric_limit(p.g, gc, deltas)
}

fn symmetric_limit(g: f64, center: f64, deltas: &[f64]) -> Result<CMatrix3> {
    let mut level: Vec<CMatrix3> = deltas
        .iter()
        .map(|&d| {
            let plus = direct_ham(&ModelParams::new(g, center + d))?;
            let minus = direct_ham(&ModelParams::new(g, center - d))?;
            Ok((plus + minus) * Complex64::new(0.5, 0.0))
        })
        .collect::<Result<_>>()?;
    // Neville-style table for an expansion in δ²; the diagonal holds the
    // successive best estimates.
    let mut diagonal = vec![level[level.len() - 1]];
    let mut order = 1;
    while level.len() > 1 {
        level = level
            .windows(2)
            .enumerate()
            .map(|(i, w)| {
                let ratio = (deltas[i] / deltas[i + order]).powi(2);
                (w[1] * Complex64::new(ratio, 0.0) - w[0]) / Complex64::new(ratio - 1.0, 0.0)
            })
            .collect();
        diagonal.push(level[level.len() - 1]);
        order += 1;
    }
    // Higher orders amplify rounding, so take the most stable estimate: the
    // one that agrees best with its predecessor.
    let (best, spread) = diagonal
        .windows(2)
        .map(|w| (w[1], max_entry(&(w[1] - w[0]))))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("at least two δ values");
    if !(spread < 1e-6) {
        return Err(Error::NonConvergentLimit { spread });
    }
    Ok(best)
}

fn max_entry(m: &CMatrix3) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Nilpotency diagnostics of `H − λ·I`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JordanDiagnostics {
    /// Frobenius norms of `N`, `N²`, `N³` with `N = H − λ·I`.
    pub powers: [f64; 3],
    pub rank: usize,
    /// Smallest `k` with `‖N^k‖` below `tol`, or 4 if none is.
    pub nilpotency_order: usize,
}

pub fn jordan_diagnostics(h: &CMatrix3, lambda: Complex64, tol: f64) -> JordanDiagnostics {
    let n = h - CMatrix3::identity() * lambda;
    let n2 = n * n;
    let n3 = n2 * n;
    let powers = [linalg::norm(&n), linalg::norm(&n2), linalg::norm(&n3)];
    let nilpotency_order = powers.iter().position(|&v| v < tol).map_or(4, |k| k + 1);
    JordanDiagnostics { powers, rank: linalg::numerical_rank(&n, RANK_TOL), nilpotency_order }
}

/// Amplitudes solving the two-mode equations for a given level.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoModeSolution {
    pub phi1: Complex64,
    pub phi2: Complex64,
    /// `‖(H(φ) − Ẽ)φ‖`.
    pub residual: f64,
}

/// Checks a level of the closed-form spectrum against the nonlinear two-mode
/// equations
///
/// ```text
/// (−iγ + g|φ₁|²)φ₁ + φ₂ = Ẽφ₁,   φ₁ + (iγ + g|φ₂|²)φ₂ = Ẽφ₂,   |φ₁|² + |φ₂|² = 1.
/// ```
///
/// The closed-form levels are measured from the mean-field offset, so the
/// two-mode energy is `Ẽ = E + g/2`. Writing `φ₁ = √n`, the first equation
/// fixes `φ₂` and the constraint becomes the cubic
/// `n·|g n − Ẽ − iγ|² = 1 − n`; every root in `[0, 1]` is tried and the
/// smallest residual of the second equation is returned.
///
/// Only genuine stationary states give a vanishing residual: for real
/// `γ < γ_cr` these are `E1` and `E2`, while the real `E3`, `E4` there belong
/// to the continued equations only.
pub fn verify_two_mode(e: Complex64, p: &ModelParams) -> Result<f64> {
    two_mode_amplitudes(e, p).map(|s| s.residual)
}

pub fn two_mode_amplitudes(e: Complex64, p: &ModelParams) -> Result<TwoModeSolution> {
    p.check()?;
    let g = p.g;
    let gam = p.gamma;
    let i = Complex64::i();
    let et = e + g / 2.0;
    let w = et + i * gam;
    // g² n³ − 2g Re(w) n² + (|w|² + 1) n − 1 = 0 (only meaningful for real γ,
    // where |gn − w|² is a polynomial in n).
    let candidates: Vec<f64> = if g == 0.0 {
        vec![1.0 / (w.norm_sqr() + 1.0)]
    } else {
        let a = g * g;
        let c2 = Complex64::new(-2.0 * g * w.re / a, 0.0);
        let c1 = Complex64::new((w.norm_sqr() + 1.0) / a, 0.0);
        let c0 = Complex64::new(-1.0 / a, 0.0);
        linalg::cubic_roots(c2, c1, c0)
            .into_iter()
            .filter(|z| z.im.abs() < 1e-9 && (-1e-12..=1.0 + 1e-12).contains(&z.re))
            .map(|z| z.re.clamp(0.0, 1.0))
            .collect()
    };
    candidates
        .into_iter()
        .filter_map(|n| {
            let phi1 = Complex64::new(n.sqrt(), 0.0);
            let phi2 = -(-i * gam + g * n - et) * phi1;
            if phi2.norm() == 0.0 && n < 1.0 {
                return None;
            }
            let r1 = (-i * gam + g * phi1.norm_sqr() - et) * phi1 + phi2;
            let r2 = phi1 + (i * gam + g * phi2.norm_sqr() - et) * phi2;
            let rc = phi1.norm_sqr() + phi2.norm_sqr() - 1.0;
            let residual = (r1.norm_sqr() + r2.norm_sqr() + rc * rc).sqrt();
            Some(TwoModeSolution { phi1, phi2, residual })
        })
        .min_by(|a, b| a.residual.total_cmp(&b.residual))
        .ok_or(Error::NoAmplitudeSolution)
}

/// Overlap of the normalised `E4` eigenvector at `g > 0` with the `g = 0`
/// eigenvector `(1, 1, 0)/√2` of the degenerate pair `E2 = E4`.
///
/// At `g = 0` the closed form reduces to `√2/√(3 − γ²)`, which is used there
/// (this is the value with `g = 0` taken first).
pub fn scalar_product_e4(p: &ModelParams) -> Result<Complex64> {
    p.check()?;
    let two = Complex64::new(2.0, 0.0);
    if p.g == 0.0 {
        return Ok(two.sqrt() / (3.0 - p.gamma * p.gamma).sqrt());
    }
    let Roots { r, gx, sg } = roots(p)?;
    let half_g = Complex64::new(p.g / 2.0, 0.0);
    let num = half_g + r + gx;
    let q = sg + gx;
    let b = half_g + gx;
    Ok(num / (two.sqrt() * (r * r + q * q * q * q + b * b).sqrt()))
}

/// Coefficients of `⟨E4^{g>0}|E4^{g=0}⟩ = c0 + c_half·√g + O(g)`.
pub fn scalar_product_series(gamma: f64) -> Result<(f64, f64)> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::InvalidConfig(format!("series needs 0 ≤ γ ≤ 1, got {gamma}")));
    }
    // With 3 − 4γ² + γ⁴ = (1 − γ²)(3 − γ²) both coefficients simplify, which
    // avoids 0/0 as γ → 1.
    let g2 = gamma * gamma;
    let c0 = 2f64.sqrt() / (3.0 - g2).sqrt();
    let c_half = -2.0 * (1.0 - g2).sqrt() / (3.0 - g2).powf(1.5);
    Ok((c0, c_half))
}

/// Order in which the limits `γ → 1` and `g → 0` are taken.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LimitOrder {
    /// `g = 0` from the outset, then `γ → 1`.
    GZeroFirst,
    /// `γ = 1` from the outset, then `g → 0`.
    GammaOneFirst,
}

/// The eigenvector pair of the two upper levels in the given limit.
pub fn limit_eigenvectors(case: LimitOrder) -> [Vector3<Complex64>; 2] {
    let c = Complex64::new;
    match case {
        LimitOrder::GZeroFirst => {
            [Vector3::new(c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)), Vector3::new(c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0))]
        }
        LimitOrder::GammaOneFirst => {
            [Vector3::new(c(0.0, 0.0), c(1.0, 1.0), c(1.0, 0.0)), Vector3::new(c(0.0, 0.0), c(1.0, -1.0), c(1.0, 0.0))]
        }
    }
}

/// The limit of `ham/ε` along the path of `case`, with `ε = √(1 − γ²)` for
/// [`LimitOrder::GZeroFirst`] and `ε = g` for [`LimitOrder::GammaOneFirst`].
///
/// `ham` itself tends to zero in both limits, so the rescaled matrix carries
/// the eigenvectors. The corrections are in powers of `√ε`; they are removed
/// by Richardson extrapolation.
pub fn scaled_limit_ham(case: LimitOrder) -> Result<CMatrix3> {
    let eval = |eps: f64| -> Result<CMatrix3> {
        let (p, scale) = match case {
            LimitOrder::GZeroFirst => (ModelParams::new(0.0, (1.0 - eps * eps).sqrt()), eps),
            LimitOrder::GammaOneFirst => (ModelParams::new(eps, 1.0), eps),
        };
        Ok(build_ham(&p)? / Complex64::new(scale, 0.0))
    };
    // Steps εₖ = ε₀/4ᵏ make √ε shrink by 2 per level.
    let eps: Vec<f64> = (0..5).map(|k| 1e-4 * 0.25f64.powi(k)).collect();
    let mut level: Vec<CMatrix3> = eps.iter().map(|&e| eval(e)).collect::<Result<_>>()?;
    for order in 1..level.len() {
        let f = 2f64.powi(order as i32);
        level =
            level.windows(2).map(|w| (w[1] * Complex64::new(f, 0.0) - w[0]) / Complex64::new(f - 1.0, 0.0)).collect();
    }
    Ok(level[0])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn trivial_values() {
        let e = eigenvalues(&ModelParams::new(0.2, 0.0)).unwrap();
        assert!((e.e3 - 0.1).norm() < 1e-15 && (e.e4 - 0.1).norm() < 1e-15 && (e.e2 - 1.0).norm() < 1e-15);
        let e = eigenvalues(&ModelParams::new(0.0, 0.6)).unwrap();
        assert!((e.e3 + 0.8).norm() < 1e-15 && (e.e4 - 0.8).norm() < 1e-15);
        assert_eq!(eigenvalues(&ModelParams::new(0.0, 0.0)), Err(Error::DegenerateDenominator));
    }

    #[test]
    fn two_mode_shift_matches_paired_levels() {
        let p = ModelParams::new(0.2, 0.5);
        let e = eigenvalues(&p).unwrap();
        assert!(verify_two_mode(e.e2, &p).unwrap() < 1e-10);
        assert!(verify_two_mode(e.e1, &p).unwrap() < 1e-10);
        assert!(verify_two_mode(c(0.123, 0.0), &p).unwrap() > 1e-3);
        // Broken states of the genuine equations beyond γ_cr.
        let p = ModelParams::new(1.2, 0.9);
        let e = eigenvalues(&p).unwrap();
        assert!(e.e3.im.abs() > 1e-3);
        assert!(verify_two_mode(e.e3, &p).unwrap() < 1e-10);
        assert!(verify_two_mode(e.e4, &p).unwrap() < 1e-10);
    }

    #[test]
    fn gamma_one_first_scalar_product() {
        // The approach is O(√g), and below g ≈ 1e-7 the double γ = 1 lies
        // within rounding of γ_cr(g). Extrapolate linearly in √g instead.
        let want = c(0.5, 1.0).sqrt() * c(3.0, -1.0) / 5.0;
        let (g1, g2) = (1e-5f64, 1e-6f64);
        let v1 = scalar_product_e4(&ModelParams::new(g1, 1.0)).unwrap();
        let v2 = scalar_product_e4(&ModelParams::new(g2, 1.0)).unwrap();
        let (s1, s2) = (g1.sqrt(), g2.sqrt());
        let got = (v2 * s1 - v1 * s2) / (s1 - s2);
        assert!((got - want).norm() < 1e-4, "{got} vs {want}");
    }

    #[test]
    fn gamma_zero_scalar_product_closed_form() {
        for g in [0.1, 0.5, 1.0, 1.5] {
            let got = scalar_product_e4(&ModelParams::new(g, 0.0)).unwrap();
            let want = (1.0 + g / 2.0) / (2.0 + g * g).sqrt();
            assert!((got - want).norm() < 1e-14);
        }
        let g0 = scalar_product_e4(&ModelParams::new(0.0, 0.0)).unwrap();
        assert!((g0.re - (2.0f64 / 3.0).sqrt()).abs() < 1e-15);
    }
}
