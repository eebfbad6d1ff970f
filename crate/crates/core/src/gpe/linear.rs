use num_complex::Complex64;

/// Bound-state condition of the linear (`g = 0`) problem.
///
/// With `ψ = c_L e^{κ(x+a/2)}` left of the wells, a combination of
/// `e^{±κx}` between them and `c_R e^{−κ(x−a/2)}` to the right, the two jump
/// conditions have a nontrivial solution iff
///
/// ```text
/// F(κ) = (2κ − s_L)(2κ − s_R) − s_L·s_R·e^{−2κa} = 0,
/// ```
///
/// where `s_L = 1 + iγ + A` and `s_R = 1 − iγ − A` are the well strengths.
/// `κ = 0` is always a spurious root.
pub fn linear_determinant(kappa: Complex64, a: f64, gamma: Complex64, asym: Complex64) -> Complex64 {
    let (sl, sr) = strengths(gamma, asym);
    let two_k = kappa * 2.0;
    (two_k - sl) * (two_k - sr) - sl * sr * (-two_k * a).exp()
}

fn strengths(gamma: Complex64, asym: Complex64) -> (Complex64, Complex64) {
    let i = Complex64::i();
    (1.0 + i * gamma + asym, 1.0 - i * gamma - asym)
}

fn derivative(kappa: Complex64, a: f64, gamma: Complex64, asym: Complex64) -> Complex64 {
    let (sl, sr) = strengths(gamma, asym);
    let two_k = kappa * 2.0;
    (two_k - sl) * 2.0 + (two_k - sr) * 2.0 + sl * sr * 2.0 * a * (-two_k * a).exp()
}

fn newton_root(seed: Complex64, a: f64, gamma: Complex64, asym: Complex64) -> Option<Complex64> {
    let mut k = seed;
    for _ in 0..100 {
        let f = linear_determinant(k, a, gamma, asym);
        let d = derivative(k, a, gamma, asym);
        if d.norm() == 0.0 {
            return None;
        }
        let step = f / d;
        k -= step;
        if !k.is_finite() || k.norm() > 50.0 {
            return None;
        }
        if step.norm() < 1e-15 * (1.0 + k.norm()) {
            break;
        }
    }
    (linear_determinant(k, a, gamma, asym).norm() < 1e-12).then_some(k)
}

/// All bound-state `κ` of the linear problem with `Re κ > 0`, sorted by
/// `Re κ` descending (ground state first).
pub fn linear_spectrum_oracle(a: f64, gamma: f64) -> Vec<Complex64> {
    linear_spectrum(a, Complex64::new(gamma, 0.0), Complex64::new(0.0, 0.0))
}

/// Same as [`linear_spectrum_oracle`] for complex parameters.
pub fn linear_spectrum(a: f64, gamma: Complex64, asym: Complex64) -> Vec<Complex64> {
    let mut roots: Vec<Complex64> = Vec::new();
    let bound = 1.0 + gamma.norm() + asym.norm();
    for ir in 1..=40 {
        for ii in -20..=20 {
            let seed = Complex64::new(bound * ir as f64 / 40.0, bound * ii as f64 / 20.0);
            let Some(k) = newton_root(seed, a, gamma, asym) else { continue };
            if k.re <= 1e-9 || k.norm() < 1e-6 {
                continue;
            }
            if roots.iter().all(|r| (r - k).norm() > 1e-8) {
                roots.push(k);
            }
        }
    }
    roots.sort_by(|x, y| y.re.total_cmp(&x.re).then(y.im.total_cmp(&x.im)));
    roots
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
        let mut flo = f(lo);
        while hi - lo > 1e-14 {
            let mid = 0.5 * (lo + hi);
            let fm = f(mid);
            if (fm > 0.0) == (flo > 0.0) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn symmetric_roots_match_transcendental_equations() {
        let even = bisect(|k| k * (1.0 + (1.1 * k).tanh()) - 1.0, 0.01, 2.0);
        let odd = bisect(|k| k * (1.0 + 1.0 / (1.1 * k).tanh()) - 1.0, 0.01, 2.0);
        let roots = linear_spectrum_oracle(2.2, 0.0);
        assert_eq!(roots.len(), 2, "{roots:?}");
        assert!((roots[0].re - even).abs() < 1e-10 && roots[0].im.abs() < 1e-12);
        assert!((roots[1].re - odd).abs() < 1e-10 && roots[1].im.abs() < 1e-12);
    }

    #[test]
    fn pair_turns_complex_past_branch_point() {
        let below = linear_spectrum_oracle(2.2, 0.2);
        assert_eq!(below.len(), 2);
        assert!(below.iter().all(|k| k.im.abs() < 1e-10));
        let above = linear_spectrum_oracle(2.2, 0.6);
        assert_eq!(above.len(), 2, "{above:?}");
        assert!((above[0].re - above[1].re).abs() < 1e-10);
        assert!((above[0].im + above[1].im).abs() < 1e-10 && above[0].im.abs() > 1e-3);
    }

    #[test]
    fn zero_is_excluded() {
        assert!(
            linear_determinant(Complex64::new(0.0, 0.0), 2.2, Complex64::new(0.3, 0.0), Complex64::new(0.0, 0.0))
                .norm()
                < 1e-15
        );
        assert!(linear_spectrum_oracle(2.2, 0.3).iter().all(|k| k.norm() > 1e-6));
    }
}
