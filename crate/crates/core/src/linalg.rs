//! Small dense helpers for 3×3 complex matrices and cubic polynomials.

use nalgebra::Matrix3;
use num_complex::Complex64;

pub type CMatrix3 = Matrix3<Complex64>;

/// Eigenvalues of a complex 3×3 matrix from its Schur form, each polished by
/// Newton steps on the characteristic polynomial.
pub fn eigenvalues3(m: &CMatrix3) -> [Complex64; 3] {
    let (c2, c1, c0) = characteristic(m);
    let schur = m.schur();
    let t = schur.unpack().1;
    let mut roots = [t[(0, 0)], t[(1, 1)], t[(2, 2)]];
    for r in &mut roots {
        *r = polish(*r, c2, c1, c0);
    }
    roots
}

/// Monic characteristic polynomial `λ³ + c2 λ² + c1 λ + c0`.
pub fn characteristic(m: &CMatrix3) -> (Complex64, Complex64, Complex64) {
    let tr = m.trace();
    let minors = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)] + m[(0, 0)] * m[(2, 2)] - m[(0, 2)] * m[(2, 0)]
        + m[(1, 1)] * m[(2, 2)]
        - m[(1, 2)] * m[(2, 1)];
    (-tr, minors, -m.determinant())
}

/// Roots of `λ³ + c2 λ² + c1 λ + c0` via the companion matrix.
pub fn cubic_roots(c2: Complex64, c1: Complex64, c0: Complex64) -> [Complex64; 3] {
    let z = Complex64::new(0.0, 0.0);
    let o = Complex64::new(1.0, 0.0);
    let companion = CMatrix3::new(-c2, -c1, -c0, o, z, z, z, o, z);
    let t = companion.schur().unpack().1;
    let mut roots = [t[(0, 0)], t[(1, 1)], t[(2, 2)]];
    for r in &mut roots {
        *r = polish(*r, c2, c1, c0);
    }
    roots
}

fn polish(mut x: Complex64, c2: Complex64, c1: Complex64, c0: Complex64) -> Complex64 {
    for _ in 0..3 {
        let p = ((x + c2) * x + c1) * x + c0;
        let dp = (x * 3.0 + c2 * 2.0) * x + c1;
        if dp.norm() == 0.0 {
            break;
        }
        let next = x - p / dp;
        let pn = ((next + c2) * next + c1) * next + c0;
        if !next.is_finite() || pn.norm() >= p.norm() {
            break;
        }
        x = next;
    }
    x
}

/// Singular values in descending order.
pub fn singular_values3(m: &CMatrix3) -> [f64; 3] {
    let sv = m.singular_values();
    let mut s = [sv[0], sv[1], sv[2]];
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Number of singular values above `rel · σ₁`.
pub fn numerical_rank(m: &CMatrix3, rel: f64) -> usize {
    let s = singular_values3(m);
    if s[0] == 0.0 {
        return 0;
    }
    s.iter().filter(|&&v| v > rel * s[0]).count()
}

/// Frobenius norm.
pub fn norm(m: &CMatrix3) -> f64 {
    m.norm()
}
