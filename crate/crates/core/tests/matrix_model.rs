use nalgebra::Vector3;
use num_complex::Complex64;
use proptest::prelude::*;
use ptbec::linalg::{eigenvalues3, numerical_rank, singular_values3, CMatrix3};
use ptbec::matrix_model::*;
use ptbec::Error;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Greedy matching of an unordered eigenvalue set against expected values.
fn max_mismatch(got: [Complex64; 3], want: [Complex64; 3]) -> f64 {
    let mut used = [false; 3];
    let mut worst: f64 = 0.0;
    for w in want {
        let (k, d) = got
            .iter()
            .enumerate()
            .filter(|(k, _)| !used[*k])
            .map(|(k, g)| (k, (g - w).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        used[k] = true;
        worst = worst.max(d);
    }
    worst
}

#[test]
fn eigensolver_reproduces_closed_forms_on_grid() {
    for g in [0.2, 0.6, 1.2] {
        let gc = ModelParams::critical_gamma(g).unwrap();
        // γ = 0 is left out: E3 = E4 there with coalescing eigenvectors, so
        // any eigensolver only resolves them to √ε.
        for k in 1..=20 {
            let gamma = 0.95 * gc * k as f64 / 20.0;
            let p = ModelParams::new(g, gamma);
            let h = build_ham(&p).unwrap();
            let e = eigenvalues(&p).unwrap();
            let err = max_mismatch(eigenvalues3(&h), e.upper());
            assert!(err < 1e-10, "g={g} γ={gamma}: {err:e}");
        }
    }
}

#[test]
fn ham_examples() {
    let p = ModelParams::new(1.2, 0.3);
    let e = eigenvalues(&p).unwrap();
    assert!(max_mismatch(eigenvalues3(&build_ham(&p).unwrap()), e.upper()) < 1e-10);
    let p = ModelParams::new(0.2, 0.0);
    let ev = eigenvalues3(&build_ham(&p).unwrap());
    assert!(max_mismatch(ev, [c(1.0, 0.0), c(0.1, 0.0), c(0.1, 0.0)]) < 1e-7);
    assert_eq!(build_ham(&ModelParams::new(1.2, 0.8)), Err(Error::SingularSimilarity));
}

#[test]
fn trace_is_preserved_on_grid() {
    for i in 0..10 {
        for k in 0..10 {
            let g = 0.1 + 0.15 * i as f64;
            let gamma = 0.05 + 0.09 * k as f64;
            let p = ModelParams::new(g, gamma);
            let Ok(h) = build_ham(&p) else { continue };
            let e = eigenvalues(&p).unwrap();
            assert!((h.trace() - (e.e2 + e.e3 + e.e4)).norm() < 1e-12, "g={g} γ={gamma}");
        }
    }
}

#[test]
fn closed_form_examples() {
    let e = eigenvalues(&ModelParams::new(1.2, 0.8)).unwrap();
    for v in [e.e2, e.e3, e.e4] {
        assert!((v - 0.6).norm() < 1e-12);
    }
    let p = ModelParams::new(1.2, 0.5);
    let e = eigenvalues(&p).unwrap();
    assert!((e.e1 + e.e2).norm() == 0.0);
}

#[test]
fn critical_coalescence() {
    for g in [0.2, 0.6, 1.2] {
        let p = ModelParams::new(g, ModelParams::critical_gamma(g).unwrap());
        let e = eigenvalues(&p).unwrap();
        let total: f64 = e.upper().iter().map(|v| (v - g / 2.0).norm()).sum();
        assert!(total < 1e-10, "g={g}: {total:e}");
    }
}

#[test]
fn reality_partition() {
    let g = 0.6;
    let gc = ModelParams::critical_gamma(g).unwrap();
    for k in 0..50 {
        let gamma = 0.999 * gc * k as f64 / 49.0;
        let e = eigenvalues(&ModelParams::new(g, gamma)).unwrap();
        assert!(e.upper().iter().all(|v| v.im.abs() < 1e-12));
    }
    for k in 1..50 {
        let gamma = gc + (1.0 - gc) * k as f64 / 50.0;
        let e = eigenvalues(&ModelParams::new(g, gamma)).unwrap();
        assert!(e.e3.im.abs() > 1e-6 && (e.e3 - e.e4.conj()).norm() < 1e-12);
    }
}

#[test]
fn similarity_structure() {
    let p = ModelParams::new(1.2, 0.4);
    let s = similarity_matrix(&p).unwrap();
    for k in 0..3 {
        assert_eq!(s[(k, 0)], c(1.0, 0.0));
    }
    let (r, x) = ((1.0f64 - 0.16).sqrt(), ((1.0f64 - 0.16 - 0.36) / (0.16 + 0.36)).sqrt());
    let e3 = Vector3::new(r, 0.6 - 0.4 * x, (0.6f64.sqrt() - 0.4 * x).powi(2));
    let e4 = Vector3::new(r, 0.6 + 0.4 * x, (0.6f64.sqrt() + 0.4 * x).powi(2));
    let basis = |k| {
        let mut v = Vector3::from_element(c(0.0, 0.0));
        v[k] = c(1.0, 0.0);
        v
    };
    let col3 = s * basis(1);
    let col4 = s * basis(2);
    for k in 0..3 {
        assert!((col3[k] - e3[k]).norm() < 1e-14 && (col4[k] - e4[k]).norm() < 1e-14);
    }
    let sc = similarity_matrix(&ModelParams::new(1.2, 0.8)).unwrap();
    let sv = singular_values3(&sc);
    assert!(sv[1] / sv[0] < 1e-8, "{sv:?}");
}

#[test]
fn limit_ham_is_a_single_jordan_block() {
    for g in [0.2, 0.4, 0.6, 1.2] {
        let h = limit_ham(&ModelParams::new(g, 0.0), &default_deltas()).unwrap();
        let d = jordan_diagnostics(&h, c(g / 2.0, 0.0), 1e-6);
        assert!(d.powers[2] < 1e-6, "g={g}: {d:?}");
        assert!(d.powers[1] > 1e-3, "g={g}: {d:?}");
        assert_eq!(d.nilpotency_order, 3);
        assert_eq!(d.rank, 2, "g={g}: {d:?}");
        let shifted = h - CMatrix3::identity() * c(g / 2.0, 0.0);
        assert_eq!(numerical_rank(&shifted, RANK_TOL), 2);
    }
}

#[test]
fn limit_ham_rejects_bad_input() {
    assert!(matches!(limit_ham(&ModelParams::new(1.2, 0.0), &[1e-3]), Err(Error::InvalidConfig(_))));
    assert!(matches!(limit_ham(&ModelParams::new(1.2, 0.0), &[1e-3, 2e-3]), Err(Error::InvalidConfig(_))));
    assert!(matches!(limit_ham(&ModelParams::new(2.5, 0.0), &default_deltas()), Err(Error::InvalidConfig(_))));
}

#[test]
fn two_mode_examples() {
    let p = ModelParams::new(0.2, 0.5);
    let e = eigenvalues(&p).unwrap();
    assert!(verify_two_mode(e.e2, &p).unwrap() < 1e-10);
    assert!(verify_two_mode(c(0.123, 0.0), &p).unwrap() > 1e-2);
    let p = ModelParams::new(0.0, 0.5);
    for e in [0.75f64.sqrt(), -0.75f64.sqrt()] {
        assert!(verify_two_mode(c(e, 0.0), &p).unwrap() < 1e-12);
    }
}

#[test]
fn two_mode_amplitudes_are_normalised() {
    let p = ModelParams::new(0.6, 0.4);
    let e = eigenvalues(&p).unwrap();
    let s = two_mode_amplitudes(e.e2, &p).unwrap();
    assert!((s.phi1.norm_sqr() + s.phi2.norm_sqr() - 1.0).abs() < 1e-12);
    assert!((s.phi1.norm() - s.phi2.norm()).abs() < 1e-10);
}

#[test]
fn scalar_product_at_critical_point() {
    for g in [0.02, 0.1, 0.2, 0.5, 1.0] {
        let p = ModelParams::new(g, ModelParams::critical_gamma(g).unwrap());
        let v = scalar_product_e4(&p).unwrap();
        assert!((v - (2.0f64 / 3.0).sqrt()).norm() < 1e-9, "g={g}: {v}");
    }
}

#[test]
fn scalar_product_limits() {
    let (c0, _) = scalar_product_series(0.5).unwrap();
    // 3 − 4γ² + γ⁴ = 2.0625 at γ = 0.5.
    assert!((c0 - (0.75f64 * 2.0 / 2.0625).sqrt()).abs() < 1e-14);
    let v = scalar_product_e4(&ModelParams::new(1e-10, 0.5)).unwrap();
    assert!((v.re - c0).abs() < 1e-4);
    let one = scalar_product_e4(&ModelParams::new(0.0, 1.0)).unwrap();
    assert!((one - 1.0).norm() < 1e-15);
    assert_eq!(scalar_product_series(1.0).unwrap().1, 0.0);
    let (c0, _) = scalar_product_series(0.0).unwrap();
    assert!((c0 - (2.0f64 / 3.0).sqrt()).abs() < 1e-15);
}

#[test]
fn scalar_product_series_remainder_is_linear() {
    let gamma = 0.5;
    let (c0, ch) = scalar_product_series(gamma).unwrap();
    let rem = |g: f64| {
        let v = scalar_product_e4(&ModelParams::new(g, gamma)).unwrap();
        (v.re - c0 - ch * g.sqrt()).abs() / g
    };
    let r: Vec<f64> = [1e-2, 1e-3, 1e-4].iter().map(|&g| rem(g)).collect();
    // remainder/g stays bounded and settles, unlike remainder/√g.
    assert!(r.iter().all(|v| v.is_finite() && *v < 10.0), "{r:?}");
    assert!((r[1] / r[2] - 1.0).abs() < 0.2 && (r[0] / r[1] - 1.0).abs() < 0.5, "{r:?}");
}

#[test]
fn scalar_product_series_constant_matches_endpoint() {
    let (c0, ch) = scalar_product_series(1.0 - 1e-12).unwrap();
    assert!((c0 - 1.0).abs() < 1e-11 && ch.abs() < 1e-5);
    assert_eq!(scalar_product_series(1.0).unwrap(), (1.0, 0.0));
}

fn eigen_residual(h: &CMatrix3, v: &Vector3<Complex64>) -> f64 {
    // λ from the Rayleigh quotient.
    let hv = h * v;
    let lambda = v.dotc(&hv) / v.dotc(v);
    (hv - v * lambda).norm() / v.norm()
}

#[test]
fn limit_eigenvectors_are_eigenvectors_of_limit_ham() {
    for case in [LimitOrder::GZeroFirst, LimitOrder::GammaOneFirst] {
        let h = scaled_limit_ham(case).unwrap();
        let [a, b] = limit_eigenvectors(case);
        assert!(eigen_residual(&h, &a) < 1e-6, "{case:?}");
        assert!(eigen_residual(&h, &b) < 1e-6, "{case:?}");
        let cross = a.cross(&b);
        assert!(cross.norm() > 0.5, "{case:?} vectors are dependent");
    }
}

#[test]
fn g_zero_first_vectors_span_the_degenerate_pair() {
    let [a, b] = limit_eigenvectors(LimitOrder::GZeroFirst);
    let h = build_ham(&ModelParams::new(0.0, 0.6)).unwrap();
    for v in [a, b] {
        assert!(((h * v) - v * c(0.8, 0.0)).norm() < 1e-12);
    }
}

#[test]
fn g_to_zero_interior_limit() {
    let r = 0.75f64.sqrt();
    let mut last = (f64::INFINITY, f64::INFINITY);
    for g in [1e-2, 1e-3, 1e-4] {
        let e = eigenvalues(&ModelParams::new(g, 0.5)).unwrap();
        let d = ((e.e4 - r).norm(), (e.e3 + r).norm());
        assert!(d.0 < last.0 && d.1 < last.1);
        last = d;
    }
    assert!(last.0 < 1e-3 && last.1 < 1e-3);
}

#[test]
fn endpoint_non_uniformity() {
    let e = eigenvalues(&ModelParams::new(1e-6, 0.0)).unwrap();
    assert!((e.e4 - 1.0).norm() > 0.9);
    assert!((e.e4 - 0.5e-6).norm() < 1e-15);
}

proptest! {
    #[test]
    fn e1_is_minus_e2(g in 0.0f64..2.0, re in -1.5f64..1.5, im in -1.0f64..1.0) {
        prop_assume!(re.abs() + im.abs() > 1e-3);
        let e = eigenvalues(&ModelParams { g, gamma: c(re, im) }).unwrap();
        prop_assert!((e.e1 + e.e2).norm() == 0.0);
    }

    #[test]
    fn ham_has_closed_form_spectrum(g in 0.1f64..1.9, gamma in 0.0f64..0.9) {
        let gc = ModelParams::critical_gamma(g).unwrap();
        prop_assume!((gamma - gc).abs() > 0.05);
        let p = ModelParams::new(g, gamma);
        let e = eigenvalues(&p).unwrap();
        let h = build_ham(&p).unwrap();
        prop_assert!(max_mismatch(eigenvalues3(&h), e.upper()) < 1e-8);
    }
}
