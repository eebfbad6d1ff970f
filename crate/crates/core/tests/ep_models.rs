use std::f64::consts::PI;

use num_complex::Complex64;
use ptbec::ep::*;
use ptbec::linalg::eigenvalues3;
use ptbec::matrix_model::ModelParams;
use ptbec::Error;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn model_circle(center: f64, radius: f64) -> ContourSpec {
    ContourSpec::circle(ContourParameter::ModelGamma, c(center, 0.0), radius, 64)
}

fn run(g: f64, spec: &ContourSpec) -> (BranchTrace, PermutationResult) {
    let trace = trace_contour(&MatrixProvider { g }, spec).unwrap();
    let perm = classify(&trace);
    (trace, perm)
}

#[test]
fn ep_free_circle_is_identity() {
    let (_, p) = run(1.2, &model_circle(0.5, 0.05));
    assert_eq!(p.classification, Classification::Identity);
}

#[test]
fn critical_circle_swaps_e3_and_e4() {
    let gc = ModelParams::critical_gamma(1.2).unwrap();
    let (trace, p) = run(1.2, &model_circle(gc, 0.04));
    assert!(trace.matched);
    assert_eq!(p.classification, Classification::Ep2Pair);
    assert_eq!(p.cycle_structure, vec![2, 1]);
    assert_eq!(p.mapping, vec![0, 2, 1], "E2 fixed, E3 ↔ E4");
    // Eigenvector columns follow the eigenvalues.
    assert_eq!(matrix_eigenvector_mapping(1.2, &trace).unwrap(), p.mapping);
}

#[test]
fn radius_halving_keeps_the_result() {
    let gc = ModelParams::critical_gamma(1.2).unwrap();
    let (_, a) = run(1.2, &model_circle(gc, 0.04));
    let (_, b) = run(1.2, &model_circle(gc, 0.02));
    assert_eq!(a, b);
}

#[test]
fn double_traversal_is_identity() {
    let gc = ModelParams::critical_gamma(1.2).unwrap();
    let (_, p) = run(1.2, &model_circle(gc, 0.04).with_turns(2));
    assert_eq!(p.classification, Classification::Identity);
}

#[test]
fn reversed_orientation_inverts() {
    let spec = ContourSpec::circle(ContourParameter::AppendixY, c(1.0, 0.0), 0.3, 64);
    let provider = AppendixProvider { eps: c(1e-3, 0.0) };
    let fwd = classify(&trace_contour(&provider, &spec).unwrap());
    let back = classify(&trace_contour(&provider, &spec.with_orientation(Orientation::Clockwise)).unwrap());
    assert_eq!(back.mapping, fwd.inverse());
}

#[test]
fn perturbed_appendix_matrix_shows_three_cycle_around_its_ep3() {
    // With y = 1 fixed, ε is the parameter that splits the triple level;
    // encircling ε = 0 permutes all three levels.
    let provider = AppendixEpsProvider { y: c(1.0, 0.0) };
    let spec = ContourSpec::circle(ContourParameter::AppendixEps, c(0.0, 0.0), 1e-3, 64);
    let p = classify(&trace_contour(&provider, &spec).unwrap());
    assert_eq!(p.classification, Classification::Ep3Cycle);
    let p3 = classify(&trace_contour(&provider, &spec.with_turns(3)).unwrap());
    assert_eq!(p3.classification, Classification::Identity);
    let p2 = classify(&trace_contour(&provider, &spec.with_turns(2)).unwrap());
    assert_eq!(p2.mapping, p.then(&p));
}

#[test]
fn plain_crossing_is_identity() {
    // diag(z, −z) has a crossing at z = 0 but no coalescing eigenvectors.
    let provider = FnProvider::new(vec!["+".into(), "-".into()], |z: Complex64| Ok(vec![z, -z]));
    let spec = ContourSpec::circle(ContourParameter::ModelGamma, c(0.0, 0.0), 0.1, 32);
    assert_eq!(classify(&trace_contour(&provider, &spec).unwrap()).classification, Classification::Identity);
    // √z has a genuine branch point there.
    let provider = FnProvider::new(vec!["+".into(), "-".into()], |z: Complex64| Ok(vec![z.sqrt(), -z.sqrt()]));
    let p = classify(&trace_contour(&provider, &spec).unwrap());
    assert_eq!(p.cycle_structure, vec![2]);
}

#[test]
fn cardinality_change_is_reported() {
    let provider =
        FnProvider::new(vec!["a".into()], |z: Complex64| Ok(if z.im > 0.05 { vec![z, z + 1.0] } else { vec![z] }));
    let spec = ContourSpec::circle(ContourParameter::ModelGamma, c(0.0, 0.0), 0.1, 32);
    assert!(matches!(trace_contour(&provider, &spec), Err(Error::CardinalityChange { expected: 1, got: 2 })));
}

#[test]
fn contour_through_a_degeneracy_is_ambiguous() {
    // Both branches meet at z = 0.1, which lies on the circle.
    let provider = FnProvider::new(vec!["+".into(), "-".into()], |z: Complex64| {
        let r = (z - 0.1).sqrt();
        Ok(vec![r, -r])
    });
    let spec = ContourSpec::circle(ContourParameter::ModelGamma, c(0.0, 0.0), 0.1, 32);
    assert!(matches!(trace_contour(&provider, &spec), Err(Error::AmbiguousMatching { .. })));
}

#[test]
fn invalid_contours_are_rejected() {
    let p = MatrixProvider { g: 1.2 };
    let spec = model_circle(0.5, 0.05);
    assert!(matches!(trace_contour(&p, &ContourSpec { n_steps: 8, ..spec }), Err(Error::InvalidConfig(_))));
    assert!(matches!(trace_contour(&p, &ContourSpec { radius: 0.0, ..spec }), Err(Error::InvalidConfig(_))));
}

#[test]
fn trace_closes_and_steps_stay_below_half_gap() {
    let gc = ModelParams::critical_gamma(1.2).unwrap();
    let (trace, _) = run(1.2, &model_circle(gc, 0.04));
    assert_eq!(trace.parameters.first(), trace.parameters.last());
    for w in trace.values.windows(2) {
        let gap = (0..3)
            .flat_map(|i| (i + 1..3).map(move |j| (i, j)))
            .map(|(i, j)| (w[0][i] - w[0][j]).norm())
            .fold(f64::INFINITY, f64::min);
        for k in 0..3 {
            assert!((w[1][k] - w[0][k]).norm() < 0.5 * gap);
        }
    }
}

#[test]
fn appendix_spectrum_examples() {
    for y in [c(0.3, 0.0), c(-2.0, 0.5), c(0.0, 0.0)] {
        let got = ptbec::ep::appendix::appendix_spectrum(y, c(0.0, 0.0));
        let want = ptbec::ep::appendix::appendix_unperturbed(y);
        for w in want {
            assert!(got.iter().any(|g| (g - w).norm() < 1e-10), "{y}: {got:?}");
        }
    }
    let zero = ptbec::ep::appendix::appendix_spectrum(c(0.0, 0.0), c(0.0, 0.0));
    for w in [0.0, 1.0, 2.0] {
        assert!(zero.iter().any(|g| (g - w).norm() < 1e-12));
    }
}

#[test]
fn appendix_has_third_order_jordan_block_at_y_one() {
    let m = appendix_matrix(c(1.0, 0.0), c(0.0, 0.0));
    let d = ptbec::matrix_model::jordan_diagnostics(&m, c(1.0, 0.0), 1e-12);
    assert_eq!(d.nilpotency_order, 3);
    assert_eq!(d.rank, 2);
}

#[test]
fn cube_root_expansion() {
    let grid: Vec<f64> = (0..=12).map(|k| 1e-9 * 10f64.powf(k as f64 / 4.0)).collect();
    let fit = appendix_expansion_check(&grid).unwrap();
    assert!((fit.slope - 1.0 / 3.0).abs() < 0.01, "{fit:?}");
    let args = [0.0, 2.0 * PI / 3.0, -2.0 * PI / 3.0];
    for (p, a) in fit.prefactors.iter().zip(args) {
        assert!((p.norm() - 2f64.cbrt()).abs() < 1e-2, "{fit:?}");
        assert!((p.arg() - a).abs() < 1e-3, "{fit:?}");
    }
}

#[test]
fn expansion_check_validates_grid() {
    assert!(matches!(appendix_expansion_check(&[1e-9, 1e-8]), Err(Error::InvalidConfig(_))));
    assert!(matches!(appendix_expansion_check(&[1e-9, 1e-8, 1e-7]), Err(Error::InvalidConfig(_))));
    assert!(matches!(appendix_expansion_check(&[1e-7, 1e-5, 1e-3]), Err(Error::InvalidConfig(_))));
}

#[test]
fn linear_response_away_from_critical_point() {
    let grid: Vec<f64> = (0..=12).map(|k| 1e-9 * 10f64.powf(k as f64 / 4.0)).collect();
    let slopes = appendix_slope(0.5, &grid).unwrap();
    assert!((slopes[1] - 1.0).abs() < 0.01, "{slopes:?}");
    let r = appendix_linear_response(0.0).unwrap();
    for (got, want) in r.iter().zip([2.0, 0.0, -1.0]) {
        assert!((got - want).norm() < 1e-15);
    }
    assert!((appendix_linear_response(0.75).unwrap()[0] - 8.0).norm() < 1e-12);
    for y in [0.0, 0.5, 0.75] {
        let exact = appendix_linear_response(y).unwrap();
        let fd = ptbec::ep::appendix::appendix_finite_difference(y, 1e-8);
        for (e, f) in exact.iter().zip(fd) {
            let scale = e.norm().max(1.0);
            assert!((e - f).norm() / scale < 1e-5, "y={y}: {exact:?} vs {fd:?}");
        }
    }
    assert!(appendix_linear_response(1.0).is_err());
    // The coefficients sum to d(trace)/dε = 1.
    for y in [-1.0, 0.0, 0.3, 0.9] {
        let sum: Complex64 = appendix_linear_response(y).unwrap().iter().sum();
        assert!((sum - 1.0).norm() < 1e-12);
    }
}

#[test]
fn linear_response_diverges_towards_critical_point() {
    let r = appendix_linear_response(1.0 - 1e-3).unwrap();
    assert!(r.iter().map(|v| v.norm()).fold(0.0, f64::max) > 1e3);
}

#[test]
fn eps_provider_matches_direct_eigensolve() {
    let provider = AppendixEpsProvider { y: c(0.9, 0.1) };
    for eps in [c(1e-3, 0.0), c(0.05, -0.02), c(-0.1, 0.3)] {
        let (got, _) = provider.start(eps).unwrap();
        let want = eigenvalues3(&appendix_matrix(c(0.9, 0.1), eps));
        for w in want {
            assert!(got.iter().any(|g| (g - w).norm() < 1e-10), "{got:?} vs {want:?}");
        }
    }
}
