use std::sync::OnceLock;

use num_complex::Complex64;
use proptest::prelude::*;
use ptbec::gpe::*;
use ptbec::scalar::Bicomplex;
use ptbec::Error;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Bisection on a bracketing sign change down to `tol`.
fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let flo = f(lo);
    assert!(flo * f(hi) < 0.0, "no sign change in [{lo}, {hi}]");
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if (f(mid) < 0.0) == (flo < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Even and odd bound states of the linear double well with `a = 2.2`.
fn linear_oracle() -> (f64, f64) {
    let even = bisect(|k| k * (1.0 + (1.1 * k).tanh()) - 1.0, 0.1, 1.0, 1e-12);
    let odd = bisect(|k| k * (1.0 + 1.0 / (1.1 * k).tanh()) - 1.0, 0.05, 1.0, 1e-12);
    (even, odd)
}

fn physical() -> GpeConfig {
    GpeConfig::new(1.0, 0.0, Mode::Naive)
}

fn detected_critical() -> CriticalPoint {
    static CELL: OnceLock<CriticalPoint> = OnceLock::new();
    *CELL.get_or_init(|| critical_gamma(&physical()).unwrap())
}

fn detected_branch_point() -> CriticalPoint {
    static CELL: OnceLock<CriticalPoint> = OnceLock::new();
    *CELL.get_or_init(|| branch_point_gamma(&physical()).unwrap())
}

fn max_part(s: &BoundState, part: fn(&Bicomplex) -> f64) -> f64 {
    s.psi.iter().map(|w| part(&w.value).abs()).fold(0.0, f64::max)
}

#[test]
fn delta_jump_examples() {
    let d = c(0.7, -0.2);
    assert_eq!(delta_jump(c(0.0, 0.0), d, c(3.0, 1.0)), d);
    assert_eq!(delta_jump(c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)), c(-1.0, 0.0));
    let got = delta_jump(c(1.0, 0.0), c(0.5, 0.0), c(1.0, 0.3));
    assert!((got - c(-0.5, -0.3)).norm() < 1e-15);
}

#[test]
fn recombination_examples() {
    assert_eq!(Bicomplex::new(1.0, 0.0, 0.0, 0.0).recombine(), c(1.0, 0.0));
    let k = Bicomplex::new(0.3, 0.1, 0.2, 0.05).recombine();
    assert!((k - c(0.25, 0.3)).norm() < 1e-15);
}

#[test]
fn linear_oracle_matches_bisection() {
    let (even, odd) = linear_oracle();
    let roots = linear_spectrum_oracle(2.2, 0.0);
    assert_eq!(roots.len(), 2, "{roots:?}");
    assert!((roots[0] - c(even, 0.0)).norm() < 1e-10);
    assert!((roots[1] - c(odd, 0.0)).norm() < 1e-10);
}

#[test]
fn linear_oracle_turns_complex_above_branch_point() {
    // The linear pair merges near γ ≈ 0.39; well above it only a conjugate
    // pair is left.
    let roots = linear_spectrum_oracle(2.2, 0.45);
    assert_eq!(roots.len(), 2, "{roots:?}");
    assert!(roots[0].im.abs() > 1e-3);
    assert!((roots[0] - roots[1].conj()).norm() < 1e-10);
}

#[test]
fn linear_roots_have_vanishing_residual() {
    let (even, _) = linear_oracle();
    let cfg = GpeConfig { g: 0.0, ..physical() };
    let s = solve_bound_state(&cfg, &[even, 0.0, 0.5, 0.0, 0.5]).unwrap();
    let r = residual(&s.unknowns, &GpeConfig { x_max: Some(s.x_max), ..cfg }).unwrap();
    assert!(r.norm() < 1e-8, "{}", r.norm());
}

#[test]
fn linear_limit_matches_oracle() {
    let (even, odd) = linear_oracle();
    let cfg = GpeConfig { g: 0.0, ..physical() };
    let (ground, excited) = ground_and_excited(&cfg).unwrap();
    assert!((ground.kappa - c(even, 0.0)).norm() < 1e-8, "{} vs {even}", ground.kappa);
    assert!((excited.kappa - c(odd, 0.0)).norm() < 1e-8, "{} vs {odd}", excited.kappa);
    assert_eq!(ground.pt_class, PtClass::PtSymmetric);
    assert_eq!(excited.pt_class, PtClass::PtSymmetric);
}

#[test]
fn non_decaying_unknowns_are_rejected() {
    let err = residual(&[-0.2, 0.0, 0.5, 0.0, 0.5], &physical()).unwrap_err();
    assert!(matches!(err, Error::NonDecaying { .. }), "{err:?}");
}

#[test]
fn wrong_dimension_is_rejected() {
    let err = solve_bound_state(&physical(), &[0.7, 0.0, 0.5]).unwrap_err();
    assert_eq!(err, Error::DimensionMismatch { expected: 5, got: 3 });
    assert_eq!(unknown_count(Mode::Naive), 5);
    assert_eq!(unknown_count(Mode::PtContinued), 6);
    assert_eq!(unknown_count(Mode::FullContinuation), 10);
}

#[test]
fn converged_state_is_a_fixed_point() {
    let cfg = physical().with_gamma(c(0.2, 0.0));
    let (ground, _) = ground_and_excited(&cfg).unwrap();
    let r = residual(&ground.unknowns, &GpeConfig { x_max: Some(ground.x_max), ..cfg.clone() }).unwrap();
    assert!(r.norm() <= cfg.newton_tol, "{}", r.norm());
    assert!(ground.residual_norm <= cfg.newton_tol);
}

#[test]
fn triple_point_is_detected_below_branch_point() {
    let cr = detected_critical();
    let bp = detected_branch_point();
    assert!((cr.gamma - 0.308).abs() <= 0.005, "γ_cr = {}", cr.gamma);
    assert!(cr.gamma < bp.gamma, "γ_cr = {} γ_bp = {}", cr.gamma, bp.gamma);
    assert!(cr.bracket.1 - cr.bracket.0 <= 1e-6);
}

#[test]
fn linear_critical_point_coincides_with_branch_point() {
    let cfg = GpeConfig { g: 0.0, ..physical() };
    let bp = branch_point_gamma(&cfg).unwrap();
    let cr = critical_gamma(&cfg).unwrap();
    assert!((bp.gamma - cr.gamma).abs() < 1e-5);
    // The oracle pair is complex just above and real just below.
    assert!(linear_spectrum_oracle(2.2, bp.gamma + 1e-3).iter().all(|k| k.im.abs() > 1e-6));
    assert!(linear_spectrum_oracle(2.2, bp.gamma - 1e-3).iter().all(|k| k.im.abs() < 1e-9));
}

#[test]
fn broken_pair_above_triple_point_is_conjugate() {
    let cfg = physical().with_gamma(c(0.35, 0.0));
    let (upper, lower) = broken_pair(&cfg).unwrap();
    assert!(upper.kappa.im > 1e-3);
    assert!((upper.kappa - lower.kappa.conj()).norm() < 1e-8, "{} {}", upper.kappa, lower.kappa);
    assert_eq!(upper.pt_class, PtClass::PtBroken);
    assert_eq!(lower.pt_class, PtClass::PtBroken);
    for s in [&upper, &lower] {
        assert!((s.norm - 1.0).abs() < 1e-8, "{}", s.norm);
    }
}

#[test]
fn broken_pair_vanishes_below_triple_point() {
    let cfg = physical().with_gamma(c(0.25, 0.0));
    assert!(broken_pair(&cfg).is_err());
}

#[test]
fn real_states_are_pt_symmetric_and_normalised() {
    for gamma in [0.0, 0.15, 0.3] {
        let cfg = physical().with_gamma(c(gamma, 0.0));
        let (ground, excited) = ground_and_excited(&cfg).unwrap();
        for s in [&ground, &excited] {
            assert!(s.kappa.im.abs() < 1e-9);
            assert!(s.pt_defect < 1e-6, "γ = {gamma}: {}", s.pt_defect);
            assert_eq!(s.pt_class, PtClass::PtSymmetric);
            assert!((s.norm - 1.0).abs() < 1e-8, "γ = {gamma}: {}", s.norm);
        }
        assert!(ground.kappa.re > excited.kappa.re, "the larger κ is the lower energy");
    }
}

#[test]
fn naive_and_pt_continued_agree_on_real_states() {
    for gamma in [0.1, 0.3] {
        let cfg = physical().with_gamma(c(gamma, 0.0));
        let (g_naive, e_naive) = ground_and_excited(&cfg).unwrap();
        let (g_pt, e_pt) = ground_and_excited(&cfg.with_mode(Mode::PtContinued)).unwrap();
        assert!((g_naive.kappa - g_pt.kappa).norm() < 1e-8);
        assert!((e_naive.kappa - e_pt.kappa).norm() < 1e-8);
        assert!(g_pt.pt_defect < 1e-6 && (g_pt.norm - 1.0).abs() < 1e-8);
    }
}

#[test]
fn full_continuation_reproduces_the_naive_ground_state() {
    let (naive, _) = ground_and_excited(&physical()).unwrap();
    let full = into_mode(&physical().with_mode(Mode::FullContinuation), &naive).unwrap();
    assert!((full.kappa - naive.kappa).norm() < 1e-8, "{} vs {}", full.kappa, naive.kappa);
    let k = full.kappa_components;
    assert!(k.ri.abs() < 1e-8 && k.ii.abs() < 1e-8);
}

#[test]
fn continued_states_are_degenerate_at_zero_gamma() {
    let (upper, lower) = continued_pair(&physical()).unwrap();
    assert!((upper.kappa.re - lower.kappa.re).abs() < 1e-6, "{} {}", upper.kappa, lower.kappa);
    // Real and distinct from the physical ground state.
    let (ground, _) = ground_and_excited(&physical()).unwrap();
    assert!(upper.kappa.im.abs() < 1e-8);
    assert!((upper.kappa.re - ground.kappa.re).abs() > 1e-3);
    for s in [&upper, &lower] {
        assert!(max_part(s, |v| v.ri) > 1e-2, "ψ_ri vanishes");
        assert_eq!(s.pt_class, PtClass::PtSymmetric);
    }
    // The two solutions differ by the sign of the (odd) continued part.
    let ri = |s: &BoundState| s.psi.iter().filter(|w| w.x > 0.0).map(|w| w.value.ri).sum::<f64>();
    assert!(ri(&upper) * ri(&lower) < 0.0);
}

#[test]
fn continued_states_split_for_nonzero_gamma() {
    let (upper, lower) = continued_pair(&physical().with_gamma(c(0.15, 0.0))).unwrap();
    assert!(upper.kappa.re - lower.kappa.re > 1e-4, "{} {}", upper.kappa, lower.kappa);
    assert!(upper.kappa.im.abs() < 1e-8 && lower.kappa.im.abs() < 1e-8);
}

#[test]
fn continued_wave_functions_change_character_towards_triple_point() {
    let cr = detected_critical().gamma;
    let ri_ir = |gamma: f64| {
        let (upper, _) = continued_pair(&physical().with_gamma(c(gamma, 0.0))).unwrap();
        (max_part(&upper, |v| v.ri), max_part(&upper, |v| v.ir))
    };
    let (ri0, ir0) = ri_ir(0.0);
    let (ri1, ir1) = ri_ir(0.5 * cr);
    let (ri2, ir2) = ri_ir(cr - 0.01);
    assert!(ri0 > ri1 && ri1 > ri2, "ψ_ri: {ri0} {ri1} {ri2}");
    assert!(ri2 < 0.5 * ri0, "ψ_ri does not approach zero: {ri0} → {ri2}");
    assert!(ir2 > ir1 && ir1 > ir0, "ψ_ir: {ir0} {ir1} {ir2}");
}

#[test]
fn continued_wave_functions_have_definite_parity() {
    let (upper, _) = continued_pair(&physical().with_gamma(c(0.15, 0.0))).unwrap();
    let n = upper.psi.len();
    let mut worst: f64 = 0.0;
    for k in 0..n {
        let (p, m) = (upper.psi[k], upper.psi[n - 1 - k]);
        assert!((p.x + m.x).abs() < 1e-12);
        worst = worst
            .max((p.value.rr - m.value.rr).abs())
            .max((p.value.ii - m.value.ii).abs())
            .max((p.value.ri + m.value.ri).abs())
            .max((p.value.ir + m.value.ir).abs());
    }
    assert!(worst < 1e-6, "{worst}");
}

#[test]
fn weak_nonlinearity_approaches_linear_spectrum() {
    let (even, odd) = linear_oracle_at(0.15);
    let mut last = (f64::INFINITY, f64::INFINITY);
    for g in [0.05, 0.02, 0.01] {
        let cfg = GpeConfig::new(g, 0.15, Mode::Naive);
        let (ground, excited) = ground_and_excited(&cfg).unwrap();
        let d = ((ground.kappa.re - even).abs(), (excited.kappa.re - odd).abs());
        assert!(d.0 < last.0 && d.1 < last.1, "g = {g}: {d:?} after {last:?}");
        last = d;
    }
    assert!(last.0 < 0.01 && last.1 < 0.01);
}

fn linear_oracle_at(gamma: f64) -> (f64, f64) {
    let roots = linear_spectrum_oracle(2.2, gamma);
    assert!(roots.iter().all(|k| k.im.abs() < 1e-12));
    (roots[0].re, roots[1].re)
}

#[test]
fn jacobian_matches_central_differences() {
    let cfg = physical().with_gamma(c(0.2, 0.0));
    let (ground, _) = ground_and_excited(&cfg).unwrap();
    let cases = [
        (cfg.clone(), ground.unknowns.clone()),
        (cfg.with_mode(Mode::PtContinued), convert_unknowns(Mode::Naive, Mode::PtContinued, &ground.unknowns).unwrap()),
        (cfg.with_mode(Mode::FullContinuation), to_full_unknowns(Mode::Naive, &ground.unknowns).unwrap()),
    ];
    for (cfg, x) in cases {
        // A generic point next to the solution.
        let x: Vec<f64> = x.iter().enumerate().map(|(k, v)| v + 0.01 * (k as f64 + 1.0).sin()).collect();
        let j = jacobian(&cfg, &x).unwrap();
        let fd = jacobian_central_difference(&cfg, &x, 1e-5).unwrap();
        let rel = (&j - &fd).norm() / fd.norm();
        assert!(rel < 1e-4, "{:?}: relative difference {rel:e}", cfg.mode);
    }
}

#[test]
fn continuation_of_zero_length_returns_seed() {
    let (ground, _) = ground_and_excited(&physical()).unwrap();
    let out = continue_branch(&physical(), SweepParameter::Gamma, &[c(0.0, 0.0)], &ground).unwrap();
    assert_eq!(out.len(), 1);
    assert_eq!(out[0].kappa, ground.kappa);
}

#[test]
fn ground_state_is_lost_at_branch_point() {
    let bp = detected_branch_point().gamma;
    let (ground, _) = ground_and_excited(&physical()).unwrap();
    let path: Vec<Complex64> = (0..=45).map(|k| c(0.01 * k as f64, 0.0)).collect();
    let err = continue_branch(&physical(), SweepParameter::Gamma, &path, &ground).unwrap_err();
    let Error::BranchLost { last_good } = err else { panic!("{err:?}") };
    assert!(last_good < bp + 1e-9 && last_good > bp - 0.02, "lost at {last_good}, γ_bp = {bp}");
}

#[test]
fn complex_gamma_requires_continued_mode() {
    let err = solve_bound_state(&physical().with_gamma(c(0.3, 0.01)), &[0.7, 0.0, 0.5, 0.0, 0.5]).unwrap_err();
    assert!(matches!(err, Error::InvalidConfig(_)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn linear_spectrum_is_closed_under_conjugation(gamma in 0.0f64..0.8, a in 1.5f64..3.0) {
        let roots = linear_spectrum_oracle(a, gamma);
        for k in &roots {
            prop_assert!(roots.iter().any(|q| (q - k.conj()).norm() < 1e-8), "{roots:?}");
        }
    }

    #[test]
    fn delta_jump_is_linear(p in -2.0f64..2.0, d in -2.0f64..2.0, sr in -2.0f64..2.0, si in -2.0f64..2.0) {
        let s = c(sr, si);
        let one = delta_jump(c(p, 0.0), c(d, 0.0), s);
        let two = delta_jump(c(2.0 * p, 0.0), c(2.0 * d, 0.0), s);
        prop_assert!((two - one * 2.0).norm() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn naive_spectra_are_closed_under_conjugation(gamma in 0.32f64..0.38) {
        let cfg = physical().with_gamma(c(gamma, 0.0));
        let (upper, lower) = broken_pair(&cfg).unwrap();
        prop_assert!((upper.kappa - lower.kappa.conj()).norm() < 1e-8);
        let (ground, excited) = ground_and_excited(&cfg).unwrap();
        prop_assert!(ground.kappa.im.abs() < 1e-8 && excited.kappa.im.abs() < 1e-8);
    }

    #[test]
    fn physical_states_are_normalised_and_symmetric(gamma in 0.0f64..0.3, g in 0.2f64..1.2) {
        let cfg = GpeConfig::new(g, gamma, Mode::Naive);
        let (ground, excited) = ground_and_excited(&cfg).unwrap();
        for s in [&ground, &excited] {
            prop_assert!((s.norm - 1.0).abs() < 1e-8);
            prop_assert!(s.pt_defect < 1e-6);
        }
    }
}
