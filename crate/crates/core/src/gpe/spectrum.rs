//! Locating the individual branches of the spectrum and its special points.

use num_complex::Complex64;

use super::branch::{trace_branch, ContinuationOptions, SweepParameter};
use super::solver::{solve_bound_state, to_full_unknowns, BoundState, PtClass};
use super::{linear_spectrum_oracle, GpeConfig, Mode};
use crate::error::{Error, Result};

/// Names of the branches tracked in spectra.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StateLabel {
    Ground,
    Excited,
    /// PT-broken state with `Im κ > 0`.
    BrokenUpper,
    BrokenLower,
    /// Real states of the full continuation below `γ_cr`; `Upper` has the
    /// larger `Re κ` for `γ > 0`.
    ContinuedUpper,
    ContinuedLower,
}

impl StateLabel {
    pub fn name(self) -> &'static str {
        match self {
            StateLabel::Ground => "ground",
            StateLabel::Excited => "excited",
            StateLabel::BrokenUpper => "broken+",
            StateLabel::BrokenLower => "broken-",
            StateLabel::ContinuedUpper => "continued+",
            StateLabel::ContinuedLower => "continued-",
        }
    }
}

/// A special point on the real `γ` axis together with the bracket that
/// located it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CriticalPoint {
    pub gamma: f64,
    pub kappa: Complex64,
    /// `(lo, hi)` with the defining property changing inside.
    pub bracket: (f64, f64),
}

/// Branch values at one parameter value.
#[derive(Clone, Debug)]
pub struct GpeSpectrum {
    pub gamma: f64,
    pub states: Vec<(StateLabel, BoundState)>,
}

/// Step used when scanning `γ` for branch points.
const SCAN_STEP: f64 = 0.005;
/// Width of the final bisection bracket.
const BISECTION_WIDTH: f64 = 1e-6;

fn real_path(from: f64, to: f64, step: f64) -> Vec<Complex64> {
    let n = ((to - from).abs() / step).ceil().max(1.0) as usize;
    (0..=n).map(|k| Complex64::new(from + (to - from) * k as f64 / n as f64, 0.0)).collect()
}

/// Re-expresses the unknowns of a PT-symmetric or PT-continued state in
/// another mode.
pub fn convert_unknowns(from: Mode, to: Mode, x: &[f64]) -> Result<Vec<f64>> {
    match (from, to) {
        _ if from == to => Ok(x.to_vec()),
        (Mode::Naive, Mode::PtContinued) => {
            // A PT-symmetric naive state with real c_R already satisfies
            // ∫ψ(x)ψ(−x) = ∫|ψ|² = 1.
            let mut y = x.to_vec();
            y.push(0.0);
            Ok(y)
        }
        (Mode::PtContinued, Mode::Naive) => {
            let phase = Complex64::new(x[4], x[5]).conj();
            let phase = phase / phase.norm();
            let left = Complex64::new(x[2], x[3]) * phase;
            Ok(vec![x[0], x[1], left.re, left.im, Complex64::new(x[4], x[5]).norm()])
        }
        (_, Mode::FullContinuation) => to_full_unknowns(from, x),
        _ => Err(Error::InvalidConfig(format!("cannot map {} unknowns to {}", from.name(), to.name()))),
    }
}

/// Unknowns of the PT image `conj ψ(−x)` of a naive state, eigenvalue
/// `conj κ`.
pub fn pt_partner(x: &[f64]) -> Vec<f64> {
    let left = Complex64::new(x[4], 0.0);
    let right = Complex64::new(x[2], -x[3]);
    let phase = right.conj() / right.norm();
    let left = left * phase;
    vec![x[0], -x[1], left.re, left.im, right.norm()]
}

fn solve_linear_pair(cfg: &GpeConfig) -> Result<(BoundState, BoundState)> {
    let lin = GpeConfig { g: 0.0, gamma: Complex64::new(0.0, 0.0), mode: Mode::Naive, ..cfg.clone() };
    let roots = linear_spectrum_oracle(cfg.a, 0.0);
    let [even, odd] = roots[..] else {
        return Err(Error::InvalidConfig(format!("expected two linear bound states, found {}", roots.len())));
    };
    let ground = solve_bound_state(&lin, &[even.re, 0.0, 0.5, 0.0, 0.5])?;
    let excited = solve_bound_state(&lin, &[odd.re, 0.0, -0.5, 0.0, 0.5])?;
    Ok((ground, excited))
}

fn follow(cfg: &GpeConfig, param: SweepParameter, path: &[Complex64], seed: &BoundState) -> Result<BoundState> {
    let track = trace_branch(cfg, param, path, seed, &ContinuationOptions::default());
    match (track.lost_after, track.points.into_iter().last()) {
        (None, Some(p)) => Ok(p.state),
        (lost, _) => Err(Error::BranchLost { last_good: lost.map_or(0.0, |p| p.re) }),
    }
}

/// The two PT-symmetric states at `cfg.gamma` (real), obtained from the
/// linear states by continuation in `g` at `γ = 0` and then in `γ`.
/// Returned in the mode of `cfg`.
pub fn ground_and_excited(cfg: &GpeConfig) -> Result<(BoundState, BoundState)> {
    cfg.validate()?;
    let gamma = cfg.gamma.re;
    if cfg.gamma.im != 0.0 || cfg.asym != Complex64::new(0.0, 0.0) {
        return Err(Error::InvalidConfig("PT-symmetric states need real γ and A = 0".into()));
    }
    let naive = GpeConfig { mode: Mode::Naive, gamma: Complex64::new(0.0, 0.0), ..cfg.clone() };
    let (g0, e0) = solve_linear_pair(cfg)?;
    let mut out = Vec::with_capacity(2);
    for seed in [g0, e0] {
        let mut s = seed;
        if cfg.g != 0.0 {
            let path = real_path(0.0, cfg.g, 0.05);
            s = follow(&naive.with_g(0.0), SweepParameter::G, &path, &s)?;
        }
        if gamma != 0.0 {
            s = follow(&naive, SweepParameter::Gamma, &real_path(0.0, gamma, 0.01), &s)?;
        }
        out.push(into_mode(cfg, &s)?);
    }
    let excited = out.pop().expect("two states");
    let ground = out.pop().expect("two states");
    Ok((ground, excited))
}

/// Re-solves a naive state in the mode of `cfg`.
pub fn into_mode(cfg: &GpeConfig, state: &BoundState) -> Result<BoundState> {
    if state.mode == cfg.mode {
        return Ok(state.clone());
    }
    let x = convert_unknowns(state.mode, cfg.mode, &state.unknowns)?;
    solve_bound_state(cfg, &x)
}

fn is_broken(s: &BoundState) -> bool {
    s.kappa.im.abs() > 1e-7 && s.pt_class == PtClass::PtBroken
}

/// The PT-broken pair of the naive equation at real `cfg.gamma`, searched
/// from symmetry-breaking perturbations of the ground state. Returned as
/// `(Im κ > 0, Im κ < 0)`.
pub fn broken_pair(cfg: &GpeConfig) -> Result<(BoundState, BoundState)> {
    let naive = cfg.with_mode(Mode::Naive);
    naive.validate()?;
    let kappa0 = match ground_and_excited(&naive) {
        Ok((g, _)) => g.kappa.re,
        Err(_) => linear_spectrum_oracle(cfg.a, cfg.gamma.re).first().map_or(0.6, |k| k.re),
    };
    let mut last = Error::NoConvergence { iterations: 0, last_norm: f64::INFINITY };
    for eta in [0.05, 0.1, 0.02] {
        for ratio in [0.5f64, 2.0, 0.8, 1.25] {
            for theta in [-1.0f64, 1.0, -0.4, 0.4] {
                let scale = 0.84 / (1.0 + ratio * ratio).sqrt();
                let guess = [kappa0, -eta, scale * ratio * theta.cos(), scale * ratio * theta.sin(), scale];
                match solve_bound_state(&naive, &guess) {
                    Ok(s) if is_broken(&s) => {
                        let partner = solve_bound_state(&naive, &pt_partner(&s.unknowns))?;
                        return Ok(if s.kappa.im > 0.0 { (s, partner) } else { (partner, s) });
                    }
                    Ok(_) => {}
                    Err(e) => last = e,
                }
            }
        }
    }
    Err(last)
}

/// The two additional real states of the full continuation at real
/// `cfg.gamma < γ_cr`, seeded at `γ = 0` with opposite signs of the
/// continued component `ψ_ri`. Returned as `(larger, smaller)` `Re κ`.
pub fn continued_pair(cfg: &GpeConfig) -> Result<(BoundState, BoundState)> {
    let full = cfg.with_mode(Mode::FullContinuation).with_gamma(Complex64::new(0.0, 0.0));
    full.validate()?;
    let (ground, _) = ground_and_excited(&full.with_mode(Mode::Naive))?;
    let k0 = ground.kappa.re;
    let mut found: Vec<BoundState> = Vec::new();
    'sign: for sign in [1.0, -1.0] {
        for shift in [0.9, 0.8, 0.95, 0.7] {
            for (amp, twist) in [(0.6, 0.4), (0.5, 0.3), (0.7, 0.6), (0.4, 0.1)] {
                let guess = [k0 * shift, 0.0, 0.0, 0.0, amp, -sign * twist, 0.0, 0.0, amp, sign * twist];
                let Ok(s) = solve_bound_state(&full, &guess) else { continue };
                let twisted = s.unknowns[9].abs() > 1e-6 && s.unknowns[9].signum() == sign;
                if twisted && s.pt_class == PtClass::PtSymmetric {
                    found.push(s);
                    continue 'sign;
                }
            }
        }
        return Err(Error::NoConvergence { iterations: 0, last_norm: f64::NAN });
    }
    let gamma = cfg.gamma.re;
    if gamma != 0.0 {
        let path = real_path(0.0, gamma, 0.01);
        found = found.iter().map(|s| follow(&full, SweepParameter::Gamma, &path, s)).collect::<Result<_>>()?;
    }
    found.sort_by(|a, b| b.kappa.re.total_cmp(&a.kappa.re));
    let lower = found.pop().expect("two states");
    let upper = found.pop().expect("two states");
    Ok((upper, lower))
}

/// Bisects `[lo, hi]` where `holds(lo) != holds(hi)` down to
/// [`BISECTION_WIDTH`]. `holds` returns the state when the property holds.
fn bisect_existence<F>(mut lo: f64, mut hi: f64, mut exists_at: F) -> (f64, f64)
where
    F: FnMut(f64) -> bool,
{
    while (hi - lo).abs() > BISECTION_WIDTH {
        let mid = 0.5 * (lo + hi);
        if exists_at(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (lo, hi)
}

/// `γ_bp`: where the ground and excited PT-symmetric states merge, found by
/// continuing the ground state in `γ` until it is lost and bisecting on its
/// existence.
pub fn branch_point_gamma(cfg: &GpeConfig) -> Result<CriticalPoint> {
    let naive = GpeConfig { mode: Mode::Naive, gamma: Complex64::new(0.0, 0.0), ..cfg.clone() };
    let (ground, _) = ground_and_excited(&naive)?;
    let path = real_path(0.0, 2.0, SCAN_STEP);
    let opts = ContinuationOptions {
        min_fraction: 1.0 / 64.0,
        require_class: Some(PtClass::PtSymmetric),
        ..Default::default()
    };
    let track = trace_branch(&naive, SweepParameter::Gamma, &path, &ground, &opts);
    let Some(lost) = track.lost_after else {
        return Err(Error::InvalidConfig("no branch point below γ = 2".into()));
    };
    let last = track.points.last().map(|p| p.state.clone()).unwrap_or(ground);
    let mut best = last.clone();
    let mut best_gamma = lost.re;
    let (lo, hi) = bisect_existence(lost.re + SCAN_STEP, lost.re, |gamma| {
        match solve_bound_state(&naive.with_gamma(Complex64::new(gamma, 0.0)), &best.unknowns) {
            Ok(s) if s.pt_class == PtClass::PtSymmetric && s.kappa.im.abs() < 1e-7 => {
                if gamma > best_gamma {
                    best_gamma = gamma;
                    best = s;
                }
                true
            }
            _ => false,
        }
    });
    Ok(CriticalPoint { gamma: 0.5 * (lo + hi), kappa: best.kappa, bracket: (hi.min(lo), hi.max(lo)) })
}

/// `γ_cr`: where the PT-broken pair bifurcates from the ground state.
///
/// The broken branch is followed downwards from just below `γ_bp` until it
/// disappears, then the bracket is bisected on its existence. For `g = 0`
/// the pair is born at `γ_bp` itself.
pub fn critical_gamma(cfg: &GpeConfig) -> Result<CriticalPoint> {
    let bp = branch_point_gamma(cfg)?;
    if cfg.g == 0.0 {
        return Ok(bp);
    }
    let naive = GpeConfig { mode: Mode::Naive, ..cfg.clone() };
    let mut start = None;
    for back in [0.01, 0.02, 0.04, 0.08, 0.16] {
        let gamma = bp.gamma - back;
        if gamma <= 0.0 {
            break;
        }
        if let Ok((upper, _)) = broken_pair(&naive.with_gamma(Complex64::new(gamma, 0.0))) {
            start = Some((gamma, upper));
            break;
        }
    }
    let Some((gamma0, seed)) = start else {
        return Err(Error::NoConvergence { iterations: 0, last_norm: f64::NAN });
    };

    // March down while the branch stays broken.
    let mut hi = gamma0;
    let mut hi_state = seed;
    let mut lo = 0.0;
    let mut gamma = gamma0;
    while gamma > 0.0 {
        gamma = (gamma - SCAN_STEP).max(0.0);
        match solve_bound_state(&naive.with_gamma(Complex64::new(gamma, 0.0)), &hi_state.unknowns) {
            Ok(s) if is_broken(&s) => {
                hi = gamma;
                hi_state = s;
            }
            _ => {
                lo = gamma;
                break;
            }
        }
    }
    let mut best = hi_state.clone();
    let mut best_gamma = hi;
    let (lo, hi) = bisect_existence(lo, hi, |g| {
        match solve_bound_state(&naive.with_gamma(Complex64::new(g, 0.0)), &best.unknowns) {
            Ok(s) if is_broken(&s) => {
                if g < best_gamma {
                    best_gamma = g;
                    best = s;
                }
                true
            }
            _ => false,
        }
    });
    Ok(CriticalPoint { gamma: 0.5 * (lo + hi), kappa: Complex64::new(best.kappa.re, 0.0), bracket: (lo, hi) })
}
