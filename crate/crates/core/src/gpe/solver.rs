use nalgebra::DMatrix;
use num_complex::Complex64;

use super::shooting::{auto_cutoff, decode_complex, decode_full, shoot, shoot_mode, unknown_count, PairState, Shot};
use super::{GpeConfig, Mode, CUTOFF_SHIFT_TOL};
use crate::error::{Error, Result};
use crate::newton;
use crate::scalar::{Amplitude, Bicomplex};

/// Outcome of the test `ψ*(x) = ψ(−x)` (up to a global phase).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PtClass {
    PtSymmetric,
    PtBroken,
}

impl PtClass {
    pub fn name(self) -> &'static str {
        match self {
            PtClass::PtSymmetric => "pt-symmetric",
            PtClass::PtBroken => "pt-broken",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WaveSample {
    pub x: f64,
    /// Physical states only populate `rr` and `ir`.
    pub value: Bicomplex,
}

/// A converged stationary state.
#[derive(Clone, Debug)]
pub struct BoundState {
    pub mode: Mode,
    /// Displayed eigenvalue (recombined in the full continuation).
    pub kappa: Complex64,
    pub kappa_components: Bicomplex,
    /// Samples on `[−x_max, x_max]` in increasing `x`, rotated by a global
    /// phase so that PT-symmetric states satisfy `ψ*(x) = ψ(−x)`.
    pub psi: Vec<WaveSample>,
    /// `∫|ψ|²dx` of the displayed wave function.
    pub norm: f64,
    pub pt_class: PtClass,
    /// `max_x |ψ*(x) − ψ(−x)|` after phase alignment. For continued states
    /// `ψ*` conjugates both units, so symmetry means `rr`, `ii` even and
    /// `ri`, `ir` odd.
    pub pt_defect: f64,
    pub residual_norm: f64,
    /// Converged unknown vector in the layout of [`super::residual`].
    pub unknowns: Vec<f64>,
    pub x_max: f64,
    pub iterations: usize,
}

impl BoundState {
    /// Energy `E = −κ²`.
    pub fn energy(&self) -> Complex64 {
        -self.kappa * self.kappa
    }
}

fn guess_decay(mode: Mode, x: &[f64]) -> f64 {
    match mode {
        Mode::Naive | Mode::PtContinued => decode_complex(mode, x).kappa.decay_rate(),
        Mode::FullContinuation => decode_full(x).kappa.decay_rate(),
    }
}

fn kappa_of(mode: Mode, x: &[f64]) -> Bicomplex {
    match mode {
        Mode::Naive | Mode::PtContinued => decode_complex(mode, x).kappa.embed(),
        Mode::FullContinuation => decode_full(x).kappa,
    }
}

fn check_dims(cfg: &GpeConfig, x: &[f64]) -> Result<()> {
    let n = unknown_count(cfg.mode);
    if x.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: x.len() });
    }
    Ok(())
}

/// Pins the cutoff so finite differences in κ do not move the grid.
fn pinned(cfg: &GpeConfig, x: &[f64]) -> Result<GpeConfig> {
    if cfg.x_max.is_some() {
        return Ok(cfg.clone());
    }
    let decay = guess_decay(cfg.mode, x);
    if !(decay > 0.0) {
        return Err(Error::NonDecaying { re_kappa: decay });
    }
    Ok(GpeConfig { x_max: Some(auto_cutoff(cfg.a / 2.0, decay)), ..cfg.clone() })
}

/// Forward-difference Jacobian of the residual, as used by Newton.
pub fn jacobian(cfg: &GpeConfig, x: &[f64]) -> Result<DMatrix<f64>> {
    cfg.validate()?;
    check_dims(cfg, x)?;
    let cfg = pinned(cfg, x)?;
    let mut f = |y: &[f64]| shoot_mode(&cfg, y).map(|r| r.components);
    let f0 = f(x)?;
    newton::jacobian_forward(&mut f, x, &f0, cfg.newton_options().fd_step)
}

/// Central-difference Jacobian with relative step `rel`.
pub fn jacobian_central_difference(cfg: &GpeConfig, x: &[f64], rel: f64) -> Result<DMatrix<f64>> {
    cfg.validate()?;
    check_dims(cfg, x)?;
    let cfg = pinned(cfg, x)?;
    let mut f = |y: &[f64]| shoot_mode(&cfg, y).map(|r| r.components);
    newton::jacobian_central(&mut f, x, rel)
}

fn newton_at(cfg: &GpeConfig, guess: &[f64]) -> Result<newton::NewtonOutcome> {
    newton::solve(|y: &[f64]| shoot_mode(cfg, y).map(|r| r.components), guess, &cfg.newton_options())
}

/// Solves for a bound state with damped Newton from `guess`.
///
/// Without an explicit `x_max` the cutoff is fixed from the guess; with
/// `verify_cutoff` the state is re-solved on a 1.5× larger cutoff until κ
/// moves by less than [`CUTOFF_SHIFT_TOL`].
pub fn solve_bound_state(cfg: &GpeConfig, guess: &[f64]) -> Result<BoundState> {
    cfg.validate()?;
    check_dims(cfg, guess)?;
    let mut fixed = pinned(cfg, guess)?;
    let mut out = newton_at(&fixed, guess)?;
    if cfg.verify_cutoff && cfg.x_max.is_none() {
        let mut shift = f64::INFINITY;
        for _ in 0..3 {
            let wider = GpeConfig { x_max: fixed.x_max.map(|x| 1.5 * x), ..fixed.clone() };
            let next = newton_at(&wider, &out.x)?;
            shift = (kappa_of(cfg.mode, &next.x) - kappa_of(cfg.mode, &out.x)).max_abs();
            fixed = wider;
            out = next;
            if shift < CUTOFF_SHIFT_TOL {
                break;
            }
        }
        if !(shift < CUTOFF_SHIFT_TOL) {
            return Err(Error::CutoffNotConverged { shift });
        }
    }
    build_state(&fixed, out)
}

fn build_state(cfg: &GpeConfig, out: newton::NewtonOutcome) -> Result<BoundState> {
    match cfg.mode {
        Mode::Naive | Mode::PtContinued => {
            let u = decode_complex(cfg.mode, &out.x);
            let shot = shoot(cfg, &u, true)?;
            Ok(assemble(cfg, u.kappa.embed(), &shot, out))
        }
        Mode::FullContinuation => {
            let u = decode_full(&out.x);
            let shot = shoot(cfg, &u, true)?;
            Ok(assemble(cfg, u.kappa, &shot, out))
        }
    }
}

fn assemble<T: Amplitude>(cfg: &GpeConfig, kappa: Bicomplex, shot: &Shot<T>, out: newton::NewtonOutcome) -> BoundState {
    let pairs: Vec<(f64, Bicomplex, Bicomplex)> =
        shot.samples.iter().map(|(x, s): &(f64, PairState<T>)| (*x, s.psi.embed(), s.mirror.embed())).collect();
    // PT-continued states carry no free phase; the others are rotated so the
    // symmetry test does not depend on the gauge.
    let w = match cfg.mode {
        Mode::PtContinued => Bicomplex::ONE,
        _ => pt_alignment(&pairs),
    };
    let pt_defect = pairs.iter().map(|&(_, u, v)| ((w * u).conj_ij() - w * v).max_abs()).fold(0.0, f64::max);
    let pt_class = if pt_defect <= cfg.symmetry_tol { PtClass::PtSymmetric } else { PtClass::PtBroken };

    let mut psi = Vec::with_capacity(2 * pairs.len());
    psi.extend(pairs.iter().map(|&(x, _, v)| WaveSample { x: -x, value: w * v }));
    psi.extend(pairs.iter().rev().skip(1).map(|&(x, u, _)| WaveSample { x, value: w * u }));

    BoundState {
        mode: cfg.mode,
        kappa: kappa.recombine(),
        kappa_components: kappa,
        psi,
        norm: shot.density_total(),
        pt_class,
        pt_defect,
        residual_norm: out.residual_norm,
        unknowns: out.x,
        x_max: shot.x_max,
        iterations: out.iterations,
    }
}

/// Global phase `e^{iθ}` that makes `e^{iθ}ψ` PT-symmetric when ψ is
/// PT-symmetric up to a phase, read off where ψ is largest.
fn pt_alignment(pairs: &[(f64, Bicomplex, Bicomplex)]) -> Bicomplex {
    let Some(&(_, u, v)) = pairs.iter().max_by(|a, b| a.1.max_abs().total_cmp(&b.1.max_abs())) else {
        return Bicomplex::ONE;
    };
    // conj(w·u) = w·v  ⇔  w² = conj(u)/v for a unit w.
    let lam = u.recombine().conj() / v.recombine();
    if !lam.is_finite() || lam.norm() == 0.0 {
        return Bicomplex::ONE;
    }
    Bicomplex::from_physical((lam / lam.norm()).sqrt())
}

/// Maps a converged naive or PT-continued unknown vector to the layout of
/// the full continuation, describing the same state.
///
/// A PT-continued solution ψ is embedded with idempotent images
/// `(ψ(x), conj ψ(−x))`, which solves the full equation; the result is then
/// gauge-rotated so the right amplitude has no physical-imaginary parts.
pub fn to_full_unknowns(mode: Mode, x: &[f64]) -> Result<Vec<f64>> {
    let n = unknown_count(mode);
    if x.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: x.len() });
    }
    let u = match mode {
        Mode::FullContinuation => return Ok(x.to_vec()),
        _ => decode_complex(mode, x),
    };
    let (kappa, left, right) = match mode {
        Mode::Naive => (u.kappa.embed(), u.left.embed(), u.right.embed()),
        _ => (
            Bicomplex::from_idempotent(u.kappa, u.kappa.conj()),
            Bicomplex::from_idempotent(u.left, u.right.conj()),
            Bicomplex::from_idempotent(u.right, u.left.conj()),
        ),
    };
    // Gauge w with images (w, 1/conj w): the right amplitude becomes
    // conj_i-real when w² = φ₋(c_R)* / φ₊(c_R).
    let (rp, rm) = (right.recombine(), right.recombine_conjugate());
    if rp.norm() == 0.0 || rm.norm() == 0.0 {
        return Err(Error::InvalidConfig("right amplitude vanishes".into()));
    }
    let wp = (rm.conj() / rp).sqrt();
    let w = Bicomplex::from_idempotent(wp, Complex64::new(1.0, 0.0) / wp.conj());
    let (left, right) = (w * left, w * right);
    Ok(vec![kappa.rr, kappa.ri, kappa.ir, kappa.ii, left.rr, left.ri, left.ir, left.ii, right.rr, right.ri])
}
