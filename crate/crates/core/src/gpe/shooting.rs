use num_complex::Complex64;

use super::{GpeConfig, Mode, DECAY_LENGTHS};
use crate::error::{Error, Result};
use crate::ode::{self, Trajectory};
use crate::scalar::{Amplitude, Bicomplex};

/// Derivative just right of a delta well of coefficient `strength`
/// (the potential term is `−strength·δ(x−x₀)`).
pub fn delta_jump<T: Amplitude>(psi: T, dpsi_left: T, strength: T) -> T {
    dpsi_left - strength * psi
}

/// Right-hand side data for the paired system `u(x) = ψ(x)`, `v(x) = ψ(−x)`.
#[derive(Clone, Copy, Debug)]
pub struct ShootingModel<T> {
    pub mode: Mode,
    pub kappa: T,
    pub g: f64,
    /// Coefficient of the well at `−a/2` (seen by `v` at `x = a/2`).
    pub strength_left: T,
    /// Coefficient of the well at `+a/2`.
    pub strength_right: T,
    pub half_a: f64,
    kappa_sq: T,
}

impl<T: Amplitude> ShootingModel<T> {
    pub fn new(cfg: &GpeConfig, kappa: T) -> Self {
        let i = T::imag_unit();
        let gamma = T::parameter(cfg.gamma);
        let asym = T::parameter(cfg.asym);
        Self {
            mode: cfg.mode,
            kappa,
            g: cfg.g,
            strength_left: T::one() + i * gamma + asym,
            strength_right: T::one() - i * gamma - asym,
            half_a: cfg.a / 2.0,
            kappa_sq: kappa * kappa,
        }
    }

    /// Local density entering the nonlinearity of `u` and of `v`.
    fn densities(&self, u: T, v: T) -> (T, T) {
        match self.mode {
            Mode::PtContinued => {
                let uv = u * v;
                (uv, uv)
            }
            Mode::Naive | Mode::FullContinuation => (u * u.conj_phys(), v * v.conj_phys()),
        }
    }

    /// Integrand of the normalization condition on `x ≥ 0`.
    fn constraint_density(&self, u: T, v: T) -> T {
        match self.mode {
            Mode::PtContinued => u * v * 2.0,
            Mode::Naive | Mode::FullContinuation => u * u.conj_phys() + v * v.conj_phys(),
        }
    }

    /// `∫_{x_max}^∞` of the constraint density for pure exponential tails.
    fn tail_constraint(&self, u: T, v: T) -> T {
        let partner = match self.mode {
            Mode::PtContinued => self.kappa,
            Mode::Naive | Mode::FullContinuation => self.kappa.conj_phys(),
        };
        self.constraint_density(u, v) * (self.kappa + partner).inv()
    }

    fn rhs(&self, y: &[f64], dy: &mut [f64]) {
        let d = T::DIM;
        let s = PairState::<T>::unpack(y);
        let (nu, nv) = self.densities(s.psi, s.mirror);
        let ddu = self.kappa_sq * s.psi - nu * s.psi * self.g;
        let ddv = self.kappa_sq * s.mirror - nv * s.mirror * self.g;
        // Integration runs towards the origin; the accumulators are signed so
        // they hold ∫_x^{x_max}.
        let acc = -self.constraint_density(s.psi, s.mirror);
        let pu = s.psi.display();
        let pv = s.mirror.display();
        s.dpsi.write_into(&mut dy[0..d]);
        ddu.write_into(&mut dy[d..2 * d]);
        s.dmirror.write_into(&mut dy[2 * d..3 * d]);
        ddv.write_into(&mut dy[3 * d..4 * d]);
        acc.write_into(&mut dy[4 * d..5 * d]);
        dy[5 * d] = -(pu.norm_sqr() + pv.norm_sqr());
    }
}

/// Value and slope of `ψ` at `+x` and of the mirror `v(x) = ψ(−x)`, plus the
/// running constraint and density integrals.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairState<T> {
    pub psi: T,
    pub dpsi: T,
    pub mirror: T,
    pub dmirror: T,
    pub constraint: T,
    pub density: f64,
}

impl<T: Amplitude> PairState<T> {
    pub fn new(psi: T, dpsi: T, mirror: T, dmirror: T) -> Self {
        Self { psi, dpsi, mirror, dmirror, constraint: T::zero(), density: 0.0 }
    }

    fn len() -> usize {
        5 * T::DIM + 1
    }

    fn pack(&self) -> Vec<f64> {
        let d = T::DIM;
        let mut y = vec![0.0; Self::len()];
        self.psi.write_into(&mut y[0..d]);
        self.dpsi.write_into(&mut y[d..2 * d]);
        self.mirror.write_into(&mut y[2 * d..3 * d]);
        self.dmirror.write_into(&mut y[3 * d..4 * d]);
        self.constraint.write_into(&mut y[4 * d..5 * d]);
        y[5 * d] = self.density;
        y
    }

    fn unpack(y: &[f64]) -> Self {
        let d = T::DIM;
        Self {
            psi: T::read_from(&y[0..d]),
            dpsi: T::read_from(&y[d..2 * d]),
            mirror: T::read_from(&y[2 * d..3 * d]),
            dmirror: T::read_from(&y[3 * d..4 * d]),
            constraint: T::read_from(&y[4 * d..5 * d]),
            density: y[5 * d],
        }
    }
}

/// Result of integrating across one delta-free interval.
#[derive(Clone, Debug)]
pub struct Segment<T> {
    pub end: PairState<T>,
    /// `(x, state)` at every accepted step, starting with `x0`.
    pub samples: Vec<(f64, PairState<T>)>,
}

/// Integrates the paired system from `x0` to `x1`; the interval must not
/// contain a well. Both the local value of ψ and its mirror are advanced, so
/// the nonlocal `ψ(−x)` terms never need interpolation.
pub fn integrate_segment<T: Amplitude>(
    model: &ShootingModel<T>,
    start: &PairState<T>,
    x0: f64,
    x1: f64,
    tol: f64,
    record: bool,
) -> Result<Segment<T>> {
    let (lo, hi) = if x0 < x1 { (x0, x1) } else { (x1, x0) };
    if lo < model.half_a && hi > model.half_a {
        return Err(Error::InvalidConfig(format!("segment [{lo}, {hi}] contains the well at {}", model.half_a)));
    }
    let sol = ode::integrate(|_, y, dy| model.rhs(y, dy), x0, &start.pack(), x1, tol, record)?;
    let samples = match sol.trajectory {
        Some(Trajectory { xs, states }) => {
            xs.into_iter().zip(states).map(|(x, s)| (x, PairState::unpack(&s))).collect()
        }
        None => Vec::new(),
    };
    Ok(Segment { end: PairState::unpack(&sol.state), samples })
}

/// Number of real unknowns (and residual components) of a mode.
pub fn unknown_count(mode: Mode) -> usize {
    match mode {
        Mode::Naive => 5,
        Mode::PtContinued => 6,
        Mode::FullContinuation => 10,
    }
}

/// Boundary data and eigenvalue decoded from an unknown vector.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Unknowns<T> {
    pub kappa: T,
    /// Amplitude of `ψ` at the left well, continued as `c·exp(−κ(|x|−a/2))`.
    pub left: T,
    pub right: T,
}

pub(crate) fn decode_complex(mode: Mode, x: &[f64]) -> Unknowns<Complex64> {
    let kappa = Complex64::new(x[0], x[1]);
    let left = Complex64::new(x[2], x[3]);
    let right = match mode {
        Mode::PtContinued => Complex64::new(x[4], x[5]),
        _ => Complex64::new(x[4], 0.0),
    };
    Unknowns { kappa, left, right }
}

pub(crate) fn decode_full(x: &[f64]) -> Unknowns<Bicomplex> {
    Unknowns {
        kappa: Bicomplex::new(x[0], x[1], x[2], x[3]),
        left: Bicomplex::new(x[4], x[5], x[6], x[7]),
        // Gauge: the right amplitude has no physical-imaginary parts.
        right: Bicomplex::new(x[8], x[9], 0.0, 0.0),
    }
}

/// Defects of one trial solution. Zero exactly at a bound state.
#[derive(Clone, Debug, PartialEq)]
pub struct ResidualVector {
    pub components: Vec<f64>,
}

impl ResidualVector {
    pub fn norm(&self) -> f64 {
        self.components.iter().map(|c| c * c).sum::<f64>().sqrt()
    }
    pub fn len(&self) -> usize {
        self.components.len()
    }
    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }
}

/// A complete shot from `±x_max` to the origin.
#[derive(Clone, Debug)]
pub(crate) struct Shot<T> {
    pub origin: PairState<T>,
    pub tail: T,
    pub tail_density: f64,
    pub x_max: f64,
    pub samples: Vec<(f64, PairState<T>)>,
}

impl<T: Amplitude> Shot<T> {
    /// Matching defects followed by the constraint defect `∫… − 1`.
    fn defects(&self) -> (T, T, T) {
        let o = &self.origin;
        (o.psi - o.mirror, o.dpsi + o.dmirror, o.constraint + self.tail - T::one())
    }

    pub fn density_total(&self) -> f64 {
        self.origin.density + self.tail_density
    }
}

pub(crate) fn auto_cutoff(half_a: f64, decay: f64) -> f64 {
    half_a + DECAY_LENGTHS / decay
}

pub(crate) fn shoot<T: Amplitude>(cfg: &GpeConfig, u: &Unknowns<T>, record: bool) -> Result<Shot<T>> {
    let decay = u.kappa.decay_rate();
    if !(decay > 0.0) {
        return Err(Error::NonDecaying { re_kappa: decay });
    }
    let model = ShootingModel::new(cfg, u.kappa);
    let half_a = model.half_a;
    let x_max = cfg.x_max.unwrap_or_else(|| auto_cutoff(half_a, decay));
    let envelope = (-(u.kappa * (x_max - half_a))).exp();
    let psi = u.right * envelope;
    let mirror = u.left * envelope;
    let cutoff = PairState::new(psi, -(u.kappa * psi), mirror, -(u.kappa * mirror));

    let outer = integrate_segment(&model, &cutoff, x_max, half_a, cfg.ode_tol, record)?;
    let mut at_well = outer.end;
    // Crossing a well from right to left is the jump with the sign reversed.
    at_well.dpsi = delta_jump(at_well.psi, at_well.dpsi, -model.strength_right);
    at_well.dmirror = delta_jump(at_well.mirror, at_well.dmirror, -model.strength_left);
    let inner = integrate_segment(&model, &at_well, half_a, 0.0, cfg.ode_tol, record)?;

    let mut samples = outer.samples;
    samples.extend(inner.samples.into_iter().skip(1));
    let tail = model.tail_constraint(psi, mirror);
    let tail_density = (psi.display().norm_sqr() + mirror.display().norm_sqr()) / (2.0 * decay);
    Ok(Shot { origin: inner.end, tail, tail_density, x_max, samples })
}

pub(crate) fn shoot_mode(cfg: &GpeConfig, x: &[f64]) -> Result<ResidualVector> {
    let mut c = Vec::with_capacity(x.len());
    match cfg.mode {
        Mode::Naive | Mode::PtContinued => {
            let shot = shoot(cfg, &decode_complex(cfg.mode, x), false)?;
            let (dv, dd, dn) = shot.defects();
            c.extend([dv.re, dv.im, dd.re, dd.im, dn.re]);
            if cfg.mode == Mode::PtContinued {
                c.push(dn.im);
            }
        }
        Mode::FullContinuation => {
            let shot = shoot(cfg, &decode_full(x), false)?;
            let (dv, dd, dn) = shot.defects();
            c.extend([dv.rr, dv.ri, dv.ir, dv.ii, dd.rr, dd.ri, dd.ir, dd.ii, dn.rr, dn.ri]);
        }
    }
    Ok(ResidualVector { components: c })
}

/// Matching and normalization defects for the unknown vector of the active
/// mode.
///
/// Layouts (all real):
/// * naive: `[Re κ, Im κ, Re c_L, Im c_L, c_R]` (global phase: `c_R` real),
/// * PT-continued: `[Re κ, Im κ, Re c_L, Im c_L, Re c_R, Im c_R]` (no phase
///   freedom; `∫ψ(x)ψ(−x)dx = 1` fixes it),
/// * full: `[κ_rr, κ_ri, κ_ir, κ_ii, c_L (4 parts), c_R,rr, c_R,ri]`.
///
/// `c_L`, `c_R` are the amplitudes at the wells of the outer decaying tails.
pub fn residual(unknowns: &[f64], cfg: &GpeConfig) -> Result<ResidualVector> {
    cfg.validate()?;
    let n = unknown_count(cfg.mode);
    if unknowns.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: unknowns.len() });
    }
    shoot_mode(cfg, unknowns)
}
