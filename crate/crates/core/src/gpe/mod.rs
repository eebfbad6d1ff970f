//! Stationary Gross-Pitaevskii equation with a PT-symmetric double-delta
//! trap,
//!
//! ```text
//! −ψ'' − [(1+iγ)δ(x+a/2) + (1−iγ)δ(x−a/2)]ψ − g·N[ψ]·ψ = −κ²ψ,
//! ```
//!
//! solved for bound states by shooting from `±x_max` towards the origin.
//!
//! The nonlinearity `N[ψ]` depends on [`Mode`]:
//!
//! * [`Mode::Naive`]: `|ψ(x)|²`, the physical equation.
//! * [`Mode::PtContinued`]: `ψ(x)ψ(−x)`, which equals `|ψ|²` on PT-symmetric
//!   states and is analytic in ψ.
//! * [`Mode::FullContinuation`]: `ψ·conj_i(ψ)` with bicomplex ψ and κ, the
//!   continuation obtained by letting real and imaginary parts of ψ and κ
//!   become complex themselves.
//!
//! Both halves of the line are integrated together: `u(x) = ψ(x)` and
//! `v(x) = ψ(−x)` for `x ≥ 0`. This keeps the mirror term `ψ(−x)` local and
//! matching reduces to `u(0) = v(0)`, `u'(0) = −v'(0)`.

mod branch;
mod linear;
mod shooting;
mod solver;
mod spectrum;

pub use branch::{continue_branch, trace_branch, BranchPoint, BranchTrack, ContinuationOptions, SweepParameter};
pub use linear::{linear_determinant, linear_spectrum, linear_spectrum_oracle};
pub use shooting::{
    delta_jump, integrate_segment, residual, unknown_count, PairState, ResidualVector, Segment, ShootingModel,
};
pub use solver::{
    jacobian, jacobian_central_difference, solve_bound_state, to_full_unknowns, BoundState, PtClass, WaveSample,
};
pub use spectrum::{
    branch_point_gamma, broken_pair, continued_pair, convert_unknowns, critical_gamma, ground_and_excited, into_mode,
    pt_partner, CriticalPoint, GpeSpectrum, StateLabel,
};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Treatment of the nonlinear term.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Naive,
    PtContinued,
    FullContinuation,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Naive => "naive",
            Mode::PtContinued => "pt-continued",
            Mode::FullContinuation => "full",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "naive" => Ok(Mode::Naive),
            "pt-continued" | "pt" => Ok(Mode::PtContinued),
            "full" | "full-continuation" => Ok(Mode::FullContinuation),
            other => Err(Error::InvalidConfig(format!("unknown mode `{other}`"))),
        }
    }
}

/// Physical and numerical parameters of one solve.
#[derive(Clone, Debug, PartialEq)]
pub struct GpeConfig {
    /// Nonlinearity strength.
    pub g: f64,
    /// Gain/loss strength; complex only when encircling in γ.
    pub gamma: Complex64,
    /// Well separation.
    pub a: f64,
    /// Asymmetry `A` of `A[δ(x−a/2) − δ(x+a/2)]` added to the potential.
    pub asym: Complex64,
    pub mode: Mode,
    /// Outer cutoff. `None` picks `a/2 + 12/Re κ` from the initial guess.
    pub x_max: Option<f64>,
    pub ode_tol: f64,
    pub newton_tol: f64,
    pub symmetry_tol: f64,
    pub max_newton_iter: usize,
    /// Re-solve with a 1.5× cutoff and require κ to move by less than
    /// [`CUTOFF_SHIFT_TOL`].
    pub verify_cutoff: bool,
}

/// Largest κ shift tolerated when the cutoff is enlarged by 1.5×.
pub const CUTOFF_SHIFT_TOL: f64 = 1e-9;

/// Decay lengths `1/Re κ` between the outer well and the cutoff.
pub const DECAY_LENGTHS: f64 = 12.0;

impl Default for GpeConfig {
    fn default() -> Self {
        Self {
            g: 1.0,
            gamma: Complex64::new(0.0, 0.0),
            a: 2.2,
            asym: Complex64::new(0.0, 0.0),
            mode: Mode::Naive,
            x_max: None,
            ode_tol: 1e-12,
            newton_tol: 1e-10,
            symmetry_tol: 1e-6,
            max_newton_iter: 40,
            verify_cutoff: true,
        }
    }
}

impl GpeConfig {
    pub fn new(g: f64, gamma: f64, mode: Mode) -> Self {
        Self { g, gamma: Complex64::new(gamma, 0.0), mode, ..Self::default() }
    }

    pub fn with_gamma(&self, gamma: Complex64) -> Self {
        Self { gamma, ..self.clone() }
    }

    pub fn with_asym(&self, asym: Complex64) -> Self {
        Self { asym, ..self.clone() }
    }

    pub fn with_mode(&self, mode: Mode) -> Self {
        Self { mode, ..self.clone() }
    }

    pub fn with_g(&self, g: f64) -> Self {
        Self { g, ..self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        if !(self.a > 0.0) {
            return bad("well separation a must be positive");
        }
        if !(self.g >= 0.0) || !self.g.is_finite() {
            return bad("nonlinearity g must be finite and non-negative");
        }
        if let Some(x) = self.x_max {
            if !(x > self.a / 2.0) {
                return bad("x_max must exceed a/2");
            }
        }
        if !(self.ode_tol > 0.0) || !(self.newton_tol > 0.0) || !(self.symmetry_tol > 0.0) {
            return bad("tolerances must be positive");
        }
        if self.mode == Mode::Naive && (self.gamma.im != 0.0 || self.asym.im != 0.0) {
            return bad("naive mode needs real gamma and asymmetry");
        }
        if !self.gamma.is_finite() || !self.asym.is_finite() {
            return bad("parameters must be finite");
        }
        Ok(())
    }

    pub(crate) fn newton_options(&self) -> crate::newton::NewtonOptions {
        crate::newton::NewtonOptions { tol: self.newton_tol, max_iter: self.max_newton_iter, ..Default::default() }
    }
}
