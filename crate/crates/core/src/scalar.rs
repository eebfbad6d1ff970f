//! Scalar types used by the shooting solver.
//!
//! Wave functions are either ordinary complex numbers or bicomplex numbers.
//! A bicomplex number carries a second, commuting imaginary unit `j` on top of
//! the physical unit `i`:
//!
//! ```text
//! z = rr + i·ir + j·(ri + i·ii)
//! ```
//!
//! so every real and imaginary part of the physical quantity is itself a
//! complex number in `j`. Mapping `j → i` gives back an ordinary complex
//! number, which is how continued eigenvalues are displayed.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_complex::Complex64;

/// A doubly complexified number with the four real parts `rr, ri, ir, ii`.
///
/// The first letter names the physical part (real / imaginary in `i`), the
/// second the part with respect to the continuation unit `j`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Bicomplex {
    pub rr: f64,
    pub ri: f64,
    pub ir: f64,
    pub ii: f64,
}

impl Bicomplex {
    pub const ZERO: Bicomplex = Bicomplex { rr: 0.0, ri: 0.0, ir: 0.0, ii: 0.0 };
    pub const ONE: Bicomplex = Bicomplex { rr: 1.0, ri: 0.0, ir: 0.0, ii: 0.0 };

    pub const fn new(rr: f64, ri: f64, ir: f64, ii: f64) -> Self {
        Self { rr, ri, ir, ii }
    }

    /// Embeds a physical complex number (no continued parts).
    pub fn from_physical(c: Complex64) -> Self {
        Self::new(c.re, 0.0, c.im, 0.0)
    }

    /// Embeds a complex number living in the continuation plane, `re + j·im`.
    pub fn from_continued(c: Complex64) -> Self {
        Self::new(c.re, c.im, 0.0, 0.0)
    }

    /// `z1` in `z = z1 + j·z2` (complex in `i`).
    fn first(self) -> Complex64 {
        Complex64::new(self.rr, self.ir)
    }

    /// `z2` in `z = z1 + j·z2` (complex in `i`).
    fn second(self) -> Complex64 {
        Complex64::new(self.ri, self.ii)
    }

    fn from_parts(z1: Complex64, z2: Complex64) -> Self {
        Self::new(z1.re, z2.re, z1.im, z2.im)
    }

    /// Recombination into the displayed complex value:
    /// `Re = rr − ii`, `Im = ri + ir`.
    pub fn recombine(self) -> Complex64 {
        Complex64::new(self.rr - self.ii, self.ri + self.ir)
    }

    /// The companion homomorphism `j → −i`.
    pub fn recombine_conjugate(self) -> Complex64 {
        Complex64::new(self.rr + self.ii, self.ir - self.ri)
    }

    /// Rebuilds a bicomplex number from its two idempotent images
    /// (`j → i` and `j → −i`).
    pub fn from_idempotent(plus: Complex64, minus: Complex64) -> Self {
        let z1 = (plus + minus) * 0.5;
        let z2 = (plus - minus) / Complex64::new(0.0, 2.0);
        Self::from_parts(z1, z2)
    }

    /// Conjugation with respect to the physical unit `i`; the analytic
    /// continuation of `ψ ↦ ψ*`.
    pub fn conj_i(self) -> Self {
        Self::new(self.rr, self.ri, -self.ir, -self.ii)
    }

    /// Conjugation of both units; complex conjugation of each idempotent
    /// image. PT symmetry of a continued state means `ψ(−x) = conj_ij(ψ(x))`.
    pub fn conj_ij(self) -> Self {
        Self::new(self.rr, -self.ri, -self.ir, self.ii)
    }

    pub fn exp(self) -> Self {
        Self::from_idempotent(self.recombine().exp(), self.recombine_conjugate().exp())
    }

    pub fn scale(self, s: f64) -> Self {
        Self::new(self.rr * s, self.ri * s, self.ir * s, self.ii * s)
    }

    pub fn max_abs(self) -> f64 {
        self.rr.abs().max(self.ri.abs()).max(self.ir.abs()).max(self.ii.abs())
    }
}

impl fmt::Display for Bicomplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {}, {})", self.rr, self.ri, self.ir, self.ii)
    }
}

impl Add for Bicomplex {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.rr + o.rr, self.ri + o.ri, self.ir + o.ir, self.ii + o.ii)
    }
}

impl AddAssign for Bicomplex {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl Sub for Bicomplex {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.rr - o.rr, self.ri - o.ri, self.ir - o.ir, self.ii - o.ii)
    }
}

impl Neg for Bicomplex {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-1.0)
    }
}

impl Mul for Bicomplex {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let (a1, a2) = (self.first(), self.second());
        let (b1, b2) = (o.first(), o.second());
        Self::from_parts(a1 * b1 - a2 * b2, a1 * b2 + a2 * b1)
    }
}

impl Mul<f64> for Bicomplex {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        self.scale(s)
    }
}

/// Arithmetic the shooting equations need from a wave-function value.
pub trait Amplitude:
    Copy
    + Default
    + fmt::Debug
    + PartialEq
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Mul<f64, Output = Self>
    + Neg<Output = Self>
{
    /// Number of real components.
    const DIM: usize;

    fn zero() -> Self;
    fn one() -> Self;
    /// `ψ ↦ ψ*` (or its continuation for bicomplex values).
    fn conj_phys(self) -> Self;
    fn exp(self) -> Self;
    fn write_into(self, out: &mut [f64]);
    fn read_from(src: &[f64]) -> Self;
    /// The value shown to the user.
    fn display(self) -> Complex64;
    /// Largest absolute component, used for error scaling.
    fn magnitude(self) -> f64;
    /// Embeds a model parameter; its imaginary part goes into the
    /// continuation unit for bicomplex values.
    fn parameter(c: Complex64) -> Self;
    /// The physical imaginary unit `i`.
    fn imag_unit() -> Self;
    fn inv(self) -> Self;
    fn sqrt(self) -> Self;
    /// Real parts of all decaying exponents carried by the value; every one
    /// must be positive for `exp(−κx)` to decay.
    fn decay_rate(self) -> f64;
    fn embed(self) -> Bicomplex;
}

impl Amplitude for Complex64 {
    const DIM: usize = 2;

    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn conj_phys(self) -> Self {
        self.conj()
    }
    fn exp(self) -> Self {
        Complex64::exp(self)
    }
    fn write_into(self, out: &mut [f64]) {
        out[0] = self.re;
        out[1] = self.im;
    }
    fn read_from(src: &[f64]) -> Self {
        Complex64::new(src[0], src[1])
    }
    fn display(self) -> Complex64 {
        self
    }
    fn magnitude(self) -> f64 {
        self.re.abs().max(self.im.abs())
    }
    fn parameter(c: Complex64) -> Self {
        c
    }
    fn imag_unit() -> Self {
        Complex64::new(0.0, 1.0)
    }
    fn inv(self) -> Self {
        Complex64::new(1.0, 0.0) / self
    }
    fn sqrt(self) -> Self {
        Complex64::sqrt(self)
    }
    fn decay_rate(self) -> f64 {
        self.re
    }
    fn embed(self) -> Bicomplex {
        Bicomplex::from_physical(self)
    }
}

impl Amplitude for Bicomplex {
    const DIM: usize = 4;

    fn zero() -> Self {
        Bicomplex::ZERO
    }
    fn one() -> Self {
        Bicomplex::ONE
    }
    fn conj_phys(self) -> Self {
        self.conj_i()
    }
    fn exp(self) -> Self {
        Bicomplex::exp(self)
    }
    fn write_into(self, out: &mut [f64]) {
        out[0] = self.rr;
        out[1] = self.ri;
        out[2] = self.ir;
        out[3] = self.ii;
    }
    fn read_from(src: &[f64]) -> Self {
        Bicomplex::new(src[0], src[1], src[2], src[3])
    }
    fn display(self) -> Complex64 {
        self.recombine()
    }
    fn magnitude(self) -> f64 {
        self.max_abs()
    }
    fn parameter(c: Complex64) -> Self {
        Bicomplex::from_continued(c)
    }
    fn imag_unit() -> Self {
        Bicomplex::new(0.0, 0.0, 1.0, 0.0)
    }
    fn inv(self) -> Self {
        let one = Complex64::new(1.0, 0.0);
        Bicomplex::from_idempotent(one / self.recombine(), one / self.recombine_conjugate())
    }
    fn sqrt(self) -> Self {
        Bicomplex::from_idempotent(self.recombine().sqrt(), self.recombine_conjugate().sqrt())
    }
    fn decay_rate(self) -> f64 {
        self.recombine().re.min(self.recombine_conjugate().re)
    }
    fn embed(self) -> Bicomplex {
        self
    }
}
