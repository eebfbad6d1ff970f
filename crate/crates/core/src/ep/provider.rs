use nalgebra::Vector3;
use num_complex::Complex64;

use super::contour::BranchTrace;
use crate::error::{Error, Result};
use crate::matrix_model::{eigenvalues, similarity_matrix, ModelParams};

/// A spectrum that can be followed along a path in one complex parameter.
///
/// `start` evaluates the spectrum at the first contour point; `advance`
/// moves from `from` to `to`, seeded by the state returned for `from`.
/// Branch order in the returned vectors is arbitrary; the tracer matches
/// branches itself.
pub trait SpectrumProvider {
    type Seed: Clone;

    fn labels(&self) -> Vec<String>;
    fn start(&self, at: Complex64) -> Result<(Vec<Complex64>, Self::Seed)>;
    fn advance(&self, seed: &Self::Seed, from: Complex64, to: Complex64) -> Result<(Vec<Complex64>, Self::Seed)>;
}

/// Wraps a closure evaluating the full spectrum at a parameter value.
pub struct FnProvider<F> {
    labels: Vec<String>,
    f: F,
}

impl<F: Fn(Complex64) -> Result<Vec<Complex64>>> FnProvider<F> {
    pub fn new(labels: Vec<String>, f: F) -> Self {
        Self { labels, f }
    }
}

impl<F: Fn(Complex64) -> Result<Vec<Complex64>>> SpectrumProvider for FnProvider<F> {
    type Seed = ();

    fn labels(&self) -> Vec<String> {
        self.labels.clone()
    }
    fn start(&self, at: Complex64) -> Result<(Vec<Complex64>, ())> {
        Ok(((self.f)(at)?, ()))
    }
    fn advance(&self, _: &(), _: Complex64, to: Complex64) -> Result<(Vec<Complex64>, ())> {
        Ok(((self.f)(to)?, ()))
    }
}

/// Levels `E2, E3, E4` of the matrix model as functions of complex γ at
/// fixed `g`.
#[derive(Clone, Copy, Debug)]
pub struct MatrixProvider {
    pub g: f64,
}

impl SpectrumProvider for MatrixProvider {
    type Seed = ();

    fn labels(&self) -> Vec<String> {
        ["E2", "E3", "E4"].map(String::from).to_vec()
    }
    fn start(&self, at: Complex64) -> Result<(Vec<Complex64>, ())> {
        let e = eigenvalues(&ModelParams { g: self.g, gamma: at })?;
        Ok((e.upper().to_vec(), ()))
    }
    fn advance(&self, _: &(), _: Complex64, to: Complex64) -> Result<(Vec<Complex64>, ())> {
        self.start(to)
    }
}

/// Eigenvalues of the perturbed appendix matrix as functions of complex `y`.
#[derive(Clone, Copy, Debug)]
pub struct AppendixProvider {
    pub eps: Complex64,
}

impl SpectrumProvider for AppendixProvider {
    type Seed = ();

    fn labels(&self) -> Vec<String> {
        ["E1", "E2", "E3"].map(String::from).to_vec()
    }
    fn start(&self, at: Complex64) -> Result<(Vec<Complex64>, ())> {
        Ok((super::appendix::appendix_spectrum(at, self.eps).to_vec(), ()))
    }
    fn advance(&self, _: &(), _: Complex64, to: Complex64) -> Result<(Vec<Complex64>, ())> {
        self.start(to)
    }
}

/// Eigenvalues of the appendix matrix as functions of complex ε at fixed `y`.
#[derive(Clone, Copy, Debug)]
pub struct AppendixEpsProvider {
    pub y: Complex64,
}

impl SpectrumProvider for AppendixEpsProvider {
    type Seed = ();

    fn labels(&self) -> Vec<String> {
        ["E1", "E2", "E3"].map(String::from).to_vec()
    }
    fn start(&self, at: Complex64) -> Result<(Vec<Complex64>, ())> {
        Ok((super::appendix::appendix_spectrum(self.y, at).to_vec(), ()))
    }
    fn advance(&self, _: &(), _: Complex64, to: Complex64) -> Result<(Vec<Complex64>, ())> {
        self.start(to)
    }
}

fn unit(v: Vector3<Complex64>) -> Vector3<Complex64> {
    v / Complex64::new(v.norm(), 0.0)
}

/// Follows the eigenvectors (columns of `s`) of a matrix-model trace and
/// returns the permutation they undergo: entry `i` is the starting branch
/// whose eigenvector branch `i` ends on.
///
/// Each column is matched to its branch through the closed-form eigenvalue
/// and phase-aligned with its predecessor; a jump in direction between
/// neighbouring steps is reported as `AmbiguousMatching`.
pub fn matrix_eigenvector_mapping(g: f64, trace: &BranchTrace) -> Result<Vec<usize>> {
    let vectors_at = |k: usize| -> Result<Vec<Vector3<Complex64>>> {
        let p = ModelParams { g, gamma: trace.parameters[k] };
        let s = similarity_matrix(&p)?;
        let e = eigenvalues(&p)?.upper();
        Ok(trace.values[k]
            .iter()
            .map(|v| {
                let col = (0..3).min_by(|&a, &b| (e[a] - v).norm().total_cmp(&(e[b] - v).norm())).unwrap();
                unit(s.column(col).into_owned())
            })
            .collect())
    };
    let first = vectors_at(0)?;
    let mut current = first.clone();
    for k in 1..trace.values.len() {
        let next = vectors_at(k)?;
        for (c, n) in current.iter_mut().zip(next) {
            let overlap = c.dotc(&n);
            if overlap.norm() < 0.5 {
                return Err(Error::AmbiguousMatching { phi: trace.angles[k] });
            }
            *c = n * (overlap.conj() / overlap.norm());
        }
    }
    Ok(current
        .iter()
        .map(|v| (0..first.len()).max_by(|&a, &b| first[a].dotc(v).norm().total_cmp(&first[b].dotc(v).norm())).unwrap())
        .collect())
}
