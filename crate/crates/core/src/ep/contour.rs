use std::f64::consts::TAU;

use num_complex::Complex64;

use super::provider::SpectrumProvider;
use crate::error::{Error, Result};

/// Steps are refined while the best assignment costs more than this
/// fraction of the second best.
pub const AMBIGUITY_RATIO: f64 = 0.5;
/// Largest number of halvings of the nominal angular step.
pub const MAX_REFINEMENTS: u32 = 14;

/// Which complex parameter the contour runs in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ContourParameter {
    /// Gain/loss γ of the condensate.
    Gamma,
    /// Well asymmetry A of the condensate.
    AsymmetryA,
    /// γ of the 3×3 matrix model.
    ModelGamma,
    /// `y` of the appendix matrix.
    AppendixY,
    /// The perturbation ε of the appendix matrix.
    AppendixEps,
}

impl ContourParameter {
    pub fn name(self) -> &'static str {
        match self {
            ContourParameter::Gamma => "gamma",
            ContourParameter::AsymmetryA => "asymmetry",
            ContourParameter::ModelGamma => "model-gamma",
            ContourParameter::AppendixY => "appendix-y",
            ContourParameter::AppendixEps => "appendix-eps",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Orientation {
    CounterClockwise,
    Clockwise,
}

impl Orientation {
    fn sign(self) -> f64 {
        match self {
            Orientation::CounterClockwise => 1.0,
            Orientation::Clockwise => -1.0,
        }
    }

    pub fn reversed(self) -> Self {
        match self {
            Orientation::CounterClockwise => Orientation::Clockwise,
            Orientation::Clockwise => Orientation::CounterClockwise,
        }
    }
}

/// The circle `center + radius·e^{±iφ}`, sampled at `n_steps` points per turn.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContourSpec {
    pub parameter: ContourParameter,
    pub center: Complex64,
    pub radius: f64,
    pub n_steps: usize,
    pub turns: u32,
    pub orientation: Orientation,
}

impl ContourSpec {
    pub fn circle(parameter: ContourParameter, center: Complex64, radius: f64, n_steps: usize) -> Self {
        Self { parameter, center, radius, n_steps, turns: 1, orientation: Orientation::CounterClockwise }
    }

    pub fn with_turns(self, turns: u32) -> Self {
        Self { turns, ..self }
    }

    pub fn with_orientation(self, orientation: Orientation) -> Self {
        Self { orientation, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.radius > 0.0) || !self.radius.is_finite() {
            return Err(Error::InvalidConfig(format!("contour radius must be positive, got {}", self.radius)));
        }
        if self.n_steps < 16 {
            return Err(Error::InvalidConfig(format!("contour needs at least 16 steps, got {}", self.n_steps)));
        }
        if self.turns == 0 {
            return Err(Error::InvalidConfig("contour needs at least one turn".into()));
        }
        if !self.center.is_finite() {
            return Err(Error::InvalidConfig("contour center is not finite".into()));
        }
        Ok(())
    }

    /// Parameter value at accumulated angle φ; whole turns return the start
    /// point exactly so the trace closes.
    pub fn point(&self, phi: f64) -> Complex64 {
        let turn = phi / TAU;
        if turn.fract() == 0.0 {
            return self.center + self.radius;
        }
        self.center + Complex64::from_polar(self.radius, self.orientation.sign() * phi)
    }

    fn total_angle(&self) -> f64 {
        TAU * self.turns as f64
    }
}

/// Branch values along a contour, one row per accepted step.
#[derive(Clone, Debug, PartialEq)]
pub struct BranchTrace {
    pub labels: Vec<String>,
    /// Accumulated angle of each row.
    pub angles: Vec<f64>,
    pub parameters: Vec<Complex64>,
    /// `values[step][branch]`.
    pub values: Vec<Vec<Complex64>>,
    pub matched: bool,
}

/// The closest assignment of `next` to `prev` and the ratio of its cost to
/// that of the runner-up.
fn best_assignment(prev: &[Complex64], next: &[Complex64]) -> (Vec<usize>, f64) {
    let n = prev.len();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best = (f64::INFINITY, perm.clone());
    let mut second = f64::INFINITY;
    let mut consider = |p: &[usize]| {
        let cost: f64 = p.iter().enumerate().map(|(i, &j)| (next[j] - prev[i]).norm()).sum();
        if cost < best.0 {
            second = best.0;
            best = (cost, p.to_vec());
        } else if cost < second {
            second = cost;
        }
    };
    // Heap's algorithm over all n! assignments.
    let mut c = vec![0usize; n];
    consider(&perm);
    let mut i = 1;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            consider(&perm);
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    let ratio = if second.is_infinite() {
        0.0
    } else if second == 0.0 {
        1.0
    } else {
        best.0 / second
    };
    (best.1, ratio)
}

fn min_gap(values: &[Complex64]) -> f64 {
    let mut gap = f64::INFINITY;
    for (i, a) in values.iter().enumerate() {
        for b in &values[i + 1..] {
            gap = gap.min((a - b).norm());
        }
    }
    gap
}

/// Follows every branch of `provider` around the contour.
///
/// Neighbouring steps are matched by the assignment of least total distance.
/// A step is halved whenever that assignment is not clearly better than the
/// runner-up (cost ratio above [`AMBIGUITY_RATIO`]), when some branch moves
/// by half the smallest gap or more, or when the provider fails; after
/// [`MAX_REFINEMENTS`] halvings the trace gives up.
pub fn trace_contour<P: SpectrumProvider>(provider: &P, spec: &ContourSpec) -> Result<BranchTrace> {
    spec.validate()?;
    let nominal = TAU / spec.n_steps as f64;
    let min_step = nominal / 2f64.powi(MAX_REFINEMENTS as i32);
    let total = spec.total_angle();

    let start = spec.point(0.0);
    let (first, mut seed) = provider.start(start)?;
    let n = first.len();
    if n == 0 {
        return Err(Error::CardinalityChange { expected: 1, got: 0 });
    }
    let labels = provider.labels();
    let mut trace =
        BranchTrace { labels, angles: vec![0.0], parameters: vec![start], values: vec![first], matched: false };

    let mut phi = 0.0;
    let mut step = nominal;
    while phi < total {
        let target = if total - phi <= step * (1.0 + 1e-12) { total } else { phi + step };
        let (from, to) = (spec.point(phi), spec.point(target));
        let prev = trace.values.last().expect("trace starts with one row");
        let accepted = match provider.advance(&seed, from, to) {
            Ok((next, next_seed)) => {
                if next.len() != n {
                    return Err(Error::CardinalityChange { expected: n, got: next.len() });
                }
                let (assignment, ratio) = best_assignment(prev, &next);
                let ordered: Vec<Complex64> = assignment.iter().map(|&j| next[j]).collect();
                let moved = prev.iter().zip(&ordered).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
                let gap = min_gap(prev).min(min_gap(&ordered));
                let distinct = gap > 0.0;
                (ratio <= AMBIGUITY_RATIO && moved < 0.5 * gap && distinct).then_some((ordered, next_seed))
            }
            Err(Error::CardinalityChange { expected, got }) => {
                return Err(Error::CardinalityChange { expected, got });
            }
            Err(e) if step <= min_step => return Err(e),
            Err(_) => None,
        };
        match accepted {
            Some((row, next_seed)) => {
                phi = target;
                seed = next_seed;
                trace.angles.push(phi);
                trace.parameters.push(to);
                trace.values.push(row);
                // Regrow towards the nominal step after a refinement.
                step = (2.0 * step).min(nominal);
            }
            None => {
                step *= 0.5;
                if step < min_step {
                    return Err(Error::AmbiguousMatching { phi });
                }
            }
        }
    }
    trace.matched = true;
    Ok(trace)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Classification {
    Identity,
    Ep2Pair,
    Ep3Cycle,
    Other,
}

impl Classification {
    pub fn name(self) -> &'static str {
        match self {
            Classification::Identity => "IDENTITY",
            Classification::Ep2Pair => "EP2_PAIR",
            Classification::Ep3Cycle => "EP3_CYCLE",
            Classification::Other => "OTHER",
        }
    }
}

/// Permutation induced by a closed trace.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PermutationResult {
    pub labels: Vec<String>,
    /// Branch `i` ends where branch `mapping[i]` started.
    pub mapping: Vec<usize>,
    /// Cycle lengths in descending order.
    pub cycle_structure: Vec<usize>,
    pub classification: Classification,
}

impl PermutationResult {
    /// Maps composed as "first `self`, then `other`".
    pub fn then(&self, other: &PermutationResult) -> Vec<usize> {
        self.mapping.iter().map(|&j| other.mapping[j]).collect()
    }

    pub fn inverse(&self) -> Vec<usize> {
        let mut inv = vec![0; self.mapping.len()];
        for (i, &j) in self.mapping.iter().enumerate() {
            inv[j] = i;
        }
        inv
    }
}

/// Cycle lengths of a permutation, in descending order; `None` if `mapping`
/// is not a permutation.
pub fn cycle_structure(mapping: &[usize]) -> Option<Vec<usize>> {
    let n = mapping.len();
    let mut seen = vec![false; n];
    if mapping.iter().any(|&j| j >= n) {
        return None;
    }
    let mut hit = vec![false; n];
    for &j in mapping {
        if std::mem::replace(&mut hit[j], true) {
            return None;
        }
    }
    let mut cycles = Vec::new();
    for i in 0..n {
        if seen[i] {
            continue;
        }
        let mut len = 0;
        let mut k = i;
        while !seen[k] {
            seen[k] = true;
            k = mapping[k];
            len += 1;
        }
        cycles.push(len);
    }
    cycles.sort_unstable_by(|a, b| b.cmp(a));
    Some(cycles)
}

/// Reads the permutation off the first and last rows of a closed trace.
///
/// Each final value is attributed to the starting value within half the
/// smallest starting gap; anything else (unmatched trace, values that do not
/// return to the starting set) is classified `Other`.
pub fn classify(trace: &BranchTrace) -> PermutationResult {
    let labels = trace.labels.clone();
    let other = |mapping: Vec<usize>| PermutationResult {
        labels: labels.clone(),
        cycle_structure: cycle_structure(&mapping).unwrap_or_default(),
        mapping,
        classification: Classification::Other,
    };
    let (Some(first), Some(last)) = (trace.values.first(), trace.values.last()) else {
        return other(Vec::new());
    };
    let tol = 0.5 * min_gap(first);
    let mapping: Vec<usize> = last
        .iter()
        .map(|v| (0..first.len()).min_by(|&a, &b| (first[a] - v).norm().total_cmp(&(first[b] - v).norm())).unwrap_or(0))
        .collect();
    let close = last.iter().zip(&mapping).all(|(v, &j)| (first[j] - v).norm() < tol);
    let Some(cycles) = cycle_structure(&mapping).filter(|_| close && trace.matched) else {
        return other(mapping);
    };
    let classification = if cycles.iter().all(|&c| c == 1) {
        Classification::Identity
    } else if cycles == [2, 1] {
        Classification::Ep2Pair
    } else if cycles == [3] {
        Classification::Ep3Cycle
    } else {
        Classification::Other
    };
    PermutationResult { labels, mapping, cycle_structure: cycles, classification }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn assignment_prefers_nearest() {
        let prev = [c(0.0, 0.0), c(1.0, 0.0), c(5.0, 0.0)];
        let next = [c(5.1, 0.0), c(0.1, 0.0), c(0.9, 0.0)];
        let (a, ratio) = best_assignment(&prev, &next);
        assert_eq!(a, vec![1, 2, 0]);
        assert!(ratio < 0.2);
    }

    #[test]
    fn cycles() {
        assert_eq!(cycle_structure(&[1, 0, 2]), Some(vec![2, 1]));
        assert_eq!(cycle_structure(&[1, 2, 0]), Some(vec![3]));
        assert_eq!(cycle_structure(&[0, 1, 2]), Some(vec![1, 1, 1]));
        assert_eq!(cycle_structure(&[0, 0, 2]), None);
    }

    #[test]
    fn closing_point_is_exact() {
        let spec = ContourSpec::circle(ContourParameter::ModelGamma, c(0.8, 0.0), 0.04, 16).with_turns(3);
        assert_eq!(spec.point(3.0 * TAU), spec.point(0.0));
    }
}
