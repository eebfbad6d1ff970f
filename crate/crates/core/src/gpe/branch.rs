use num_complex::Complex64;

use super::solver::{solve_bound_state, BoundState, PtClass};
use super::GpeConfig;
use crate::error::{Error, Result};

/// The parameter varied along a sweep or contour.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SweepParameter {
    G,
    Gamma,
    Asym,
}

impl SweepParameter {
    pub fn apply(self, cfg: &GpeConfig, value: Complex64) -> GpeConfig {
        match self {
            SweepParameter::G => cfg.with_g(value.re),
            SweepParameter::Gamma => cfg.with_gamma(value),
            SweepParameter::Asym => cfg.with_asym(value),
        }
    }

    pub fn value(self, cfg: &GpeConfig) -> Complex64 {
        match self {
            SweepParameter::G => Complex64::new(cfg.g, 0.0),
            SweepParameter::Gamma => cfg.gamma,
            SweepParameter::Asym => cfg.asym,
        }
    }
}

#[derive(Clone, Debug)]
pub struct BranchPoint {
    pub parameter: Complex64,
    pub state: BoundState,
}

/// A continued branch, possibly ending early where it was lost.
#[derive(Clone, Debug)]
pub struct BranchTrack {
    pub points: Vec<BranchPoint>,
    /// Last parameter reached before the continuation failed, if it did.
    pub lost_after: Option<Complex64>,
}

/// Step-control knobs of natural-parameter continuation.
#[derive(Clone, Copy, Debug)]
pub struct ContinuationOptions {
    /// Largest accepted `|Δκ|` between neighbouring points.
    pub max_kappa_jump: f64,
    /// Sub-steps shorter than this fraction of the requested step give up.
    pub min_fraction: f64,
    /// Reject states whose PT class differs from this one, so a branch ends
    /// where it stops being PT-symmetric (or broken).
    pub require_class: Option<PtClass>,
}

impl Default for ContinuationOptions {
    fn default() -> Self {
        Self { max_kappa_jump: 0.05, min_fraction: 1.0 / 4096.0, require_class: None }
    }
}

/// Predicts the unknowns at `t` from the last one or two points.
fn predict(history: &[(Complex64, Vec<f64>)], t: Complex64) -> Vec<f64> {
    match history {
        [.., (p0, x0), (p1, x1)] if (p1 - p0).norm() > 0.0 => {
            // Secant extrapolation along the (complex) path; the projection
            // keeps it real-valued.
            let d = p1 - p0;
            let s = ((t - p1) * d.conj()).re / d.norm_sqr();
            let s = s.clamp(-1.0, 2.0);
            x1.iter().zip(x0).map(|(a, b)| a + s * (a - b)).collect()
        }
        [.., (_, x)] => x.clone(),
        [] => unreachable!("continuation always starts from a seed"),
    }
}

fn step_to(
    cfg: &GpeConfig,
    param: SweepParameter,
    history: &[(Complex64, Vec<f64>)],
    prev_kappa: Complex64,
    t: Complex64,
    opts: &ContinuationOptions,
) -> Option<BoundState> {
    let trial = param.apply(cfg, t);
    let previous = &history.last()?.1;
    [predict(history, t), previous.clone()].into_iter().find_map(|guess| {
        solve_bound_state(&trial, &guess)
            .ok()
            .filter(|s| (s.kappa - prev_kappa).norm() <= opts.max_kappa_jump)
            .filter(|s| opts.require_class.is_none_or(|c| c == s.pt_class))
    })
}

/// Follows `seed` along `path` (the first entry is the seed's own parameter
/// value), halving steps that fail.
///
/// Returns one state per path entry or `BranchLost` with the last parameter
/// that converged.
pub fn continue_branch(
    cfg: &GpeConfig,
    param: SweepParameter,
    path: &[Complex64],
    seed: &BoundState,
) -> Result<Vec<BoundState>> {
    let track = trace_branch(cfg, param, path, seed, &ContinuationOptions::default());
    match track.lost_after {
        Some(p) => Err(Error::BranchLost { last_good: p.re }),
        None => Ok(track.points.into_iter().map(|p| p.state).collect()),
    }
}

/// Like [`continue_branch`] but keeps the points reached before a loss.
pub fn trace_branch(
    cfg: &GpeConfig,
    param: SweepParameter,
    path: &[Complex64],
    seed: &BoundState,
    opts: &ContinuationOptions,
) -> BranchTrack {
    let mut points = Vec::with_capacity(path.len());
    let Some(&start) = path.first() else {
        return BranchTrack { points, lost_after: None };
    };
    points.push(BranchPoint { parameter: start, state: seed.clone() });
    let mut history = vec![(start, seed.unknowns.clone())];
    let mut current = start;
    let mut kappa = seed.kappa;

    for &target in &path[1..] {
        let leg = target - current;
        let origin = current;
        let mut frac = 1.0f64;
        let mut done = 0.0f64;
        while done < 1.0 {
            let step = frac.min(1.0 - done);
            let t = if done + step >= 1.0 { target } else { origin + leg * (done + step) };
            match step_to(cfg, param, &history, kappa, t, opts) {
                Some(s) => {
                    done += step;
                    kappa = s.kappa;
                    current = t;
                    history.push((t, s.unknowns.clone()));
                    if history.len() > 2 {
                        history.remove(0);
                    }
                    if done >= 1.0 {
                        points.push(BranchPoint { parameter: target, state: s });
                    }
                    frac = (2.0 * frac).min(1.0);
                }
                None => {
                    frac *= 0.5;
                    if frac < opts.min_fraction {
                        return BranchTrack { points, lost_after: Some(current) };
                    }
                }
            }
        }
    }
    BranchTrack { points, lost_after: None }
}
