use num_complex::Complex64;

use super::provider::SpectrumProvider;
use crate::error::{Error, Result};
use crate::gpe::{
    broken_pair, ground_and_excited, into_mode, solve_bound_state, trace_branch, BoundState, ContinuationOptions,
    GpeConfig, Mode, SweepParameter,
};

/// Knobs of the per-step branch continuation inside a contour step.
#[derive(Clone, Copy, Debug)]
pub struct GpeProviderOptions {
    pub continuation: ContinuationOptions,
    /// Two branches closer than this in κ count as one, so the contour step
    /// is rejected and refined.
    pub duplicate_tol: f64,
}

impl Default for GpeProviderOptions {
    fn default() -> Self {
        Self {
            continuation: ContinuationOptions { max_kappa_jump: 0.02, min_fraction: 1.0 / 16.0, require_class: None },
            duplicate_tol: 1e-6,
        }
    }
}

/// Condensate branches near the triple point, followed in complex γ or A.
///
/// All states are solved in the full continuation, where the equations are
/// analytic in the parameters: the imaginary part of a complexified γ or A
/// enters through the continuation unit, and a contour in that plane
/// therefore sees the branch points of the analytic spectrum.
#[derive(Clone, Debug)]
pub struct GpeProvider {
    base: GpeConfig,
    parameter: SweepParameter,
    labels: Vec<String>,
    start_point: Complex64,
    seeds: Vec<BoundState>,
    options: GpeProviderOptions,
}

impl GpeProvider {
    /// Wraps branches already converged at `start_point` (full-continuation
    /// states of `base` with the swept parameter set to `start_point`).
    pub fn from_states(
        base: &GpeConfig,
        parameter: SweepParameter,
        start_point: Complex64,
        labels: Vec<String>,
        seeds: Vec<BoundState>,
    ) -> Result<Self> {
        if labels.len() != seeds.len() || seeds.is_empty() {
            return Err(Error::InvalidConfig("one label per seed state is required".into()));
        }
        if seeds.iter().any(|s| s.mode != Mode::FullContinuation) {
            return Err(Error::InvalidConfig("contour seeds must be full-continuation states".into()));
        }
        let base = base.with_mode(Mode::FullContinuation);
        Ok(Self { base, parameter, labels, start_point, seeds, options: GpeProviderOptions::default() })
    }

    pub fn with_options(self, options: GpeProviderOptions) -> Self {
        Self { options, ..self }
    }

    pub fn start_point(&self) -> Complex64 {
        self.start_point
    }

    pub fn seeds(&self) -> &[BoundState] {
        &self.seeds
    }

    /// Ground state and PT-broken pair at real `γ = center + radius`, for a
    /// circle in γ around `center` (normally the detected `γ_cr`).
    pub fn gamma_circle(cfg: &GpeConfig, center: f64, radius: f64) -> Result<Self> {
        let gamma = Complex64::new(center + radius, 0.0);
        let naive = cfg.with_mode(Mode::Naive).with_gamma(gamma).with_asym(Complex64::new(0.0, 0.0));
        let full = naive.with_mode(Mode::FullContinuation);
        let (ground, _) = ground_and_excited(&naive)?;
        let (upper, lower) = broken_pair(&naive)?;
        let seeds = [ground, upper, lower].iter().map(|s| into_mode(&full, s)).collect::<Result<Vec<_>>>()?;
        let labels = ["ground", "broken+", "broken-"].map(String::from).to_vec();
        Self::from_states(&full, SweepParameter::Gamma, gamma, labels, seeds)
    }

    /// The three states meeting at the triple point, at `A = radius` and
    /// real `γ = gamma`, for a circle in A around 0.
    ///
    /// They are prepared at `γ + lift` (above `γ_cr`, where all three are
    /// distinct: the ground state and the broken pair) and switched on in A
    /// along the ray `arg A = π/4` and the arc back to the real axis. Real A
    /// is avoided on the way because the branches fold there. Finally they
    /// are brought down to `γ` at fixed `A = radius`.
    pub fn asymmetry_circle(cfg: &GpeConfig, gamma: f64, radius: f64, lift: f64) -> Result<Self> {
        let start = Self::gamma_circle(&cfg.with_asym(Complex64::new(0.0, 0.0)), gamma, lift)?;
        let full = start.base.clone();
        let opts = ContinuationOptions { max_kappa_jump: 0.01, ..start.options.continuation };
        let steps = 8;
        let tilt = std::f64::consts::FRAC_PI_4;
        let mut a_path: Vec<Complex64> =
            (0..=steps).map(|k| Complex64::from_polar(radius * k as f64 / steps as f64, tilt)).collect();
        a_path.extend((1..=steps).map(|k| Complex64::from_polar(radius, tilt * (1.0 - k as f64 / steps as f64))));
        let a_end = Complex64::new(radius, 0.0);
        *a_path.last_mut().expect("non-empty path") = a_end;
        let g_path: Vec<Complex64> =
            (0..=steps).map(|k| Complex64::new(gamma + lift * (1.0 - k as f64 / steps as f64), 0.0)).collect();
        let at_a = full.with_asym(a_end);
        let mut seeds = Vec::with_capacity(3);
        for seed in &start.seeds {
            let along_a = last_state(trace_branch(&full, SweepParameter::Asym, &a_path, seed, &opts))?;
            let down = last_state(trace_branch(&at_a, SweepParameter::Gamma, &g_path, &along_a, &opts))?;
            seeds.push(down);
        }
        let base = at_a.with_gamma(Complex64::new(gamma, 0.0));
        let labels = ["A", "B", "C"].map(String::from).to_vec();
        let p = Self::from_states(&base, SweepParameter::Asym, a_end, labels, seeds)?;
        p.check_distinct(&p.seeds.iter().map(|s| s.kappa).collect::<Vec<_>>())?;
        Ok(p)
    }

    fn check_distinct(&self, kappas: &[Complex64]) -> Result<()> {
        for (i, a) in kappas.iter().enumerate() {
            for b in &kappas[i + 1..] {
                if (a - b).norm() < self.options.duplicate_tol {
                    return Err(Error::BranchLost { last_good: f64::NAN });
                }
            }
        }
        Ok(())
    }
}

fn last_state(track: crate::gpe::BranchTrack) -> Result<BoundState> {
    match (track.lost_after, track.points.into_iter().last()) {
        (None, Some(p)) => Ok(p.state),
        (lost, _) => Err(Error::BranchLost { last_good: lost.map_or(f64::NAN, |p| p.re) }),
    }
}

impl SpectrumProvider for GpeProvider {
    type Seed = Vec<BoundState>;

    fn labels(&self) -> Vec<String> {
        self.labels.clone()
    }

    fn start(&self, at: Complex64) -> Result<(Vec<Complex64>, Vec<BoundState>)> {
        let states = if (at - self.start_point).norm() == 0.0 {
            self.seeds.clone()
        } else {
            let cfg = self.parameter.apply(&self.base, at);
            self.seeds.iter().map(|s| solve_bound_state(&cfg, &s.unknowns)).collect::<Result<Vec<_>>>()?
        };
        let kappas: Vec<Complex64> = states.iter().map(|s| s.kappa).collect();
        self.check_distinct(&kappas)?;
        Ok((kappas, states))
    }

    fn advance(
        &self,
        seed: &Vec<BoundState>,
        from: Complex64,
        to: Complex64,
    ) -> Result<(Vec<Complex64>, Vec<BoundState>)> {
        let cfg = self.parameter.apply(&self.base, from);
        let states = seed
            .iter()
            .map(|s| last_state(trace_branch(&cfg, self.parameter, &[from, to], s, &self.options.continuation)))
            .collect::<Result<Vec<_>>>()?;
        let kappas: Vec<Complex64> = states.iter().map(|s| s.kappa).collect();
        self.check_distinct(&kappas)?;
        Ok((kappas, states))
    }
}
