//! Adaptive Dormand–Prince 5(4) integration of first-order real systems.

use crate::error::{Error, Result};

// Butcher tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// 5th minus embedded 4th order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const MAX_STEPS: usize = 2_000_000;

/// Accepted steps of one integration, including the initial point.
#[derive(Clone, Debug, Default)]
pub struct Trajectory {
    pub xs: Vec<f64>,
    pub states: Vec<Vec<f64>>,
}

#[derive(Clone, Debug)]
pub struct Solution {
    pub state: Vec<f64>,
    pub trajectory: Option<Trajectory>,
    pub steps: usize,
}

/// Integrates `y' = f(x, y)` from `x0` to `x1` (either direction).
///
/// The local error estimate of each step is kept below `tol` relative to
/// the max-norm of the state, so exponentially small tails are resolved to
/// the same relative accuracy as the bulk.
pub fn integrate<F>(mut f: F, x0: f64, y0: &[f64], x1: f64, tol: f64, record: bool) -> Result<Solution>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let n = y0.len();
    let mut y = y0.to_vec();
    let mut traj = record.then(|| Trajectory { xs: vec![x0], states: vec![y.clone()] });
    let span = x1 - x0;
    if span == 0.0 {
        return Ok(Solution { state: y, trajectory: traj, steps: 0 });
    }
    let dir = span.signum();

    let mut k: Vec<Vec<f64>> = vec![vec![0.0; n]; 7];
    let mut tmp = vec![0.0; n];
    let mut ynew = vec![0.0; n];

    let mut x = x0;
    let mut h = dir * span.abs().min(0.02);
    f(x, &y, &mut k[0]);
    let mut steps = 0;

    while (x1 - x) * dir > 0.0 {
        if steps >= MAX_STEPS {
            return Err(Error::StepUnderflow { x, step: h });
        }
        if (x + h - x1) * dir > 0.0 {
            h = x1 - x;
        }

        for i in 0..n {
            tmp[i] = y[i] + h * A21 * k[0][i];
        }
        f(x + C2 * h, &tmp, &mut k[1]);
        for i in 0..n {
            tmp[i] = y[i] + h * (A31 * k[0][i] + A32 * k[1][i]);
        }
        f(x + C3 * h, &tmp, &mut k[2]);
        for i in 0..n {
            tmp[i] = y[i] + h * (A41 * k[0][i] + A42 * k[1][i] + A43 * k[2][i]);
        }
        f(x + C4 * h, &tmp, &mut k[3]);
        for i in 0..n {
            tmp[i] = y[i] + h * (A51 * k[0][i] + A52 * k[1][i] + A53 * k[2][i] + A54 * k[3][i]);
        }
        f(x + C5 * h, &tmp, &mut k[4]);
        for i in 0..n {
            tmp[i] = y[i] + h * (A61 * k[0][i] + A62 * k[1][i] + A63 * k[2][i] + A64 * k[3][i] + A65 * k[4][i]);
        }
        f(x + h, &tmp, &mut k[5]);
        for i in 0..n {
            ynew[i] = y[i] + h * (A71 * k[0][i] + A73 * k[2][i] + A74 * k[3][i] + A75 * k[4][i] + A76 * k[5][i]);
        }
        f(x + h, &ynew, &mut k[6]);

        let mut scale = 0.0f64;
        for i in 0..n {
            scale = scale.max(y[i].abs()).max(ynew[i].abs());
        }
        let scale = tol * scale.max(f64::MIN_POSITIVE);
        let mut err = 0.0f64;
        for i in 0..n {
            let e = h * (E1 * k[0][i] + E3 * k[2][i] + E4 * k[3][i] + E5 * k[4][i] + E6 * k[5][i] + E7 * k[6][i]);
            err = err.max(e.abs() / scale);
        }
        // f64::max drops NaN, so a non-finite trial state must be caught here.
        if !err.is_finite() || ynew.iter().any(|v| !v.is_finite()) {
            err = 1e10;
        }

        if err <= 1.0 {
            x += h;
            if (x1 - x) * dir <= 0.0 {
                x = x1;
            }
            std::mem::swap(&mut y, &mut ynew);
            k.swap(0, 6);
            steps += 1;
            if let Some(t) = traj.as_mut() {
                t.xs.push(x);
                t.states.push(y.clone());
            }
            let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            h *= fac;
        } else {
            h *= (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
            if h.abs() < 1e-13 * x.abs().max(1.0) {
                return Err(Error::StepUnderflow { x, step: h });
            }
        }
    }

    Ok(Solution { state: y, trajectory: traj, steps })
}
