//! Adaptive Dormand–Prince 5(4) integration, used as the classical reference
//! trajectory for every comparison in the crate.

use serde::Serialize;

use super::OdeSystem;
use crate::error::{Error, Result};

// Butcher tableau (Dormand & Prince, 1980).
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

// Difference between 5th and embedded 4th order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegratorOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_steps: usize,
}

impl IntegratorOptions {
    /// Absolute tolerance tied to the relative one; state components of the
    /// systems here are O(1).
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        IntegratorOptions {
            rel_tol,
            abs_tol: rel_tol,
            max_steps: 10_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct IntegratorStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
    /// Largest scaled local error estimate among accepted steps (≤ 1).
    pub max_error_estimate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub points: Vec<Vec<f64>>,
    pub stats: IntegratorStats,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<&[f64]> {
        self.points.last().map(Vec::as_slice)
    }
}

/// Integrates a validated system from `x0`, sampling at each time in
/// `t_grid` (ascending, inside `[0, t_end]`). An empty grid samples at `0`
/// and `t_end`. The sample at `t = 0` is always present.
pub fn integrate_reference(
    sys: &OdeSystem,
    x0: &[f64],
    t_end: f64,
    rel_tol: f64,
    t_grid: &[f64],
) -> Result<Trajectory> {
    if x0.len() != sys.n_vars() {
        return Err(Error::DimensionMismatch {
            expected: sys.n_vars(),
            got: x0.len(),
        });
    }
    if !(1e-14..=1e-3).contains(&rel_tol) {
        return Err(Error::InvalidArgument(format!(
            "rel_tol must lie in [1e-14, 1e-3], got {rel_tol}"
        )));
    }
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "t_end must be finite and ≥ 0, got {t_end}"
        )));
    }
    let grid = normalize_grid(t_grid, t_end)?;
    integrate_dopri(
        |_, x, dx| sys.rhs_into(x, dx),
        x0,
        &grid,
        IntegratorOptions::with_rel_tol(rel_tol),
    )
}

fn normalize_grid(t_grid: &[f64], t_end: f64) -> Result<Vec<f64>> {
    if t_grid.is_empty() {
        return Ok(if t_end > 0.0 {
            vec![0.0, t_end]
        } else {
            vec![0.0]
        });
    }
    if t_grid
        .windows(2)
        .any(|w| w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Greater))
    {
        return Err(Error::InvalidArgument(
            "time grid must be strictly ascending".into(),
        ));
    }
    let first = t_grid[0];
    let last = t_grid[t_grid.len() - 1];
    if first < 0.0 || last > t_end * (1.0 + 1e-12) + 1e-15 {
        return Err(Error::InvalidArgument(format!(
            "time grid [{first}, {last}] leaves [0, {t_end}]"
        )));
    }
    let mut grid = Vec::with_capacity(t_grid.len() + 1);
    if first > 0.0 {
        grid.push(0.0);
    }
    grid.extend_from_slice(t_grid);
    Ok(grid)
}

/// Dormand–Prince 5(4) driver for an arbitrary autonomous or non-autonomous
/// right-hand side `f(t, x, dx)`. Steps are clipped so every grid time is
/// hit exactly; no interpolation is involved. `grid[0]` is the start time.
pub fn integrate_dopri<F>(
    f: F,
    x0: &[f64],
    grid: &[f64],
    opts: IntegratorOptions,
) -> Result<Trajectory>
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    let n = x0.len();
    let mut stats = IntegratorStats::default();
    let mut times = Vec::with_capacity(grid.len());
    let mut points = Vec::with_capacity(grid.len());
    let Some(&t_start) = grid.first() else {
        return Ok(Trajectory {
            times,
            points,
            stats,
        });
    };
    if x0.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite { t: t_start });
    }
    times.push(t_start);
    points.push(x0.to_vec());
    if grid.len() == 1 {
        return Ok(Trajectory {
            times,
            points,
            stats,
        });
    }

    let mut k: [Vec<f64>; 7] = std::array::from_fn(|_| vec![0.0; n]);
    let mut y = x0.to_vec();
    let mut y_new = vec![0.0; n];
    let mut tmp = vec![0.0; n];
    let mut t = t_start;

    f(t, &y, &mut k[0]);
    stats.evaluations += 1;
    let mut h = initial_step(
        &f,
        t,
        &y,
        &k[0],
        &opts,
        grid[grid.len() - 1] - t_start,
        &mut stats,
    );

    for &target in &grid[1..] {
        while t < target {
            if stats.accepted + stats.rejected >= opts.max_steps {
                return Err(Error::StepSizeUnderflow { t, h });
            }
            let remaining = target - t;
            let mut clipped = false;
            let mut step = h;
            if step >= remaining * (1.0 - 1e-12) {
                step = remaining;
                clipped = true;
            }
            if step < 1e-14 * t.abs().max(1.0) && !clipped {
                return Err(Error::StepSizeUnderflow { t, h: step });
            }

            // Stages 2..7; k[0] holds f(t, y) (first-same-as-last).
            stage(&y, step, &[(A21, &k[0])], &mut tmp);
            f(t + C2 * step, &tmp, &mut k[1]);
            stage(&y, step, &[(A31, &k[0]), (A32, &k[1])], &mut tmp);
            f(t + C3 * step, &tmp, &mut k[2]);
            stage(
                &y,
                step,
                &[(A41, &k[0]), (A42, &k[1]), (A43, &k[2])],
                &mut tmp,
            );
            f(t + C4 * step, &tmp, &mut k[3]);
            stage(
                &y,
                step,
                &[(A51, &k[0]), (A52, &k[1]), (A53, &k[2]), (A54, &k[3])],
                &mut tmp,
            );
            f(t + C5 * step, &tmp, &mut k[4]);
            stage(
                &y,
                step,
                &[
                    (A61, &k[0]),
                    (A62, &k[1]),
                    (A63, &k[2]),
                    (A64, &k[3]),
                    (A65, &k[4]),
                ],
                &mut tmp,
            );
            f(t + step, &tmp, &mut k[5]);
            stage(
                &y,
                step,
                &[
                    (A71, &k[0]),
                    (A73, &k[2]),
                    (A74, &k[3]),
                    (A75, &k[4]),
                    (A76, &k[5]),
                ],
                &mut y_new,
            );
            f(t + step, &y_new, &mut k[6]);
            stats.evaluations += 6;

            let mut err_sq = 0.0;
            for i in 0..n {
                let e = step
                    * (E1 * k[0][i]
                        + E3 * k[2][i]
                        + E4 * k[3][i]
                        + E5 * k[4][i]
                        + E6 * k[5][i]
                        + E7 * k[6][i]);
                let scale = opts.abs_tol + opts.rel_tol * y[i].abs().max(y_new[i].abs());
                err_sq += (e / scale).powi(2);
            }
            let err = (err_sq / n.max(1) as f64).sqrt();
            if !err.is_finite() {
                if y_new.iter().any(|v| !v.is_finite()) && step < 1e-10 {
                    return Err(Error::NonFinite { t: t + step });
                }
                h = step * MIN_FACTOR;
                stats.rejected += 1;
                continue;
            }

            let factor = if err == 0.0 {
                MAX_FACTOR
            } else {
                (SAFETY * err.powf(-0.2)).clamp(MIN_FACTOR, MAX_FACTOR)
            };
            if err <= 1.0 {
                stats.accepted += 1;
                stats.max_error_estimate = stats.max_error_estimate.max(err);
                t = if clipped { target } else { t + step };
                std::mem::swap(&mut y, &mut y_new);
                k.swap(0, 6);
                if y.iter().any(|v| !v.is_finite()) {
                    return Err(Error::NonFinite { t });
                }
                // Do not let a short clipped step shrink the next one.
                let proposed = step * factor;
                h = if clipped { proposed.max(h) } else { proposed };
            } else {
                stats.rejected += 1;
                h = step * factor.min(1.0);
            }
        }
        times.push(target);
        points.push(y.clone());
    }

    Ok(Trajectory {
        times,
        points,
        stats,
    })
}

fn stage(y: &[f64], h: f64, terms: &[(f64, &Vec<f64>)], out: &mut [f64]) {
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (a, k) in terms {
            acc += a * k[i];
        }
        *o = y[i] + h * acc;
    }
}

/// Starting step from the Hairer–Nørsett–Wanner heuristic.
fn initial_step<F>(
    f: &F,
    t: f64,
    y: &[f64],
    f0: &[f64],
    opts: &IntegratorOptions,
    span: f64,
    stats: &mut IntegratorStats,
) -> f64
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    let n = y.len().max(1) as f64;
    let scale: Vec<f64> = y
        .iter()
        .map(|v| opts.abs_tol + opts.rel_tol * v.abs())
        .collect();
    let norm = |v: &[f64]| {
        (v.iter()
            .zip(&scale)
            .map(|(a, s)| (a / s).powi(2))
            .sum::<f64>()
            / n)
            .sqrt()
    };
    let d0 = norm(y);
    let d1 = norm(f0);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    let h0 = h0.min(span.max(1e-12));
    let y1: Vec<f64> = y.iter().zip(f0).map(|(a, b)| a + h0 * b).collect();
    let mut f1 = vec![0.0; y.len()];
    f(t + h0, &y1, &mut f1);
    stats.evaluations += 1;
    let diff: Vec<f64> = f1.iter().zip(f0).map(|(a, b)| a - b).collect();
    let d2 = norm(&diff) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1).min(span.max(1e-12))
}
