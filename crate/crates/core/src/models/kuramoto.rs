use std::f64::consts::PI;

use super::transform::{Derived, Transform};
use crate::error::{Error, Result};
use crate::ode::{integrate_dopri, IntegratorOptions, OdeSystem, SystemDraft, Trajectory};

/// Below this squared radius `x² + y²` a phase is considered lost.
pub const MIN_PHASE_RADIUS_SQ: f64 = 0.5;

/// `θ̇_i = ω_i − (K/N) Σ_{j∈S_i} sin(θ_i − θ_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct KuramotoSpec {
    pub omega: Vec<f64>,
    pub coupling: f64,
    /// `neighbors[i]` is `S_i`; need not be symmetric.
    pub neighbors: Vec<Vec<usize>>,
    pub theta0: Vec<f64>,
}

impl KuramotoSpec {
    pub fn n(&self) -> usize {
        self.omega.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n();
        if n == 0 {
            return Err(Error::InvalidArgument(
                "Kuramoto model needs at least one oscillator".into(),
            ));
        }
        if self.neighbors.len() != n || self.theta0.len() != n {
            return Err(Error::InvalidArgument(format!(
                "omega, neighbors and theta0 must all have length {n}"
            )));
        }
        if !self.coupling.is_finite()
            || self
                .omega
                .iter()
                .chain(&self.theta0)
                .any(|v| !v.is_finite())
        {
            return Err(Error::InvalidArgument(
                "Kuramoto parameters must be finite".into(),
            ));
        }
        for (i, s) in self.neighbors.iter().enumerate() {
            let mut sorted = s.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != s.len() {
                return Err(Error::InvalidArgument(format!(
                    "neighbor set {} repeats an entry",
                    i + 1
                )));
            }
            if let Some(&j) = s.iter().find(|&&j| j >= n || j == i) {
                return Err(Error::InvalidArgument(format!(
                    "neighbor set {} contains {}, which is out of range or the oscillator itself",
                    i + 1,
                    j + 1
                )));
            }
        }
        Ok(())
    }

    /// Every oscillator coupled to every other.
    pub fn all_to_all(omega: Vec<f64>, coupling: f64, theta0: Vec<f64>) -> Self {
        let n = omega.len();
        let neighbors = (0..n)
            .map(|i| (0..n).filter(|&j| j != i).collect())
            .collect();
        KuramotoSpec {
            omega,
            coupling,
            neighbors,
            theta0,
        }
    }
}

fn xi(i: usize) -> usize {
    4 * i
}
fn yi(i: usize) -> usize {
    4 * i + 1
}
fn zi(i: usize) -> usize {
    4 * i + 2
}
fn wi(i: usize) -> usize {
    4 * i + 3
}

/// Embeds the oscillators in `4N` variables `(x_i, y_i, z_i, w_i)` at
/// indices `4i..4i+3` with `x = cos θ`, `y = sin θ`, `z = −x`, `w = −y`.
///
/// A pair with `ω_i = 0`, or coupling sets with `K = 0`, would have only
/// zero couplings and are left out.
pub fn make_kuramoto(spec: &KuramotoSpec) -> Result<(OdeSystem, Vec<f64>)> {
    spec.validate()?;
    let n = spec.n();
    let g = spec.coupling / n as f64;
    let mut draft = SystemDraft::new(4 * n);
    for i in 0..n {
        let w = spec.omega[i];
        if w != 0.0 {
            draft.push(&[(xi(i), -w), (yi(i), w)]);
            draft.push(&[(zi(i), -w), (wi(i), w)]);
        }
    }
    if g != 0.0 {
        for i in 0..n {
            for &j in &spec.neighbors[i] {
                draft.push(&[(xi(i), g), (yi(i), -g), (wi(i), 0.0), (zi(j), 0.0)]);
                draft.push(&[(xi(i), -g), (yi(i), g), (zi(i), 0.0), (wi(j), 0.0)]);
                draft.push(&[(zi(i), g), (wi(i), -g), (yi(i), 0.0), (xi(j), 0.0)]);
                draft.push(&[(zi(i), -g), (wi(i), g), (xi(i), 0.0), (yi(j), 0.0)]);
            }
        }
    }
    let sys = OdeSystem::from_draft(&draft)?;
    let x0 = kuramoto_state(&spec.theta0);
    Ok((sys, x0))
}

/// Embedded point for phases `θ`.
pub fn kuramoto_state(theta: &[f64]) -> Vec<f64> {
    theta
        .iter()
        .flat_map(|&t| {
            let (s, c) = t.sin_cos();
            [c, s, -c, -s]
        })
        .collect()
}

/// Physical coordinates `(cos θ_1, sin θ_1, cos θ_2, …)`.
pub fn kuramoto_transform(n: usize) -> Transform {
    let mut names = Vec::with_capacity(4 * n);
    let mut physical = Vec::with_capacity(2 * n);
    let mut derived = Vec::with_capacity(2 * n);
    for i in 0..n {
        for s in ["x", "y", "z", "w"] {
            names.push(format!("{s}{}", i + 1));
        }
        physical.push((format!("cos_theta{}", i + 1), xi(i), 1.0));
        physical.push((format!("sin_theta{}", i + 1), yi(i), 1.0));
        derived.push(Derived::Power {
            target: zi(i),
            coeff: -1.0,
            terms: vec![(2 * i, 1.0)],
            power: 1,
        });
        derived.push(Derived::Power {
            target: wi(i),
            coeff: -1.0,
            terms: vec![(2 * i + 1, 1.0)],
            power: 1,
        });
    }
    Transform::new(names, physical, derived)
}

/// Phases `θ_i(t) = atan2(y_i, x_i)`, unwrapped along the trajectory so that
/// consecutive samples differ by less than π.
pub fn kuramoto_phase_recover(traj: &Trajectory) -> Result<Vec<Vec<f64>>> {
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(traj.len());
    for (t, point) in traj.times.iter().zip(&traj.points) {
        if point.len() % 4 != 0 {
            return Err(Error::InvalidArgument(format!(
                "embedded state has {} variables, not a multiple of 4",
                point.len()
            )));
        }
        let n = point.len() / 4;
        let mut phases = Vec::with_capacity(n);
        for i in 0..n {
            let (x, y) = (point[xi(i)], point[yi(i)]);
            let r2 = x * x + y * y;
            if r2.is_nan() || r2 < MIN_PHASE_RADIUS_SQ {
                return Err(Error::DegeneratePhase {
                    oscillator: i + 1,
                    t: *t,
                    radius_sq: r2,
                });
            }
            let raw = y.atan2(x);
            let theta = match out.last() {
                Some(prev) => {
                    let p = prev[i];
                    p + wrap(raw - p)
                }
                None => raw,
            };
            phases.push(theta);
        }
        out.push(phases);
    }
    Ok(out)
}

/// Maps an angle into `(−π, π]`.
fn wrap(a: f64) -> f64 {
    let r = a.rem_euclid(2.0 * PI);
    if r > PI {
        r - 2.0 * PI
    } else {
        r
    }
}

/// Integrates the phase equations directly. `grid` must start at 0.
pub fn kuramoto_reference(spec: &KuramotoSpec, rel_tol: f64, grid: &[f64]) -> Result<Trajectory> {
    spec.validate()?;
    if grid.first() != Some(&0.0) {
        return Err(Error::InvalidArgument(
            "Kuramoto reference grid must start at 0".into(),
        ));
    }
    let g = spec.coupling / spec.n() as f64;
    integrate_dopri(
        |_, th, d| {
            for (i, out) in d.iter_mut().enumerate() {
                let pull: f64 = spec.neighbors[i]
                    .iter()
                    .map(|&j| (th[i] - th[j]).sin())
                    .sum();
                *out = spec.omega[i] - g * pull;
            }
        },
        &spec.theta0,
        grid,
        IntegratorOptions::with_rel_tol(rel_tol),
    )
}
