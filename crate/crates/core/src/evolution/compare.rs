use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::krylov::{evolve_streaming, EvolutionResult, EvolveOptions, EvolveStats};
use crate::error::{Error, Result};
use crate::fock::{
    encode_observable, encode_position, truncated_normalization, FockBasis, ObservableSpec,
    StateVector,
};
use crate::hamiltonian::{build_hamiltonian, SparseHermitianMatrix};
use crate::ode::{integrate_reference, IntegratorStats, OdeSystem, Trajectory};

/// Imaginary residue of an output, relative to `max(1, √L ‖c‖)`, above
/// which the output is rejected.
pub const IMAG_RESIDUE_LIMIT: f64 = 1e-9;

/// `steps + 1` equally spaced times from 0 to `t_end`; just `[0]` when
/// `t_end = 0`.
pub fn uniform_grid(t_end: f64, steps: usize) -> Result<Vec<f64>> {
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "horizon must be finite and ≥ 0, got {t_end}"
        )));
    }
    if t_end == 0.0 {
        return Ok(vec![0.0]);
    }
    if steps == 0 {
        return Err(Error::InvalidArgument("steps must be at least 1".into()));
    }
    Ok((0..=steps)
        .map(|k| {
            if k == steps {
                t_end
            } else {
                t_end * k as f64 / steps as f64
            }
        })
        .collect())
}

fn quantum_value(c: &StateVector, psi: &StateVector, sqrt_l: f64) -> Result<(f64, f64)> {
    let z = c.inner(psi)? * sqrt_l;
    Ok((z.re, z.im))
}

fn check_residue(max_imag: f64, c: &StateVector, sqrt_l: f64) -> Result<()> {
    let limit = IMAG_RESIDUE_LIMIT * (sqrt_l * c.norm()).max(1.0);
    if max_imag > limit {
        return Err(Error::ImaginaryResidue {
            max: max_imag,
            limit,
        });
    }
    Ok(())
}

/// `q(t) = √L ⟨c|ψ(t)⟩` for every stored state.
pub fn output_series(result: &EvolutionResult, c_state: &StateVector, l: f64) -> Result<Vec<f64>> {
    let sqrt_l = l.sqrt();
    let mut max_imag: f64 = 0.0;
    let mut out = Vec::with_capacity(result.states.len());
    for psi in &result.states {
        let (re, im) = quantum_value(c_state, psi, sqrt_l)?;
        max_imag = max_imag.max(im.abs());
        out.push(re);
    }
    check_residue(max_imag, c_state, sqrt_l)?;
    Ok(out)
}

/// `g(t) = Σ_n c_n Π_i p_{n_i}(x_i(t))` along a trajectory.
pub fn classical_observable(traj: &Trajectory, obs: &ObservableSpec) -> Result<Vec<f64>> {
    traj.points.iter().map(|x| obs.evaluate(x)).collect()
}

/// Quantum and classical outputs side by side on one grid.
#[derive(Debug, Clone, Serialize)]
pub struct ComparisonTable {
    pub times: Vec<f64>,
    pub quantum: Vec<f64>,
    pub classical: Vec<f64>,
    pub abs_error: Vec<f64>,
    /// `|‖ψ(t)‖ − ‖ψ(0)‖|`.
    pub norm_drift: Vec<f64>,
    /// `(L(x(t)) − L(x(0))) / L(x(0))` with `L` truncated at `m`.
    pub l_drift: Vec<f64>,
    pub cap: usize,
    pub dim: u64,
    pub l0: f64,
    pub max_norm: f64,
    /// `‖H_m‖_max · T`.
    pub rescaled_horizon: f64,
    pub max_imag_residue: f64,
    pub evolve: EvolveStats,
    pub integrator: IntegratorStats,
}

impl ComparisonTable {
    pub fn max_error(&self) -> f64 {
        self.abs_error.iter().fold(0.0, |m, &e| m.max(e))
    }

    pub fn max_norm_drift(&self) -> f64 {
        self.norm_drift.iter().fold(0.0, |m, &e| m.max(e))
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "t,quantum,classical,abs_error,norm_drift,L_drift")?;
        for k in 0..self.times.len() {
            writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                self.times[k],
                self.quantum[k],
                self.classical[k],
                self.abs_error[k],
                self.norm_drift[k],
                self.l_drift[k]
            )?;
        }
        out.flush()?;
        Ok(())
    }
}

fn check_inputs(sys: &OdeSystem, x0: &[f64], obs: &ObservableSpec, m: usize) -> Result<()> {
    if x0.len() != sys.n_vars() {
        return Err(Error::DimensionMismatch {
            expected: sys.n_vars(),
            got: x0.len(),
        });
    }
    if obs.degree_cap() > m {
        return Err(Error::ObservableDegree {
            total: obs.degree_cap(),
            cap: m,
        });
    }
    Ok(())
}

/// Classical reference shared by [`compare`] and [`convergence_sweep`].
fn reference(
    sys: &OdeSystem,
    x0: &[f64],
    obs: &ObservableSpec,
    grid: &[f64],
    tol: f64,
) -> Result<(Trajectory, Vec<f64>)> {
    let t_end = *grid.last().expect("grid is never empty");
    let traj = integrate_reference(sys, x0, t_end, tol.clamp(1e-14, 1e-3), grid)?;
    let g = classical_observable(&traj, obs)?;
    Ok((traj, g))
}

struct QuantumRun {
    table: ComparisonTable,
    build_seconds: f64,
    evolve_seconds: f64,
}

#[allow(clippy::too_many_arguments)]
fn run_quantum(
    sys: &OdeSystem,
    x0: &[f64],
    obs: &ObservableSpec,
    m: usize,
    grid: &[f64],
    tol: f64,
    traj: &Trajectory,
    g: &[f64],
) -> Result<QuantumRun> {
    let opts = EvolveOptions::new(tol)?;
    let basis = FockBasis::new(sys.n_vars(), m)?;
    let started = Instant::now();
    let h: SparseHermitianMatrix = build_hamiltonian(sys, &basis)?;
    let build_seconds = started.elapsed().as_secs_f64();

    let (psi0, l0) = encode_position(&basis, x0)?;
    let c = encode_observable(&basis, obs)?;
    let sqrt_l = l0.sqrt();
    let started = Instant::now();
    let mut quantum = Vec::with_capacity(grid.len());
    let mut max_imag: f64 = 0.0;
    let (norms, stats) = evolve_streaming(&h, &psi0, grid, &opts, |_, psi| {
        let (re, im) = quantum_value(&c, psi, sqrt_l)?;
        max_imag = max_imag.max(im.abs());
        quantum.push(re);
        Ok(())
    })?;
    let evolve_seconds = started.elapsed().as_secs_f64();
    check_residue(max_imag, &c, sqrt_l)?;

    let norm0 = psi0.norm();
    let l_drift = traj
        .points
        .iter()
        .map(|x| Ok((truncated_normalization(x, m)? - l0) / l0))
        .collect::<Result<Vec<f64>>>()?;
    let abs_error = quantum.iter().zip(g).map(|(q, c)| (q - c).abs()).collect();
    let max_norm = h.max_abs_entry();
    let t_end = *grid.last().expect("grid is never empty");
    Ok(QuantumRun {
        table: ComparisonTable {
            times: grid.to_vec(),
            quantum,
            classical: g.to_vec(),
            abs_error,
            norm_drift: norms.iter().map(|n| (n - norm0).abs()).collect(),
            l_drift,
            cap: m,
            dim: basis.dim(),
            l0,
            max_norm,
            rescaled_horizon: max_norm * t_end,
            max_imag_residue: max_imag,
            evolve: stats,
            integrator: traj.stats,
        },
        build_seconds,
        evolve_seconds,
    })
}

/// Truncated quantum output against the classical observable on
/// `steps + 1` uniform times over `[0, t_end]`. `L` is frozen at `t = 0`.
pub fn compare(
    sys: &OdeSystem,
    x0: &[f64],
    obs: &ObservableSpec,
    m: usize,
    t_end: f64,
    steps: usize,
    tol: f64,
) -> Result<ComparisonTable> {
    check_inputs(sys, x0, obs, m)?;
    EvolveOptions::new(tol)?;
    let grid = uniform_grid(t_end, steps)?;
    let (traj, g) = reference(sys, x0, obs, &grid, tol)?;
    Ok(run_quantum(sys, x0, obs, m, &grid, tol, &traj, &g)?.table)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub m: usize,
    pub max_error: f64,
    pub dim: u64,
    pub build_seconds: f64,
    pub evolve_seconds: f64,
    pub max_norm_drift: f64,
    pub max_imag_residue: f64,
}

/// Max-over-time error of [`compare`] for each cap in `m_list`, sharing
/// one reference trajectory. Caps run in parallel.
#[allow(clippy::too_many_arguments)]
pub fn convergence_sweep(
    sys: &OdeSystem,
    x0: &[f64],
    obs: &ObservableSpec,
    t_end: f64,
    steps: usize,
    m_list: &[usize],
    tol: f64,
) -> Result<Vec<SweepRow>> {
    if m_list.is_empty() || m_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument(
            "m list must be non-empty and strictly ascending".into(),
        ));
    }
    check_inputs(sys, x0, obs, m_list[0])?;
    EvolveOptions::new(tol)?;
    let grid = uniform_grid(t_end, steps)?;
    let (traj, g) = reference(sys, x0, obs, &grid, tol)?;
    m_list
        .par_iter()
        .map(|&m| {
            let run = run_quantum(sys, x0, obs, m, &grid, tol, &traj, &g)?;
            Ok(SweepRow {
                m,
                max_error: run.table.max_error(),
                dim: run.table.dim,
                build_seconds: run.build_seconds,
                evolve_seconds: run.evolve_seconds,
                max_norm_drift: run.table.max_norm_drift(),
                max_imag_residue: run.table.max_imag_residue,
            })
        })
        .collect()
}

/// `m,max_error,dim,build_seconds,evolve_seconds`.
pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], mut out: W) -> Result<()> {
    writeln!(out, "m,max_error,dim,build_seconds,evolve_seconds")?;
    for r in rows {
        writeln!(
            out,
            "{},{:.16e},{},{:.6e},{:.6e}",
            r.m, r.max_error, r.dim, r.build_seconds, r.evolve_seconds
        )?;
    }
    out.flush()?;
    Ok(())
}
