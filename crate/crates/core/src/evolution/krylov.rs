use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::StateVector;
use crate::hamiltonian::SparseHermitianMatrix;

pub const DEFAULT_KRYLOV_DIM: usize = 30;
pub const DEFAULT_MAX_SUBSTEPS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveOptions {
    /// Accepted Krylov error over the whole horizon, relative to `‖ψ0‖`.
    pub tol: f64,
    pub krylov_dim: usize,
    pub max_substeps: usize,
}

impl EvolveOptions {
    pub fn new(tol: f64) -> Result<Self> {
        if !(1e-13..=1e-6).contains(&tol) {
            return Err(Error::InvalidArgument(format!(
                "evolve tol must lie in [1e-13, 1e-6], got {tol}"
            )));
        }
        Ok(EvolveOptions {
            tol,
            krylov_dim: DEFAULT_KRYLOV_DIM,
            max_substeps: DEFAULT_MAX_SUBSTEPS,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct EvolveStats {
    /// Largest Krylov subspace actually built.
    pub krylov_dim: usize,
    pub substeps: usize,
    pub rejected: usize,
    pub matvecs: usize,
    pub max_error_estimate: f64,
}

#[derive(Debug, Clone)]
pub struct EvolutionResult {
    pub times: Vec<f64>,
    pub states: Vec<StateVector>,
    pub norms: Vec<f64>,
    pub stats: EvolveStats,
}

/// `ψ(t) = e^{-iHt} ψ0` at every time of `t_grid` (non-decreasing, ≥ 0).
pub fn evolve(
    h: &SparseHermitianMatrix,
    psi0: &StateVector,
    t_grid: &[f64],
    tol: f64,
) -> Result<EvolutionResult> {
    let mut states = Vec::with_capacity(t_grid.len());
    let opts = EvolveOptions::new(tol)?;
    let (norms, stats) = evolve_streaming(h, psi0, t_grid, &opts, |_, s| {
        states.push(s.clone());
        Ok(())
    })?;
    Ok(EvolutionResult {
        times: t_grid.to_vec(),
        states,
        norms,
        stats,
    })
}

/// Like [`evolve`], but hands each state to `visit` instead of keeping it.
/// Returns the norm at every grid time.
pub fn evolve_streaming<F>(
    h: &SparseHermitianMatrix,
    psi0: &StateVector,
    t_grid: &[f64],
    opts: &EvolveOptions,
    mut visit: F,
) -> Result<(Vec<f64>, EvolveStats)>
where
    F: FnMut(f64, &StateVector) -> Result<()>,
{
    if psi0.len() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            got: psi0.len(),
        });
    }
    if t_grid.iter().any(|t| !(t.is_finite() && *t >= 0.0))
        || t_grid.windows(2).any(|w| w[1] < w[0])
    {
        return Err(Error::InvalidArgument(
            "time grid must be finite, ≥ 0 and non-decreasing".into(),
        ));
    }
    let horizon = t_grid.last().copied().unwrap_or(0.0);
    let mut prop = Propagator::new(h, opts, horizon);
    let mut psi = psi0.amplitudes().to_vec();
    let mut t = 0.0;
    let mut norms = Vec::with_capacity(t_grid.len());
    for &target in t_grid {
        prop.advance(&mut psi, target - t)?;
        t = target;
        let state = StateVector::with_shape(psi0.n_vars(), psi0.cap(), psi.clone(), None)?;
        norms.push(state.norm());
        visit(t, &state)?;
    }
    Ok((norms, prop.stats))
}

struct Propagator<'a> {
    h: &'a SparseHermitianMatrix,
    opts: EvolveOptions,
    horizon: f64,
    scale: f64,
    tau_guess: f64,
    stats: EvolveStats,
    basis: Vec<Vec<Complex64>>,
    w: Vec<Complex64>,
}

impl<'a> Propagator<'a> {
    fn new(h: &'a SparseHermitianMatrix, opts: &EvolveOptions, horizon: f64) -> Self {
        Propagator {
            h,
            opts: *opts,
            horizon,
            scale: h.max_row_abs_sum(),
            tau_guess: f64::INFINITY,
            stats: EvolveStats::default(),
            basis: Vec::new(),
            w: vec![Complex64::new(0.0, 0.0); h.dim()],
        }
    }

    fn advance(&mut self, psi: &mut [Complex64], span: f64) -> Result<()> {
        let mut left = span;
        while left > 0.0 {
            let beta0 = psi.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            if beta0 == 0.0 || self.scale == 0.0 {
                return Ok(());
            }
            let (alphas, betas, breakdown) = self.lanczos(psi, beta0);
            let k = alphas.len();
            let mut t = DMatrix::zeros(k, k);
            for i in 0..k {
                t[(i, i)] = alphas[i];
                if i + 1 < k {
                    t[(i, i + 1)] = betas[i];
                    t[(i + 1, i)] = betas[i];
                }
            }
            let eig = SymmetricEigen::new(t);
            let tail = if breakdown { 0.0 } else { betas[k - 1] };

            let mut tau = left.min(self.tau_guess);
            loop {
                let y = small_exp(&eig, tau);
                let err = beta0 * tail * y[k - 1].norm();
                let allowed = self.opts.tol * beta0 * (tau / self.horizon.max(tau));
                self.stats.substeps += 1;
                if self.stats.substeps > self.opts.max_substeps {
                    return Err(Error::KrylovNonConvergence {
                        substeps: self.stats.substeps,
                        residual: err,
                    });
                }
                if err <= allowed {
                    self.stats.max_error_estimate = self.stats.max_error_estimate.max(err);
                    psi.iter_mut().for_each(|a| *a = Complex64::new(0.0, 0.0));
                    for (v, &c) in self.basis.iter().zip(&y) {
                        let c = c * beta0;
                        psi.iter_mut().zip(v).for_each(|(a, &vi)| *a += c * vi);
                    }
                    left = if tau >= left { 0.0 } else { left - tau };
                    self.tau_guess = if err < 0.1 * allowed { 2.0 * tau } else { tau };
                    break;
                }
                self.stats.rejected += 1;
                tau *= 0.5;
                if tau < 1e-14 * span.max(1e-300) {
                    return Err(Error::KrylovNonConvergence {
                        substeps: self.stats.substeps,
                        residual: err,
                    });
                }
            }
        }
        Ok(())
    }

    /// Builds an orthonormal Krylov basis of `H` from `psi / beta0` with
    /// full reorthogonalization. Returns the tridiagonal entries and whether
    /// the space became invariant.
    fn lanczos(&mut self, psi: &[Complex64], beta0: f64) -> (Vec<f64>, Vec<f64>, bool) {
        let kmax = self.opts.krylov_dim.min(self.h.dim()).max(1);
        self.basis.clear();
        self.basis.push(psi.iter().map(|a| a / beta0).collect());
        let mut alphas = Vec::with_capacity(kmax);
        let mut betas = Vec::with_capacity(kmax);
        loop {
            let j = self.basis.len() - 1;
            self.h.apply(&self.basis[j], &mut self.w);
            self.stats.matvecs += 1;
            let a = inner(&self.basis[j], &self.w).re;
            alphas.push(a);
            for _ in 0..2 {
                for v in &self.basis {
                    let proj = inner(v, &self.w);
                    self.w
                        .iter_mut()
                        .zip(v)
                        .for_each(|(wi, &vi)| *wi -= proj * vi);
                }
            }
            let b = self.w.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            self.stats.krylov_dim = self.stats.krylov_dim.max(alphas.len());
            if b <= 1e-12 * self.scale {
                return (alphas, betas, true);
            }
            betas.push(b);
            if alphas.len() == kmax {
                return (alphas, betas, false);
            }
            self.basis.push(self.w.iter().map(|a| a / b).collect());
        }
    }
}

/// `⟨u, v⟩ = Σ conj(u_i) v_i`.
fn inner(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

/// `exp(-i T τ) e_1` from the eigendecomposition of `T`.
fn small_exp(eig: &SymmetricEigen<f64, nalgebra::Dyn>, tau: f64) -> Vec<Complex64> {
    let q = &eig.eigenvectors;
    let k = q.nrows();
    let phases: Vec<Complex64> = eig
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(l, &lam)| Complex64::from_polar(q[(0, l)], -lam * tau))
        .collect();
    (0..k)
        .map(|j| (0..k).map(|l| phases[l] * q[(j, l)]).sum())
        .collect()
}
