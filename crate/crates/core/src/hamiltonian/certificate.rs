use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::matrix::SparseHermitianMatrix;
use crate::fock::FockBasis;
use crate::ode::OdeSystem;

pub const SPECTRAL_ITERATIONS: usize = 50;
const SPECTRAL_SEED: u64 = 0x4b76_4e53;
/// Relative slack when comparing a measured value to its closed-form bound.
const BOUND_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralEstimate {
    /// Largest Ritz value of `H†H`, square-rooted. Never exceeds `‖H‖₂`.
    pub norm: f64,
    /// `β_k |y_k|` for the leading Ritz pair of `H†H`.
    pub residual: f64,
    pub iterations: usize,
}

/// Lanczos with full reorthogonalization on `AᵀA` (equal to `H†H`).
pub fn spectral_norm_estimate(h: &SparseHermitianMatrix, iterations: usize) -> SpectralEstimate {
    let n = h.dim();
    let steps = iterations.min(n).max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(SPECTRAL_SEED);
    let mut q: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let nq = norm(&q);
    q.iter_mut().for_each(|v| *v /= nq);

    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(steps);
    let mut alphas = Vec::with_capacity(steps);
    let mut betas: Vec<f64> = Vec::with_capacity(steps);
    let mut tmp = vec![0.0; n];
    let mut w = vec![0.0; n];
    let scale = h
        .max_col_abs_sum()
        .max(h.max_row_abs_sum())
        .max(f64::MIN_POSITIVE);
    let mut last_beta = 0.0;
    for _ in 0..steps {
        h.apply_generator(&q, &mut tmp);
        h.apply_generator_transpose(&tmp, &mut w);
        let a = dot(&q, &w);
        basis.push(q.clone());
        alphas.push(a);
        // Full reorthogonalization, twice for stability.
        for _ in 0..2 {
            for v in &basis {
                let proj = dot(v, &w);
                w.iter_mut().zip(v).for_each(|(wi, vi)| *wi -= proj * vi);
            }
        }
        let b = norm(&w);
        last_beta = b;
        if b <= 1e-14 * scale * scale {
            break;
        }
        if basis.len() == steps {
            break;
        }
        betas.push(b);
        q.iter_mut().zip(&w).for_each(|(qi, wi)| *qi = wi / b);
    }

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
    let (top, &theta) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("at least one Lanczos step");
    let residual = last_beta * eig.eigenvectors[(k - 1, top)].abs();
    SpectralEstimate {
        norm: theta.max(0.0).sqrt(),
        residual,
        iterations: k,
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Measured sparsity and norms of an assembled Hamiltonian next to the
/// closed-form bounds `c·2^d·m` (row nonzeros), `ηd(m/2)^{d/2}` (max norm)
/// and `ηcd·m^{d/2}` (1-norm).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormCertificate {
    pub max_row_nnz: usize,
    pub max_abs_entry: f64,
    pub one_norm: f64,
    pub inf_norm: f64,
    pub spectral: SpectralEstimate,

    pub sparsity_bound: f64,
    pub max_norm_bound: f64,
    pub one_norm_bound: f64,
    /// `√(‖H‖₁ ‖H‖_∞)`, which dominates `‖H‖₂`.
    pub spectral_bound: f64,

    pub sparsity_ok: bool,
    pub max_norm_ok: bool,
    /// False for `m < 2`: the max-norm bound is then reported but not certified.
    pub max_norm_certified: bool,
    pub one_norm_ok: bool,
    pub spectral_ok: bool,
}

impl NormCertificate {
    /// All certified checks hold.
    pub fn passes(&self) -> bool {
        self.sparsity_ok
            && self.one_norm_ok
            && self.spectral_ok
            && (self.max_norm_ok || !self.max_norm_certified)
    }
}

fn within(measured: f64, bound: f64) -> bool {
    measured <= bound * (1.0 + BOUND_SLACK) + f64::MIN_POSITIVE
}

pub fn norm_certificate(
    h: &SparseHermitianMatrix,
    sys: &OdeSystem,
    basis: &FockBasis,
) -> NormCertificate {
    let (c, d, eta) = (sys.c() as f64, sys.d() as i32, sys.eta());
    let m = basis.cap() as f64;
    let df = d as f64;
    let sparsity_bound = c * 2f64.powi(d) * m;
    let max_norm_bound = eta * df * (m / 2.0).powf(df / 2.0);
    let one_norm_bound = eta * c * df * m.powf(df / 2.0);

    let max_row_nnz = h.max_row_nnz();
    let max_abs_entry = h.max_abs_entry();
    let one_norm = h.max_col_abs_sum();
    let inf_norm = h.max_row_abs_sum();
    let spectral = spectral_norm_estimate(h, SPECTRAL_ITERATIONS);
    let spectral_bound = (one_norm * inf_norm).sqrt();

    NormCertificate {
        max_row_nnz,
        max_abs_entry,
        one_norm,
        inf_norm,
        spectral,
        sparsity_bound,
        max_norm_bound,
        one_norm_bound,
        spectral_bound,
        sparsity_ok: max_row_nnz as f64 <= sparsity_bound,
        max_norm_ok: within(max_abs_entry, max_norm_bound),
        max_norm_certified: basis.cap() >= 2,
        one_norm_ok: within(one_norm, one_norm_bound),
        spectral_ok: within(spectral.norm, spectral_bound),
    }
}
