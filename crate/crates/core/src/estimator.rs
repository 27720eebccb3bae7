//! Closed-form truncation and resource arithmetic. Constants hidden inside
//! asymptotic statements are reported as the literal bracketed expressions.

use std::f64::consts::{E, PI};

use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::ode::OdeSystem;

/// Candidates for `n₀`; the two lists correspond to the two inequalities
/// the truncation must satisfy. Natural logarithms throughout.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TruncationCandidates {
    pub first: Vec<f64>,
    pub second: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TruncationParams {
    pub degree: usize,
    pub eps: f64,
    pub horizon: f64,
    /// `C = 2η²cd³·2^{-d/2}` with the unrescaled `η`.
    pub c_const: f64,
    pub n0: u64,
    /// `m = d·n₀ + b`.
    pub m: u64,
    /// `Δ = C·T·m^d`.
    pub delta: f64,
    pub candidates: TruncationCandidates,
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "ε must lie in (0, 1), got {eps}"
        )));
    }
    Ok(())
}

pub fn c_constant(sys: &OdeSystem) -> f64 {
    let (c, d, eta) = (sys.c() as f64, sys.d() as f64, sys.eta());
    2.0 * eta * eta * c * d.powi(3) * 2f64.powf(-d / 2.0)
}

/// Smallest `n₀` meeting both sufficient-condition lists, then `m` and `Δ`.
pub fn select_truncation(
    sys: &OdeSystem,
    degree: usize,
    eps: f64,
    horizon: f64,
) -> Result<TruncationParams> {
    check_eps(eps)?;
    if degree == 0 {
        return Err(Error::InvalidArgument(
            "observable degree b must be at least 1".into(),
        ));
    }
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "horizon must be positive and finite, got {horizon}"
        )));
    }
    let b = degree as f64;
    let (c, d, eta) = (sys.c() as f64, sys.d() as f64, sys.eta());
    let c_const = c_constant(sys);
    let log_inv_eps = (1.0 / eps).ln();
    let first = vec![
        log_inv_eps,
        b * (c_const * horizon).ln(),
        b * d * (d + 1.0).ln() - 0.5 * (PI / 2.0).ln(),
        4.0 * b * d - 2.0,
        E.powi(4),
    ];
    let second = vec![
        log_inv_eps,
        b * eta.ln(),
        3.0 * b,
        (2f64.sqrt() / d) * (E.powi(3) / (2.0 * eta * c * d.powi(3) * horizon)).powf(1.0 / d)
            - b / d,
    ];
    let top = first
        .iter()
        .chain(&second)
        .copied()
        .filter(|v| v.is_finite())
        .fold(1.0, f64::max);
    let n0 = top.ceil() as u64;
    let m = sys.d() as u64 * n0 + degree as u64;
    let delta = c_const * horizon * (m as f64).powi(sys.d() as i32);
    Ok(TruncationParams {
        degree,
        eps,
        horizon,
        c_const,
        n0,
        m,
        delta,
        candidates: TruncationCandidates { first, second },
    })
}

/// Both inequalities in log form, with their slack (right minus left).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TruncationCheck {
    /// `ln(ε/Δ^b)`.
    pub log_target: f64,
    /// `ln((2/n₀!)(2d)^{-n₀})`.
    pub log_first: f64,
    /// `n₀ ln γ`, `γ` the largest rescaled coupling over `|p| > 2`;
    /// `-∞` for linear systems.
    pub log_second: f64,
    pub first_ok: bool,
    pub second_ok: bool,
}

pub fn check_truncation(sys: &OdeSystem, p: &TruncationParams) -> Result<TruncationCheck> {
    let d = sys.d() as f64;
    let n0 = p.n0 as f64;
    let log_target = p.eps.ln() - p.degree as f64 * p.delta.ln();
    let log_first = 2f64.ln() - ln_gamma(n0 + 1.0) - n0 * (2.0 * d).ln();
    let zeros = vec![0.0; sys.n_vars()];
    let (scaled, _) = sys.rescale(&zeros, p.delta)?;
    let gamma = scaled.nonlinear_eta();
    let log_second = if gamma > 0.0 {
        n0 * gamma.ln()
    } else {
        f64::NEG_INFINITY
    };
    Ok(TruncationCheck {
        log_target,
        log_first,
        log_second,
        first_ok: log_first < log_target,
        second_ok: log_second < log_target,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResourceEstimate {
    pub m: u64,
    /// `C(N + m, m)`, in floating point since it can be astronomically large.
    pub basis_dim: f64,
    /// `c·2^d·m`.
    pub sparsity: f64,
    /// `⌈m log₂ N⌉ + 3`.
    pub qubits: u64,
    /// `ηd(m/2)^{d/2}`.
    pub subnormalization: f64,
    /// `(e/4)ηcd(2m)^{d/2+1}`; set by [`simulation_query_count`].
    pub alpha: Option<f64>,
    /// `αt + ln(1/ε)/ln(e + ln(1/ε)/(αt))`, up to constant factors.
    pub queries: Option<f64>,
}

fn ln_binomial(n: f64, k: f64) -> f64 {
    ln_gamma(n + 1.0) - ln_gamma(k + 1.0) - ln_gamma(n - k + 1.0)
}

/// Block-encoding size for `H_m`; `η` is whatever `sys` carries, so pass
/// the rescaled system when that is what is simulated.
pub fn block_encoding_cost(sys: &OdeSystem, m: u64, n_vars: usize) -> Result<ResourceEstimate> {
    if m == 0 {
        return Err(Error::InvalidArgument("m must be at least 1".into()));
    }
    if n_vars == 0 {
        return Err(Error::InvalidArgument("N must be at least 1".into()));
    }
    let (c, d, eta) = (sys.c() as f64, sys.d() as f64, sys.eta());
    let mf = m as f64;
    let n = n_vars as f64;
    Ok(ResourceEstimate {
        m,
        basis_dim: match crate::fock::dimension(n_vars, m as usize) {
            Ok(exact) => exact as f64,
            Err(_) => ln_binomial(n + mf, mf).exp(),
        },
        sparsity: c * 2f64.powf(d) * mf,
        qubits: (mf * n.log2()).ceil() as u64 + 3,
        subnormalization: eta * d * (mf / 2.0).powf(d / 2.0),
        alpha: None,
        queries: None,
    })
}

/// `f(αt, ε) = αt + ln(1/ε)/ln(e + ln(1/ε)/(αt))`.
pub fn query_formula(alpha_t: f64, eps: f64) -> f64 {
    let l = (1.0 / eps).ln();
    alpha_t + l / (E + l / alpha_t).ln()
}

pub fn simulation_query_count(
    sys: &OdeSystem,
    m: u64,
    t: f64,
    eps: f64,
) -> Result<ResourceEstimate> {
    check_eps(eps)?;
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "t must be positive and finite, got {t}"
        )));
    }
    let mut r = block_encoding_cost(sys, m, sys.n_vars())?;
    let (c, d, eta) = (sys.c() as f64, sys.d() as f64, sys.eta());
    let alpha = E / 4.0 * eta * c * d * (2.0 * m as f64).powf(d / 2.0 + 1.0);
    r.alpha = Some(alpha);
    r.queries = Some(query_formula(alpha * t, eps));
    Ok(r)
}

/// `T·N·(1/ε)^{1/p}` for an order-`p` classical integrator.
pub fn classical_baseline(horizon: f64, n_vars: usize, eps: f64, order: u32) -> Result<f64> {
    check_eps(eps)?;
    if order == 0 {
        return Err(Error::InvalidArgument(
            "integrator order must be at least 1".into(),
        ));
    }
    Ok(horizon * n_vars as f64 * (1.0 / eps).powf(1.0 / order as f64))
}

/// Everything the `estimate` command prints.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateReport {
    pub truncation: TruncationParams,
    pub check: TruncationCheck,
    pub resources: ResourceEstimate,
    pub classical_baseline: f64,
}

/// Truncation for `(b, ε, T)`, then costs for the system rescaled by `Δ`
/// over the rescaled time `T`.
pub fn estimate(
    sys: &OdeSystem,
    degree: usize,
    eps: f64,
    horizon: f64,
    rk_order: u32,
) -> Result<EstimateReport> {
    let truncation = select_truncation(sys, degree, eps, horizon)?;
    let check = check_truncation(sys, &truncation)?;
    let (scaled, _) = sys.rescale(&vec![0.0; sys.n_vars()], truncation.delta)?;
    let resources = simulation_query_count(&scaled, truncation.m, horizon, eps)?;
    let classical_baseline = classical_baseline(horizon, sys.n_vars(), eps, rk_order)?;
    Ok(EstimateReport {
        truncation,
        check,
        resources,
        classical_baseline,
    })
}
