use super::transform::{Derived, Transform};
use crate::error::{Error, Result};
use crate::ode::{OdeSystem, SystemDraft};

/// `m_j ẍ_j = Σ_{k≠j} κ_jk (x_k − x_j) − κ_jj x_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicSpec {
    pub masses: Vec<f64>,
    /// Symmetric `N × N`; `κ_jj > 0`, `κ_jk ≥ 0`. Zero off-diagonal entries
    /// mean no spring.
    pub springs: Vec<Vec<f64>>,
}

impl HarmonicSpec {
    pub fn n(&self) -> usize {
        self.masses.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n();
        if n == 0 {
            return Err(Error::InvalidArgument(
                "harmonic model needs at least one mass".into(),
            ));
        }
        if self.springs.len() != n || self.springs.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidArgument(format!(
                "spring matrix must be {n}×{n}"
            )));
        }
        for (j, &m) in self.masses.iter().enumerate() {
            if !(m > 0.0 && m.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "mass {} must be positive, got {m}",
                    j + 1
                )));
            }
        }
        for j in 0..n {
            let kjj = self.springs[j][j];
            if !(kjj > 0.0 && kjj.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "diagonal spring κ[{0}][{0}] must be positive, got {kjj}",
                    j + 1
                )));
            }
            for k in 0..n {
                let (a, b) = (self.springs[j][k], self.springs[k][j]);
                if j != k && !(a >= 0.0 && a.is_finite()) {
                    return Err(Error::InvalidArgument(format!(
                        "spring κ[{}][{}] must be finite and ≥ 0, got {a}",
                        j + 1,
                        k + 1
                    )));
                }
                if (a - b).abs() > 1e-12 * a.abs().max(b.abs()) {
                    return Err(Error::InvalidArgument(format!(
                        "spring matrix is not symmetric at ({}, {})",
                        j + 1,
                        k + 1
                    )));
                }
            }
        }
        Ok(())
    }

    /// Pairs `j < k` joined by a spring.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.n();
        (0..n)
            .flat_map(|j| (j + 1..n).map(move |k| (j, k)))
            .filter(|&(j, k)| self.springs[j][k] > 0.0)
            .collect()
    }
}

/// Variables `X_j = √κ_jj x_j`, then `Y_jk = √κ_jk (x_j − x_k)` per edge
/// `j < k`, then `V_j = √m_j ẋ_j`. Every interaction is a pair.
///
/// With `Y_kj = −Y_jk`, the force on `V_j` from edge `(j, k)` is
/// `−√(κ_jk/m_j) Y_jk`, which makes each pair zero-sum.
pub fn make_harmonic(spec: &HarmonicSpec) -> Result<(OdeSystem, Transform)> {
    spec.validate()?;
    let n = spec.n();
    let edges = spec.edges();
    let x = |j: usize| j;
    let y = |e: usize| n + e;
    let v = |j: usize| n + edges.len() + j;
    let n_vars = 2 * n + edges.len();

    let mut draft = SystemDraft::new(n_vars);
    for j in 0..n {
        let r = (spec.springs[j][j] / spec.masses[j]).sqrt();
        draft.push(&[(x(j), r), (v(j), -r)]);
    }
    for (e, &(j, k)) in edges.iter().enumerate() {
        let kjk = spec.springs[j][k];
        let rj = (kjk / spec.masses[j]).sqrt();
        let rk = (kjk / spec.masses[k]).sqrt();
        draft.push(&[(y(e), rj), (v(j), -rj)]);
        draft.push(&[(y(e), -rk), (v(k), rk)]);
    }
    let sys = OdeSystem::from_draft(&draft)?;

    let mut names = Vec::with_capacity(n_vars);
    names.extend((0..n).map(|j| format!("X{}", j + 1)));
    names.extend(edges.iter().map(|&(j, k)| format!("Y{}_{}", j + 1, k + 1)));
    names.extend((0..n).map(|j| format!("V{}", j + 1)));
    let mut physical = Vec::with_capacity(2 * n);
    for j in 0..n {
        physical.push((format!("x{}", j + 1), x(j), 1.0 / spec.springs[j][j].sqrt()));
    }
    for j in 0..n {
        physical.push((format!("v{}", j + 1), v(j), 1.0 / spec.masses[j].sqrt()));
    }
    let derived = edges
        .iter()
        .enumerate()
        .map(|(e, &(j, k))| Derived::Power {
            target: y(e),
            coeff: spec.springs[j][k].sqrt(),
            terms: vec![(j, 1.0), (k, -1.0)],
            power: 1,
        })
        .collect();
    Ok((sys, Transform::new(names, physical, derived)))
}

/// `Σ_j X_j² + Σ_e Y_e² + Σ_j V_j²`, twice the mechanical energy.
pub fn harmonic_energy(state: &[f64]) -> f64 {
    state.iter().map(|v| v * v).sum()
}
