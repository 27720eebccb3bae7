use super::transform::{Derived, Transform};
use crate::error::{Error, Result};
use crate::ode::{OdeSystem, SystemDraft};

/// One undirected spring between sites `j` and `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DuffingEdge {
    pub j: usize,
    pub k: usize,
    pub kappa: f64,
    pub lambda: f64,
}

/// `m_j ẍ_j = −κ_j x_j − 2λ_j x_j³ − Σ_{k∈S_j} (κ_jk (x_j − x_k) + 2λ_jk (x_j − x_k)³)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DuffingSpec {
    pub masses: Vec<f64>,
    pub kappa: Vec<f64>,
    pub lambda: Vec<f64>,
    pub edges: Vec<DuffingEdge>,
}

fn positive(what: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "{what} must be positive, got {v}"
        )))
    }
}

impl DuffingSpec {
    pub fn n(&self) -> usize {
        self.masses.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n();
        if n == 0 {
            return Err(Error::InvalidArgument(
                "Duffing model needs at least one site".into(),
            ));
        }
        if self.kappa.len() != n || self.lambda.len() != n {
            return Err(Error::InvalidArgument(format!(
                "masses, kappa and lambda must all have length {n}"
            )));
        }
        for j in 0..n {
            positive(&format!("mass {}", j + 1), self.masses[j])?;
            positive(&format!("kappa {}", j + 1), self.kappa[j])?;
            positive(&format!("lambda {}", j + 1), self.lambda[j])?;
        }
        let mut seen = std::collections::BTreeSet::new();
        for e in &self.edges {
            if e.j >= n || e.k >= n || e.j == e.k {
                return Err(Error::InvalidArgument(format!(
                    "edge ({}, {}) must join two distinct sites in 1..={n}",
                    e.j + 1,
                    e.k + 1
                )));
            }
            if !seen.insert((e.j.min(e.k), e.j.max(e.k))) {
                return Err(Error::InvalidArgument(format!(
                    "edge ({}, {}) listed twice",
                    e.j + 1,
                    e.k + 1
                )));
            }
            positive("edge kappa", e.kappa)?;
            positive("edge lambda", e.lambda)?;
        }
        Ok(())
    }

    /// Edges with `j < k`, sorted.
    fn ordered_edges(&self) -> Vec<DuffingEdge> {
        let mut edges: Vec<DuffingEdge> = self
            .edges
            .iter()
            .map(|e| DuffingEdge {
                j: e.j.min(e.k),
                k: e.j.max(e.k),
                ..*e
            })
            .collect();
        edges.sort_by_key(|e| (e.j, e.k));
        edges
    }
}

/// Variables `X_j = √κ_j x_j`, `Y_j = √λ_j x_j²`, then per edge `j < k`
/// `X_jk = √κ_jk (x_j − x_k)` and `Y_jk = √λ_jk (x_j − x_k)²`, then
/// `V_j = √m_j ẋ_j`. Pairs carry the linear springs, triples the quartic
/// potential terms.
pub fn make_duffing(spec: &DuffingSpec) -> Result<(OdeSystem, Transform)> {
    spec.validate()?;
    let n = spec.n();
    let edges = spec.ordered_edges();
    let ne = edges.len();
    let xs = |j: usize| j;
    let ys = |j: usize| n + j;
    let xe = |e: usize| 2 * n + e;
    let ye = |e: usize| 2 * n + ne + e;
    let v = |j: usize| 2 * n + 2 * ne + j;
    let n_vars = 3 * n + 2 * ne;

    let mut draft = SystemDraft::new(n_vars);
    for j in 0..n {
        let (m, k, l) = (spec.masses[j], spec.kappa[j], spec.lambda[j]);
        let r = (k / m).sqrt();
        let q = 2.0 * (l / (m * k)).sqrt();
        draft.push(&[(xs(j), r), (v(j), -r)]);
        draft.push(&[(xs(j), 0.0), (ys(j), q), (v(j), -q)]);
    }
    for (e, edge) in edges.iter().enumerate() {
        let (mj, mk) = (spec.masses[edge.j], spec.masses[edge.k]);
        let rj = (edge.kappa / mj).sqrt();
        let rk = (edge.kappa / mk).sqrt();
        let qj = 2.0 * (edge.lambda / (mj * edge.kappa)).sqrt();
        let qk = 2.0 * (edge.lambda / (mk * edge.kappa)).sqrt();
        draft.push(&[(xe(e), rj), (v(edge.j), -rj)]);
        draft.push(&[(xe(e), -rk), (v(edge.k), rk)]);
        draft.push(&[(xe(e), 0.0), (ye(e), qj), (v(edge.j), -qj)]);
        draft.push(&[(xe(e), 0.0), (ye(e), -qk), (v(edge.k), qk)]);
    }
    let sys = OdeSystem::from_draft(&draft)?;

    let mut names = Vec::with_capacity(n_vars);
    names.extend((0..n).map(|j| format!("X{}", j + 1)));
    names.extend((0..n).map(|j| format!("Y{}", j + 1)));
    names.extend(edges.iter().map(|e| format!("X{}_{}", e.j + 1, e.k + 1)));
    names.extend(edges.iter().map(|e| format!("Y{}_{}", e.j + 1, e.k + 1)));
    names.extend((0..n).map(|j| format!("V{}", j + 1)));

    let mut physical = Vec::with_capacity(2 * n);
    for j in 0..n {
        physical.push((format!("x{}", j + 1), xs(j), 1.0 / spec.kappa[j].sqrt()));
    }
    for j in 0..n {
        physical.push((format!("v{}", j + 1), v(j), 1.0 / spec.masses[j].sqrt()));
    }
    let mut derived = Vec::new();
    for j in 0..n {
        derived.push(Derived::Power {
            target: ys(j),
            coeff: spec.lambda[j].sqrt(),
            terms: vec![(j, 1.0)],
            power: 2,
        });
    }
    for (e, edge) in edges.iter().enumerate() {
        let diff = vec![(edge.j, 1.0), (edge.k, -1.0)];
        derived.push(Derived::Power {
            target: xe(e),
            coeff: edge.kappa.sqrt(),
            terms: diff.clone(),
            power: 1,
        });
        derived.push(Derived::Power {
            target: ye(e),
            coeff: edge.lambda.sqrt(),
            terms: diff,
            power: 2,
        });
    }
    Ok((sys, Transform::new(names, physical, derived)))
}
