use super::polynomial::Polynomial;
use crate::error::{Error, Result};
use crate::fock::ObservableSpec;

/// Invertible change of variables between physical coordinates and the
/// variables of a generated system.
///
/// Physical coordinates are `(x_1..x_N, v_1..v_N)` for the oscillator
/// models and `(cos θ_1, sin θ_1, …)` for Kuramoto. Each physical coordinate
/// is a linear function of one system variable.
#[derive(Debug, Clone, PartialEq)]
pub struct Transform {
    names: Vec<String>,
    physical_names: Vec<String>,
    /// `physical[k] = scale[k] · state[var[k]]`.
    var: Vec<usize>,
    scale: Vec<f64>,
    /// Quadratic or higher system variables, recomputed from the physical
    /// point by [`Transform::to_system`].
    derived: Vec<Derived>,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Derived {
    /// `state[target] = coeff · (Σ_k sign_k physical[k])^power`.
    Power {
        target: usize,
        coeff: f64,
        terms: Vec<(usize, f64)>,
        power: i32,
    },
}

impl Transform {
    pub(crate) fn new(
        names: Vec<String>,
        physical: Vec<(String, usize, f64)>,
        derived: Vec<Derived>,
    ) -> Self {
        let mut physical_names = Vec::new();
        let mut var = Vec::new();
        let mut scale = Vec::new();
        for (name, v, s) in physical {
            physical_names.push(name);
            var.push(v);
            scale.push(s);
        }
        Transform {
            names,
            physical_names,
            var,
            scale,
            derived,
        }
    }

    /// System variable names in index order.
    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn physical_names(&self) -> &[String] {
        &self.physical_names
    }

    pub fn n_vars(&self) -> usize {
        self.names.len()
    }

    /// System state for a physical point. Every system variable is a
    /// function of the physical coordinates.
    pub fn to_system(&self, physical: &[f64]) -> Result<Vec<f64>> {
        if physical.len() != self.var.len() {
            return Err(Error::DimensionMismatch {
                expected: self.var.len(),
                got: physical.len(),
            });
        }
        let mut state = vec![0.0; self.names.len()];
        for (k, (&v, &s)) in self.var.iter().zip(&self.scale).enumerate() {
            state[v] = physical[k] / s;
        }
        for d in &self.derived {
            match d {
                Derived::Power {
                    target,
                    coeff,
                    terms,
                    power,
                } => {
                    let base: f64 = terms.iter().map(|&(k, s)| s * physical[k]).sum();
                    state[*target] = coeff * base.powi(*power);
                }
            }
        }
        Ok(state)
    }

    pub fn to_physical(&self, state: &[f64]) -> Result<Vec<f64>> {
        if state.len() != self.names.len() {
            return Err(Error::DimensionMismatch {
                expected: self.names.len(),
                got: state.len(),
            });
        }
        Ok(self
            .var
            .iter()
            .zip(&self.scale)
            .map(|(&v, &s)| s * state[v])
            .collect())
    }

    /// Physical coordinate `k` as a polynomial in system variables.
    pub fn coordinate(&self, k: usize) -> Result<Polynomial> {
        match (self.var.get(k), self.scale.get(k)) {
            (Some(&v), Some(&s)) => Ok(Polynomial::linear(v, s)),
            _ => Err(Error::IndexOutOfRange {
                index: k as u64,
                dim: self.var.len() as u64,
            }),
        }
    }

    /// Substitutes physical coordinates into a polynomial written over them
    /// and compiles the result to Hermite-product form.
    pub fn compile(&self, physical_poly: &Polynomial) -> Result<ObservableSpec> {
        let mut total = Polynomial::zero();
        for (key, c) in physical_poly.terms() {
            let mut term = Polynomial::constant(c);
            for (&k, &e) in key {
                let coord = self.coordinate(k)?;
                for _ in 0..e {
                    term = term.mul(&coord);
                }
            }
            total = total.add(&term);
        }
        total.to_observable(self.n_vars())
    }
}
