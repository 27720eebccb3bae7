use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::fock::{p0, ObservableSpec, ObservableTerm};

/// Real polynomial in the system variables, `Σ c Π_i x_i^{k_i}`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Polynomial {
    terms: BTreeMap<BTreeMap<usize, usize>, f64>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: f64) -> Self {
        let mut p = Self::zero();
        p.add_term(BTreeMap::new(), c);
        p
    }

    /// `c · x_var`.
    pub fn linear(var: usize, c: f64) -> Self {
        Self::monomial(&[(var, 1)], c)
    }

    pub fn monomial(powers: &[(usize, usize)], c: f64) -> Self {
        let mut key = BTreeMap::new();
        for &(v, k) in powers {
            if k > 0 {
                *key.entry(v).or_insert(0) += k;
            }
        }
        let mut p = Self::zero();
        p.add_term(key, c);
        p
    }

    fn add_term(&mut self, key: BTreeMap<usize, usize>, c: f64) {
        if c != 0.0 {
            *self.terms.entry(key).or_insert(0.0) += c;
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BTreeMap<usize, usize>, f64)> {
        self.terms.iter().map(|(k, &c)| (k, c))
    }

    pub fn degree(&self) -> usize {
        self.terms
            .keys()
            .map(|k| k.values().sum())
            .max()
            .unwrap_or(0)
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (k, &c) in &other.terms {
            out.add_term(k.clone(), c);
        }
        out
    }

    pub fn scale(&self, s: f64) -> Polynomial {
        let mut out = Self::zero();
        for (k, &c) in &self.terms {
            out.add_term(k.clone(), c * s);
        }
        out
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut out = Self::zero();
        for (ka, &ca) in &self.terms {
            for (kb, &cb) in &other.terms {
                let mut key = ka.clone();
                for (&v, &k) in kb {
                    *key.entry(v).or_insert(0) += k;
                }
                out.add_term(key, ca * cb);
            }
        }
        out
    }

    pub fn evaluate(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(k, &c)| {
                c * k
                    .iter()
                    .map(|(&v, &e)| x[v].powi(e as i32))
                    .product::<f64>()
            })
            .sum()
    }

    /// Rewrites the polynomial in the Hermite-product form
    /// `Σ_n c_n Π_i p_{n_i}(x_i)` over `n_vars` variables. Every variable
    /// carries a `p_0` factor when unoccupied, which is divided out here.
    pub fn to_observable(&self, n_vars: usize) -> Result<ObservableSpec> {
        if let Some(v) = self
            .terms
            .keys()
            .flat_map(|k| k.keys())
            .find(|&&v| v >= n_vars)
        {
            return Err(Error::IndexOutOfRange {
                index: *v as u64,
                dim: n_vars as u64,
            });
        }
        let degree = self.degree();
        let expansions: Vec<Vec<f64>> = (0..=degree).map(power_in_hermite).collect();
        // Π_v x_v^{k_v} = p_0^{-N} Σ (Π h) Π_i p_{n_i}(x_i) once the p_0
        // factors of untouched variables are included.
        let unit = p0().powi(-(n_vars as i32));
        let mut acc: BTreeMap<BTreeMap<usize, usize>, f64> = BTreeMap::new();
        for (key, &c) in &self.terms {
            // Tensor product of the per-variable expansions of x^k.
            let mut partial: Vec<(BTreeMap<usize, usize>, f64)> = vec![(BTreeMap::new(), c * unit)];
            for (&v, &k) in key {
                let mut next = Vec::new();
                for (occ, coeff) in &partial {
                    for (n, &h) in expansions[k].iter().enumerate() {
                        if h == 0.0 {
                            continue;
                        }
                        let mut occ = occ.clone();
                        if n > 0 {
                            occ.insert(v, n);
                        }
                        next.push((occ, coeff * h));
                    }
                }
                partial = next;
            }
            for (occ, coeff) in partial {
                *acc.entry(occ).or_insert(0.0) += coeff;
            }
        }
        let terms: Vec<ObservableTerm> = acc
            .into_iter()
            .filter(|(_, c)| *c != 0.0)
            .map(|(occupation, coeff)| ObservableTerm { occupation, coeff })
            .collect();
        if terms.is_empty() {
            return Ok(ObservableSpec::single(0, 0, 0.0));
        }
        ObservableSpec::new(degree, terms)
    }
}

/// Coefficients `h_n` with `x^k = Σ_n h_n p_n(x) / p_0`, i.e. the expansion
/// of `x^k · p_0` in orthonormal Hermite polynomials. Built from
/// `x p_n = √((n+1)/2) p_{n+1} + √(n/2) p_{n-1}`.
fn power_in_hermite(k: usize) -> Vec<f64> {
    let mut h = vec![1.0];
    for _ in 0..k {
        let mut next = vec![0.0; h.len() + 1];
        for (n, &c) in h.iter().enumerate() {
            next[n + 1] += c * ((n + 1) as f64 / 2.0).sqrt();
            if n > 0 {
                next[n - 1] += c * (n as f64 / 2.0).sqrt();
            }
        }
        h = next;
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compiled_observable_reproduces_polynomial() {
        // 0.5 + 2 x0 - x0 x2^2 + 0.25 x1^3
        let p = Polynomial::constant(0.5)
            .add(&Polynomial::linear(0, 2.0))
            .add(&Polynomial::monomial(&[(0, 1), (2, 2)], -1.0))
            .add(&Polynomial::monomial(&[(1, 3)], 0.25));
        let obs = p.to_observable(3).unwrap();
        assert_eq!(obs.degree_cap(), 3);
        for x in [[0.1, -0.7, 1.3], [1.5, 0.2, -0.4], [0.0, 0.0, 0.0]] {
            let want = p.evaluate(&x);
            let got = obs.evaluate(&x).unwrap();
            assert!((want - got).abs() < 1e-12, "{want} vs {got}");
        }
    }

    #[test]
    fn linear_term_is_single_first_order_hermite() {
        let obs = Polynomial::linear(1, 1.0).to_observable(2).unwrap();
        assert_eq!(obs.terms().len(), 1);
        let t = &obs.terms()[0];
        assert_eq!(t.occupation.get(&1), Some(&1));
        // x = p_1(x) p_0(y) / (√2 p_0²)
        assert!((t.coeff - 1.0 / (2f64.sqrt() * p0() * p0())).abs() < 1e-15);
    }

    #[test]
    fn algebra() {
        let a = Polynomial::linear(0, 1.0).add(&Polynomial::constant(1.0));
        let sq = a.mul(&a);
        assert_eq!(sq.degree(), 2);
        assert_eq!(sq.evaluate(&[2.0]), 9.0);
        assert_eq!(sq.scale(0.0), Polynomial::zero());
        assert!(Polynomial::linear(4, 1.0).to_observable(2).is_err());
    }
}
