use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::basis::{FockBasis, OccupationWord};
use super::hermite::hermite_table;
use crate::error::{Error, Result};

/// Complex amplitudes over a ranked [`FockBasis`]. The norm is computed on
/// first use and cached.
#[derive(Debug, Clone)]
pub struct StateVector {
    n_vars: usize,
    cap: usize,
    amplitudes: Vec<Complex64>,
    norm: OnceLock<f64>,
}

impl PartialEq for StateVector {
    fn eq(&self, other: &Self) -> bool {
        self.n_vars == other.n_vars && self.cap == other.cap && self.amplitudes == other.amplitudes
    }
}

impl StateVector {
    pub fn new(basis: &FockBasis, amplitudes: Vec<Complex64>) -> Result<Self> {
        Self::with_shape(basis.n_vars(), basis.cap(), amplitudes, Some(basis.len()))
    }

    pub fn from_real(basis: &FockBasis, amplitudes: &[f64]) -> Result<Self> {
        Self::new(
            basis,
            amplitudes.iter().map(|&a| Complex64::new(a, 0.0)).collect(),
        )
    }

    pub(crate) fn with_shape(
        n_vars: usize,
        cap: usize,
        amplitudes: Vec<Complex64>,
        expected_len: Option<usize>,
    ) -> Result<Self> {
        if let Some(len) = expected_len {
            if amplitudes.len() != len {
                return Err(Error::DimensionMismatch {
                    expected: len,
                    got: amplitudes.len(),
                });
            }
        }
        if amplitudes
            .iter()
            .any(|a| !(a.re.is_finite() && a.im.is_finite()))
        {
            return Err(Error::InvalidArgument(
                "state amplitudes must be finite".into(),
            ));
        }
        Ok(StateVector {
            n_vars,
            cap,
            amplitudes,
            norm: OnceLock::new(),
        })
    }

    pub fn zeros(basis: &FockBasis) -> Self {
        StateVector {
            n_vars: basis.n_vars(),
            cap: basis.cap(),
            amplitudes: vec![Complex64::new(0.0, 0.0); basis.len()],
            norm: OnceLock::new(),
        }
    }

    /// Unit vector on basis index `index`.
    pub fn basis_vector(basis: &FockBasis, index: u64) -> Result<Self> {
        if index >= basis.dim() {
            return Err(Error::IndexOutOfRange {
                index,
                dim: basis.dim(),
            });
        }
        let mut s = Self::zeros(basis);
        s.amplitudes[index as usize] = Complex64::new(1.0, 0.0);
        Ok(s)
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        *self.norm.get_or_init(|| {
            self.amplitudes
                .iter()
                .map(|a| a.norm_sqr())
                .sum::<f64>()
                .sqrt()
        })
    }

    /// `⟨self|other⟩`, antilinear in `self`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                got: other.len(),
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn max_abs_imag(&self) -> f64 {
        self.amplitudes.iter().fold(0.0, |m, a| m.max(a.im.abs()))
    }
}

/// One term `c_n |n⟩` of an observable; `occupation` maps 0-based variable
/// indices to their occupation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservableTerm {
    pub occupation: BTreeMap<usize, usize>,
    pub coeff: f64,
}

impl ObservableTerm {
    pub fn total(&self) -> usize {
        self.occupation.values().sum()
    }
}

/// A polynomial output `Σ_n c_n Π_i p_{n_i}(x_i)` with `|n| ≤ b`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObservableSpec {
    degree_cap: usize,
    terms: Vec<ObservableTerm>,
}

impl ObservableSpec {
    /// Zero occupations are dropped from each term; at least one term must
    /// remain and every term must have total occupation ≤ `degree_cap`.
    pub fn new(degree_cap: usize, terms: Vec<ObservableTerm>) -> Result<Self> {
        let terms: Vec<ObservableTerm> = terms
            .into_iter()
            .map(|mut t| {
                t.occupation.retain(|_, n| *n > 0);
                t
            })
            .collect();
        if terms.is_empty() {
            return Err(Error::InvalidArgument("observable has no terms".into()));
        }
        if let Some(t) = terms.iter().find(|t| t.total() > degree_cap) {
            return Err(Error::ObservableDegree {
                total: t.total(),
                cap: degree_cap,
            });
        }
        if let Some(t) = terms.iter().find(|t| !t.coeff.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "non-finite coefficient {}",
                t.coeff
            )));
        }
        Ok(ObservableSpec { degree_cap, terms })
    }

    /// `coeff · p_degree(x_var)` (times `p_0` of every other variable).
    pub fn single(var: usize, degree: usize, coeff: f64) -> Self {
        let occupation = if degree > 0 {
            [(var, degree)].into_iter().collect()
        } else {
            BTreeMap::new()
        };
        ObservableSpec {
            degree_cap: degree,
            terms: vec![ObservableTerm { occupation, coeff }],
        }
    }

    pub fn degree_cap(&self) -> usize {
        self.degree_cap
    }

    pub fn terms(&self) -> &[ObservableTerm] {
        &self.terms
    }

    /// Classical value `Σ_n c_n Π_i p_{n_i}(x_i)`; every variable contributes
    /// a factor, `p_0` where it is unoccupied.
    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        let tables = hermite_tables(x, self.degree_cap)?;
        let vacuum: f64 = tables.iter().map(|t| t[0]).product();
        let mut total = 0.0;
        for term in &self.terms {
            let mut value = vacuum;
            for (&var, &n) in &term.occupation {
                let t = tables.get(var).ok_or(Error::DimensionMismatch {
                    expected: var + 1,
                    got: x.len(),
                })?;
                value *= t[n] / t[0];
            }
            total += term.coeff * value;
        }
        Ok(total)
    }
}

fn hermite_tables(x: &[f64], order: usize) -> Result<Vec<Vec<f64>>> {
    x.iter().map(|&xi| hermite_table(order, xi)).collect()
}

/// Encodes `x0` as the normalized truncated position state with amplitudes
/// `Π_i p_{n_i}(x0_i)` over `|n| ≤ m`. Returns the state and the
/// normalization `L = Σ_{|n| ≤ m} Π_i p_{n_i}(x0_i)²`.
pub fn encode_position(basis: &FockBasis, x0: &[f64]) -> Result<(StateVector, f64)> {
    if x0.len() != basis.n_vars() {
        return Err(Error::DimensionMismatch {
            expected: basis.n_vars(),
            got: x0.len(),
        });
    }
    let tables = hermite_tables(x0, basis.cap())?;
    let vacuum: f64 = tables.iter().map(|t| t[0]).product();
    let mut symbols = Vec::with_capacity(basis.cap());
    let mut raw = Vec::with_capacity(basis.len());
    for index in 0..basis.dim() {
        basis.unrank_into(index, &mut symbols);
        let mut value = vacuum;
        let mut k = 0;
        while k < symbols.len() {
            let s = symbols[k];
            let mut run = 1;
            while k + run < symbols.len() && symbols[k + run] == s {
                run += 1;
            }
            if s > 0 {
                let t = &tables[s - 1];
                value *= t[run] / t[0];
            }
            k += run;
        }
        raw.push(value);
    }
    let l: f64 = raw.iter().map(|v| v * v).sum();
    if !(l > 0.0 && l.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "normalization L = {l} is not positive and finite"
        )));
    }
    let scale = l.sqrt().recip();
    let amplitudes = raw
        .into_iter()
        .map(|v| Complex64::new(v * scale, 0.0))
        .collect();
    Ok((
        StateVector::with_shape(basis.n_vars(), basis.cap(), amplitudes, None)?,
        l,
    ))
}

/// `L(x) = Σ_{|n| ≤ m} Π_i p_{n_i}(x_i)²` by dynamic programming over
/// variables and total occupation; no basis enumeration.
pub fn truncated_normalization(x: &[f64], cap: usize) -> Result<f64> {
    let mut partial = vec![0.0; cap + 1];
    partial[0] = 1.0;
    for &xi in x {
        let t = hermite_table(cap, xi)?;
        let mut next = vec![0.0; cap + 1];
        for (total, &acc) in partial.iter().enumerate() {
            if acc == 0.0 {
                continue;
            }
            for n in 0..=cap - total {
                next[total + n] += acc * t[n] * t[n];
            }
        }
        partial = next;
    }
    Ok(partial.iter().sum())
}

/// The unnormalized state `Σ c_n |n⟩`; coefficients are placed as given so
/// that `⟨c|x⟩` reproduces the observable. Repeated occupations add up.
pub fn encode_observable(basis: &FockBasis, obs: &ObservableSpec) -> Result<StateVector> {
    if obs.degree_cap() > basis.cap() {
        return Err(Error::ObservableDegree {
            total: obs.degree_cap(),
            cap: basis.cap(),
        });
    }
    let mut state = StateVector::zeros(basis);
    let mut occ = vec![0; basis.n_vars()];
    for term in obs.terms() {
        occ.iter_mut().for_each(|v| *v = 0);
        for (&var, &n) in &term.occupation {
            if var >= basis.n_vars() {
                return Err(Error::InvalidArgument(format!(
                    "observable references variable {} but N = {}",
                    var + 1,
                    basis.n_vars()
                )));
            }
            occ[var] = n;
        }
        let word = OccupationWord::from_occupations(&occ, basis.cap())?;
        let idx = basis.rank(&word)? as usize;
        state.amplitudes[idx] += Complex64::new(term.coeff, 0.0);
    }
    Ok(state)
}
