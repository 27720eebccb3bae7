use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Hermitian matrix with purely imaginary entries, `H = i·A` with `A` real
/// and antisymmetric. Only `A` is stored, in compressed rows.
///
/// Because `A` is real antisymmetric, `e^{-iHt} = e^{At}` is a real
/// orthogonal matrix and real states stay real under evolution.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseHermitianMatrix {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
    hermitian: bool,
}

impl SparseHermitianMatrix {
    /// Assembles from per-column lists `(row, imag)` sorted by row.
    pub(crate) fn from_columns(dim: usize, columns: Vec<Vec<(usize, f64)>>) -> Self {
        let mut counts = vec![0usize; dim + 1];
        for col in &columns {
            for &(r, _) in col {
                counts[r + 1] += 1;
            }
        }
        for i in 0..dim {
            counts[i + 1] += counts[i];
        }
        let row_ptr = counts.clone();
        let nnz = row_ptr[dim];
        let mut next = counts;
        let mut cols = vec![0usize; nnz];
        let mut vals = vec![0.0; nnz];
        // Columns visited in ascending order keep each row sorted.
        for (c, col) in columns.iter().enumerate() {
            for &(r, v) in col {
                let slot = next[r];
                cols[slot] = c;
                vals[slot] = v;
                next[r] += 1;
            }
        }
        let mut m = SparseHermitianMatrix {
            dim,
            row_ptr,
            cols,
            vals,
            hermitian: false,
        };
        m.hermitian = m.hermiticity_defect() <= 1e-12;
        m
    }

    /// From `(row, col, imag)` triplets; duplicates are summed.
    pub fn from_triplets(dim: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        let mut columns: Vec<Vec<(usize, f64)>> = vec![Vec::new(); dim];
        for &(r, c, v) in triplets {
            if r >= dim || c >= dim {
                return Err(Error::IndexOutOfRange {
                    index: r.max(c) as u64,
                    dim: dim as u64,
                });
            }
            if !v.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "non-finite entry at ({r}, {c})"
                )));
            }
            columns[c].push((r, v));
        }
        for col in &mut columns {
            col.sort_by_key(|&(r, _)| r);
            let mut merged: Vec<(usize, f64)> = Vec::with_capacity(col.len());
            for &(r, v) in col.iter() {
                match merged.last_mut() {
                    Some(last) if last.0 == r => last.1 += v,
                    _ => merged.push((r, v)),
                }
            }
            merged.retain(|&(_, v)| v != 0.0);
            *col = merged;
        }
        Ok(Self::from_columns(dim, columns))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// Passed the `H = H†` check (to 1e-12) at construction.
    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    /// Always true: only imaginary parts are representable.
    pub fn is_purely_imaginary(&self) -> bool {
        true
    }

    /// Column indices and imaginary parts of row `r`.
    pub fn row(&self, r: usize) -> (&[usize], &[f64]) {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        (&self.cols[span.clone()], &self.vals[span])
    }

    /// Imaginary part of `H[r, c]`.
    pub fn imag_entry(&self, r: usize, c: usize) -> f64 {
        let (cols, vals) = self.row(r);
        cols.binary_search(&c).map(|k| vals[k]).unwrap_or(0.0)
    }

    pub fn entry(&self, r: usize, c: usize) -> Complex64 {
        Complex64::new(0.0, self.imag_entry(r, c))
    }

    /// `(row, col, imag)` in row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.dim).flat_map(move |r| {
            let (cols, vals) = self.row(r);
            cols.iter().zip(vals).map(move |(&c, &v)| (r, c, v))
        })
    }

    /// `y = A x` for the real generator `A = -iH`.
    pub fn apply_generator(&self, x: &[f64], y: &mut [f64]) {
        for (r, out) in y.iter_mut().enumerate() {
            let (cols, vals) = self.row(r);
            *out = cols.iter().zip(vals).map(|(&c, &v)| v * x[c]).sum();
        }
    }

    /// `y = Aᵀ x`.
    pub fn apply_generator_transpose(&self, x: &[f64], y: &mut [f64]) {
        y.iter_mut().for_each(|v| *v = 0.0);
        for (r, &xr) in x.iter().enumerate() {
            let (cols, vals) = self.row(r);
            for (&c, &v) in cols.iter().zip(vals) {
                y[c] += v * xr;
            }
        }
    }

    /// `y = H x`.
    pub fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        for (r, out) in y.iter_mut().enumerate() {
            let (cols, vals) = self.row(r);
            let acc: Complex64 = cols.iter().zip(vals).map(|(&c, &v)| x[c] * v).sum();
            *out = Complex64::new(-acc.im, acc.re);
        }
    }

    pub fn max_row_nnz(&self) -> usize {
        (0..self.dim)
            .map(|r| self.row_ptr[r + 1] - self.row_ptr[r])
            .max()
            .unwrap_or(0)
    }

    /// Max norm `max |H[r, c]|`.
    pub fn max_abs_entry(&self) -> f64 {
        self.vals.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `‖H‖_∞`, the largest absolute row sum.
    pub fn max_row_abs_sum(&self) -> f64 {
        (0..self.dim)
            .map(|r| self.row(r).1.iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// `‖H‖_1`, the largest absolute column sum.
    pub fn max_col_abs_sum(&self) -> f64 {
        let mut sums = vec![0.0; self.dim];
        for (_, c, v) in self.triplets() {
            sums[c] += v.abs();
        }
        sums.into_iter().fold(0.0, f64::max)
    }

    /// `max |H[r, c] - conj(H[c, r])|`, i.e. `max |A[r, c] + A[c, r]|`.
    pub fn hermiticity_defect(&self) -> f64 {
        self.triplets()
            .map(|(r, c, v)| (v + self.imag_entry(c, r)).abs())
            .fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::from_element(self.dim, self.dim, Complex64::new(0.0, 0.0));
        for (r, c, v) in self.triplets() {
            m[(r, c)] = Complex64::new(0.0, v);
        }
        m
    }

    /// Dense real generator `A` with `H = iA`.
    pub fn generator_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (r, c, v) in self.triplets() {
            m[(r, c)] = v;
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rotation_m1() -> SparseHermitianMatrix {
        SparseHermitianMatrix::from_triplets(3, &[(1, 0, 1.0), (0, 1, -1.0)]).unwrap()
    }

    #[test]
    fn basic_queries() {
        let h = rotation_m1();
        assert_eq!(h.nnz(), 2);
        assert!(h.is_hermitian());
        assert_eq!(h.entry(1, 0), Complex64::new(0.0, 1.0));
        assert_eq!(h.entry(0, 1), Complex64::new(0.0, -1.0));
        assert_eq!(h.entry(2, 2), Complex64::new(0.0, 0.0));
        assert_eq!(h.max_row_nnz(), 1);
        assert_eq!(h.max_col_abs_sum(), 1.0);
        let dense = h.to_dense();
        assert_eq!(dense.adjoint(), dense);
    }

    #[test]
    fn apply_matches_dense() {
        let h = SparseHermitianMatrix::from_triplets(
            3,
            &[(1, 0, 0.5), (0, 1, -0.5), (2, 1, 2.0), (1, 2, -2.0)],
        )
        .unwrap();
        let x = vec![
            Complex64::new(1.0, -0.5),
            Complex64::new(0.25, 2.0),
            Complex64::new(-1.0, 0.0),
        ];
        let mut y = vec![Complex64::new(0.0, 0.0); 3];
        h.apply(&x, &mut y);
        let dense = h.to_dense() * nalgebra::DVector::from_vec(x.clone());
        for (a, b) in y.iter().zip(dense.iter()) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn asymmetric_input_is_flagged() {
        let h = SparseHermitianMatrix::from_triplets(2, &[(1, 0, 1.0), (0, 1, 1.0)]).unwrap();
        assert!(!h.is_hermitian());
        assert_eq!(h.hermiticity_defect(), 2.0);
    }

    #[test]
    fn duplicate_triplets_sum() {
        let h = SparseHermitianMatrix::from_triplets(2, &[(1, 0, 0.5), (1, 0, 0.5), (0, 1, -1.0)])
            .unwrap();
        assert_eq!(h.imag_entry(1, 0), 1.0);
        assert!(SparseHermitianMatrix::from_triplets(2, &[(2, 0, 1.0)]).is_err());
    }
}
