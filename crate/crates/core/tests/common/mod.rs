#![allow(dead_code)]

use kvnsim::fock::FockBasis;
use kvnsim::ode::OdeSystem;
use nalgebra::DMatrix;

/// Position and momentum quadratures `(a + a†)/√2`, `(a† − a)/√2` on
/// occupations `0..=cap`.
pub fn quadratures(cap: usize) -> (DMatrix<f64>, DMatrix<f64>) {
    let dim = cap + 1;
    let mut a = DMatrix::zeros(dim, dim);
    for n in 1..dim {
        a[(n - 1, n)] = (n as f64).sqrt();
    }
    let ad = a.transpose();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    ((&a + &ad) * s, (&ad - &a) * s)
}

/// Real generator `A` with `H = iA`, from
/// `H = Σ_p Σ_{i∈p} α_{p→i} k_i Π_{j∈p∖i} x_j`, every product evaluated as
/// a Kronecker product of single-mode matrices and restricted to `|n| ≤ m`.
pub fn dense_generator(sys: &OdeSystem, basis: &FockBasis) -> DMatrix<f64> {
    let n = sys.n_vars();
    let cap = basis.cap();
    let (x, p) = quadratures(cap);
    let occ: Vec<Vec<usize>> = basis.words().map(|w| w.occupations(n)).collect();
    let dim = occ.len();
    let mut out = DMatrix::zeros(dim, dim);
    for inter in sys.interactions() {
        let members = inter.members();
        for (slot, &alpha) in inter.couplings().iter().enumerate() {
            if alpha == 0.0 {
                continue;
            }
            for r in 0..dim {
                for c in 0..dim {
                    let mut v = alpha;
                    for (mode, (&a, &b)) in occ[r].iter().zip(&occ[c]).enumerate() {
                        let factor = match members.iter().position(|&q| q == mode) {
                            Some(k) if k == slot => p[(a, b)],
                            Some(_) => x[(a, b)],
                            None => f64::from(a == b),
                        };
                        v *= factor;
                        if v == 0.0 {
                            break;
                        }
                    }
                    out[(r, c)] += v;
                }
            }
        }
    }
    out
}

/// Visits every non-decreasing word of length `m` over `0..=n` in index
/// order: reverse lexicographic, so `(n, …, n)` first and all zeros last.
pub fn for_each_word(n: usize, m: usize, mut visit: impl FnMut(&[usize])) {
    fn rec(n: usize, m: usize, lo: usize, cur: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize])) {
        if cur.len() == m {
            visit(cur);
            return;
        }
        for s in (lo..=n).rev() {
            cur.push(s);
            rec(n, m, s, cur, visit);
            cur.pop();
        }
    }
    rec(n, m, 0, &mut Vec::with_capacity(m), &mut visit);
}
