use std::collections::HashMap;

use rayon::prelude::*;

use super::matrix::SparseHermitianMatrix;
use crate::error::{Error, Result};
use crate::fock::FockBasis;
use crate::ode::{Interaction, OdeSystem};

/// Interactions larger than this cannot be enumerated pattern by pattern.
pub const MAX_INTERACTION_SIZE: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuildOptions {
    /// Refuse to assemble when the worst-case entry count exceeds this.
    pub max_entries: u64,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            max_entries: 200_000_000,
        }
    }
}

/// Raise/lower patterns of one interaction with nonzero coefficient.
/// Bit `k` of `mask` set means member `k` is raised.
struct PatternSet {
    members: Vec<usize>,
    patterns: Vec<(u32, f64)>,
    scale: f64,
}

impl PatternSet {
    fn new(p: &Interaction) -> Self {
        let len = p.len();
        let abs_sum: f64 = p.couplings().iter().map(|a| a.abs()).sum();
        let mut patterns = Vec::new();
        for mask in 0u32..(1u32 << len) {
            let s: f64 = p
                .couplings()
                .iter()
                .enumerate()
                .map(|(k, &a)| if mask >> k & 1 == 1 { a } else { -a })
                .sum();
            if s.abs() > 1e-12 * abs_sum {
                patterns.push((mask, s));
            }
        }
        PatternSet {
            members: p.members().to_vec(),
            patterns,
            scale: 2f64.powf(-(len as f64) / 2.0),
        }
    }
}

/// Entry count no column can exceed: at most `m` occupied modes, each in at
/// most `c` interactions with at most `2^d` patterns.
fn column_entry_bound(sets: &[PatternSet], sys: &OdeSystem, basis: &FockBasis) -> u64 {
    let all: u64 = sets.iter().map(|s| s.patterns.len() as u64).sum();
    let local = (sys.c() as u64)
        .saturating_mul(1u64 << sys.d().min(63))
        .saturating_mul(basis.cap() as u64);
    all.min(local).min(basis.dim())
}

/// Truncated Hamiltonian `P_m H P_m` with
/// `H = Σ_p Σ_{i∈p} α_{p→i} k_i Π_{j∈p∖i} x_j`, `x = (a + a†)/√2`,
/// `k = i(a† − a)/√2`.
pub fn build_hamiltonian(sys: &OdeSystem, basis: &FockBasis) -> Result<SparseHermitianMatrix> {
    build_hamiltonian_with(sys, basis, &BuildOptions::default())
}

pub fn build_hamiltonian_with(
    sys: &OdeSystem,
    basis: &FockBasis,
    opts: &BuildOptions,
) -> Result<SparseHermitianMatrix> {
    if basis.n_vars() != sys.n_vars() {
        return Err(Error::DimensionMismatch {
            expected: sys.n_vars(),
            got: basis.n_vars(),
        });
    }
    if sys.d() > MAX_INTERACTION_SIZE {
        return Err(Error::InvalidArgument(format!(
            "interaction size {} exceeds {MAX_INTERACTION_SIZE}",
            sys.d()
        )));
    }
    let sets: Vec<PatternSet> = sys.interactions().iter().map(PatternSet::new).collect();
    let estimated = basis
        .dim()
        .saturating_mul(column_entry_bound(&sets, sys, basis));
    if estimated > opts.max_entries {
        return Err(Error::BasisTooLarge {
            estimated,
            cap: opts.max_entries,
        });
    }
    let mut touching: Vec<Vec<usize>> = vec![Vec::new(); sys.n_vars()];
    for (k, p) in sys.interactions().iter().enumerate() {
        for &j in p.members() {
            touching[j].push(k);
        }
    }

    let dim = basis.len();
    let columns: Vec<Vec<(usize, f64)>> = (0..dim)
        .into_par_iter()
        .map_init(
            || ColumnScratch::new(sys.n_vars()),
            |scratch, col| scratch.column(col as u64, basis, &sets, &touching),
        )
        .collect();
    Ok(SparseHermitianMatrix::from_columns(dim, columns))
}

struct ColumnScratch {
    occ: Vec<usize>,
    symbols: Vec<usize>,
    out_symbols: Vec<usize>,
    occupied: Vec<usize>,
    active: Vec<usize>,
    acc: HashMap<u64, (f64, f64)>,
}

impl ColumnScratch {
    fn new(n_vars: usize) -> Self {
        ColumnScratch {
            occ: vec![0; n_vars],
            symbols: Vec::new(),
            out_symbols: Vec::new(),
            occupied: Vec::new(),
            active: Vec::new(),
            acc: HashMap::new(),
        }
    }

    fn column(
        &mut self,
        col: u64,
        basis: &FockBasis,
        sets: &[PatternSet],
        touching: &[Vec<usize>],
    ) -> Vec<(usize, f64)> {
        let cap = basis.cap();
        basis.unrank_into(col, &mut self.symbols);
        // Symbols are non-decreasing, so `occupied` comes out ascending.
        self.occupied.clear();
        for &s in &self.symbols {
            if s > 0 {
                if self.occ[s - 1] == 0 {
                    self.occupied.push(s - 1);
                }
                self.occ[s - 1] += 1;
            }
        }
        let total: usize = self.occupied.iter().map(|&j| self.occ[j]).sum();

        // An interaction with all members empty only admits the all-raise
        // pattern, whose coefficient Σα vanishes.
        self.active.clear();
        for &j in &self.occupied {
            self.active.extend_from_slice(&touching[j]);
        }
        self.active.sort_unstable();
        self.active.dedup();

        self.acc.clear();
        for &k in &self.active {
            let set = &sets[k];
            'pattern: for &(mask, s) in &set.patterns {
                let mut new_total = total;
                let mut factor: u128 = 1;
                for (slot, &j) in set.members.iter().enumerate() {
                    let n = self.occ[j];
                    if mask >> slot & 1 == 1 {
                        factor *= (n + 1) as u128;
                        new_total += 1;
                    } else {
                        if n == 0 {
                            continue 'pattern;
                        }
                        factor *= n as u128;
                        new_total -= 1;
                    }
                }
                if new_total > cap {
                    continue;
                }
                let value = s * (factor as f64).sqrt() * set.scale;
                let row = target_rank(
                    basis,
                    &mut self.out_symbols,
                    &self.occupied,
                    &self.occ,
                    &set.members,
                    mask,
                    new_total,
                );
                let slot = self.acc.entry(row).or_insert((0.0, 0.0));
                slot.0 += value;
                slot.1 += value.abs();
            }
        }
        for &j in &self.occupied {
            self.occ[j] = 0;
        }

        let mut out: Vec<(usize, f64)> = self
            .acc
            .iter()
            .filter(|(_, &(v, mag))| v.abs() > 1e-13 * mag)
            .map(|(&r, &(v, _))| (r as usize, v))
            .collect();
        out.sort_unstable_by_key(|&(r, _)| r);
        out
    }
}

/// Rank of the word obtained by applying `mask` to a column whose occupied
/// modes are `occupied` (ascending) with counts `occ`.
fn target_rank(
    basis: &FockBasis,
    out: &mut Vec<usize>,
    occupied: &[usize],
    occ: &[usize],
    members: &[usize],
    mask: u32,
    new_total: usize,
) -> u64 {
    let cap = basis.cap();
    out.clear();
    out.resize(cap - new_total, 0);
    let new_occ = |j: usize, occ: &[usize]| match members.iter().position(|&v| v == j) {
        Some(slot) if mask >> slot & 1 == 1 => occ[j] + 1,
        Some(_) => occ[j] - 1,
        None => occ[j],
    };
    // Merge occupied modes and interaction members in ascending order.
    let (mut a, mut b) = (0, 0);
    while a < occupied.len() || b < members.len() {
        let j = match (occupied.get(a), members.get(b)) {
            (Some(&x), Some(&y)) if x == y => {
                a += 1;
                b += 1;
                x
            }
            (Some(&x), Some(&y)) if x < y => {
                a += 1;
                x
            }
            (Some(_), Some(&y)) => {
                b += 1;
                y
            }
            (Some(&x), None) => {
                a += 1;
                x
            }
            (None, Some(&y)) => {
                b += 1;
                y
            }
            (None, None) => unreachable!(),
        };
        let n = new_occ(j, occ);
        out.extend(std::iter::repeat_n(j + 1, n));
    }
    basis.rank_symbols(out)
}

/// Splits into the `|p| = 2` part and the `|p| > 2` part. Neither part is
/// required to cover every variable.
pub fn split_linear_interaction(sys: &OdeSystem) -> (OdeSystem, OdeSystem) {
    let (linear, nonlinear): (Vec<Interaction>, Vec<Interaction>) = sys
        .interactions()
        .iter()
        .cloned()
        .partition(|p| p.len() == 2);
    (
        OdeSystem::partial(sys.n_vars(), linear),
        OdeSystem::partial(sys.n_vars(), nonlinear),
    )
}

/// True iff every nonzero entry joins words with equal total occupation.
pub fn check_number_conserving(h: &SparseHermitianMatrix, basis: &FockBasis) -> bool {
    let totals: Vec<usize> = basis.words().map(|w| w.total_occupation()).collect();
    h.triplets().all(|(r, c, _)| totals[r] == totals[c])
}
