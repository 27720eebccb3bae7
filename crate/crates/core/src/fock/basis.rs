use std::fmt;

use crate::error::{Error, Result};

/// Alphabets up to this size locate the leading symbol by a linear scan of
/// the count table; larger ones use binary search.
const LINEAR_SCAN_MAX_VARS: usize = 64;

/// Largest representable basis dimension.
pub const MAX_DIM: u64 = i64::MAX as u64;

/// Exact C(N + m, m), the number of occupation vectors over `n_vars` modes
/// with total occupation at most `cap`.
pub fn dimension(n_vars: usize, cap: usize) -> Result<u64> {
    binomial_checked(n_vars + cap, cap)
}

pub(crate) fn binomial_checked(n: usize, k: usize) -> Result<u64> {
    if k > n {
        return Ok(0);
    }
    let k_small = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 1..=k_small as u128 {
        // acc * (n - k_small + i) / i stays integral at every step.
        acc = acc
            .checked_mul(n as u128 - k_small as u128 + i)
            .ok_or(Error::Overflow { n, k })?
            / i;
        if acc > MAX_DIM as u128 {
            return Err(Error::Overflow { n, k });
        }
    }
    Ok(acc as u64)
}

/// Length-`m` non-decreasing word over `{0, …, N}`; symbol 0 is vacuum
/// padding and symbol `i ≥ 1` is one quantum in variable `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OccupationWord {
    symbols: Vec<usize>,
}

impl OccupationWord {
    /// Checks ordering and the symbol range.
    pub fn new(symbols: Vec<usize>, n_vars: usize) -> Result<Self> {
        if let Some(&s) = symbols.iter().find(|&&s| s > n_vars) {
            return Err(Error::MalformedWord(format!(
                "symbol {s} exceeds N = {n_vars}"
            )));
        }
        if symbols.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::MalformedWord(format!(
                "{symbols:?} is not non-decreasing"
            )));
        }
        Ok(OccupationWord { symbols })
    }

    /// Word of length `cap` for the occupation vector `occ` (0-based
    /// variables): padding first, then each variable repeated.
    pub fn from_occupations(occ: &[usize], cap: usize) -> Result<Self> {
        let total: usize = occ.iter().sum();
        if total > cap {
            return Err(Error::MalformedWord(format!(
                "total occupation {total} exceeds cap {cap}"
            )));
        }
        let mut symbols = vec![0; cap - total];
        for (i, &n) in occ.iter().enumerate() {
            symbols.extend(std::iter::repeat_n(i + 1, n));
        }
        Ok(OccupationWord { symbols })
    }

    pub fn symbols(&self) -> &[usize] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Multiplicity of each variable (0-based output index `i` counts
    /// symbol `i + 1`).
    pub fn occupations(&self, n_vars: usize) -> Vec<usize> {
        let mut occ = vec![0; n_vars];
        for &s in self.symbols.iter().filter(|&&s| s > 0) {
            occ[s - 1] += 1;
        }
        occ
    }

    pub fn total_occupation(&self) -> usize {
        self.symbols.iter().filter(|&&s| s > 0).count()
    }
}

impl fmt::Display for OccupationWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.symbols.iter().map(usize::to_string).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// Multiset counts of `occupations` for free functions that do not hold a
/// basis.
pub fn occupations(word: &OccupationWord, n_vars: usize) -> Vec<usize> {
    word.occupations(n_vars)
}

/// The truncated occupation-number basis `{ n : |n| ≤ m }` over `N` modes,
/// indexed by the multiset ranking of its words.
///
/// Order: words sorted by leftmost symbol descending, ties broken the same
/// way on the remaining suffix. Index 0 is `(N, …, N)`; the last index is
/// the all-padding vacuum word.
#[derive(Debug, Clone, PartialEq)]
pub struct FockBasis {
    n_vars: usize,
    cap: usize,
    dim: u64,
    /// `table[n * (cap + 1) + k] = C(n, k)` for `n ≤ N + m`, `k ≤ m`,
    /// saturating; every entry the ranking reads is ≤ `dim`.
    table: Vec<u64>,
}

impl FockBasis {
    pub fn new(n_vars: usize, cap: usize) -> Result<Self> {
        if n_vars == 0 {
            return Err(Error::InvalidArgument(
                "basis needs at least one variable".into(),
            ));
        }
        let dim = dimension(n_vars, cap)?;
        let rows = n_vars + cap + 1;
        let cols = cap + 1;
        let mut table = vec![0u64; rows * cols];
        for n in 0..rows {
            table[n * cols] = 1;
            for k in 1..cols.min(n + 1) {
                let above = table[(n - 1) * cols + k];
                let diag = table[(n - 1) * cols + k - 1];
                table[n * cols + k] = above.saturating_add(diag);
            }
        }
        Ok(FockBasis {
            n_vars,
            cap,
            dim,
            table,
        })
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    /// Total occupation cap `m`.
    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn dim(&self) -> u64 {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.dim as usize
    }

    pub fn is_empty(&self) -> bool {
        self.dim == 0
    }

    #[inline]
    fn binom(&self, n: usize, k: usize) -> u64 {
        if k > n {
            0
        } else {
            self.table[n * (self.cap + 1) + k]
        }
    }

    /// Number of words whose leading symbol is at least `lead` when `rest`
    /// slots remain over an alphabet with `top` symbols above the current
    /// minimum: C(top + rest - lead, rest).
    #[inline]
    fn lead_bound(&self, top: usize, rest: usize, lead: usize) -> u64 {
        self.binom(top + rest - lead, rest)
    }

    pub fn unrank(&self, index: u64) -> Result<OccupationWord> {
        if index >= self.dim {
            return Err(Error::IndexOutOfRange {
                index,
                dim: self.dim,
            });
        }
        let mut symbols = Vec::with_capacity(self.cap);
        self.unrank_into(index, &mut symbols);
        Ok(OccupationWord { symbols })
    }

    pub(crate) fn unrank_into(&self, index: u64, symbols: &mut Vec<usize>) {
        symbols.clear();
        let mut idx = index;
        let mut lo = 0;
        for slot in 0..self.cap {
            let rest = self.cap - slot;
            let top = self.n_vars - lo;
            let lead = if self.n_vars <= LINEAR_SCAN_MAX_VARS {
                self.find_lead_linear(top, rest, idx)
            } else {
                self.find_lead_binary(top, rest, idx)
            };
            idx -= self.lead_bound(top, rest, lead + 1);
            lo += lead;
            symbols.push(lo);
        }
    }

    /// Largest `a` in `[0, top]` with `idx < C(top + rest - a, rest)`.
    fn find_lead_linear(&self, top: usize, rest: usize, idx: u64) -> usize {
        (0..=top)
            .rev()
            .find(|&a| idx < self.lead_bound(top, rest, a))
            .expect("index below total count")
    }

    fn find_lead_binary(&self, top: usize, rest: usize, idx: u64) -> usize {
        // Predicate idx < bound(a) holds on a prefix [0, a*].
        let (mut lo, mut hi) = (0usize, top);
        while lo < hi {
            let mid = lo + (hi - lo).div_ceil(2);
            if idx < self.lead_bound(top, rest, mid) {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        lo
    }

    pub fn rank(&self, word: &OccupationWord) -> Result<u64> {
        if word.len() != self.cap {
            return Err(Error::MalformedWord(format!(
                "word has length {}, basis cap is {}",
                word.len(),
                self.cap
            )));
        }
        if let Some(&s) = word.symbols.iter().find(|&&s| s > self.n_vars) {
            return Err(Error::MalformedWord(format!(
                "symbol {s} exceeds N = {}",
                self.n_vars
            )));
        }
        if word.symbols.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::MalformedWord("word is not non-decreasing".into()));
        }
        Ok(self.rank_symbols(&word.symbols))
    }

    /// Rank of a sorted, in-range symbol slice of length `cap`.
    pub(crate) fn rank_symbols(&self, symbols: &[usize]) -> u64 {
        let mut idx = 0;
        let mut lo = 0;
        for (slot, &s) in symbols.iter().enumerate() {
            let rest = self.cap - slot;
            let top = self.n_vars - lo;
            idx += self.lead_bound(top, rest, s - lo + 1);
            lo = s;
        }
        idx
    }

    pub fn rank_occupations(&self, occ: &[usize]) -> Result<u64> {
        if occ.len() != self.n_vars {
            return Err(Error::DimensionMismatch {
                expected: self.n_vars,
                got: occ.len(),
            });
        }
        let word = OccupationWord::from_occupations(occ, self.cap)?;
        Ok(self.rank_symbols(&word.symbols))
    }

    /// All words in index order.
    pub fn words(&self) -> impl Iterator<Item = OccupationWord> + '_ {
        (0..self.dim).map(move |i| {
            let mut symbols = Vec::with_capacity(self.cap);
            self.unrank_into(i, &mut symbols);
            OccupationWord { symbols }
        })
    }

    #[cfg(test)]
    pub(crate) fn unrank_with(&self, index: u64, binary: bool) -> Vec<usize> {
        let mut symbols = Vec::new();
        let mut idx = index;
        let mut lo = 0;
        for slot in 0..self.cap {
            let rest = self.cap - slot;
            let top = self.n_vars - lo;
            let lead = if binary {
                self.find_lead_binary(top, rest, idx)
            } else {
                self.find_lead_linear(top, rest, idx)
            };
            idx -= self.lead_bound(top, rest, lead + 1);
            lo += lead;
            symbols.push(lo);
        }
        symbols
    }
}

/// Word at `index` in the `(N, m)` basis.
pub fn unrank(n_vars: usize, cap: usize, index: u64) -> Result<OccupationWord> {
    FockBasis::new(n_vars, cap)?.unrank(index)
}

/// Index of `word` in the `(N, m)` basis.
pub fn rank(n_vars: usize, cap: usize, word: &OccupationWord) -> Result<u64> {
    FockBasis::new(n_vars, cap)?.rank(word)
}
