use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// Absolute tolerance on the per-interaction coupling sum.
pub const ZERO_SUM_TOL: f64 = 1e-12;

/// Interaction sizes above this trigger a validation warning (the truncated
/// basis grows quickly with d).
pub const LARGE_DEGREE_WARNING: usize = 6;

/// An interaction as read from input, before any checks. Indices are 0-based.
/// Members absent from `alpha` carry a zero coupling.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct InteractionDraft {
    pub members: Vec<usize>,
    pub alpha: BTreeMap<usize, f64>,
}

impl InteractionDraft {
    pub fn new(pairs: &[(usize, f64)]) -> Self {
        InteractionDraft {
            members: pairs.iter().map(|&(i, _)| i).collect(),
            alpha: pairs.iter().copied().collect(),
        }
    }
}

/// Unvalidated system: the input of [`validate_system`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SystemDraft {
    pub n_vars: usize,
    pub interactions: Vec<InteractionDraft>,
}

impl SystemDraft {
    pub fn new(n_vars: usize) -> Self {
        SystemDraft {
            n_vars,
            interactions: Vec::new(),
        }
    }

    pub fn push(&mut self, pairs: &[(usize, f64)]) -> &mut Self {
        self.interactions.push(InteractionDraft::new(pairs));
        self
    }
}

/// One index set `p` with its couplings. Members are strictly ascending and
/// `couplings[k]` is the coupling into `members[k]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Interaction {
    members: Vec<usize>,
    couplings: Vec<f64>,
}

impl Interaction {
    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn couplings(&self) -> &[f64] {
        &self.couplings
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn coupling_of(&self, var: usize) -> Option<f64> {
        self.members
            .binary_search(&var)
            .ok()
            .map(|k| self.couplings[k])
    }

    pub fn coupling_sum(&self) -> f64 {
        self.couplings.iter().sum()
    }

    pub fn max_abs_coupling(&self) -> f64 {
        self.couplings.iter().fold(0.0, |a, c| a.max(c.abs()))
    }

    /// Product of the members other than slot `k`.
    fn product_except(&self, k: usize, x: &[f64]) -> f64 {
        self.members
            .iter()
            .enumerate()
            .filter(|&(slot, _)| slot != k)
            .map(|(_, &j)| x[j])
            .product()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SystemConstants {
    /// Largest interaction size.
    pub d: usize,
    /// Largest number of interactions sharing one variable.
    pub c: usize,
    /// Largest absolute coupling.
    pub eta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub rule: &'static str,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
    pub warnings: Vec<String>,
    pub constants: Option<SystemConstants>,
}

impl ValidationReport {
    pub fn has_rule(&self, rule: &str) -> bool {
        self.violations.iter().any(|v| v.rule == rule)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ok {
            return write!(f, "ok");
        }
        let details: Vec<&str> = self.violations.iter().map(|v| v.detail.as_str()).collect();
        write!(f, "{}", details.join("; "))
    }
}

/// Checks a candidate system against the three structural conditions
/// (interaction size, variable coverage, zero-sum couplings) plus
/// well-formedness. Never fails; every problem becomes a report entry.
pub fn validate_system(draft: &SystemDraft) -> ValidationReport {
    let (report, _) = check(draft);
    report
}

fn check(draft: &SystemDraft) -> (ValidationReport, Vec<Interaction>) {
    let mut violations = Vec::new();
    let mut warnings = Vec::new();
    let mut push = |rule: &'static str, detail: String| violations.push(Violation { rule, detail });

    if draft.n_vars == 0 {
        push("precondition", "system has no variables".into());
    }
    if draft.interactions.is_empty() {
        push("precondition", "system has no interactions".into());
    }

    let n = draft.n_vars;
    let mut interactions = Vec::with_capacity(draft.interactions.len());
    let mut membership = vec![0usize; n];
    let mut seen_sets: HashSet<Vec<usize>> = HashSet::new();

    for (idx, raw) in draft.interactions.iter().enumerate() {
        let label = idx + 1;
        let mut members = raw.members.clone();
        members.sort_unstable();
        let distinct: BTreeSet<usize> = members.iter().copied().collect();
        if distinct.len() != members.len() {
            push(
                "duplicate-member",
                format!("interaction {label}: repeated variable (pre-reduce with dummy variables)"),
            );
            members.dedup();
        }
        if let Some(&bad) = members.iter().find(|&&i| i >= n) {
            push(
                "index-range",
                format!("interaction {label}: variable {} outside [1, {n}]", bad + 1),
            );
        }
        if members.len() < 2 {
            push(
                "condition-1",
                format!(
                    "condition 1: interaction {label} has {} member(s), need at least 2",
                    members.len()
                ),
            );
        }
        for &key in raw.alpha.keys() {
            if !distinct.contains(&key) {
                push(
                    "coupling-key",
                    format!(
                        "interaction {label}: coupling given for non-member variable {}",
                        key + 1
                    ),
                );
            }
        }
        let couplings: Vec<f64> = members
            .iter()
            .map(|i| raw.alpha.get(i).copied().unwrap_or(0.0))
            .collect();
        if couplings.iter().any(|c| !c.is_finite()) {
            push(
                "non-finite",
                format!("interaction {label}: non-finite coupling"),
            );
        } else {
            let sum: f64 = couplings.iter().sum();
            if sum.abs() > ZERO_SUM_TOL {
                push(
                    "condition-3",
                    format!("condition 3: interaction {label} has Σα = {sum} ≠ 0"),
                );
            }
            if couplings.iter().all(|&c| c == 0.0) {
                push(
                    "empty-interaction",
                    format!("interaction {label}: all couplings are zero"),
                );
            }
        }
        if !seen_sets.insert(members.clone()) {
            push(
                "duplicate-set",
                format!(
                    "interaction {label}: same variable set as an earlier interaction (merge them)"
                ),
            );
        }
        for &i in members.iter().filter(|&&i| i < n) {
            membership[i] += 1;
        }
        interactions.push(Interaction { members, couplings });
    }

    for (i, &count) in membership.iter().enumerate() {
        if count == 0 {
            push(
                "condition-2",
                format!("condition 2: variable {} in no interaction", i + 1),
            );
        }
    }

    let d = interactions.iter().map(Interaction::len).max().unwrap_or(0);
    if d > LARGE_DEGREE_WARNING {
        warnings.push(format!(
            "interaction size d = {d} exceeds {LARGE_DEGREE_WARNING}; truncated basis grows as C(N+m, m) with m ~ d"
        ));
    }

    let ok = violations.is_empty();
    let constants = ok.then(|| constants_of(&interactions, n));
    (
        ValidationReport {
            ok,
            violations,
            warnings,
            constants,
        },
        interactions,
    )
}

fn constants_of(interactions: &[Interaction], n_vars: usize) -> SystemConstants {
    let mut membership = vec![0usize; n_vars];
    for p in interactions {
        for &i in &p.members {
            membership[i] += 1;
        }
    }
    SystemConstants {
        d: interactions.iter().map(Interaction::len).max().unwrap_or(0),
        c: membership.into_iter().max().unwrap_or(0),
        eta: interactions
            .iter()
            .map(Interaction::max_abs_coupling)
            .fold(0.0, f64::max),
    }
}

/// A validated polynomial ODE system
/// `dx_i/dt = Σ_{p ∋ i} α_{p→i} Π_{j ∈ p, j ≠ i} x_j`.
///
/// Construction goes through [`OdeSystem::from_draft`], which rejects any
/// candidate with a non-empty [`ValidationReport`]. The only exception is
/// [`OdeSystem::partial`], used for linear/nonlinear splits whose parts may
/// leave variables uncovered.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OdeSystem {
    n_vars: usize,
    interactions: Vec<Interaction>,
    constants: SystemConstants,
}

impl OdeSystem {
    pub fn from_draft(draft: &SystemDraft) -> Result<Self> {
        let (report, interactions) = check(draft);
        match report.constants {
            Some(constants) if report.ok => Ok(OdeSystem {
                n_vars: draft.n_vars,
                interactions,
                constants,
            }),
            _ => Err(Error::InvalidSystem(report)),
        }
    }

    /// Builds a sub-system from interactions of an already valid system.
    /// Coverage of every variable is not required.
    pub(crate) fn partial(n_vars: usize, interactions: Vec<Interaction>) -> Self {
        let constants = constants_of(&interactions, n_vars);
        OdeSystem {
            n_vars,
            interactions,
            constants,
        }
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn interactions(&self) -> &[Interaction] {
        &self.interactions
    }

    pub fn constants(&self) -> SystemConstants {
        self.constants
    }

    pub fn d(&self) -> usize {
        self.constants.d
    }

    pub fn c(&self) -> usize {
        self.constants.c
    }

    pub fn eta(&self) -> f64 {
        self.constants.eta
    }

    pub fn to_draft(&self) -> SystemDraft {
        SystemDraft {
            n_vars: self.n_vars,
            interactions: self
                .interactions
                .iter()
                .map(|p| InteractionDraft {
                    members: p.members.clone(),
                    alpha: p
                        .members
                        .iter()
                        .copied()
                        .zip(p.couplings.iter().copied())
                        .collect(),
                })
                .collect(),
        }
    }

    fn check_len(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.n_vars {
            return Err(Error::DimensionMismatch {
                expected: self.n_vars,
                got: x.len(),
            });
        }
        Ok(())
    }

    /// Evaluates the right-hand side F(x).
    pub fn rhs(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_len(x)?;
        let mut out = vec![0.0; self.n_vars];
        self.rhs_into(x, &mut out);
        Ok(out)
    }

    /// Unchecked variant of [`OdeSystem::rhs`] writing into `out`.
    pub fn rhs_into(&self, x: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        for p in &self.interactions {
            for (k, (&i, &a)) in p.members.iter().zip(&p.couplings).enumerate() {
                if a != 0.0 {
                    out[i] += a * p.product_except(k, x);
                }
            }
        }
    }

    /// Σ_i x_i F_i(x). With the Gaussian weight e^{-|x|²} the weight's time
    /// derivative is -2 w(x) times this value, so valid systems return 0.
    pub fn weight_drift(&self, x: &[f64]) -> Result<f64> {
        let f = self.rhs(x)?;
        Ok(x.iter().zip(&f).map(|(a, b)| a * b).sum())
    }

    /// Σ_i |x_i F_i(x)| computed term by term; the natural scale for judging
    /// [`OdeSystem::weight_drift`] against zero.
    pub fn weight_drift_scale(&self, x: &[f64]) -> Result<f64> {
        self.check_len(x)?;
        let mut total = 0.0;
        for p in &self.interactions {
            let full: f64 = p.members.iter().map(|&j| x[j]).product();
            total += p.couplings.iter().map(|a| (a * full).abs()).sum::<f64>();
        }
        Ok(total)
    }

    /// True when no term of F_i contains x_i, i.e. ∂F_i/∂x_i ≡ 0.
    /// Holds structurally for every interaction with distinct members.
    pub fn is_divergence_free(&self) -> bool {
        self.interactions.iter().all(|p| {
            p.members.iter().enumerate().all(|(k, i)| {
                p.members
                    .iter()
                    .enumerate()
                    .filter(|&(slot, _)| slot != k)
                    .all(|(_, j)| j != i)
            })
        })
    }

    /// Substitutes x → Δ·x: couplings become α / Δ^{|p|-2} and the initial
    /// point is multiplied by Δ.
    pub fn rescale(&self, x0: &[f64], delta: f64) -> Result<(OdeSystem, Vec<f64>)> {
        self.check_len(x0)?;
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "rescale factor must be positive and finite, got {delta}"
            )));
        }
        let interactions: Vec<Interaction> = self
            .interactions
            .iter()
            .map(|p| {
                let scale = delta.powi(p.len() as i32 - 2);
                Interaction {
                    members: p.members.clone(),
                    couplings: p.couplings.iter().map(|a| a / scale).collect(),
                }
            })
            .collect();
        let scaled = OdeSystem::partial(self.n_vars, interactions);
        Ok((scaled, x0.iter().map(|v| v * delta).collect()))
    }

    /// Largest |coupling| over interactions with more than two members.
    pub fn nonlinear_eta(&self) -> f64 {
        self.interactions
            .iter()
            .filter(|p| p.len() > 2)
            .map(Interaction::max_abs_coupling)
            .fold(0.0, f64::max)
    }
}
