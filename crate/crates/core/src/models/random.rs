use std::collections::BTreeSet;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::ode::{OdeSystem, SystemDraft};

/// Shape of a random valid system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomSystemSpec {
    pub n_vars: usize,
    /// Interactions drawn before coverage is patched up.
    pub interactions: usize,
    /// Largest interaction size `d`; sizes are drawn from `2..=max_size`.
    pub max_size: usize,
    /// Couplings are drawn from `[-scale, scale]` and then centred.
    pub coupling_scale: f64,
}

/// Draws a valid system: random member sets without repeats, couplings
/// shifted to sum to zero, and extra pairs for any uncovered variable.
pub fn random_system(spec: &RandomSystemSpec, seed: u64) -> Result<OdeSystem> {
    let n = spec.n_vars;
    if n < 2 {
        return Err(Error::InvalidArgument(
            "random systems need at least 2 variables".into(),
        ));
    }
    if spec.max_size < 2 || spec.max_size > n {
        return Err(Error::InvalidArgument(format!(
            "max_size must lie in [2, {n}], got {}",
            spec.max_size
        )));
    }
    if !(spec.coupling_scale > 0.0 && spec.coupling_scale.is_finite()) {
        return Err(Error::InvalidArgument(
            "coupling_scale must be positive".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut draft = SystemDraft::new(n);
    let mut covered = vec![false; n];
    let mut add = |members: Vec<usize>, rng: &mut ChaCha8Rng, draft: &mut SystemDraft| -> bool {
        let mut sorted = members.clone();
        sorted.sort_unstable();
        if !seen.insert(sorted) {
            return false;
        }
        let mut alpha: Vec<f64> = members
            .iter()
            .map(|_| rng.random_range(-spec.coupling_scale..=spec.coupling_scale))
            .collect();
        let mean = alpha.iter().sum::<f64>() / alpha.len() as f64;
        alpha.iter_mut().for_each(|a| *a -= mean);
        // Put the rounding residue on the largest entry.
        let residue: f64 = alpha.iter().sum();
        let big = (0..alpha.len())
            .max_by(|&a, &b| alpha[a].abs().total_cmp(&alpha[b].abs()))
            .expect("non-empty");
        alpha[big] -= residue;
        let pairs: Vec<(usize, f64)> = members.iter().copied().zip(alpha).collect();
        draft.push(&pairs);
        true
    };

    let mut attempts = 0;
    let mut drawn = 0;
    while drawn < spec.interactions && attempts < 50 * spec.interactions.max(1) {
        attempts += 1;
        let size = rng.random_range(2..=spec.max_size);
        let members: Vec<usize> = sample(&mut rng, n, size).into_vec();
        if add(members.clone(), &mut rng, &mut draft) {
            drawn += 1;
            members.iter().for_each(|&i| covered[i] = true);
        }
    }
    for i in 0..n {
        if covered[i] {
            continue;
        }
        loop {
            let partner = rng.random_range(0..n - 1);
            let partner = if partner >= i { partner + 1 } else { partner };
            if add(vec![i, partner], &mut rng, &mut draft) {
                covered[i] = true;
                covered[partner] = true;
                break;
            }
        }
    }
    OdeSystem::from_draft(&draft)
}
