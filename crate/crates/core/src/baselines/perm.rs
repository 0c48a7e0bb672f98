use alloc::format;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::UtilityEvaluator;
use crate::allocation::Allocation;
use crate::cancel::{Cancel, Never};
use crate::owner::{OwnerId, OwnerSet};
use crate::utility::Utility;
use crate::{Error, Result};

/// Name of the generator behind [`perm_shapley`], for run metadata.
pub const PERM_RNG: &str = "chacha8";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PermConfig {
    pub samples: u64,
    pub seed: u64,
}

/// Monte-Carlo Shapley estimate from `samples` uniformly random owner
/// orders. Sample `i` shuffles with ChaCha8 seeded by `seed` on stream `i`,
/// so samples can be split across workers without changing the result.
pub fn perm_shapley(ev: &mut UtilityEvaluator<'_>, owners: &OwnerSet, samples: u64, seed: u64) -> Result<Allocation> {
    perm_shapley_with(ev, owners, PermConfig { samples, seed }, &Never)
}

pub fn perm_shapley_with(
    ev: &mut UtilityEvaluator<'_>,
    owners: &OwnerSet,
    cfg: PermConfig,
    cancel: &dyn Cancel,
) -> Result<Allocation> {
    if cfg.samples == 0 {
        return Err(Error::Config("permutation sampling needs at least one sample".into()));
    }
    let players: Vec<OwnerId> = owners.iter().collect();
    let mut sums = alloc::vec![Utility::zero(); ev.owners()];
    let mut order = players.clone();
    for i in 0..cfg.samples {
        if cancel.cancelled() {
            return Err(Error::Cancelled);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(i);
        order.copy_from_slice(&players);
        order.shuffle(&mut rng);
        accumulate_marginals(ev, &order, &mut sums)?;
    }
    Ok(Allocation::from_values(sums.iter().map(|s| s.div_int(cfg.samples)).collect()))
}

/// The permutation estimator evaluated over all `n!` orders instead of a
/// sample; equals the exact Shapley value.
pub fn perm_shapley_enumerated(ev: &mut UtilityEvaluator<'_>, owners: &OwnerSet) -> Result<Allocation> {
    let mut order: Vec<OwnerId> = owners.iter().collect();
    if order.len() > 10 {
        return Err(Error::Cost { algorithm: "Perm", detail: format!("{}! orders", order.len()) });
    }
    let mut sums = alloc::vec![Utility::zero(); ev.owners()];
    let mut count = 0u64;
    // lexicographic successor, starting from the sorted order
    loop {
        accumulate_marginals(ev, &order, &mut sums)?;
        count += 1;
        let Some(i) = (1..order.len()).rev().find(|&i| order[i - 1] < order[i]) else { break };
        let j = (i..order.len()).rev().find(|&j| order[j] > order[i - 1]).expect("successor exists");
        order.swap(i - 1, j);
        order[i..].reverse();
    }
    Ok(Allocation::from_values(sums.iter().map(|s| s.div_int(count)).collect()))
}

fn accumulate_marginals(ev: &mut UtilityEvaluator<'_>, order: &[OwnerId], sums: &mut [Utility]) -> Result<()> {
    let mut prefix = OwnerSet::new(ev.owners());
    let mut prev = Utility::zero();
    for &p in order {
        prefix.insert(p)?;
        let v = ev.evaluate(&prefix)?;
        let marginal = v.checked_sub(&prev).ok_or_else(|| Error::precondition("utility is not monotone"))?;
        sums[p.index()] += marginal;
        prev = v;
    }
    Ok(())
}
