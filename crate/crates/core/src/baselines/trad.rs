use alloc::format;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::UtilityEvaluator;
use crate::allocation::Allocation;
use crate::cancel::{Cancel, Never};
use crate::math::binomial;
use crate::owner::{OwnerId, OwnerSet};
use crate::utility::Utility;
use crate::{Error, Result};

/// Hard cap on players for the exact subset formula.
pub const TRAD_MAX_OWNERS: usize = 20;

/// Exact Shapley values over `owners` by enumerating every coalition:
/// `ψ(u) = 1/n Σ_{S ⊆ owners∖{u}} (v(S∪{u}) − v(S)) / C(n−1, |S|)`.
///
/// Owners outside `owners` take no part in the game and get zero.
pub fn trad_shapley(ev: &mut UtilityEvaluator<'_>, owners: &OwnerSet) -> Result<Allocation> {
    trad_shapley_with(ev, owners, &Never)
}

pub fn trad_shapley_with(ev: &mut UtilityEvaluator<'_>, owners: &OwnerSet, cancel: &dyn Cancel) -> Result<Allocation> {
    let players: Vec<OwnerId> = owners.iter().collect();
    let n = players.len();
    if n > TRAD_MAX_OWNERS {
        return Err(Error::Cost {
            algorithm: "Trad",
            detail: format!("{n} owners exceeds the cap of {TRAD_MAX_OWNERS}"),
        });
    }
    if owners.universe() != ev.owners() {
        return Err(Error::UniverseMismatch { left: owners.universe(), right: ev.owners() });
    }
    if n == 0 {
        return Ok(Allocation::zeros(ev.owners()));
    }

    // value of every coalition, indexed by bitmask over `players`
    let mut values = Vec::with_capacity(1 << n);
    for mask in 0u32..(1u32 << n) {
        if cancel.cancelled() {
            return Err(Error::Cancelled);
        }
        let mut s = OwnerSet::new(ev.owners());
        for (i, &p) in players.iter().enumerate() {
            if mask & (1 << i) != 0 {
                s.insert(p)?;
            }
        }
        values.push(ev.evaluate(&s)?.into_rational());
    }

    let weights: Vec<BigInt> = (0..n as u64).map(|k| BigInt::from(binomial(n as u64 - 1, k))).collect();
    let mut per_owner = Vec::with_capacity(ev.owners());
    per_owner.resize(ev.owners(), Utility::zero());
    for (i, &p) in players.iter().enumerate() {
        let bit = 1u32 << i;
        let mut by_size: Vec<BigRational> = alloc::vec![BigRational::zero(); n];
        for mask in 0u32..(1u32 << n) {
            if mask & bit == 0 {
                by_size[mask.count_ones() as usize] += &values[(mask | bit) as usize] - &values[mask as usize];
            }
        }
        let sum: BigRational = by_size
            .into_iter()
            .zip(&weights)
            .map(|(diff, w)| diff / BigRational::from_integer(w.clone()))
            .fold(BigRational::zero(), |a, b| a + b);
        per_owner[p.index()] = Utility::from_rational(sum / BigInt::from(n))
            .map_err(|_| Error::precondition("utility is not monotone in the coalition"))?;
    }
    Ok(Allocation::from_values(per_owner))
}
