//! Synthesis look-up: subset enumeration over the minimal synthesis owners
//! with containment checks against the materialized syntheses.

use alloc::format;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::assemble::SynthesisSet;
use crate::math::binomial_u64;
use crate::owner::OwnerId;
use crate::utility::Utility;
use crate::{Error, Result};

/// Default cap on the number of minimal synthesis owners.
pub const DEFAULT_SL_MAX_OWNERS: usize = 30;

/// `utility/n · Σ_{S ⊆ U_t∖{u}} [u is pivotal for S] / C(n−1, |S|)` with
/// `n = |U_t|`. `u` is pivotal when some synthesis containing `u` is covered
/// by `S ∪ {u}` and no synthesis without `u` is covered by `S`.
pub fn psi_sl(u: OwnerId, s: &SynthesisSet, utility: &Utility, max_owners: usize) -> Result<Utility> {
    let owners = s.owners();
    if !owners.contains(u) {
        return Err(Error::precondition(format!("{u} is not a minimal synthesis owner")));
    }
    let n = owners.len();
    if n > max_owners.min(63) {
        return Err(Error::Cost { algorithm: "SL", detail: format!("{n} minimal synthesis owners, cap {max_owners}") });
    }
    let index: Vec<OwnerId> = owners.iter().collect();
    let mask = |set: &crate::owner::OwnerSet| -> u64 {
        set.iter().fold(0u64, |m, o| m | 1 << index.binary_search(&o).expect("owner indexed"))
    };
    let pos = index.binary_search(&u).expect("u indexed");
    let ubit = 1u64 << pos;
    let mut with_u = Vec::new();
    let mut without_u = Vec::new();
    for syn in s {
        let m = mask(syn);
        if m & ubit != 0 {
            with_u.push(m & !ubit);
        } else {
            without_u.push(m);
        }
    }

    let low = ubit - 1;
    let mut pivotal_by_size = alloc::vec![0u64; n];
    for rest in 0u64..(1u64 << (n - 1)) {
        // spread `rest` over every position except `pos`
        let subset = (rest & low) | ((rest & !low) << 1);
        let covered = |m: &u64| m & !subset == 0;
        if with_u.iter().any(covered) && !without_u.iter().any(covered) {
            pivotal_by_size[rest.count_ones() as usize] += 1;
        }
    }

    let mut sum = BigRational::zero();
    for (k, &count) in pivotal_by_size.iter().enumerate() {
        if count > 0 {
            let c = binomial_u64((n - 1) as u64, k as u64).expect("n <= 63");
            sum += BigRational::new(BigInt::from(count), BigInt::from(c));
        }
    }
    Ok(Utility::from_rational_unchecked(utility.as_rational() * sum / BigInt::from(n)))
}
