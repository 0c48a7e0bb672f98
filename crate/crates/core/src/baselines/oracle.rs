use alloc::format;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::allocation::TupleShares;
use crate::assemble::SynthesisSet;
use crate::math::factorial;
use crate::owner::{OwnerId, OwnerSet};
use crate::utility::Utility;
use crate::{Error, Result};

pub const ORACLE_MAX_OWNERS: usize = 20;

/// Per-tuple Shapley values by direct enumeration of every coalition of the
/// minimal synthesis owners, with `v(S) = utility` iff `S` contains a
/// synthesis, weighted by `|S|!(n−|S|−1)!/n!`.
pub fn brute_force_tuple_oracle(s: &SynthesisSet, utility: &Utility) -> Result<TupleShares> {
    let owners: Vec<OwnerId> = s.owners().iter().collect();
    let n = owners.len();
    if n > ORACLE_MAX_OWNERS {
        return Err(Error::Cost { algorithm: "oracle", detail: format!("{n} owners") });
    }
    let universe = s.universe();
    let coalition = |mask: u32| -> OwnerSet {
        let mut c = OwnerSet::new(universe);
        for (i, &o) in owners.iter().enumerate() {
            if mask & (1 << i) != 0 {
                c.insert(o).expect("owner in universe");
            }
        }
        c
    };
    let wins: Vec<bool> = (0u32..1 << n)
        .map(|mask| {
            let c = coalition(mask);
            s.iter().any(|syn| syn.is_subset(&c).expect("same universe"))
        })
        .collect();

    let n_fact = BigInt::from(factorial(n as u64));
    let mut out = TupleShares::new();
    for (i, &o) in owners.iter().enumerate() {
        let bit = 1u32 << i;
        let mut acc = BigRational::zero();
        for mask in 0u32..1 << n {
            if mask & bit != 0 || !wins[(mask | bit) as usize] || wins[mask as usize] {
                continue;
            }
            let k = mask.count_ones() as u64;
            let weight = BigInt::from(factorial(k) * factorial(n as u64 - k - 1));
            acc += BigRational::new(weight, n_fact.clone());
        }
        out.insert(o, Utility::from_rational(utility.as_rational() * acc)?);
    }
    Ok(out)
}
