use alloc::format;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use super::{classify_tuple, TupleCase};
use crate::allocation::TupleShares;
use crate::assemble::SynthesisSet;
use crate::math::binomial;
use crate::utility::Utility;
use crate::{Error, Result};

/// Every minimal synthesis is a single owner: each of the `m` owners gets
/// `utility / m`.
pub fn psi_single_owner_only(s: &SynthesisSet, utility: &Utility) -> Result<TupleShares> {
    let TupleCase::SingleOwnerOnly { m } = classify_tuple(s) else {
        return Err(Error::precondition(format!("not a single-owner-only synthesis set: {s:?}")));
    };
    let share = utility.div_int(m as u64);
    Ok(s.iter().flat_map(|u| u.iter()).map(|o| (o, share.clone())).collect())
}

/// One multi-owner synthesis of size `m` and `k` singletons.
///
/// A member of the multi-owner synthesis is pivotal only when it arrives
/// last among the `m` and before every singleton owner, so it receives
/// `utility / ((m+k)·C(m+k−1, m−1))`; the singleton owners split the rest.
pub fn psi_unique_multi(s: &SynthesisSet, utility: &Utility) -> Result<TupleShares> {
    let TupleCase::UniqueMultiOwner { m, k } = classify_tuple(s) else {
        return Err(Error::precondition(format!("not a unique multi-owner synthesis set: {s:?}")));
    };
    let n = (m + k) as u64;
    let denom = binomial(n - 1, m as u64 - 1) * n;
    let multi_share = utility.div_big(&denom);
    let mut out = TupleShares::new();
    for u in s {
        if u.len() > 1 {
            for o in u {
                out.insert(o, multi_share.clone());
            }
        }
    }
    if k > 0 {
        // (utility / k) · (1 − m / denom)
        let denom = BigInt::from(denom);
        let rest = BigRational::one() - BigRational::new(BigInt::from(m), denom);
        let single = Utility::from_rational_unchecked(utility.as_rational() * rest / BigInt::from(k));
        for u in s {
            if u.len() == 1 {
                out.extend(u.iter().map(|o| (o, single.clone())));
            }
        }
    }
    Ok(out)
}
