//! Synthesis combination: inclusion–exclusion over combinations of minimal
//! syntheses.
//!
//! For owner `u` with minimal syntheses `W_u` (containing `u`) and `W_ū`
//! (not containing `u`), the probability that `u` completes the tuple in a
//! random arrival order is
//!
//! ```text
//! ν(W_u) − τ(W_u, W_ū)
//! ν = Σ_{∅≠X⊆W_u}       (−1)^{|X|+1} / |⋃X|
//! τ = Σ_{∅≠X⊆W_u×W_ū}   (−1)^{|X|+1} / |⋃_{(a,b)∈X} a∪b|
//! ```
//!
//! since `1/|U|` is the probability that all of `U∖{u}` precedes `u`. Both
//! sums are enumerated in Gray-code order with per-owner occupancy counters,
//! so each step costs one synthesis worth of counter updates. Terms are
//! grouped by union size and summed as signed integers; the only rational
//! arithmetic is one fraction per distinct size.

use alloc::format;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::SynthesisSplit;
use crate::owner::{OwnerId, OwnerSet};
use crate::utility::Utility;
use crate::{Error, Result};

/// Default cap on inclusion–exclusion terms (2^24).
pub const DEFAULT_SC_MAX_TERMS: u64 = 1 << 24;

pub fn psi_sc(u: OwnerId, split: &SynthesisSplit, utility: &Utility, max_terms: u64) -> Result<Utility> {
    if split.owner() != u {
        return Err(Error::precondition(format!("split was built for {}, not {u}", split.owner())));
    }
    let (mu, mnu) = (split.m_u(), split.m_not_u());
    if mu == 0 {
        return Ok(Utility::zero());
    }
    let pairs = mu * mnu;
    let terms = if mu >= 64 || pairs >= 64 {
        None
    } else {
        let nu_terms = (1u64 << mu) - 1;
        let tau_terms = if mnu == 0 { 0 } else { (1u64 << pairs) - 1 };
        Some(nu_terms + tau_terms)
    };
    match terms {
        Some(t) if t <= max_terms => {}
        _ => {
            return Err(Error::Cost {
                algorithm: "SC",
                detail: format!("m_u={mu}, m_ū={mnu} needs more than {max_terms} terms"),
            })
        }
    }

    // compact owner indices over every owner that appears
    let mut present = split.with_owner()[0].clone();
    for s in split.with_owner().iter().chain(split.without_owner()) {
        present.union_with(s);
    }
    let index: Vec<OwnerId> = present.iter().collect();
    let local = |s: &OwnerSet| -> Vec<u32> {
        s.iter().map(|o| index.binary_search(&o).expect("owner indexed") as u32).collect()
    };

    let nu_items: Vec<Vec<u32>> = split.with_owner().iter().map(local).collect();
    let mut by_size = signed_union_sizes(&nu_items, index.len());

    if mnu > 0 {
        let mut tau_items = Vec::with_capacity(pairs);
        for a in split.with_owner() {
            for b in split.without_owner() {
                let mut ab = a.clone();
                ab.union_with(b);
                tau_items.push(local(&ab));
            }
        }
        for (slot, t) in by_size.iter_mut().zip(signed_union_sizes(&tau_items, index.len())) {
            *slot -= t;
        }
    }

    let mut fraction = BigRational::zero();
    for (size, &count) in by_size.iter().enumerate() {
        if count != 0 {
            fraction += BigRational::new(BigInt::from(count), BigInt::from(size));
        }
    }
    Utility::from_rational(utility.as_rational() * fraction)
        .map_err(|_| Error::precondition("SC produced a negative value; syntheses are not an antichain"))
}

/// `out[c] = Σ (−1)^{|X|+1}` over non-empty `X ⊆ items` whose union has
/// `c` owners.
fn signed_union_sizes(items: &[Vec<u32>], owners: usize) -> Vec<i64> {
    let mut occupancy = alloc::vec![0u32; owners];
    let mut size = 0usize;
    let mut out = alloc::vec![0i64; owners + 1];
    let m = items.len();
    for step in 1u64..(1u64 << m) {
        let flip = step.trailing_zeros() as usize;
        let gray = step ^ (step >> 1);
        if gray & (1 << flip) != 0 {
            for &o in &items[flip] {
                let c = &mut occupancy[o as usize];
                *c += 1;
                if *c == 1 {
                    size += 1;
                }
            }
        } else {
            for &o in &items[flip] {
                let c = &mut occupancy[o as usize];
                *c -= 1;
                if *c == 0 {
                    size -= 1;
                }
            }
        }
        out[size] += if gray.count_ones() % 2 == 1 { 1 } else { -1 };
    }
    out
}
