use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::owner::OwnerId;
use crate::utility::Utility;
use crate::{Error, Result};

/// Shapley values of one tuple; owners not listed receive zero.
pub type TupleShares = BTreeMap<OwnerId, Utility>;

/// Per-owner Shapley values over a dense owner universe, with an optional
/// per-tuple breakdown.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Allocation {
    per_owner: Vec<Utility>,
    per_tuple: Option<Vec<TupleShares>>,
}

impl Allocation {
    pub fn zeros(owners: usize) -> Self {
        Allocation { per_owner: alloc::vec![Utility::zero(); owners], per_tuple: None }
    }

    pub fn from_values(per_owner: Vec<Utility>) -> Self {
        Allocation { per_owner, per_tuple: None }
    }

    pub fn owners(&self) -> usize {
        self.per_owner.len()
    }

    pub fn get(&self, owner: OwnerId) -> &Utility {
        &self.per_owner[owner.index()]
    }

    pub fn values(&self) -> &[Utility] {
        &self.per_owner
    }

    pub fn iter(&self) -> impl Iterator<Item = (OwnerId, &Utility)> {
        self.per_owner.iter().enumerate().map(|(i, v)| (OwnerId(i as u32), v))
    }

    pub fn total(&self) -> Utility {
        self.per_owner.iter().sum()
    }

    pub fn per_tuple(&self) -> Option<&[TupleShares]> {
        self.per_tuple.as_deref()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.per_owner.iter().map(Utility::to_f64).collect()
    }

    /// Adds one tuple's shares into the per-owner totals.
    pub fn add_shares(&mut self, shares: &TupleShares) -> Result<()> {
        for (o, v) in shares {
            let universe = self.per_owner.len();
            let slot = self
                .per_owner
                .get_mut(o.index())
                .ok_or(Error::OwnerOutOfRange { owner: o.index(), universe })?;
            *slot += v;
        }
        Ok(())
    }

    pub(crate) fn record_tuple(&mut self, shares: TupleShares) {
        self.per_tuple.get_or_insert_with(Vec::new).push(shares);
    }

    /// Owner-wise sum; both allocations must share a universe.
    pub fn merge(&mut self, other: &Allocation) -> Result<()> {
        if other.owners() != self.owners() {
            return Err(Error::UniverseMismatch { left: self.owners(), right: other.owners() });
        }
        for (a, b) in self.per_owner.iter_mut().zip(&other.per_owner) {
            *a += b;
        }
        Ok(())
    }
}
