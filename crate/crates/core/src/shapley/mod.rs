//! Per-tuple exact Shapley values under independent utility, and the
//! dispatching driver that sums them into an allocation.

mod closed_form;
mod sc;
mod sl;

use alloc::format;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

pub use closed_form::{psi_single_owner_only, psi_unique_multi};
pub use sc::{psi_sc, DEFAULT_SC_MAX_TERMS};
pub use sl::{psi_sl, DEFAULT_SL_MAX_OWNERS};

use crate::allocation::{Allocation, TupleShares};
use crate::assemble::{CoalitionSet, SynthesisSet};
use crate::cancel::{Cancel, Never};
use crate::owner::{OwnerId, OwnerSet};
use crate::utility::Utility;
use crate::{Error, Result};

/// Shape of a tuple's minimal syntheses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TupleCase {
    /// Every minimal synthesis is a single owner; `m` of them.
    SingleOwnerOnly { m: usize },
    /// Exactly one multi-owner synthesis of size `m` plus `k` singletons.
    UniqueMultiOwner { m: usize, k: usize },
    General,
}

pub fn classify_tuple(s: &SynthesisSet) -> TupleCase {
    let mut singles = 0;
    let mut multi = None;
    let mut multis = 0;
    for u in s {
        if u.len() == 1 {
            singles += 1;
        } else {
            multis += 1;
            multi = Some(u.len());
        }
    }
    match (multis, multi) {
        (0, _) => TupleCase::SingleOwnerOnly { m: singles },
        (1, Some(m)) => TupleCase::UniqueMultiOwner { m, k: singles },
        _ => TupleCase::General,
    }
}

/// The minimal syntheses of a tuple split by whether they contain one owner.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynthesisSplit {
    owner: OwnerId,
    with_owner: Vec<OwnerSet>,
    without_owner: Vec<OwnerSet>,
}

impl SynthesisSplit {
    pub fn new(s: &SynthesisSet, owner: OwnerId) -> Self {
        let (with_owner, without_owner) = s.iter().cloned().partition(|u| u.contains(owner));
        SynthesisSplit { owner, with_owner, without_owner }
    }

    /// Builds a split from explicit parts, checking membership.
    pub fn from_parts(owner: OwnerId, with_owner: Vec<OwnerSet>, without_owner: Vec<OwnerSet>) -> Result<Self> {
        if with_owner.iter().any(|u| !u.contains(owner)) {
            return Err(Error::precondition(format!("a synthesis in W_u lacks {owner}")));
        }
        if without_owner.iter().any(|u| u.contains(owner)) {
            return Err(Error::precondition(format!("a synthesis in W_not_u contains {owner}")));
        }
        Ok(SynthesisSplit { owner, with_owner, without_owner })
    }

    pub fn owner(&self) -> OwnerId {
        self.owner
    }

    pub fn with_owner(&self) -> &[OwnerSet] {
        &self.with_owner
    }

    pub fn without_owner(&self) -> &[OwnerSet] {
        &self.without_owner
    }

    pub fn m_u(&self) -> usize {
        self.with_owner.len()
    }

    pub fn m_not_u(&self) -> usize {
        self.without_owner.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IusvConfig {
    /// Routing threshold between SC and SL for general-case tuples.
    pub gamma: f64,
    /// Maximum inclusion–exclusion terms SC may enumerate.
    pub sc_max_terms: u64,
    /// Maximum minimal-synthesis owners SL may enumerate over.
    pub sl_max_owners: usize,
    /// Keep per-tuple shares in the resulting allocation.
    pub per_tuple: bool,
}

impl Default for IusvConfig {
    fn default() -> Self {
        IusvConfig {
            gamma: 1.0,
            sc_max_terms: DEFAULT_SC_MAX_TERMS,
            sl_max_owners: DEFAULT_SL_MAX_OWNERS,
            per_tuple: false,
        }
    }
}

impl IusvConfig {
    pub fn with_gamma(gamma: f64) -> Self {
        IusvConfig { gamma, ..Self::default() }
    }

    fn validate(&self) -> Result<()> {
        if !(self.gamma.is_finite() && self.gamma > 0.0) {
            return Err(Error::Config(format!("gamma must be a positive real, got {}", self.gamma)));
        }
        if self.sl_max_owners > 63 {
            return Err(Error::Config(format!("sl_max_owners above 63 ({})", self.sl_max_owners)));
        }
        Ok(())
    }
}

/// Which general-case algorithm computed an owner's share.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    Sc,
    Sl,
}

/// Case and routing counts over the tuples of a run.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseStats {
    pub tuples: u64,
    pub single_owner_only: u64,
    pub unique_multi: u64,
    pub general: u64,
    pub sc_calls: u64,
    pub sl_calls: u64,
}

impl CaseStats {
    pub fn merge(&mut self, o: &CaseStats) {
        self.tuples += o.tuples;
        self.single_owner_only += o.single_owner_only;
        self.unique_multi += o.unique_multi;
        self.general += o.general;
        self.sc_calls += o.sc_calls;
        self.sl_calls += o.sl_calls;
    }
}

/// Shapley values of one tuple, dispatched on its synthesis structure.
pub fn iusv_tuple(s: &SynthesisSet, utility: &Utility, cfg: &IusvConfig) -> Result<TupleShares> {
    cfg.validate()?;
    tuple_shares(s, utility, cfg, &mut CaseStats::default())
}

/// Like [`iusv_tuple`], also reporting the case and the route taken per owner.
pub fn iusv_tuple_traced(
    s: &SynthesisSet,
    utility: &Utility,
    cfg: &IusvConfig,
) -> Result<(TupleShares, CaseStats)> {
    cfg.validate()?;
    let mut stats = CaseStats::default();
    let shares = tuple_shares(s, utility, cfg, &mut stats)?;
    Ok((shares, stats))
}

/// The SC/SL routing rule for owner `u` of a general-case tuple.
pub fn preferred_route(owners_in_tuple: usize, split: &SynthesisSplit, gamma: f64) -> Route {
    let (mu, mnu) = (split.m_u() as f64, split.m_not_u() as f64);
    if owners_in_tuple as f64 > gamma * mu.max(mu * mnu) {
        Route::Sc
    } else {
        Route::Sl
    }
}

fn tuple_shares(s: &SynthesisSet, utility: &Utility, cfg: &IusvConfig, stats: &mut CaseStats) -> Result<TupleShares> {
    stats.tuples += 1;
    match classify_tuple(s) {
        TupleCase::SingleOwnerOnly { .. } => {
            stats.single_owner_only += 1;
            psi_single_owner_only(s, utility)
        }
        TupleCase::UniqueMultiOwner { .. } => {
            stats.unique_multi += 1;
            psi_unique_multi(s, utility)
        }
        TupleCase::General => {
            stats.general += 1;
            let owners = s.owners();
            let n = owners.len();
            let mut out = TupleShares::new();
            for u in owners.iter() {
                let split = SynthesisSplit::new(s, u);
                let first = preferred_route(n, &split, cfg.gamma);
                let (v, route) = match run_route(first, u, &split, s, utility, cfg) {
                    Ok(v) => (v, first),
                    Err(Error::Cost { detail: first_detail, .. }) => {
                        let second = match first {
                            Route::Sc => Route::Sl,
                            Route::Sl => Route::Sc,
                        };
                        match run_route(second, u, &split, s, utility, cfg) {
                            Ok(v) => (v, second),
                            Err(Error::Cost { detail, .. }) => {
                                return Err(Error::Cost {
                                    algorithm: "SC and SL",
                                    detail: format!("{first_detail}; {detail}"),
                                })
                            }
                            Err(e) => return Err(e),
                        }
                    }
                    Err(e) => return Err(e),
                };
                match route {
                    Route::Sc => stats.sc_calls += 1,
                    Route::Sl => stats.sl_calls += 1,
                }
                out.insert(u, v);
            }
            Ok(out)
        }
    }
}

fn run_route(
    route: Route,
    u: OwnerId,
    split: &SynthesisSplit,
    s: &SynthesisSet,
    utility: &Utility,
    cfg: &IusvConfig,
) -> Result<Utility> {
    match route {
        Route::Sc => psi_sc(u, split, utility, cfg.sc_max_terms),
        Route::Sl => psi_sl(u, s, utility, cfg.sl_max_owners),
    }
}

/// Result of [`iusv_all`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IusvOutput {
    pub allocation: Allocation,
    pub stats: CaseStats,
}

/// Shapley values of every owner over a coalition set: the sum of per-tuple
/// values.
pub fn iusv_all(d: &CoalitionSet, cfg: &IusvConfig) -> Result<IusvOutput> {
    iusv_all_with(d, cfg, &Never)
}

/// [`iusv_all`] with cooperative cancellation, checked between tuples.
pub fn iusv_all_with(d: &CoalitionSet, cfg: &IusvConfig, cancel: &dyn Cancel) -> Result<IusvOutput> {
    cfg.validate()?;
    let mut allocation = Allocation::zeros(d.owners());
    let mut stats = CaseStats::default();
    for t in d.tuples() {
        if cancel.cancelled() {
            return Err(Error::Cancelled);
        }
        let shares = tuple_shares(&t.syntheses, &t.utility, cfg, &mut stats)?;
        allocation.add_shares(&shares)?;
        if cfg.per_tuple {
            allocation.record_tuple(shares);
        }
    }
    Ok(IusvOutput { allocation, stats })
}
