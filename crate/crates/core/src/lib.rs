//! Exact Shapley-value revenue allocation for data owners whose tables are
//! assembled into a coalition data set.
//!
//! When the utility of the assembled data set is a sum of independent,
//! non-negative per-tuple utilities, the Shapley value of every owner splits
//! into a sum of per-tuple Shapley values, and each of those depends only on
//! the tuple's minimal syntheses (the minimal owner sets able to produce it).
//! This crate provides:
//!
//! * [`assemble`]: a positive relational-algebra evaluator that tracks, per
//!   output tuple, which owner sets can produce it, and reduces them to the
//!   minimal ones;
//! * [`shapley`]: per-tuple exact Shapley computation (two closed forms, the
//!   synthesis-combination and synthesis-look-up algorithms, and the
//!   dispatching driver);
//! * [`baselines`]: the exponential exact method, permutation sampling, and a
//!   brute-force per-tuple oracle;
//! * [`datagen`]: the synthetic owner/record assignment protocol;
//! * [`metrics`]: error rate and case-rate reporting.
//!
//! The crate is `no_std` and only needs `alloc`.
#![no_std]

extern crate alloc;

pub mod allocation;
pub mod assemble;
pub mod baselines;
pub mod cancel;
pub mod datagen;
mod error;
pub mod math;
pub mod metrics;
pub mod owner;
pub mod plan;
pub mod shapley;
pub mod utility;
pub mod value;

pub use allocation::{Allocation, TupleShares};
pub use assemble::{evaluate_plan, minimalize, CoalitionSet, CoalitionTuple, OwnedTable, SynthesisSet};
pub use cancel::{Cancel, Never};
pub use error::{Error, Result};
pub use owner::{OwnerId, OwnerSet, DEFAULT_MAX_OWNERS};
pub use plan::CoalitionPlan;
pub use shapley::{iusv_all, iusv_tuple, IusvConfig, TupleCase};
pub use utility::Utility;
pub use value::{Row, Value};
