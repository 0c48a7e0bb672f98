//! Reference Shapley implementations that do not use the independent-utility
//! decomposition: the exact subset formula over all owners, permutation
//! sampling, and a brute-force per-tuple oracle.

mod evaluator;
mod oracle;
mod perm;
mod trad;

pub use evaluator::UtilityEvaluator;
pub use oracle::{brute_force_tuple_oracle, ORACLE_MAX_OWNERS};
pub use perm::{perm_shapley, perm_shapley_enumerated, perm_shapley_with, PermConfig, PERM_RNG};
pub use trad::{trad_shapley, trad_shapley_with, TRAD_MAX_OWNERS};
