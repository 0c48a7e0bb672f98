//! Run metrics: error rate of an approximate allocation and case rates of an
//! IUSV run.

use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::allocation::Allocation;
use crate::shapley::CaseStats;
use crate::{Error, Result};

/// `Σ|ψ(u) − ψ̂(u)| / Σψ(u)`, computed exactly and reported as `f64`.
pub fn compute_error_rate(exact: &Allocation, approx: &Allocation) -> Result<f64> {
    if exact.owners() != approx.owners() {
        return Err(Error::UniverseMismatch { left: exact.owners(), right: approx.owners() });
    }
    let total = exact.total();
    if total.is_zero() {
        return Err(Error::UndefinedMetric("error rate with zero total Shapley value"));
    }
    let mut deviation = BigRational::zero();
    for (a, b) in exact.values().iter().zip(approx.values()) {
        deviation += (a.as_rational() - b.as_rational()).abs();
    }
    Ok((deviation / total.as_rational()).to_f64().unwrap_or(f64::NAN))
}

/// Fractions in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CaseRates {
    /// Tuples with exactly one multi-owner minimal synthesis, over all tuples.
    pub umos_rate: f64,
    /// SC calls over general-case per-owner calls; 0 when there are none.
    pub sc_rate: f64,
    pub sl_rate: f64,
}

pub fn compute_case_rates(stats: &CaseStats) -> CaseRates {
    let ratio = |a: u64, b: u64| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    let calls = stats.sc_calls + stats.sl_calls;
    CaseRates {
        umos_rate: ratio(stats.unique_multi, stats.tuples),
        sc_rate: ratio(stats.sc_calls, calls),
        sl_rate: ratio(stats.sl_calls, calls),
    }
}
