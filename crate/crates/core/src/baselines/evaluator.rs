use alloc::collections::BTreeMap;

use crate::assemble::{AssembleConfig, Assembler, OwnedTable, TupleUtility, UnitUtility};
use crate::owner::OwnerSet;
use crate::plan::CoalitionPlan;
use crate::utility::Utility;
use crate::Result;

/// Utility of the coalition set produced by a subset of owners: the plan is
/// re-executed over only those owners' tables and per-tuple utilities summed.
pub struct UtilityEvaluator<'a> {
    assembler: Assembler<'a>,
    utility: &'a dyn TupleUtility,
    memo: Option<BTreeMap<OwnerSet, Utility>>,
    evaluations: u64,
}

impl<'a> UtilityEvaluator<'a> {
    /// Unit tuple utilities, memoization on.
    pub fn new(plan: &CoalitionPlan, tables: &'a [OwnedTable]) -> Result<Self> {
        Self::with_config(plan, tables, AssembleConfig::default(), &UnitUtility)
    }

    pub fn with_config(
        plan: &CoalitionPlan,
        tables: &'a [OwnedTable],
        config: AssembleConfig,
        utility: &'a dyn TupleUtility,
    ) -> Result<Self> {
        Ok(UtilityEvaluator {
            assembler: Assembler::new(plan, tables, config)?,
            utility,
            memo: Some(BTreeMap::new()),
            evaluations: 0,
        })
    }

    pub fn without_memo(mut self) -> Self {
        self.memo = None;
        self
    }

    /// Size of the owner universe.
    pub fn owners(&self) -> usize {
        self.assembler.owners()
    }

    /// Number of plan executions so far (memo hits excluded).
    pub fn evaluations(&self) -> u64 {
        self.evaluations
    }

    pub fn evaluate(&mut self, coalition: &OwnerSet) -> Result<Utility> {
        if let Some(v) = self.memo.as_ref().and_then(|m| m.get(coalition)) {
            return Ok(v.clone());
        }
        let v = if coalition.is_empty() {
            Utility::zero()
        } else {
            self.evaluations += 1;
            let rows = self.assembler.rows_restricted(coalition)?;
            rows.iter().map(|r| self.utility.utility(r)).sum()
        };
        if let Some(m) = self.memo.as_mut() {
            m.insert(coalition.clone(), v.clone());
        }
        Ok(v)
    }
}
