//! Coalition-set assemblage with owner provenance.
//!
//! Every intermediate tuple carries the list of owner sets able to produce it
//! (its syntheses). Scans seed singleton witnesses, joins take pairwise
//! unions, projections and unions merge the lists of tuples that become equal.
//! Lists are reduced to their ⊆-minimal members after every merge and join;
//! under monotone operators a subsumed witness never becomes minimal again,
//! so reducing early does not change the final result.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use hashbrown::HashMap;

use crate::owner::{check_universe, OwnerId, OwnerSet, DEFAULT_MAX_OWNERS};
use crate::plan::{Bound, BoundOp, CoalitionPlan};
use crate::utility::Utility;
use crate::value::{Row, Value};
use crate::{Error, Result};

/// Default cap on minimal syntheses per tuple.
pub const DEFAULT_SYNTHESIS_CAP: usize = 64;

/// One owner's copy of (part of) a logical table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OwnedTable {
    owner: OwnerId,
    table: String,
    schema: Vec<String>,
    rows: Vec<Row>,
}

impl OwnedTable {
    /// Builds an owned table, checking row arity and collapsing duplicate rows.
    pub fn new(owner: OwnerId, table: impl Into<String>, schema: Vec<String>, rows: Vec<Row>) -> Result<Self> {
        let table = table.into();
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != schema.len()) {
            return Err(Error::plan(format!(
                "row {i} of table {table:?} (owner {owner}) has {} values, schema has {}",
                r.len(),
                schema.len()
            )));
        }
        let mut seen = hashbrown::HashSet::with_capacity(rows.len());
        let rows = rows.into_iter().filter(|r| seen.insert(r.clone())).collect();
        Ok(OwnedTable { owner, table, schema, rows })
    }

    pub fn owner(&self) -> OwnerId {
        self.owner
    }

    pub fn table(&self) -> &str {
        &self.table
    }

    pub fn schema(&self) -> &[String] {
        &self.schema
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }
}

/// The ⊆-minimal syntheses of one coalition tuple: a non-empty, deduplicated
/// antichain in canonical order (by cardinality, then by member list).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SynthesisSet(Vec<OwnerSet>);

impl SynthesisSet {
    pub fn as_slice(&self) -> &[OwnerSet] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> core::slice::Iter<'_, OwnerSet> {
        self.0.iter()
    }

    pub fn universe(&self) -> usize {
        self.0[0].universe()
    }

    /// The minimal synthesis owners: the union of all members.
    pub fn owners(&self) -> OwnerSet {
        let mut all = OwnerSet::new(self.universe());
        for s in &self.0 {
            all.union_with(s);
        }
        all
    }

    /// Convenience constructor from owner-index lists; the lists are minimalized.
    pub fn from_lists(universe: usize, lists: &[&[u32]]) -> Result<Self> {
        let sets = lists
            .iter()
            .map(|l| OwnerSet::from_owners(universe, l.iter().map(|&i| OwnerId(i))))
            .collect::<Result<Vec<_>>>()?;
        minimalize(sets)
    }
}

impl fmt::Debug for SynthesisSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(&self.0).finish()
    }
}

impl<'a> IntoIterator for &'a SynthesisSet {
    type Item = &'a OwnerSet;
    type IntoIter = core::slice::Iter<'a, OwnerSet>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// Reduces a list of syntheses to its ⊆-minimal members in canonical order.
pub fn minimalize(syntheses: Vec<OwnerSet>) -> Result<SynthesisSet> {
    if syntheses.is_empty() {
        return Err(Error::EmptySyntheses);
    }
    let u = syntheses[0].universe();
    if let Some(bad) = syntheses.iter().find(|s| s.universe() != u) {
        return Err(Error::UniverseMismatch { left: u, right: bad.universe() });
    }
    if syntheses.iter().any(OwnerSet::is_empty) {
        return Err(Error::precondition("a synthesis must contain at least one owner"));
    }
    Ok(SynthesisSet(antichain(syntheses)))
}

fn antichain(mut sets: Vec<OwnerSet>) -> Vec<OwnerSet> {
    sets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    let mut kept: Vec<OwnerSet> = Vec::with_capacity(sets.len());
    for s in sets {
        // kept members have cardinality <= |s|; equal sets are caught as subsets
        if !kept.iter().any(|k| k.subset_of(&s)) {
            kept.push(s);
        }
    }
    kept
}

/// Per-tuple utility under the independent-utility model.
pub trait TupleUtility {
    fn utility(&self, values: &[Value]) -> Utility;
}

/// Every tuple is worth 1.
#[derive(Debug, Clone, Copy, Default)]
pub struct UnitUtility;

impl TupleUtility for UnitUtility {
    fn utility(&self, _: &[Value]) -> Utility {
        Utility::one()
    }
}

impl<F: Fn(&[Value]) -> Utility> TupleUtility for F {
    fn utility(&self, values: &[Value]) -> Utility {
        self(values)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoalitionTuple {
    pub values: Row,
    pub utility: Utility,
    pub syntheses: SynthesisSet,
}

/// The deduplicated output of a coalition plan, sorted by tuple value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoalitionSet {
    owners: usize,
    schema: Vec<String>,
    tuples: Vec<CoalitionTuple>,
}

impl CoalitionSet {
    /// Builds a coalition set directly, e.g. from a synthesis dump. Tuple
    /// values must be distinct and every synthesis set must be over `owners`.
    pub fn new(owners: usize, schema: Vec<String>, mut tuples: Vec<CoalitionTuple>) -> Result<Self> {
        tuples.sort_by(|a, b| a.values.cmp(&b.values));
        if tuples.windows(2).any(|w| w[0].values == w[1].values) {
            return Err(Error::precondition("duplicate tuples in coalition set"));
        }
        if let Some(t) = tuples.iter().find(|t| t.syntheses.universe() != owners) {
            return Err(Error::UniverseMismatch { left: owners, right: t.syntheses.universe() });
        }
        Ok(CoalitionSet { owners, schema, tuples })
    }

    pub fn empty(owners: usize) -> Self {
        CoalitionSet { owners, schema: Vec::new(), tuples: Vec::new() }
    }

    /// Size of the owner universe.
    pub fn owners(&self) -> usize {
        self.owners
    }

    pub fn schema(&self) -> &[String] {
        &self.schema
    }

    pub fn tuples(&self) -> &[CoalitionTuple] {
        &self.tuples
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn total_utility(&self) -> Utility {
        self.tuples.iter().map(|t| &t.utility).sum()
    }
}

#[derive(Debug, Clone)]
pub struct AssembleConfig {
    /// Maximum minimal syntheses per tuple before evaluation aborts.
    pub synthesis_cap: usize,
    pub max_owners: usize,
    /// Size of the owner universe; defaults to one past the largest owner id.
    pub owners: Option<usize>,
}

impl Default for AssembleConfig {
    fn default() -> Self {
        AssembleConfig { synthesis_cap: DEFAULT_SYNTHESIS_CAP, max_owners: DEFAULT_MAX_OWNERS, owners: None }
    }
}

/// Evaluates `plan` over `tables` with unit tuple utilities and default caps.
pub fn evaluate_plan(plan: &CoalitionPlan, tables: &[OwnedTable]) -> Result<CoalitionSet> {
    Assembler::new(plan, tables, AssembleConfig::default())?.coalition_set(&UnitUtility)
}

struct LogicalTable<'a> {
    schema: &'a [String],
    parts: Vec<&'a OwnedTable>,
}

/// A plan bound to a set of owned tables, ready to evaluate repeatedly
/// (optionally restricted to a subset of owners).
pub struct Assembler<'a> {
    bound: Bound,
    catalog: BTreeMap<&'a str, LogicalTable<'a>>,
    owners: usize,
    config: AssembleConfig,
}

impl<'a> Assembler<'a> {
    pub fn new(plan: &CoalitionPlan, tables: &'a [OwnedTable], config: AssembleConfig) -> Result<Self> {
        let mut catalog: BTreeMap<&str, LogicalTable<'_>> = BTreeMap::new();
        for t in tables {
            let entry = catalog.entry(t.table()).or_insert(LogicalTable { schema: t.schema(), parts: Vec::new() });
            if entry.schema != t.schema() {
                return Err(Error::plan(format!(
                    "schema mismatch for table {:?}: {:?} vs {:?}",
                    t.table(),
                    entry.schema,
                    t.schema()
                )));
            }
            entry.parts.push(t);
        }
        let max_id = tables.iter().map(|t| t.owner().index() + 1).max().unwrap_or(0);
        let owners = config.owners.unwrap_or(max_id);
        if owners < max_id {
            return Err(Error::OwnerOutOfRange { owner: max_id - 1, universe: owners });
        }
        check_universe(owners, config.max_owners)?;
        let bound = plan.bind(&|name: &str| catalog.get(name).map(|t| t.schema))?;
        Ok(Assembler { bound, catalog, owners, config })
    }

    pub fn owners(&self) -> usize {
        self.owners
    }

    pub fn schema(&self) -> &[String] {
        &self.bound.schema
    }

    /// The full coalition set with minimal syntheses.
    pub fn coalition_set(&self, utility: &dyn TupleUtility) -> Result<CoalitionSet> {
        self.coalition_set_within(None, utility)
    }

    /// The coalition set produced by the owners in `allowed` only.
    pub fn coalition_set_restricted(&self, allowed: &OwnerSet, utility: &dyn TupleUtility) -> Result<CoalitionSet> {
        self.coalition_set_within(Some(allowed), utility)
    }

    fn coalition_set_within(&self, allowed: Option<&OwnerSet>, utility: &dyn TupleUtility) -> Result<CoalitionSet> {
        let ctx = Witnesses { universe: self.owners, cap: self.config.synthesis_cap };
        let rel = self.eval(&self.bound, allowed, &ctx)?;
        let mut tuples: Vec<CoalitionTuple> = rel
            .into_iter()
            .map(|(values, w)| CoalitionTuple { utility: utility.utility(&values), values, syntheses: SynthesisSet(w) })
            .collect();
        tuples.sort_by(|a, b| a.values.cmp(&b.values));
        Ok(CoalitionSet { owners: self.owners, schema: self.bound.schema.clone(), tuples })
    }

    /// Output rows produced by the owners in `allowed`, without provenance.
    pub fn rows_restricted(&self, allowed: &OwnerSet) -> Result<Vec<Row>> {
        let rel = self.eval(&self.bound, Some(allowed), &Plain)?;
        Ok(rel.into_keys().collect())
    }

    fn eval<A: Annotator>(&self, node: &Bound, allowed: Option<&OwnerSet>, ann: &A) -> Result<Relation<A::Ann>> {
        match &node.op {
            BoundOp::Scan { table, filter } => {
                let mut out = Relation::new();
                let Some(logical) = self.catalog.get(table.as_str()) else {
                    return Err(Error::plan(format!("unknown table {table:?}")));
                };
                for part in &logical.parts {
                    if allowed.is_some_and(|a| !a.contains(part.owner())) {
                        continue;
                    }
                    for row in part.rows() {
                        if filter.iter().all(|(c, v)| &row[*c] == v) {
                            insert(&mut out, row.clone(), ann.owner(part.owner())?, ann)?;
                        }
                    }
                }
                Ok(out)
            }
            BoundOp::Project { cols, input } => {
                let rel = self.eval(input, allowed, ann)?;
                let mut out = Relation::with_capacity(rel.len());
                for (row, a) in rel {
                    let projected: Row = cols.iter().map(|&c| row[c].clone()).collect();
                    insert(&mut out, projected, a, ann)?;
                }
                Ok(out)
            }
            BoundOp::Join { keys, right_keep, left, right } => {
                let l = self.eval(left, allowed, ann)?;
                let r = self.eval(right, allowed, ann)?;
                let mut table: HashMap<Vec<Value>, Vec<(&Row, &A::Ann)>> = HashMap::with_capacity(r.len());
                for (row, a) in &r {
                    let key = keys.iter().map(|&(_, rc)| row[rc].clone()).collect();
                    table.entry(key).or_default().push((row, a));
                }
                let mut out = Relation::new();
                let mut key = Vec::with_capacity(keys.len());
                for (lrow, la) in &l {
                    key.clear();
                    key.extend(keys.iter().map(|&(lc, _)| lrow[lc].clone()));
                    let Some(matches) = table.get(&key) else { continue };
                    for (rrow, ra) in matches {
                        let mut row = Vec::with_capacity(lrow.len() + right_keep.len());
                        row.extend_from_slice(lrow);
                        row.extend(right_keep.iter().map(|&c| rrow[c].clone()));
                        let a = ann.join(la, ra).map_err(|n| cap_error(&row, n, ann.cap()))?;
                        insert(&mut out, row, a, ann)?;
                    }
                }
                Ok(out)
            }
            BoundOp::Union(children) => {
                let mut out = Relation::new();
                for c in children {
                    for (row, a) in self.eval(c, allowed, ann)? {
                        insert(&mut out, row, a, ann)?;
                    }
                }
                Ok(out)
            }
        }
    }
}

type Relation<A> = HashMap<Row, A>;

fn insert<A: Annotator>(rel: &mut Relation<A::Ann>, row: Row, a: A::Ann, ann: &A) -> Result<()> {
    match rel.entry(row) {
        hashbrown::hash_map::Entry::Occupied(mut e) => {
            if let Err(n) = ann.merge(e.get_mut(), a) {
                return Err(cap_error(e.key(), n, ann.cap()));
            }
        }
        hashbrown::hash_map::Entry::Vacant(e) => {
            e.insert(a);
        }
    }
    Ok(())
}

fn cap_error(row: &[Value], count: usize, cap: usize) -> Error {
    Error::SynthesisCap { tuple: format!("{row:?}"), count, cap }
}

/// Tuple annotations threaded through evaluation. Errors carry the synthesis
/// count that exceeded the cap.
trait Annotator {
    type Ann;
    fn owner(&self, o: OwnerId) -> Result<Self::Ann>;
    fn join(&self, a: &Self::Ann, b: &Self::Ann) -> core::result::Result<Self::Ann, usize>;
    fn merge(&self, into: &mut Self::Ann, other: Self::Ann) -> core::result::Result<(), usize>;
    fn cap(&self) -> usize;
}

struct Plain;

impl Annotator for Plain {
    type Ann = ();
    fn owner(&self, _: OwnerId) -> Result<()> {
        Ok(())
    }
    fn join(&self, _: &(), _: &()) -> core::result::Result<(), usize> {
        Ok(())
    }
    fn merge(&self, _: &mut (), _: ()) -> core::result::Result<(), usize> {
        Ok(())
    }
    fn cap(&self) -> usize {
        usize::MAX
    }
}

struct Witnesses {
    universe: usize,
    cap: usize,
}

impl Witnesses {
    fn capped(&self, sets: Vec<OwnerSet>) -> core::result::Result<Vec<OwnerSet>, usize> {
        let sets = antichain(sets);
        if sets.len() > self.cap {
            return Err(sets.len());
        }
        Ok(sets)
    }
}

impl Annotator for Witnesses {
    type Ann = Vec<OwnerSet>;

    fn owner(&self, o: OwnerId) -> Result<Vec<OwnerSet>> {
        Ok(alloc::vec![OwnerSet::singleton(self.universe, o)?])
    }

    fn join(&self, a: &Vec<OwnerSet>, b: &Vec<OwnerSet>) -> core::result::Result<Vec<OwnerSet>, usize> {
        if a.len() == 1 && b.len() == 1 {
            let mut s = a[0].clone();
            s.union_with(&b[0]);
            return Ok(alloc::vec![s]);
        }
        let mut out = Vec::with_capacity(a.len() * b.len());
        for x in a {
            for y in b {
                let mut s = x.clone();
                s.union_with(y);
                out.push(s);
            }
        }
        self.capped(out)
    }

    fn merge(&self, into: &mut Vec<OwnerSet>, other: Vec<OwnerSet>) -> core::result::Result<(), usize> {
        into.extend(other);
        *into = self.capped(core::mem::take(into))?;
        Ok(())
    }

    fn cap(&self) -> usize {
        self.cap
    }
}
