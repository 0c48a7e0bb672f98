#![allow(dead_code)]

use iusv_core::{minimalize, OwnerId, OwnerSet, SynthesisSet, TupleShares, Utility};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

pub fn set_from_mask(universe: usize, mask: u32) -> OwnerSet {
    OwnerSet::from_owners(universe, (0..universe as u32).filter(|i| mask & (1 << i) != 0).map(OwnerId)).unwrap()
}

/// Minimal synthesis sets over at most `max_owners` owners with at most
/// `max_syn` members.
pub fn synthesis_set(max_owners: usize, max_syn: usize) -> impl Strategy<Value = SynthesisSet> {
    (1..=max_owners).prop_flat_map(move |n| {
        prop::collection::vec(1u32..(1 << n), 1..=max_syn).prop_map(move |masks| {
            minimalize(masks.into_iter().map(|m| set_from_mask(n, m)).collect()).unwrap()
        })
    })
}

pub fn utility() -> impl Strategy<Value = Utility> {
    (0u64..50, 1u64..12).prop_map(|(n, d)| Utility::from_ratio(n, d).unwrap())
}

pub fn nonzero(shares: &TupleShares) -> TupleShares {
    shares.iter().filter(|(_, v)| !v.is_zero()).map(|(k, v)| (*k, v.clone())).collect()
}

pub fn r(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Shapley values as the mean marginal contribution over every ordering of
/// the tuple's owners.
pub fn permutation_oracle(s: &SynthesisSet, utility: &Utility) -> TupleShares {
    let owners: Vec<OwnerId> = s.owners().iter().collect();
    let n = owners.len();
    let mut order: Vec<usize> = (0..n).collect();
    let mut counts = vec![0u64; n];
    let mut perms = 0u64;
    loop {
        perms += 1;
        let mut c = OwnerSet::new(s.universe());
        for &i in &order {
            c.insert(owners[i]).unwrap();
            if s.iter().any(|x| x.is_subset(&c).unwrap()) {
                counts[i] += 1;
                break;
            }
        }
        // next lexicographic permutation
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| order[i] < order[i + 1]) else { break };
        let j = (i + 1..n).rev().find(|&j| order[j] > order[i]).unwrap();
        order.swap(i, j);
        order[i + 1..].reverse();
    }
    owners
        .iter()
        .zip(counts)
        .map(|(&o, c)| {
            let frac = BigRational::new(BigInt::from(c), BigInt::from(perms));
            (o, Utility::from_rational(utility.as_rational() * frac).unwrap())
        })
        .collect()
}

use iusv_core::{CoalitionPlan, OwnedTable, Value};

/// A small two-table data set: every owner holds part of either `r(a, b)` or
/// `s(b, c)`, values drawn from a tiny domain so that joins and duplicates
/// across owners are frequent.
#[derive(Debug, Clone)]
pub struct MiniData {
    pub owners: usize,
    pub tables: Vec<OwnedTable>,
}

pub fn mini_data(max_owners: usize, max_rows: usize) -> impl Strategy<Value = MiniData> {
    (1..=max_owners).prop_flat_map(move |n| {
        let owner = (any::<bool>(), prop::collection::vec((0i64..3, 0i64..3), 0..=max_rows));
        prop::collection::vec(owner, n).prop_map(move |specs| {
            let tables = specs
                .into_iter()
                .enumerate()
                .map(|(i, (in_r, pairs))| {
                    let (name, schema) = if in_r { ("r", ["a", "b"]) } else { ("s", ["b", "c"]) };
                    let rows = pairs.into_iter().map(|(x, y)| vec![Value::Int(x), Value::Int(y)]).collect();
                    OwnedTable::new(OwnerId(i as u32), name, schema.map(String::from).to_vec(), rows).unwrap()
                })
                .collect();
            MiniData { owners: n, tables }
        })
    })
}

pub fn plans() -> Vec<CoalitionPlan> {
    let r = || CoalitionPlan::scan("r");
    let s = || CoalitionPlan::scan("s");
    vec![
        r().join(s()),
        CoalitionPlan::union([r(), s()]),
        r().join(s()).project(["a", "c"]),
        CoalitionPlan::union([r().project(["b"]), s().project(["b"])]),
        CoalitionPlan::union([r().join(s()).project(["a", "c"]), s().project(["b", "c"])]),
        r().join(s()).equi_join(CoalitionPlan::scan_as("r", "x"), [("c", "x.a")]).project(["a", "x.b"]),
    ]
}

/// Ensures each logical table in the plans has at least one (possibly empty)
/// owner table.
pub fn with_placeholders(d: &MiniData) -> Vec<OwnedTable> {
    let mut tables = d.tables.clone();
    for (name, schema) in [("r", ["a", "b"]), ("s", ["b", "c"])] {
        if !tables.iter().any(|t| t.table() == name) {
            let owner = OwnerId(0);
            tables.push(OwnedTable::new(owner, name, schema.map(String::from).to_vec(), vec![]).unwrap());
        }
    }
    tables
}
