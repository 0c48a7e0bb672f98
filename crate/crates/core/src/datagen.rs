//! Synthetic owner/record assignment.
//!
//! A relational data set is split among owners in three steps: decide how
//! many owners each table gets (EO: `k` everywhere, UO: `k` for the largest
//! table and 2 elsewhere), draw a copy count per row from a Zipf law
//! truncated to `1..=m`, and hand each copy to a distinct owner of the table
//! (EA: uniformly, UA: Zipf-weighted by owner rank with exponent `beta`).

use alloc::string::String;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::assemble::OwnedTable;
use crate::owner::{check_universe, OwnerId, DEFAULT_MAX_OWNERS};
use crate::value::Row;
use crate::{Error, Result};

/// Name of the generator used by [`assign`].
pub const ASSIGN_RNG: &str = "chacha8";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OwnerMode {
    /// Equal number of owners per table.
    EO,
    /// `k` owners for the largest table, 2 for every other.
    UO,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AssignMode {
    /// Copies go to owners chosen uniformly.
    EA,
    /// Copies go to owners chosen with Zipf weights by owner rank.
    UA,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AssignmentScenario {
    pub owner_mode: OwnerMode,
    pub assign_mode: AssignMode,
    pub k: usize,
    pub alpha: f64,
    #[serde(rename = "m")]
    pub max_copies: usize,
    pub beta: f64,
    /// Under EO, tables with fewer rows than this get a single owner.
    pub small_table_threshold: usize,
    pub seed: u64,
}

impl Default for AssignmentScenario {
    fn default() -> Self {
        AssignmentScenario {
            owner_mode: OwnerMode::EO,
            assign_mode: AssignMode::EA,
            k: 5,
            alpha: 4.0,
            max_copies: 3,
            beta: 3.0,
            small_table_threshold: 100,
            seed: 0,
        }
    }
}

impl AssignmentScenario {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.into()));
        if self.k == 0 {
            return bad("k must be at least 1");
        }
        if self.max_copies == 0 {
            return bad("m must be at least 1");
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return bad("alpha must be a positive real");
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return bad("beta must be a positive real");
        }
        Ok(())
    }
}

/// An unowned relational table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub name: String,
    pub schema: Vec<String>,
    pub rows: Vec<Row>,
}

/// Owner count per table, in input order.
pub fn assign_owner_counts(row_counts: &[usize], scenario: &AssignmentScenario) -> Vec<usize> {
    match scenario.owner_mode {
        OwnerMode::EO => row_counts
            .iter()
            .map(|&rows| if rows < scenario.small_table_threshold { 1 } else { scenario.k })
            .collect(),
        OwnerMode::UO => {
            // first of the largest tables on ties
            let largest = row_counts
                .iter()
                .enumerate()
                .fold(None::<(usize, usize)>, |best, (i, &r)| match best {
                    Some((_, br)) if br >= r => best,
                    _ => Some((i, r)),
                })
                .map(|(i, _)| i);
            (0..row_counts.len()).map(|i| if Some(i) == largest { scenario.k } else { 2 }).collect()
        }
    }
}

/// Zipf law on `1..=n`: `P(c) ∝ c^-exponent`.
#[derive(Debug, Clone)]
pub struct TruncatedZipf {
    cdf: Vec<f64>,
}

impl TruncatedZipf {
    pub fn new(exponent: f64, n: usize) -> Self {
        assert!(n >= 1, "Zipf support must be non-empty");
        let mut cdf = Vec::with_capacity(n);
        let mut acc = 0.0;
        for c in 1..=n {
            acc += libm::pow(c as f64, -exponent);
            cdf.push(acc);
        }
        for x in &mut cdf {
            *x /= acc;
        }
        TruncatedZipf { cdf }
    }

    pub fn probabilities(&self) -> Vec<f64> {
        let mut prev = 0.0;
        self.cdf
            .iter()
            .map(|&c| {
                let p = c - prev;
                prev = c;
                p
            })
            .collect()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let x: f64 = rng.gen();
        // cdf.last() == 1.0 up to rounding; clamp to the support
        self.cdf.partition_point(|&c| c <= x).min(self.cdf.len() - 1) + 1
    }
}

/// One copy count in `1..=m` from a Zipf law with exponent `alpha`.
pub fn sample_copy_count<R: Rng + ?Sized>(alpha: f64, m: usize, rng: &mut R) -> usize {
    TruncatedZipf::new(alpha, m).sample(rng)
}

/// Picks `count` distinct indices in `0..weights.len()` by successive
/// weighted draws without replacement.
fn weighted_distinct<R: Rng + ?Sized>(weights: &[f64], count: usize, rng: &mut R) -> Vec<usize> {
    let mut taken = alloc::vec![false; weights.len()];
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let total: f64 = weights.iter().zip(&taken).filter(|(_, t)| !**t).map(|(w, _)| w).sum();
        let mut x = rng.gen::<f64>() * total;
        let mut pick = None;
        for (i, w) in weights.iter().enumerate() {
            if taken[i] {
                continue;
            }
            pick = Some(i);
            if x < *w {
                break;
            }
            x -= w;
        }
        let i = pick.expect("fewer owners than copies");
        taken[i] = true;
        out.push(i);
    }
    out
}

/// Distributes the rows of `table` among `owners`; row `i` goes to
/// `copies[i]` distinct owners (clamped to `1..=owners.len()`).
pub fn assign_records<R: Rng + ?Sized>(
    table: &Table,
    owners: &[OwnerId],
    copies: &[usize],
    mode: AssignMode,
    beta: f64,
    rng: &mut R,
) -> Result<Vec<OwnedTable>> {
    if owners.is_empty() {
        return Err(Error::Config("a table needs at least one owner".into()));
    }
    if copies.len() != table.rows.len() {
        return Err(Error::precondition("one copy count per row"));
    }
    let k = owners.len();
    let weights: Vec<f64> = (1..=k).map(|r| libm::pow(r as f64, -beta)).collect();
    let mut held: Vec<Vec<Row>> = alloc::vec![Vec::new(); k];
    for (row, &c) in table.rows.iter().zip(copies) {
        let c = c.clamp(1, k);
        let chosen = match mode {
            AssignMode::EA => rand::seq::index::sample(rng, k, c).into_vec(),
            AssignMode::UA => weighted_distinct(&weights, c, rng),
        };
        for i in chosen {
            held[i].push(row.clone());
        }
    }
    owners
        .iter()
        .zip(held)
        .map(|(&o, rows)| OwnedTable::new(o, table.name.clone(), table.schema.clone(), rows))
        .collect()
}

/// The owner tables generated for one logical table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableAssignment {
    pub name: String,
    pub schema: Vec<String>,
    pub source_rows: usize,
    /// One table per owner, possibly empty.
    pub parts: Vec<OwnedTable>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OwnerAssignment {
    pub owners: usize,
    pub tables: Vec<TableAssignment>,
}

impl OwnerAssignment {
    pub fn owned_tables(&self) -> Vec<OwnedTable> {
        self.tables.iter().flat_map(|t| t.parts.iter().cloned()).collect()
    }
}

/// Runs the full protocol. Owner ids are contiguous, table by table in input
/// order; table `i` draws from ChaCha8 seeded with `scenario.seed` on stream
/// `i`. Duplicate rows in a source table are collapsed first.
pub fn assign(tables: &[Table], scenario: &AssignmentScenario) -> Result<OwnerAssignment> {
    scenario.validate()?;
    if tables.is_empty() {
        return Err(Error::Config("no tables to assign".into()));
    }
    let tables: Vec<Table> = tables
        .iter()
        .map(|t| {
            let mut seen = hashbrown::HashSet::new();
            let rows = t.rows.iter().filter(|r| seen.insert(*r)).cloned().collect();
            Table { name: t.name.clone(), schema: t.schema.clone(), rows }
        })
        .collect();
    let counts = assign_owner_counts(&tables.iter().map(|t| t.rows.len()).collect::<Vec<_>>(), scenario);
    check_universe(counts.iter().sum(), DEFAULT_MAX_OWNERS)?;
    let zipf = TruncatedZipf::new(scenario.alpha, scenario.max_copies);
    let mut next = 0u32;
    let mut out = Vec::with_capacity(tables.len());
    for (i, (table, &k)) in tables.iter().zip(&counts).enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(scenario.seed);
        rng.set_stream(i as u64);
        let owners: Vec<OwnerId> = (next..next + k as u32).map(OwnerId).collect();
        next += k as u32;
        let copies: Vec<usize> = table.rows.iter().map(|_| zipf.sample(&mut rng)).collect();
        let parts = assign_records(table, &owners, &copies, scenario.assign_mode, scenario.beta, &mut rng)?;
        out.push(TableAssignment {
            name: table.name.clone(),
            schema: table.schema.clone(),
            source_rows: table.rows.len(),
            parts,
        });
    }
    Ok(OwnerAssignment { owners: next as usize, tables: out })
}
