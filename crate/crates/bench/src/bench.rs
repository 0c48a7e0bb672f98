//! Benchmark matrices.
//!
//! A matrix is a TOML file with a `[base]` run configuration and a `[sweep]`
//! table mapping parameter names to value lists; every combination is one
//! cell. `k`, `alpha`, `m`, `beta`, `owner_mode`, `assign_mode` and
//! `small_table_threshold` (or any `scenario.<field>`) address the owner
//! assignment scenario, other names the run itself (`method`, `samples`,
//! `seed`, `gamma`, `timeout`, `plan`).
//!
//! ```toml
//! reference = "iusv"
//!
//! [base]
//! dataset = ["country.csv", "city.csv"]
//! plan = "plan.json"
//! method = "iusv"
//! timeout = 120
//!
//! [sweep]
//! k = [1, 2, 3, 4]
//! method = ["iusv", "perm"]
//! ```

use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use iusv_core::{Allocation, CoalitionPlan, OwnedTable};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{format, io, Error, Result};
use crate::files::load_plan;
use crate::ingest::ingest_csv;
use crate::report::{Method, RunReport, Status};
use crate::run::{execute, RunConfig};

const SCENARIO_KEYS: [&str; 7] = ["owner_mode", "assign_mode", "k", "alpha", "m", "beta", "small_table_threshold"];

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchMatrix {
    pub base: RunConfig,
    #[serde(default)]
    pub sweep: BTreeMap<String, Vec<toml::Value>>,
    /// Run cells on a thread pool; runtimes are then not comparable.
    #[serde(default)]
    pub parallel: bool,
    /// Method whose allocation serves as the exact reference for error rates.
    #[serde(default)]
    pub reference: Option<Method>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub cell: usize,
    pub params: BTreeMap<String, String>,
    pub report: RunReport,
}

/// One expanded cell.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub params: BTreeMap<String, String>,
    pub config: RunConfig,
}

impl BenchMatrix {
    /// Reads a matrix; relative paths in `base` resolve against the file's
    /// directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(io(path))?;
        let mut m: BenchMatrix = toml::from_str(&text).map_err(|e| format(path, e))?;
        let dir = path.parent().unwrap_or(Path::new("."));
        let resolve = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = dir.join(&*p);
            }
        };
        resolve(&mut m.base.plan);
        m.base.manifest.as_mut().map(resolve);
        m.base.dataset.iter_mut().for_each(resolve);
        Ok(m)
    }

    pub fn cells(&self) -> Result<Vec<Cell>> {
        let base = toml::Value::try_from(&self.base).map_err(|e| Error::Config(e.to_string()))?;
        let mut cells = vec![(BTreeMap::new(), base)];
        for (key, values) in &self.sweep {
            if values.is_empty() {
                return Err(Error::Config(format!("sweep {key:?} has no values")));
            }
            let path: Vec<&str> = match key.strip_prefix("scenario.") {
                Some(field) => vec!["scenario", field],
                None if SCENARIO_KEYS.contains(&key.as_str()) => vec!["scenario", key],
                None => vec![key],
            };
            let path = &path;
            cells = cells
                .into_iter()
                .flat_map(|(params, cfg)| {
                    values.iter().map(move |v| {
                        let mut params = params.clone();
                        params.insert(key.clone(), render(v));
                        let mut cfg = cfg.clone();
                        set_path(&mut cfg, path, v.clone());
                        (params, cfg)
                    })
                })
                .collect();
        }
        cells
            .into_iter()
            .map(|(params, cfg)| {
                let config: RunConfig = cfg.try_into().map_err(|e: toml::de::Error| {
                    Error::Config(format!("cell {params:?}: {}", e.message()))
                })?;
                config.validate()?;
                Ok(Cell { params, config })
            })
            .collect()
    }
}

fn render(v: &toml::Value) -> String {
    match v {
        toml::Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn set_path(root: &mut toml::Value, path: &[&str], v: toml::Value) {
    let mut cur = root;
    for (i, seg) in path.iter().enumerate() {
        let table = match cur {
            toml::Value::Table(t) => t,
            other => {
                *other = toml::Value::Table(Default::default());
                other.as_table_mut().expect("just set")
            }
        };
        if i + 1 == path.len() {
            table.insert(seg.to_string(), v);
            return;
        }
        cur = table.entry(seg.to_string()).or_insert_with(|| toml::Value::Table(Default::default()));
    }
}

type Inputs = std::result::Result<(Arc<CoalitionPlan>, Arc<Vec<OwnedTable>>), String>;

/// Runs every cell. Inputs (ingestion, owner assignment, reference
/// allocations) are prepared first and shared between cells, so the
/// measured runtimes cover the method only. A failing cell is recorded and
/// the matrix continues.
pub fn run_matrix(m: &BenchMatrix) -> Result<Vec<BenchRow>> {
    let cells = m.cells()?;
    let mut ingested: HashMap<Vec<PathBuf>, std::result::Result<Arc<Vec<_>>, String>> = HashMap::new();
    let mut data: HashMap<String, Inputs> = HashMap::new();
    let mut references: HashMap<String, Option<Allocation>> = HashMap::new();
    let mut prepared = Vec::with_capacity(cells.len());
    for cell in &cells {
        let key = data_key(&cell.config);
        if !data.contains_key(&key) {
            let inputs = prepare(&cell.config, &mut ingested);
            data.insert(key.clone(), inputs);
        }
        let inputs = data[&key].clone();
        let reference = match (m.reference, &inputs) {
            (Some(method), Ok((plan, tables))) if method != cell.config.method => references
                .entry(key)
                .or_insert_with(|| {
                    let timeout = Duration::from_secs_f64(cell.config.timeout);
                    let r = execute(plan.clone(), tables.clone(), method, &cell.config.knobs(), timeout, None);
                    r.exact_allocation()
                })
                .clone(),
            _ => None,
        };
        prepared.push((cell, inputs, reference));
    }

    let run_cell = |(i, (cell, inputs, reference)): (usize, &(&Cell, Inputs, Option<Allocation>))| {
        let cfg = &cell.config;
        let report = match inputs {
            Ok((plan, tables)) => execute(
                plan.clone(),
                tables.clone(),
                cfg.method,
                &cfg.knobs(),
                Duration::from_secs_f64(cfg.timeout),
                reference.as_ref(),
            ),
            Err(msg) => {
                let mut r = RunReport::new(cfg.method, 0);
                r.status = Status::Error;
                r.error = Some(msg.clone());
                r
            }
        };
        BenchRow { cell: i, params: cell.params.clone(), report }
    };
    Ok(if m.parallel {
        prepared.par_iter().enumerate().map(run_cell).collect()
    } else {
        prepared.iter().enumerate().map(run_cell).collect()
    })
}

fn data_key(cfg: &RunConfig) -> String {
    let scenario = if cfg.manifest.is_some() { String::new() } else { format!("{:?}", cfg.scenario) };
    format!("{:?}|{:?}|{:?}|{scenario}", cfg.plan, cfg.manifest, cfg.dataset)
}

fn prepare(
    cfg: &RunConfig,
    ingested: &mut HashMap<Vec<PathBuf>, std::result::Result<Arc<Vec<iusv_core::datagen::Table>>, String>>,
) -> Inputs {
    let plan = load_plan(&cfg.plan).map_err(|e| e.to_string())?;
    let tables = if cfg.manifest.is_some() {
        cfg.load_tables().map_err(|e| e.to_string())?
    } else {
        let source = ingested
            .entry(cfg.dataset.clone())
            .or_insert_with(|| ingest_csv(&cfg.dataset).map(Arc::new).map_err(|e| e.to_string()))
            .clone()?;
        iusv_core::datagen::assign(&source, &cfg.scenario).map_err(|e| e.to_string())?.owned_tables()
    };
    Ok((Arc::new(plan), Arc::new(tables)))
}

pub const CSV_COLUMNS: [&str; 12] = [
    "method",
    "status",
    "owners",
    "coalition_tuples",
    "runtime_seconds",
    "assemble_seconds",
    "evaluations",
    "error_rate",
    "umos_rate",
    "sc_rate",
    "sl_rate",
    "error",
];

/// One line per cell: the cell index, the swept parameters not already in
/// [`CSV_COLUMNS`], then those columns. Missing values are empty.
pub fn rows_to_csv(rows: &[BenchRow]) -> String {
    let keys: Vec<&String> = rows
        .first()
        .map(|r| r.params.keys().filter(|k| !CSV_COLUMNS.contains(&k.as_str())).collect())
        .unwrap_or_default();
    let mut w = csv::Writer::from_writer(Vec::new());
    let header = std::iter::once("cell").chain(keys.iter().map(|k| k.as_str())).chain(CSV_COLUMNS);
    w.write_record(header).expect("in-memory write");
    let opt = |v: Option<String>| v.unwrap_or_default();
    for row in rows {
        let r = &row.report;
        let mut rec = vec![row.cell.to_string()];
        rec.extend(keys.iter().map(|k| row.params.get(*k).cloned().unwrap_or_default()));
        rec.extend([
            r.method.to_string(),
            r.status.to_string(),
            r.owners.to_string(),
            opt(r.coalition_tuples.map(|v| v.to_string())),
            r.runtime_seconds.to_string(),
            opt(r.assemble_seconds.map(|v| v.to_string())),
            opt(r.metadata.evaluations.map(|v| v.to_string())),
            opt(r.metrics.error_rate.map(|v| v.to_string())),
            opt(r.metrics.umos_rate.map(|v| v.to_string())),
            opt(r.metrics.sc_rate.map(|v| v.to_string())),
            opt(r.metrics.sl_rate.map(|v| v.to_string())),
            opt(r.error.clone()),
        ]);
        w.write_record(&rec).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory write")).expect("utf-8 input")
}
