//! On-disk formats: plans, scenarios, generated assignments (one CSV per
//! owner and table plus `manifest.json`), and coalition-set dumps.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use iusv_core::datagen::{AssignmentScenario, OwnerAssignment, ASSIGN_RNG};
use iusv_core::{minimalize, CoalitionPlan, CoalitionSet, CoalitionTuple, OwnedTable, OwnerId, OwnerSet, Utility, Value};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{format, io, Result};
use crate::ingest::{read_table, write_table};

pub const MANIFEST: &str = "manifest.json";

/// Reads JSON, or TOML when the extension is `.toml`.
pub fn read_config<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(io(path))?;
    if path.extension().is_some_and(|e| e == "toml") {
        toml::from_str(&text).map_err(|e| format(path, e))
    } else {
        serde_json::from_str(&text).map_err(|e| format(path, e))
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let file = File::create(path).map_err(io(path))?;
    serde_json::to_writer_pretty(BufWriter::new(file), value).map_err(|e| format(path, e))
}

pub fn load_plan(path: &Path) -> Result<CoalitionPlan> {
    read_config(path)
}

pub fn load_scenario(path: &Path) -> Result<AssignmentScenario> {
    let sc: AssignmentScenario = read_config(path)?;
    sc.validate()?;
    Ok(sc)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub rng: String,
    pub scenario: AssignmentScenario,
    pub owners: usize,
    pub tables: Vec<ManifestTable>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestTable {
    pub name: String,
    pub schema: Vec<String>,
    pub source_rows: usize,
    pub parts: Vec<ManifestPart>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestPart {
    pub owner: OwnerId,
    /// Relative to the manifest's directory.
    pub file: PathBuf,
    pub rows: usize,
}

/// Writes `<table>.<owner>.csv` per owner table and the manifest into `dir`.
pub fn write_assignment(dir: &Path, assignment: &OwnerAssignment, scenario: &AssignmentScenario) -> Result<Manifest> {
    fs::create_dir_all(dir).map_err(io(dir))?;
    let mut tables = Vec::new();
    for t in &assignment.tables {
        let mut parts = Vec::new();
        for part in &t.parts {
            let file = PathBuf::from(format!("{}.{}.csv", t.name, part.owner()));
            let path = dir.join(&file);
            let out = File::create(&path).map_err(io(&path))?;
            write_table(BufWriter::new(out), part.schema(), part.rows()).map_err(|e| format(&path, e))?;
            parts.push(ManifestPart { owner: part.owner(), file, rows: part.rows().len() });
        }
        tables.push(ManifestTable { name: t.name.clone(), schema: t.schema.clone(), source_rows: t.source_rows, parts });
    }
    let manifest = Manifest { rng: ASSIGN_RNG.into(), scenario: scenario.clone(), owners: assignment.owners, tables };
    write_json(&dir.join(MANIFEST), &manifest)?;
    Ok(manifest)
}

/// Loads the owner tables listed in a manifest.
pub fn read_assignment(manifest_path: &Path) -> Result<(Manifest, Vec<OwnedTable>)> {
    let manifest: Manifest = read_config(manifest_path)?;
    let dir = manifest_path.parent().unwrap_or(Path::new("."));
    let mut out = Vec::new();
    for t in &manifest.tables {
        for part in &t.parts {
            let path = dir.join(&part.file);
            let file = File::open(&path).map_err(io(&path))?;
            let (table, _) = read_table(file, &t.name, &path)?;
            if table.schema != t.schema {
                return Err(format(&path, format!("header {:?} differs from manifest schema {:?}", table.schema, t.schema)));
            }
            if part.owner.index() >= manifest.owners {
                return Err(format(manifest_path, format!("owner {} outside {} owners", part.owner, manifest.owners)));
            }
            out.push(OwnedTable::new(part.owner, t.name.clone(), table.schema, table.rows)?);
        }
    }
    Ok((manifest, out))
}

/// JSON form of a coalition set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoalitionDump {
    pub owners: usize,
    pub schema: Vec<String>,
    pub tuples: Vec<DumpTuple>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DumpTuple {
    pub values: Vec<Value>,
    pub utility: Utility,
    pub syntheses: Vec<Vec<OwnerId>>,
}

impl From<&CoalitionSet> for CoalitionDump {
    fn from(d: &CoalitionSet) -> Self {
        CoalitionDump {
            owners: d.owners(),
            schema: d.schema().to_vec(),
            tuples: d
                .tuples()
                .iter()
                .map(|t| DumpTuple {
                    values: t.values.clone(),
                    utility: t.utility.clone(),
                    syntheses: t.syntheses.iter().map(|s| s.iter().collect()).collect(),
                })
                .collect(),
        }
    }
}

impl CoalitionDump {
    pub fn into_coalition_set(self) -> iusv_core::Result<CoalitionSet> {
        let n = self.owners;
        let tuples = self
            .tuples
            .into_iter()
            .map(|t| {
                let sets = t
                    .syntheses
                    .into_iter()
                    .map(|s| OwnerSet::from_owners(n, s))
                    .collect::<iusv_core::Result<Vec<_>>>()?;
                Ok(CoalitionTuple { values: t.values, utility: t.utility, syntheses: minimalize(sets)? })
            })
            .collect::<iusv_core::Result<Vec<_>>>()?;
        CoalitionSet::new(n, self.schema, tuples)
    }
}
