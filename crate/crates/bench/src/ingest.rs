//! CSV tables.
//!
//! The first record is the header. A header cell may carry a type suffix,
//! `name:string`, `name:int` or `name:decimal`; unannotated columns are
//! inferred per cell (integer, then decimal, then string). Strings are
//! trimmed and numbers normalized, so `007`, ` 7` and `7.000` are all `7`.

use std::fs::File;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use iusv_core::datagen::Table;
use iusv_core::{Row, Value};

use crate::error::{format, io, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColumnType {
    String,
    Integer,
    Decimal,
    Inferred,
}

impl ColumnType {
    fn suffix(self) -> Option<&'static str> {
        match self {
            ColumnType::String => Some("string"),
            ColumnType::Integer => Some("int"),
            ColumnType::Decimal => Some("decimal"),
            ColumnType::Inferred => None,
        }
    }

    fn parse(self, raw: &str) -> Option<Value> {
        match self {
            ColumnType::String => Some(Value::str(raw)),
            ColumnType::Integer => Value::parse_int(raw),
            ColumnType::Decimal => Value::parse_decimal(raw),
            ColumnType::Inferred => Some(Value::infer(raw)),
        }
    }
}

/// Splits `name:type` into its parts; cells without a known type suffix are
/// plain names.
pub fn parse_header_cell(cell: &str) -> (String, ColumnType) {
    let cell = cell.trim();
    if let Some((name, ty)) = cell.rsplit_once(':') {
        let ty = match ty.trim().to_ascii_lowercase().as_str() {
            "string" | "str" | "text" => Some(ColumnType::String),
            "int" | "integer" => Some(ColumnType::Integer),
            "decimal" | "numeric" => Some(ColumnType::Decimal),
            _ => None,
        };
        if let Some(ty) = ty {
            return (name.trim().to_string(), ty);
        }
    }
    (cell.to_string(), ColumnType::Inferred)
}

/// Reads one table; `origin` names the source in diagnostics.
pub fn read_table(reader: impl Read, name: &str, origin: &Path) -> Result<(Table, Vec<ColumnType>)> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).flexible(true).from_reader(reader);
    let mut records = rdr.records();
    let header = match records.next() {
        Some(rec) => rec.map_err(|e| csv_error(origin, e))?,
        None => return Err(format(origin, "missing header row")),
    };
    let (schema, types): (Vec<String>, Vec<ColumnType>) = header.iter().map(parse_header_cell).unzip();
    if schema.iter().any(String::is_empty) {
        return Err(Error::Parse { path: origin.into(), line: 1, msg: "empty column name".into() });
    }
    let mut rows = Vec::new();
    for rec in records {
        let rec = rec.map_err(|e| csv_error(origin, e))?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != schema.len() {
            return Err(Error::Parse {
                path: origin.into(),
                line,
                msg: format!("expected {} fields, found {}", schema.len(), rec.len()),
            });
        }
        let row = rec
            .iter()
            .zip(&types)
            .zip(&schema)
            .map(|((raw, ty), col)| {
                ty.parse(raw).ok_or_else(|| Error::Parse {
                    path: origin.into(),
                    line,
                    msg: format!("column {col:?}: cannot parse {raw:?} as {}", ty.suffix().unwrap_or("value")),
                })
            })
            .collect::<Result<Row>>()?;
        rows.push(row);
    }
    Ok((Table { name: name.to_string(), schema, rows }, types))
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    Error::Parse { path: path.into(), line, msg: e.to_string() }
}

/// Loads CSV files as tables named after the file stems.
pub fn ingest_csv(paths: &[PathBuf]) -> Result<Vec<Table>> {
    paths.iter().map(|p| ingest_file(p, &table_name(p)?)).collect()
}

pub fn ingest_file(path: &Path, name: &str) -> Result<Table> {
    let file = File::open(path).map_err(io(path))?;
    Ok(read_table(file, name, path)?.0)
}

pub(crate) fn table_name(path: &Path) -> Result<String> {
    path.file_stem()
        .and_then(|s| s.to_str())
        .map(str::to_string)
        .ok_or_else(|| format(path, "cannot derive a table name from the file name"))
}

/// Annotates every column whose values share one kind, so that reading the
/// file back reproduces the values exactly.
pub fn column_types(arity: usize, rows: &[Row]) -> Vec<ColumnType> {
    (0..arity)
        .map(|i| {
            let mut kinds = rows.iter().map(|r| match &r[i] {
                Value::Int(_) => ColumnType::Integer,
                Value::Decimal(_) => ColumnType::Decimal,
                Value::Str(_) => ColumnType::String,
            });
            match kinds.next() {
                Some(first) if kinds.all(|k| k == first) => first,
                _ => ColumnType::Inferred,
            }
        })
        .collect()
}

pub fn write_table(writer: impl Write, schema: &[String], rows: &[Row]) -> csv::Result<()> {
    let types = column_types(schema.len(), rows);
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(schema.iter().zip(&types).map(|(name, ty)| match ty.suffix() {
        Some(s) => format!("{name}:{s}"),
        None => name.clone(),
    }))?;
    for row in rows {
        w.write_record(row.iter().map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}
