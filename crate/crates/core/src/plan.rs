//! Coalition plans: positive relational algebra over logical tables.
//!
//! Plans serialize as an externally tagged JSON tree:
//!
//! ```json
//! {"union": [
//!   {"project": {"attrs": ["cpi", "company"],
//!                "input": {"join": {"left": {"scan": {"table": "R1"}},
//!                                   "right": {"scan": {"table": "R3"}}}}}},
//!   {"project": {"attrs": ["cpi", "company"],
//!                "input": {"join": {"left": {"scan": {"table": "R2"}},
//!                                   "right": {"scan": {"table": "R3"}}}}}}
//! ]}
//! ```
//!
//! A `join` without `on` is a natural join on the shared attribute names; with
//! `on: [["l", "r"], ...]` it is an equi-join that keeps both sides' columns.
//! `scan` accepts an `alias` (attributes become `alias.attr`) and a `filter`
//! list of constant equality predicates. `union` is positional; its output
//! takes the first child's attribute names.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::value::Value;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoalitionPlan {
    Scan(Scan),
    Project {
        attrs: Vec<String>,
        input: Box<CoalitionPlan>,
    },
    Join {
        left: Box<CoalitionPlan>,
        right: Box<CoalitionPlan>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        on: Option<Vec<(String, String)>>,
    },
    Union(Vec<CoalitionPlan>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scan {
    pub table: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alias: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub filter: Vec<Predicate>,
}

/// `attr = eq`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Predicate {
    pub attr: String,
    pub eq: Value,
}

impl CoalitionPlan {
    pub fn scan(table: impl Into<String>) -> Self {
        CoalitionPlan::Scan(Scan { table: table.into(), alias: None, filter: Vec::new() })
    }

    pub fn scan_as(table: impl Into<String>, alias: impl Into<String>) -> Self {
        CoalitionPlan::Scan(Scan { table: table.into(), alias: Some(alias.into()), filter: Vec::new() })
    }

    pub fn filter(mut self, attr: impl Into<String>, eq: impl Into<Value>) -> Self {
        match &mut self {
            CoalitionPlan::Scan(scan) => scan.filter.push(Predicate { attr: attr.into(), eq: eq.into() }),
            _ => panic!("filters attach to scans only"),
        }
        self
    }

    pub fn project<S: Into<String>>(self, attrs: impl IntoIterator<Item = S>) -> Self {
        CoalitionPlan::Project { attrs: attrs.into_iter().map(Into::into).collect(), input: Box::new(self) }
    }

    pub fn join(self, right: CoalitionPlan) -> Self {
        CoalitionPlan::Join { left: Box::new(self), right: Box::new(right), on: None }
    }

    pub fn equi_join<L: Into<String>, R: Into<String>>(
        self,
        right: CoalitionPlan,
        on: impl IntoIterator<Item = (L, R)>,
    ) -> Self {
        CoalitionPlan::Join {
            left: Box::new(self),
            right: Box::new(right),
            on: Some(on.into_iter().map(|(l, r)| (l.into(), r.into())).collect()),
        }
    }

    pub fn union(children: impl IntoIterator<Item = CoalitionPlan>) -> Self {
        CoalitionPlan::Union(children.into_iter().collect())
    }

    /// Logical table names referenced by the plan, in first-use order.
    pub fn tables(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_tables(&mut out);
        out
    }

    fn collect_tables<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            CoalitionPlan::Scan(s) => {
                if !out.contains(&s.table.as_str()) {
                    out.push(&s.table);
                }
            }
            CoalitionPlan::Project { input, .. } => input.collect_tables(out),
            CoalitionPlan::Join { left, right, .. } => {
                left.collect_tables(out);
                right.collect_tables(out);
            }
            CoalitionPlan::Union(cs) => cs.iter().for_each(|c| c.collect_tables(out)),
        }
    }

    /// Type-checks the plan and resolves attribute names to column indices.
    /// `schema_of` returns the schema of a logical table.
    pub(crate) fn bind<'s>(&self, schema_of: &impl Fn(&str) -> Option<&'s [String]>) -> Result<Bound> {
        Ok(match self {
            CoalitionPlan::Scan(scan) => {
                let schema = schema_of(&scan.table)
                    .ok_or_else(|| Error::plan(format!("unknown table {:?}", scan.table)))?;
                let mut filter = Vec::with_capacity(scan.filter.len());
                for p in &scan.filter {
                    let col = position(schema, &p.attr)
                        .ok_or_else(|| Error::plan(format!("attribute {:?} not in table {:?}", p.attr, scan.table)))?;
                    filter.push((col, p.eq.clone()));
                }
                let schema = match &scan.alias {
                    Some(a) => schema.iter().map(|c| format!("{a}.{c}")).collect(),
                    None => schema.to_vec(),
                };
                Bound { schema, op: BoundOp::Scan { table: scan.table.clone(), filter } }
            }
            CoalitionPlan::Project { attrs, input } => {
                let input = input.bind(schema_of)?;
                let mut cols = Vec::with_capacity(attrs.len());
                for (i, a) in attrs.iter().enumerate() {
                    if attrs[..i].contains(a) {
                        return Err(Error::plan(format!("attribute {a:?} projected twice")));
                    }
                    cols.push(position(&input.schema, a).ok_or_else(|| not_found(a, &input.schema))?);
                }
                Bound { schema: attrs.clone(), op: BoundOp::Project { cols, input: Box::new(input) } }
            }
            CoalitionPlan::Join { left, right, on } => {
                let left = left.bind(schema_of)?;
                let right = right.bind(schema_of)?;
                let (keys, right_keep): (Vec<(usize, usize)>, Vec<usize>) = match on {
                    None => {
                        let keys: Vec<_> = left
                            .schema
                            .iter()
                            .enumerate()
                            .filter_map(|(li, a)| position(&right.schema, a).map(|ri| (li, ri)))
                            .collect();
                        let keep =
                            (0..right.schema.len()).filter(|ri| keys.iter().all(|&(_, k)| k != *ri)).collect();
                        (keys, keep)
                    }
                    Some(pairs) => {
                        let mut keys = Vec::with_capacity(pairs.len());
                        for (l, r) in pairs {
                            let li = position(&left.schema, l).ok_or_else(|| not_found(l, &left.schema))?;
                            let ri = position(&right.schema, r).ok_or_else(|| not_found(r, &right.schema))?;
                            keys.push((li, ri));
                        }
                        (keys, (0..right.schema.len()).collect())
                    }
                };
                let mut schema = left.schema.clone();
                for &ri in &right_keep {
                    let name = &right.schema[ri];
                    if schema.contains(name) {
                        return Err(Error::plan(format!(
                            "ambiguous attribute {name:?} in join output; alias one side"
                        )));
                    }
                    schema.push(name.clone());
                }
                Bound {
                    schema,
                    op: BoundOp::Join { keys, right_keep, left: Box::new(left), right: Box::new(right) },
                }
            }
            CoalitionPlan::Union(children) => {
                if children.is_empty() {
                    return Err(Error::plan("union without inputs"));
                }
                let children = children.iter().map(|c| c.bind(schema_of)).collect::<Result<Vec<_>>>()?;
                let arity = children[0].schema.len();
                if let Some(bad) = children.iter().find(|c| c.schema.len() != arity) {
                    return Err(Error::plan(format!(
                        "union inputs disagree: {:?} vs {:?}",
                        children[0].schema, bad.schema
                    )));
                }
                Bound { schema: children[0].schema.clone(), op: BoundOp::Union(children) }
            }
        })
    }
}

fn position(schema: &[String], attr: &str) -> Option<usize> {
    schema.iter().position(|a| a == attr)
}

fn not_found(attr: &str, schema: &[String]) -> Error {
    Error::plan(format!("attribute {attr:?} not found in {schema:?}"))
}

#[derive(Debug, Clone)]
pub(crate) struct Bound {
    pub schema: Vec<String>,
    pub op: BoundOp,
}

#[derive(Debug, Clone)]
pub(crate) enum BoundOp {
    Scan { table: String, filter: Vec<(usize, Value)> },
    Project { cols: Vec<usize>, input: Box<Bound> },
    Join { keys: Vec<(usize, usize)>, right_keep: Vec<usize>, left: Box<Bound>, right: Box<Bound> },
    Union(Vec<Bound>),
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    fn catalog() -> Vec<(&'static str, Vec<String>)> {
        let names = |xs: &[&str]| xs.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        vec![
            ("R1", names(&["cpi", "product"])),
            ("R3", names(&["product", "brand", "company"])),
            ("F", names(&["person1", "person2"])),
        ]
    }

    fn bind(p: &CoalitionPlan) -> Result<Bound> {
        let cat = catalog();
        p.bind(&|n: &str| cat.iter().find(|(t, _)| *t == n).map(|(_, s)| s.as_slice()))
    }

    #[test]
    fn natural_join_schema() {
        let p = CoalitionPlan::scan("R1").join(CoalitionPlan::scan("R3")).project(["cpi", "company"]);
        let b = bind(&p).unwrap();
        assert_eq!(b.schema, ["cpi", "company"]);
    }

    #[test]
    fn errors() {
        let unknown = bind(&CoalitionPlan::scan("nope")).unwrap_err();
        assert!(matches!(unknown, Error::Plan(_)));
        let missing = bind(&CoalitionPlan::scan("R1").project(["brand"])).unwrap_err();
        assert!(matches!(missing, Error::Plan(_)));
        let arity = bind(&CoalitionPlan::union([CoalitionPlan::scan("R1"), CoalitionPlan::scan("R3")]));
        assert!(arity.is_err());
        let ambiguous = CoalitionPlan::scan("F").equi_join(CoalitionPlan::scan("F"), [("person2", "person1")]);
        assert!(bind(&ambiguous).is_err());
        let aliased =
            CoalitionPlan::scan_as("F", "a").equi_join(CoalitionPlan::scan_as("F", "b"), [("a.person2", "b.person1")]);
        assert_eq!(bind(&aliased).unwrap().schema, ["a.person1", "a.person2", "b.person1", "b.person2"]);
        let bad_filter = CoalitionPlan::scan("R1").filter("zzz", 1);
        assert!(bind(&bad_filter).is_err());
    }

    #[test]
    fn json_shape() {
        let p = CoalitionPlan::union([
            CoalitionPlan::scan("R1").filter("cpi", "#1"),
            CoalitionPlan::scan_as("R1", "x").equi_join(CoalitionPlan::scan("R3"), [("x.product", "product")]),
        ]);
        let json = serde_json::to_string(&p).unwrap();
        assert!(json.starts_with(r##"{"union":[{"scan":{"table":"R1","filter":[{"attr":"cpi","eq":"#1"}]}}"##));
        let back: CoalitionPlan = serde_json::from_str(&json).unwrap();
        assert_eq!(back, p);
        assert_eq!(p.tables(), ["R1", "R3"]);
    }
}
