//! Run reports. JSON is the canonical form; the CSV form is a long
//! `section,key,value` table that parses back into the same report.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use iusv_core::shapley::CaseStats;
use iusv_core::{Allocation, OwnerId, Utility};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Trad,
    Perm,
    Iusv,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Trad => "trad",
            Method::Perm => "perm",
            Method::Iusv => "iusv",
        })
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "trad" => Ok(Method::Trad),
            "perm" => Ok(Method::Perm),
            "iusv" => Ok(Method::Iusv),
            _ => Err(format!("unknown method {s:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Timeout,
    Error,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Ok => "ok",
            Status::Timeout => "timeout",
            Status::Error => "error",
        })
    }
}

impl FromStr for Status {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "ok" => Ok(Status::Ok),
            "timeout" => Ok(Status::Timeout),
            "error" => Ok(Status::Error),
            _ => Err(format!("unknown status {s:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OwnerShare {
    pub owner: OwnerId,
    pub exact: Utility,
    pub value: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rng: Option<String>,
    /// Plan executions made by the trad/perm evaluator.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub evaluations: Option<u64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error_rate: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub umos_rate: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sc_rate: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sl_rate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub method: Method,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub owners: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coalition_tuples: Option<usize>,
    pub runtime_seconds: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub assemble_seconds: Option<f64>,
    pub metadata: Metadata,
    pub metrics: Metrics,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cases: Option<CaseStats>,
    #[serde(default)]
    pub allocation: Vec<OwnerShare>,
}

impl RunReport {
    pub fn new(method: Method, owners: usize) -> Self {
        RunReport {
            method,
            status: Status::Ok,
            error: None,
            owners,
            coalition_tuples: None,
            runtime_seconds: 0.0,
            assemble_seconds: None,
            metadata: Metadata::default(),
            metrics: Metrics::default(),
            cases: None,
            allocation: Vec::new(),
        }
    }

    pub fn set_allocation(&mut self, a: &Allocation) {
        self.allocation =
            a.iter().map(|(owner, v)| OwnerShare { owner, exact: v.clone(), value: v.to_f64() }).collect();
    }

    /// The exact allocation, if the run produced one.
    pub fn exact_allocation(&self) -> Option<Allocation> {
        if self.status != Status::Ok {
            return None;
        }
        let mut values = vec![Utility::zero(); self.owners];
        for s in &self.allocation {
            *values.get_mut(s.owner.index())? = s.exact.clone();
        }
        Some(Allocation::from_values(values))
    }

    /// Same report with the wall-clock fields zeroed.
    pub fn without_timings(&self) -> Self {
        RunReport { runtime_seconds: 0.0, assemble_seconds: self.assemble_seconds.map(|_| 0.0), ..self.clone() }
    }

    pub fn to_csv(&self) -> String {
        let mut rows: Vec<(&str, String, String)> = Vec::new();
        let mut put = |section: &'static str, key: &str, value: String| rows.push((section, key.to_string(), value));
        put("run", "method", self.method.to_string());
        put("run", "status", self.status.to_string());
        if let Some(e) = &self.error {
            put("run", "error", e.clone());
        }
        put("run", "owners", self.owners.to_string());
        if let Some(n) = self.coalition_tuples {
            put("run", "coalition_tuples", n.to_string());
        }
        put("run", "runtime_seconds", self.runtime_seconds.to_string());
        if let Some(s) = self.assemble_seconds {
            put("run", "assemble_seconds", s.to_string());
        }
        for (section, value) in [("meta", json_map(&self.metadata)), ("metric", json_map(&self.metrics))] {
            for (k, v) in value {
                put(section, &k, v);
            }
        }
        if let Some(c) = &self.cases {
            for (k, v) in json_map(c) {
                put("case", &k, v);
            }
        }
        for s in &self.allocation {
            put("allocation", &s.owner.to_string(), s.exact.to_string());
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["section", "key", "value"]).expect("in-memory write");
        for (s, k, v) in rows {
            w.write_record([s, &k, &v]).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory write")).expect("utf-8 input")
    }

    pub fn from_csv(text: &str) -> Result<Self, String> {
        let mut rdr = csv::Reader::from_reader(text.as_bytes());
        let mut run = BTreeMap::new();
        let mut sections: BTreeMap<String, serde_json::Map<String, serde_json::Value>> = BTreeMap::new();
        let mut allocation = Vec::new();
        for rec in rdr.records() {
            let rec = rec.map_err(|e| e.to_string())?;
            let [section, key, value] = [0, 1, 2].map(|i| rec.get(i).unwrap_or_default().to_string());
            match section.as_str() {
                "run" => {
                    run.insert(key, value);
                }
                "allocation" => {
                    let owner = key
                        .strip_prefix('u')
                        .and_then(|n| n.parse().ok())
                        .map(OwnerId)
                        .ok_or_else(|| format!("bad owner {key:?}"))?;
                    let exact: Utility = value.parse().map_err(|e| format!("{key}: {e}"))?;
                    allocation.push(OwnerShare { owner, value: exact.to_f64(), exact });
                }
                "meta" | "metric" | "case" => {
                    let v = if key == "rng" {
                        serde_json::Value::String(value)
                    } else {
                        serde_json::from_str(&value).map_err(|e| format!("{section}.{key}: {e}"))?
                    };
                    sections.entry(section).or_default().insert(key, v);
                }
                _ => return Err(format!("unknown section {section:?}")),
            }
        }
        let take = |k: &str| run.get(k).ok_or_else(|| format!("missing run.{k}"));
        let parse = |k: &str| -> Result<Option<f64>, String> {
            run.get(k).map(|v| v.parse::<f64>().map_err(|e| format!("run.{k}: {e}"))).transpose()
        };
        let section = |name: &str| serde_json::Value::Object(sections.get(name).cloned().unwrap_or_default());
        Ok(RunReport {
            method: take("method")?.parse()?,
            status: take("status")?.parse()?,
            error: run.get("error").cloned(),
            owners: take("owners")?.parse().map_err(|e| format!("run.owners: {e}"))?,
            coalition_tuples: run
                .get("coalition_tuples")
                .map(|v| v.parse().map_err(|e| format!("run.coalition_tuples: {e}")))
                .transpose()?,
            runtime_seconds: parse("runtime_seconds")?.ok_or("missing run.runtime_seconds")?,
            assemble_seconds: parse("assemble_seconds")?,
            metadata: serde_json::from_value(section("meta")).map_err(|e| e.to_string())?,
            metrics: serde_json::from_value(section("metric")).map_err(|e| e.to_string())?,
            cases: match sections.get("case") {
                Some(_) => Some(serde_json::from_value(section("case")).map_err(|e| e.to_string())?),
                None => None,
            },
            allocation,
        })
    }
}

fn json_map<T: Serialize>(value: &T) -> Vec<(String, String)> {
    match serde_json::to_value(value).expect("plain data") {
        serde_json::Value::Object(m) => m
            .into_iter()
            .map(|(k, v)| match v {
                serde_json::Value::String(s) => (k, s),
                other => (k, other.to_string()),
            })
            .collect(),
        _ => Vec::new(),
    }
}
