//! Single method runs with a wall-clock timeout.

use std::path::PathBuf;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{mpsc, Arc};
use std::time::{Duration, Instant};

use iusv_core::assemble::{AssembleConfig, Assembler, UnitUtility};
use iusv_core::baselines::{perm_shapley_with, trad_shapley_with, PermConfig, UtilityEvaluator, PERM_RNG};
use iusv_core::datagen::{assign, AssignmentScenario};
use iusv_core::metrics::{compute_case_rates, compute_error_rate};
use iusv_core::shapley::iusv_all_with;
use iusv_core::{Allocation, CoalitionPlan, IusvConfig, OwnedTable, OwnerSet};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::files::{load_plan, read_assignment};
use crate::ingest::ingest_csv;
use crate::report::{Method, RunReport, Status};

pub const DEFAULT_TIMEOUT_SECS: f64 = 7200.0;

/// One run: where the owner tables come from, the plan, and the method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// A manifest written by `gen`; exclusive with `dataset`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub manifest: Option<PathBuf>,
    /// CSV files split among owners according to `scenario`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub dataset: Vec<PathBuf>,
    #[serde(default)]
    pub scenario: AssignmentScenario,
    pub plan: PathBuf,
    pub method: Method,
    #[serde(default = "default_samples")]
    pub samples: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    #[serde(default = "default_timeout")]
    pub timeout: f64,
}

fn default_timeout() -> f64 {
    DEFAULT_TIMEOUT_SECS
}

fn default_samples() -> u64 {
    MethodKnobs::default().samples
}

fn default_gamma() -> f64 {
    MethodKnobs::default().gamma
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodKnobs {
    pub samples: u64,
    pub seed: u64,
    pub gamma: f64,
}

impl Default for MethodKnobs {
    fn default() -> Self {
        MethodKnobs { samples: 16, seed: 0, gamma: 1.0 }
    }
}

impl RunConfig {
    pub fn knobs(&self) -> MethodKnobs {
        MethodKnobs { samples: self.samples, seed: self.seed, gamma: self.gamma }
    }

    pub fn validate(&self) -> Result<()> {
        match (&self.manifest, self.dataset.is_empty()) {
            (Some(_), false) => return Err(Error::Config("give either a manifest or a dataset, not both".into())),
            (None, true) => return Err(Error::Config("no manifest or dataset given".into())),
            _ => {}
        }
        if !(self.timeout > 0.0 && self.timeout.is_finite()) {
            return Err(Error::Config(format!("timeout must be positive, got {}", self.timeout)));
        }
        if self.method == Method::Perm && self.samples == 0 {
            return Err(Error::Config("perm needs at least one sample".into()));
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(Error::Config(format!("gamma must be a positive real, got {}", self.gamma)));
        }
        if self.manifest.is_none() {
            self.scenario.validate()?;
        }
        Ok(())
    }

    /// Owner tables for this run.
    pub fn load_tables(&self) -> Result<Vec<OwnedTable>> {
        match &self.manifest {
            Some(m) => Ok(read_assignment(m)?.1),
            None => Ok(assign(&ingest_csv(&self.dataset)?, &self.scenario)?.owned_tables()),
        }
    }
}

/// Loads the inputs named by `cfg` and runs it.
pub fn run(cfg: &RunConfig, reference: Option<&Allocation>) -> Result<RunReport> {
    cfg.validate()?;
    let plan = load_plan(&cfg.plan)?;
    let tables = cfg.load_tables()?;
    Ok(execute(
        Arc::new(plan),
        Arc::new(tables),
        cfg.method,
        &cfg.knobs(),
        Duration::from_secs_f64(cfg.timeout),
        reference,
    ))
}

/// Runs `method` on a worker thread. When `timeout` passes first the worker
/// is told to stop and a timeout report is returned without waiting for it.
/// Failures are reported in the returned report, never as `Err`.
pub fn execute(
    plan: Arc<CoalitionPlan>,
    tables: Arc<Vec<OwnedTable>>,
    method: Method,
    knobs: &MethodKnobs,
    timeout: Duration,
    reference: Option<&Allocation>,
) -> RunReport {
    let cancel = Arc::new(AtomicBool::new(false));
    let (tx, rx) = mpsc::channel();
    let worker = {
        let (cancel, knobs) = (cancel.clone(), knobs.clone());
        std::thread::Builder::new().name(format!("iusv-{method}")).spawn(move || {
            let _ = tx.send(compute(&plan, &tables, method, &knobs, &cancel));
        })
    };
    let mut report = match worker {
        Err(e) => failed(method, 0, e.to_string()),
        Ok(_) => match rx.recv_timeout(timeout) {
            Ok(Ok(r)) => r,
            Ok(Err(e)) => failed(method, 0, e.to_string()),
            Err(mpsc::RecvTimeoutError::Timeout) => {
                cancel.store(true, Ordering::Relaxed);
                let mut r = RunReport::new(method, 0);
                r.status = Status::Timeout;
                r.runtime_seconds = timeout.as_secs_f64();
                r
            }
            Err(mpsc::RecvTimeoutError::Disconnected) => failed(method, 0, "worker panicked".into()),
        },
    };
    fill_metadata(&mut report, knobs);
    if let (Some(exact), Some(approx)) = (reference, report.exact_allocation()) {
        match compute_error_rate(exact, &approx) {
            Ok(e) => report.metrics.error_rate = Some(e),
            Err(e) => report.error = Some(e.to_string()),
        }
    }
    report
}

fn failed(method: Method, owners: usize, msg: String) -> RunReport {
    let mut r = RunReport::new(method, owners);
    r.status = Status::Error;
    r.error = Some(msg);
    r
}

fn fill_metadata(r: &mut RunReport, knobs: &MethodKnobs) {
    match r.method {
        Method::Iusv => r.metadata.gamma = Some(knobs.gamma),
        Method::Perm => {
            r.metadata.samples = Some(knobs.samples);
            r.metadata.seed = Some(knobs.seed);
            r.metadata.rng = Some(PERM_RNG.into());
        }
        Method::Trad => {}
    }
}

fn compute(
    plan: &CoalitionPlan,
    tables: &[OwnedTable],
    method: Method,
    knobs: &MethodKnobs,
    cancel: &AtomicBool,
) -> Result<RunReport> {
    let start = Instant::now();
    let asm = Assembler::new(plan, tables, AssembleConfig::default())?;
    let d = asm.coalition_set(&UnitUtility)?;
    let assembled = start.elapsed();
    let mut r = RunReport::new(method, asm.owners());
    r.coalition_tuples = Some(d.len());
    r.assemble_seconds = Some(assembled.as_secs_f64());

    let start = Instant::now();
    let allocation = match method {
        Method::Iusv => {
            let out = iusv_all_with(&d, &IusvConfig::with_gamma(knobs.gamma), cancel)?;
            let rates = compute_case_rates(&out.stats);
            r.metrics.umos_rate = Some(rates.umos_rate);
            r.metrics.sc_rate = Some(rates.sc_rate);
            r.metrics.sl_rate = Some(rates.sl_rate);
            r.cases = Some(out.stats);
            out.allocation
        }
        Method::Trad | Method::Perm => {
            let mut ev = UtilityEvaluator::new(plan, tables)?;
            let all = OwnerSet::full(ev.owners());
            let a = if method == Method::Trad {
                trad_shapley_with(&mut ev, &all, cancel)?
            } else {
                perm_shapley_with(&mut ev, &all, PermConfig { samples: knobs.samples, seed: knobs.seed }, cancel)?
            };
            r.metadata.evaluations = Some(ev.evaluations());
            a
        }
    };
    r.runtime_seconds = start.elapsed().as_secs_f64();
    r.set_allocation(&allocation);
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use iusv_core::{OwnerId, Utility, Value};

    fn example() -> (Arc<CoalitionPlan>, Arc<Vec<OwnedTable>>) {
        let t = |o: u32, name: &str, schema: [&str; 2], row: [&str; 2]| {
            OwnedTable::new(OwnerId(o), name, schema.map(String::from).to_vec(), vec![row.map(Value::str).to_vec()])
                .unwrap()
        };
        let tables = vec![
            t(0, "u1", ["a", "b"], ["a", "b"]),
            t(1, "u2", ["b", "c"], ["b", "c"]),
            t(2, "u3", ["b", "c"], ["b", "c"]),
        ];
        let u1 = || CoalitionPlan::scan("u1");
        let plan = CoalitionPlan::union([u1().join(CoalitionPlan::scan("u2")), u1().join(CoalitionPlan::scan("u3"))]);
        (Arc::new(plan), Arc::new(tables))
    }

    #[test]
    fn methods_agree_and_report() {
        let (plan, tables) = example();
        let knobs = MethodKnobs::default();
        let t = Duration::from_secs(60);
        let iusv = execute(plan.clone(), tables.clone(), Method::Iusv, &knobs, t, None);
        assert_eq!(iusv.status, Status::Ok, "{:?}", iusv.error);
        assert_eq!(iusv.allocation[0].exact, Utility::from_ratio(2, 3).unwrap());
        assert_eq!((iusv.metrics.umos_rate, iusv.metrics.sc_rate), (Some(0.0), Some(1.0)));
        let exact = iusv.exact_allocation().unwrap();
        let trad = execute(plan.clone(), tables.clone(), Method::Trad, &knobs, t, Some(&exact));
        assert_eq!(trad.exact_allocation(), Some(exact.clone()));
        assert_eq!(trad.metrics.error_rate, Some(0.0));
        let perm = execute(plan, tables, Method::Perm, &knobs, t, Some(&exact));
        assert_eq!(perm.metadata.rng.as_deref(), Some("chacha8"));
        assert!(perm.metrics.error_rate.is_some());
    }

    #[test]
    fn timeout_is_reported() {
        // 22 owners of one shared row: trad refuses, so use perm with many samples
        let tables: Vec<OwnedTable> = (0..22)
            .map(|o| OwnedTable::new(OwnerId(o), "t", vec!["x".into()], vec![vec![Value::Int(1)]]).unwrap())
            .collect();
        let knobs = MethodKnobs { samples: u64::MAX, ..Default::default() };
        let start = Instant::now();
        let r = execute(
            Arc::new(CoalitionPlan::scan("t")),
            Arc::new(tables.clone()),
            Method::Perm,
            &knobs,
            Duration::from_millis(200),
            None,
        );
        assert!(start.elapsed() < Duration::from_millis(220));
        assert_eq!(r.status, Status::Timeout);
        let refused = execute(Arc::new(CoalitionPlan::scan("t")), Arc::new(tables), Method::Trad, &knobs, Duration::from_secs(5), None);
        assert_eq!(refused.status, Status::Error);
    }
}
