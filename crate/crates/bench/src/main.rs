use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use iusv_bench::bench::{rows_to_csv, run_matrix, BenchMatrix};
use iusv_bench::files::{load_plan, load_scenario, read_config, write_assignment, CoalitionDump};
use iusv_bench::ingest::ingest_csv;
use iusv_bench::report::{Method, RunReport};
use iusv_bench::run::{run, RunConfig, DEFAULT_TIMEOUT_SECS};
use iusv_core::datagen::{assign, AssignMode, AssignmentScenario, OwnerMode};
use iusv_core::evaluate_plan;

#[derive(Parser)]
#[command(name = "iusv", version, about = "Shapley-value allocation for data owners of an assembled data set")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Split CSV tables among synthetic owners; writes owner CSVs and a manifest.
    Gen {
        #[arg(long, num_args = 1.., required = true)]
        dataset: Vec<PathBuf>,
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Scenario seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate a plan and dump the coalition set with minimal syntheses.
    Assemble {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        plan: PathBuf,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute an allocation with one method.
    Shapley {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        plan: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Iusv)]
        method: Method,
        /// Permutations sampled by `perm`.
        #[arg(long, default_value_t = 16)]
        samples: u64,
        /// Seed of `perm`.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
        /// Seconds before the run is abandoned.
        #[arg(long, default_value_t = DEFAULT_TIMEOUT_SECS)]
        timeout: f64,
        /// A report (JSON) of an exact run; enables the error rate.
        #[arg(long)]
        reference: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a benchmark matrix (TOML).
    Bench {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct ScenarioArgs {
    /// Scenario file (TOML or JSON); flags override its fields.
    #[arg(long)]
    scenario: Option<PathBuf>,
    #[arg(long, value_parser = parse_owner_mode)]
    owner_mode: Option<OwnerMode>,
    #[arg(long, value_parser = parse_assign_mode)]
    assign_mode: Option<AssignMode>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    /// Maximum copies of a record.
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    small_table_threshold: Option<usize>,
}

#[derive(Args)]
struct DataArgs {
    /// Manifest written by `gen`.
    #[arg(long, conflicts_with = "dataset")]
    manifest: Option<PathBuf>,
    /// CSV tables to split among owners on the fly.
    #[arg(long, num_args = 1..)]
    dataset: Vec<PathBuf>,
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// Scenario seed when splitting on the fly.
    #[arg(long)]
    data_seed: Option<u64>,
}

fn parse_owner_mode(s: &str) -> Result<OwnerMode, String> {
    match s.to_ascii_uppercase().as_str() {
        "EO" => Ok(OwnerMode::EO),
        "UO" => Ok(OwnerMode::UO),
        _ => Err(format!("expected EO or UO, got {s:?}")),
    }
}

fn parse_assign_mode(s: &str) -> Result<AssignMode, String> {
    match s.to_ascii_uppercase().as_str() {
        "EA" => Ok(AssignMode::EA),
        "UA" => Ok(AssignMode::UA),
        _ => Err(format!("expected EA or UA, got {s:?}")),
    }
}

impl ScenarioArgs {
    fn resolve(&self, seed: Option<u64>) -> Result<AssignmentScenario> {
        let mut sc = match &self.scenario {
            Some(p) => load_scenario(p)?,
            None => AssignmentScenario::default(),
        };
        if let Some(v) = self.owner_mode {
            sc.owner_mode = v;
        }
        if let Some(v) = self.assign_mode {
            sc.assign_mode = v;
        }
        if let Some(v) = self.k {
            sc.k = v;
        }
        if let Some(v) = self.alpha {
            sc.alpha = v;
        }
        if let Some(v) = self.m {
            sc.max_copies = v;
        }
        if let Some(v) = self.beta {
            sc.beta = v;
        }
        if let Some(v) = self.small_table_threshold {
            sc.small_table_threshold = v;
        }
        if let Some(v) = seed {
            sc.seed = v;
        }
        sc.validate()?;
        Ok(sc)
    }
}

impl DataArgs {
    fn run_config(&self, plan: &Path, method: Method) -> Result<RunConfig> {
        Ok(RunConfig {
            manifest: self.manifest.clone(),
            dataset: self.dataset.clone(),
            scenario: self.scenario.resolve(self.data_seed)?,
            plan: plan.to_path_buf(),
            method,
            samples: 16,
            seed: 0,
            gamma: 1.0,
            timeout: DEFAULT_TIMEOUT_SECS,
        })
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Gen { dataset, scenario, seed, out } => {
            let sc = scenario.resolve(seed)?;
            let tables = ingest_csv(&dataset)?;
            let assignment = assign(&tables, &sc)?;
            let manifest = write_assignment(&out, &assignment, &sc)?;
            for t in &manifest.tables {
                eprintln!("{}: {} rows, {} owners", t.name, t.source_rows, t.parts.len());
            }
            eprintln!("{} owners written to {}", manifest.owners, out.display());
        }
        Command::Assemble { data, plan, out } => {
            let cfg = data.run_config(&plan, Method::Iusv)?;
            cfg.validate()?;
            let d = evaluate_plan(&load_plan(&plan)?, &cfg.load_tables()?)?;
            let text = serde_json::to_string_pretty(&CoalitionDump::from(&d))?;
            emit(out.as_deref(), &text)?;
        }
        Command::Shapley { data, plan, method, samples, seed, gamma, timeout, reference, format, out } => {
            let cfg = RunConfig { samples, seed, gamma, timeout, ..data.run_config(&plan, method)? };
            let reference = match reference {
                Some(p) => {
                    let r: RunReport = read_config(&p)?;
                    match r.exact_allocation() {
                        Some(a) => Some(a),
                        None => bail!("{} holds no allocation", p.display()),
                    }
                }
                None => None,
            };
            let report = run(&cfg, reference.as_ref())?;
            let text = match format {
                Format::Json => serde_json::to_string_pretty(&report)? + "\n",
                Format::Csv => report.to_csv(),
            };
            emit(out.as_deref(), &text)?;
        }
        Command::Bench { config, format, out } => {
            let matrix = BenchMatrix::load(&config)?;
            let rows = run_matrix(&matrix)?;
            let text = match format {
                Format::Json => serde_json::to_string_pretty(&rows)? + "\n",
                Format::Csv => rows_to_csv(&rows),
            };
            emit(out.as_deref(), &text)?;
        }
    }
    Ok(())
}
