//! Batch runner: parses an experiment config, runs its jobs on a bounded
//! pool and writes provenance-stamped CSVs plus a plot script per job.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod jobs;
pub mod output;
pub mod plots;

use std::path::{Path, PathBuf};

use qgraph::verify::{verify, Check, Module};
use rayon::prelude::*;

pub use config::{ExperimentConfig, Job, JobSpec};
pub use error::CliError;
pub use output::{JobRecord, Provenance};
pub use plots::emit_plots;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Options {
    pub config: PathBuf,
    pub out: PathBuf,
    pub seed: Option<u64>,
    pub jobs: usize,
    pub verify: bool,
}

#[derive(Debug, Default)]
pub struct Outcome {
    pub records: Vec<JobRecord>,
    pub failures: Vec<(String, CliError)>,
    pub checks: Vec<Check>,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        let job = self.failures.iter().map(|(_, e)| e.exit_code()).max().unwrap_or(0);
        let checks = if self.checks.iter().any(|c| !c.passed) { 2 } else { 0 };
        job.max(checks)
    }
}

fn modules(spec: &JobSpec) -> &'static [Module] {
    match spec {
        JobSpec::Simulate(_) => &[Module::Graph, Module::Evolution],
        JobSpec::KernelCompare(_) => &[Module::Transfer, Module::Evolution],
        JobSpec::Sharpness(_) => &[Module::Lab, Module::Evolution],
        JobSpec::ReduceTree(_) => &[Module::Reduction, Module::Evolution],
        JobSpec::Carleman(_) => &[Module::Carleman],
        JobSpec::Appell(_) | JobSpec::ThresholdSweep(_) => &[Module::Lab],
    }
}

/// Reads every referenced input before anything is computed.
fn preflight(config: &ExperimentConfig, base: &Path) -> Result<(), CliError> {
    for job in &config.jobs {
        let init = match &job.spec {
            JobSpec::Simulate(s) => Some(&s.initial),
            JobSpec::KernelCompare(k) => Some(&k.initial),
            JobSpec::ReduceTree(r) => Some(&r.initial),
            _ => None,
        };
        if let Some(config::InitialData::File { path }) = init {
            let full = base.join(path);
            let f = std::fs::File::open(&full)
                .map_err(|e| CliError::Config(format!("job `{}`: {}: {e}", job.name, full.display())))?;
            qgraph::evolution::read_checkpoint::<_, f64>(std::io::BufReader::new(f))
                .map_err(|e| CliError::Config(format!("job `{}`: {}: {e}", job.name, full.display())))?;
        }
    }
    Ok(())
}

/// Seed precedence: command line, job, config, zero.
pub fn job_seed(cli: Option<u64>, job: &Job, config: &ExperimentConfig) -> u64 {
    cli.or(job.seed).or(config.seed).unwrap_or(0)
}

/// Validates the config, then runs all jobs. Config and IO errors before the
/// first job starts are returned as `Err` and leave no outputs behind.
pub fn execute(opts: &Options) -> Result<Outcome, CliError> {
    let text = std::fs::read_to_string(&opts.config)
        .map_err(|e| CliError::Config(format!("{}: {e}", opts.config.display())))?;
    let config = ExperimentConfig::parse(&text)?;
    let base = opts.config.parent().map(Path::to_path_buf).unwrap_or_default();
    preflight(&config, &base)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs.max(1))
        .build()
        .map_err(|e| CliError::Config(format!("worker pool: {e}")))?;
    std::fs::create_dir_all(&opts.out)?;

    let results: Vec<(String, Result<JobRecord, CliError>)> = pool.install(|| {
        config
            .jobs
            .par_iter()
            .map(|job| {
                let prov = Provenance {
                    config_hash: config.hash.clone(),
                    job: job.name.clone(),
                    seed: job_seed(opts.seed, job, &config),
                };
                let res = jobs::run(&job.spec, prov.seed, &base)
                    .and_then(|a| output::write_artifacts(&opts.out, job.spec.kind(), &prov, &a));
                (job.name.clone(), res)
            })
            .collect()
    });

    let mut outcome = Outcome::default();
    for (name, r) in results {
        match r {
            Ok(rec) => outcome.records.push(rec),
            Err(e) => outcome.failures.push((name, e)),
        }
    }
    if !outcome.records.is_empty() {
        emit_plots(&outcome.records)?;
    }
    if opts.verify {
        let mut touched: Vec<Module> = config.jobs.iter().flat_map(|j| modules(&j.spec).iter().copied()).collect();
        touched.sort_by_key(|m| m.name());
        touched.dedup();
        outcome.checks = touched.into_iter().flat_map(verify).collect();
    }
    Ok(outcome)
}
