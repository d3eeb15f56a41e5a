use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use qgraph_cli::{execute, Options};

/// Runs the jobs of an experiment config and writes CSV results.
#[derive(Debug, Parser)]
#[command(name = "qgraph", version)]
struct Args {
    /// Experiment config (TOML).
    #[arg(long)]
    config: PathBuf,

    /// Output directory; each job writes to `<out>/<job name>/`.
    #[arg(long, env = "QGRAPH_OUT_DIR", default_value = "qgraph-out")]
    out: PathBuf,

    /// Overrides every job and config seed.
    #[arg(long)]
    seed: Option<u64>,

    /// Worker threads.
    #[arg(long, default_value_t = 1)]
    jobs: usize,

    /// Runs the invariant checks of the modules the jobs touch.
    #[arg(long)]
    verify: bool,
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let opts = Options {
        config: args.config,
        out: args.out,
        seed: args.seed,
        jobs: args.jobs,
        verify: args.verify,
    };
    match execute(&opts) {
        Ok(outcome) => {
            for r in &outcome.records {
                println!("ok   {} ({}) -> {}", r.name, r.kind, r.dir.display());
            }
            for (name, e) in &outcome.failures {
                eprintln!("fail {name}: {e}");
            }
            for c in &outcome.checks {
                println!("{c}");
            }
            ExitCode::from(outcome.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
