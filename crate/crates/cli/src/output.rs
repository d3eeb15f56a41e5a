use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::CliError;
use crate::jobs::Artifact;

/// Values stamped on the first line of every output CSV.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    pub config_hash: String,
    pub job: String,
    pub seed: u64,
}

impl Provenance {
    pub fn line(&self) -> String {
        format!(
            "# qgraph-cli {} config_sha256={} job={} seed={}",
            env!("CARGO_PKG_VERSION"),
            self.config_hash,
            self.job,
            self.seed
        )
    }
}

/// Files written for one job.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JobRecord {
    pub name: String,
    pub kind: &'static str,
    pub dir: PathBuf,
    pub files: Vec<PathBuf>,
}

pub fn write_artifacts(
    out: &Path,
    kind: &'static str,
    prov: &Provenance,
    artifacts: &[Artifact],
) -> Result<JobRecord, CliError> {
    let dir = out.join(&prov.job);
    fs::create_dir_all(&dir)?;
    let header = prov.line();
    let files = artifacts
        .iter()
        .map(|a| {
            let path = dir.join(a.file);
            let mut f = fs::File::create(&path)?;
            writeln!(f, "{header}")?;
            f.write_all(&a.bytes)?;
            Ok(path)
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(JobRecord {
        name: prov.job.clone(),
        kind,
        dir,
        files,
    })
}
