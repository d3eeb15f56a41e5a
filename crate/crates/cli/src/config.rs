use std::collections::BTreeSet;

use qgraph::graph::GraphSpec;
use serde::Deserialize;
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub seed: Option<u64>,
    pub jobs: Vec<Job>,
    /// Hex SHA-256 of the config text.
    pub hash: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Job {
    pub name: String,
    pub seed: Option<u64>,
    pub spec: JobSpec,
}

#[derive(Debug, Clone, PartialEq)]
pub enum JobSpec {
    Simulate(Simulate),
    KernelCompare(KernelCompare),
    Sharpness(Sharpness),
    ReduceTree(ReduceTree),
    Carleman(Carleman),
    Appell(Appell),
    ThresholdSweep(ThresholdSweep),
}

impl JobSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            JobSpec::Simulate(_) => "simulate",
            JobSpec::KernelCompare(_) => "kernel-compare",
            JobSpec::Sharpness(_) => "sharpness",
            JobSpec::ReduceTree(_) => "reduce-tree",
            JobSpec::Carleman(_) => "carleman",
            JobSpec::Appell(_) => "appell",
            JobSpec::ThresholdSweep(_) => "threshold-sweep",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGrid {
    pub t_final: f64,
    pub dt: f64,
}

/// Initial data. Graph edges are evaluated at the distance from the root.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialData {
    /// `exp(-(alpha + i chirp)(x - center)²)`
    Gaussian {
        alpha: f64,
        #[serde(default)]
        chirp: f64,
        #[serde(default)]
        center: f64,
    },
    /// `exp(-(alpha_± + i chirp_±) x²)` on `x < 0` and `x ≥ 0`.
    Piecewise {
        alpha_minus: f64,
        alpha_plus: f64,
        #[serde(default)]
        chirp_minus: f64,
        #[serde(default)]
        chirp_plus: f64,
    },
    /// A checkpoint CSV on the same grid.
    File { path: String },
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Simulate {
    pub graph: GraphSpec,
    pub initial: InitialData,
    pub time: TimeGrid,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelCompare {
    pub graph: GraphSpec,
    pub initial: InitialData,
    pub time: TimeGrid,
    #[serde(default = "default_order")]
    pub order: u32,
    /// Left end of the comparison window `[x_min, 0]`.
    pub x_min: f64,
    #[serde(default = "default_compare_step")]
    pub x_step: f64,
}

fn default_order() -> u32 {
    20
}

fn default_compare_step() -> f64 {
    0.1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SharpExample {
    Star,
    TwoStep,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sharpness {
    pub example: SharpExample,
    /// Star rate `α`.
    pub alpha: Option<f64>,
    #[serde(rename = "N")]
    pub n: Option<usize>,
    /// Two-step coefficients `(a_1, a_2)`.
    pub a: Option<Vec<f64>>,
    #[serde(rename = "L")]
    pub truncation: f64,
    pub h: f64,
    pub dt: f64,
    /// Fit windows in `|x|` for times 0 and 1; amplitude-based when absent.
    pub window_initial: Option<[f64; 2]>,
    pub window_final: Option<[f64; 2]>,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
}

fn default_tolerance() -> f64 {
    qgraph::lab::BOUNDARY_TOLERANCE
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReduceTree {
    pub graph: GraphSpec,
    pub initial: InitialData,
    pub time: TimeGrid,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Carleman {
    #[serde(rename = "N")]
    pub n: Vec<usize>,
    #[serde(default = "default_seeds")]
    pub seeds: u64,
    #[serde(default = "default_mu")]
    pub mu: Vec<f64>,
    #[serde(default = "default_eps")]
    pub eps: Vec<f64>,
    #[serde(rename = "R", default = "default_r")]
    pub r: Vec<f64>,
    #[serde(default = "default_terms")]
    pub terms: usize,
    #[serde(default = "default_frequency")]
    pub max_frequency: f64,
    #[serde(default = "default_nodes")]
    pub time_nodes: usize,
    #[serde(default = "default_nodes")]
    pub space_nodes: usize,
}

fn default_seeds() -> u64 {
    20
}

fn default_mu() -> Vec<f64> {
    vec![0.5, 1.0, 2.0]
}

fn default_eps() -> Vec<f64> {
    vec![0.25, 0.5]
}

fn default_r() -> Vec<f64> {
    vec![2.0, 4.0, 8.0]
}

fn default_terms() -> usize {
    3
}

fn default_frequency() -> f64 {
    4.0
}

fn default_nodes() -> usize {
    201
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Appell {
    pub alpha: f64,
    pub beta: f64,
    #[serde(rename = "A", default)]
    pub a: f64,
    #[serde(rename = "B", default = "one")]
    pub b: f64,
    #[serde(default)]
    pub gamma: f64,
    /// Family `u(s, y)` evolved freely from `exp(-(re + i im) y²)`.
    pub initial: [f64; 2],
    #[serde(default = "default_times")]
    pub times: Vec<f64>,
    #[serde(default = "default_extent")]
    pub extent: f64,
    #[serde(default = "default_intervals")]
    pub intervals: usize,
}

fn one() -> f64 {
    1.0
}

fn default_times() -> Vec<f64> {
    vec![0.0, 0.25, 0.5, 0.75, 1.0]
}

fn default_extent() -> f64 {
    30.0
}

fn default_intervals() -> usize {
    12000
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LineCaseName {
    Negative,
    Positive,
    Both,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ContextSpec {
    Line {
        case: LineCaseName,
        sigma_minus: f64,
        sigma_plus: f64,
    },
    StarFree,
    StarPotential {
        #[serde(rename = "N")]
        n: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdSweep {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub context: ContextSpec,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
}

fn parse_body<'de, S: Deserialize<'de>>(table: toml::Table) -> Result<S, toml::de::Error> {
    S::deserialize(toml::Value::Table(table))
}

fn config_error(job: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("job `{job}`: {msg}"))
}

fn parse_job(mut table: toml::Table, index: usize) -> Result<Job, CliError> {
    let name = match table.remove("name") {
        Some(toml::Value::String(s)) => s,
        Some(_) => return Err(CliError::Config(format!("job {index}: `name` must be a string"))),
        None => return Err(CliError::Config(format!("job {index}: missing `name`"))),
    };
    let kind = match table.remove("kind") {
        Some(toml::Value::String(s)) => s,
        _ => return Err(config_error(&name, "missing or non-string `kind`")),
    };
    let seed = match table.remove("seed") {
        Some(toml::Value::Integer(s)) if s >= 0 => Some(s as u64),
        Some(_) => return Err(config_error(&name, "`seed` must be a non-negative integer")),
        None => None,
    };
    let wrap = |e: toml::de::Error| config_error(&name, e.message());
    let spec = match kind.as_str() {
        "simulate" => JobSpec::Simulate(parse_body(table).map_err(wrap)?),
        "kernel-compare" => JobSpec::KernelCompare(parse_body(table).map_err(wrap)?),
        "sharpness" => JobSpec::Sharpness(parse_body(table).map_err(wrap)?),
        "reduce-tree" => JobSpec::ReduceTree(parse_body(table).map_err(wrap)?),
        "carleman" => JobSpec::Carleman(parse_body(table).map_err(wrap)?),
        "appell" => JobSpec::Appell(parse_body(table).map_err(wrap)?),
        "threshold-sweep" => JobSpec::ThresholdSweep(parse_body(table).map_err(wrap)?),
        other => return Err(config_error(&name, format!("unknown kind `{other}`"))),
    };
    let job = Job { name, seed, spec };
    validate(&job)?;
    Ok(job)
}

impl ExperimentConfig {
    /// Parses and validates a config; nothing is computed.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut root: toml::Table = text.parse().map_err(|e: toml::de::Error| CliError::Config(e.to_string()))?;
        let seed = match root.remove("seed") {
            Some(toml::Value::Integer(s)) if s >= 0 => Some(s as u64),
            Some(_) => return Err(CliError::Config("`seed` must be a non-negative integer".into())),
            None => None,
        };
        let jobs = match root.remove("job") {
            Some(toml::Value::Array(items)) => items,
            Some(_) => return Err(CliError::Config("`job` must be an array of tables ([[job]])".into())),
            None => return Err(CliError::Config("no [[job]] entries".into())),
        };
        if let Some(key) = root.keys().next() {
            return Err(CliError::Config(format!("unknown top-level key `{key}`")));
        }
        let jobs = jobs
            .into_iter()
            .enumerate()
            .map(|(i, v)| match v {
                toml::Value::Table(t) => parse_job(t, i),
                _ => Err(CliError::Config(format!("job {i} is not a table"))),
            })
            .collect::<Result<Vec<Job>, CliError>>()?;
        let mut names = BTreeSet::new();
        for j in &jobs {
            if !names.insert(j.name.as_str()) {
                return Err(CliError::Config(format!("duplicate job name `{}`", j.name)));
            }
        }
        let hash = Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect();
        Ok(Self { seed, jobs, hash })
    }
}

fn positive(job: &str, what: &str, v: f64) -> Result<(), CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(config_error(job, format!("`{what}` must be positive, got {v}")))
    }
}

fn validate_graph(job: &str, g: &GraphSpec) -> Result<(), CliError> {
    positive(job, "L", g.truncation())?;
    positive(job, "h", g.spacing())?;
    if g.truncation() / g.spacing() < 16.0 {
        return Err(config_error(job, "truncation must span at least 16 grid spacings"));
    }
    match g {
        GraphSpec::Star { n, .. } if *n < 2 => Err(config_error(job, "a star needs N >= 2")),
        GraphSpec::RegularTree { lengths, degrees, .. } if degrees.len() != lengths.len() + 1 => {
            Err(config_error(job, "regular trees need one more degree than lengths"))
        }
        GraphSpec::LineSigma { a, spacing, .. } => {
            if a.is_empty() || a.iter().any(|&v| !(v > 0.0)) {
                return Err(config_error(job, "`a` must be a non-empty list of positive values"));
            }
            positive(job, "spacing", *spacing)
        }
        _ => Ok(()),
    }
}

fn validate_time(job: &str, t: &TimeGrid) -> Result<(), CliError> {
    positive(job, "dt", t.dt)?;
    if !t.t_final.is_finite() {
        return Err(config_error(job, "`t_final` must be finite"));
    }
    let ratio = t.t_final.abs() / t.dt;
    if (ratio - ratio.round()).abs() > 1e-9 * ratio.max(1.0) {
        return Err(config_error(job, "`dt` must divide `t_final`"));
    }
    Ok(())
}

fn validate_initial(job: &str, i: &InitialData) -> Result<(), CliError> {
    match i {
        InitialData::Gaussian { alpha, .. } => positive(job, "alpha", *alpha),
        InitialData::Piecewise { alpha_minus, alpha_plus, .. } => {
            positive(job, "alpha_minus", *alpha_minus)?;
            positive(job, "alpha_plus", *alpha_plus)
        }
        InitialData::File { path } if path.is_empty() => Err(config_error(job, "empty initial-data path")),
        InitialData::File { .. } => Ok(()),
    }
}

fn validate(job: &Job) -> Result<(), CliError> {
    let name = job.name.as_str();
    if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_') {
        return Err(CliError::Config(format!("job name `{name}` must be non-empty [A-Za-z0-9_-]")));
    }
    match &job.spec {
        JobSpec::Simulate(s) => {
            validate_graph(name, &s.graph)?;
            validate_initial(name, &s.initial)?;
            validate_time(name, &s.time)
        }
        JobSpec::KernelCompare(k) => {
            validate_graph(name, &k.graph)?;
            if !matches!(k.graph, GraphSpec::LineSigma { .. }) {
                return Err(config_error(name, "kernel-compare needs a line_sigma graph"));
            }
            validate_initial(name, &k.initial)?;
            validate_time(name, &k.time)?;
            positive(name, "x_step", k.x_step)?;
            if !(k.x_min < 0.0) {
                return Err(config_error(name, "`x_min` must be negative"));
            }
            Ok(())
        }
        JobSpec::Sharpness(s) => {
            positive(name, "L", s.truncation)?;
            positive(name, "h", s.h)?;
            positive(name, "dt", s.dt)?;
            match s.example {
                SharpExample::Star => {
                    positive(name, "alpha", s.alpha.ok_or_else(|| config_error(name, "star example needs `alpha`"))?)?;
                    if s.n.is_some_and(|n| n < 2) {
                        return Err(config_error(name, "a star needs N >= 2"));
                    }
                    Ok(())
                }
                SharpExample::TwoStep => match s.a.as_deref() {
                    Some([a1, a2]) => {
                        positive(name, "a", *a1)?;
                        positive(name, "a", *a2)
                    }
                    _ => Err(config_error(name, "two-step example needs `a = [a1, a2]`")),
                },
            }
        }
        JobSpec::ReduceTree(r) => {
            validate_graph(name, &r.graph)?;
            if !matches!(r.graph, GraphSpec::RegularTree { .. }) {
                return Err(config_error(name, "reduce-tree needs a regular_tree graph"));
            }
            validate_initial(name, &r.initial)?;
            validate_time(name, &r.time)
        }
        JobSpec::Carleman(c) => {
            if c.n.is_empty() || c.n.iter().any(|&n| n < 2) {
                return Err(config_error(name, "`N` must list star sizes >= 2"));
            }
            for v in c.mu.iter().chain(&c.eps).chain(&c.r) {
                positive(name, "mu/eps/R", *v)?;
            }
            for nodes in [c.time_nodes, c.space_nodes] {
                if nodes < 5 || nodes % 2 == 0 {
                    return Err(config_error(name, "quadrature node counts must be odd and at least 5"));
                }
            }
            Ok(())
        }
        JobSpec::Appell(a) => {
            positive(name, "alpha", a.alpha)?;
            positive(name, "beta", a.beta)?;
            positive(name, "initial[0]", a.initial[0])?;
            positive(name, "extent", a.extent)?;
            if a.a == 0.0 && a.b == 0.0 {
                return Err(config_error(name, "A + iB must be non-zero"));
            }
            if a.times.iter().any(|t| !(0.0..=1.0).contains(t)) {
                return Err(config_error(name, "`times` must lie in [0, 1]"));
            }
            Ok(())
        }
        JobSpec::ThresholdSweep(t) => {
            for v in t.alpha.iter().chain(&t.beta) {
                positive(name, "alpha/beta", *v)?;
            }
            if let ContextSpec::StarPotential { n } = t.context {
                if n < 2 {
                    return Err(config_error(name, "star-potential needs N >= 2"));
                }
            }
            if !(t.tolerance >= 0.0) {
                return Err(config_error(name, "`tolerance` must be non-negative"));
            }
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SHARP: &str = r#"
seed = 3

[[job]]
name = "star"
kind = "sharpness"
example = "star"
alpha = 0.25
N = 3
L = 30.0
h = 0.02
dt = 0.002
"#;

    #[test]
    fn parses_jobs() {
        let c = ExperimentConfig::parse(SHARP).unwrap();
        assert_eq!(c.seed, Some(3));
        assert_eq!(c.jobs.len(), 1);
        assert_eq!(c.jobs[0].spec.kind(), "sharpness");
        assert_eq!(c.hash.len(), 64);
    }

    #[test]
    fn rejects_unknown_keys_and_kinds() {
        let extra = format!("{SHARP}colour = 1\n");
        assert!(matches!(ExperimentConfig::parse(&extra), Err(CliError::Config(_))));
        let kind = SHARP.replace("sharpness", "sharpen");
        assert!(ExperimentConfig::parse(&kind).is_err());
        assert!(ExperimentConfig::parse("seed = 1\n").is_err());
        assert!(ExperimentConfig::parse("nonsense = = 1").is_err());
    }

    #[test]
    fn validates_values() {
        let bad = SHARP.replace("alpha = 0.25", "alpha = -0.25");
        assert!(ExperimentConfig::parse(&bad).is_err());
        let dup = format!("{SHARP}\n[[job]]\nname = \"star\"\nkind = \"threshold-sweep\"\nalpha = [1.0]\nbeta = [1.0]\ncontext = {{ type = \"star-free\" }}\n");
        assert!(ExperimentConfig::parse(&dup).is_err());
    }

    #[test]
    fn nested_tables_reject_unknown_keys() {
        let text = r#"
[[job]]
name = "sim"
kind = "simulate"
graph = { type = "star", N = 3, L = 20.0, h = 0.05, extra = 1 }
initial = { type = "gaussian", alpha = 1.0 }
time = { t_final = 0.1, dt = 0.01 }
"#;
        assert!(ExperimentConfig::parse(text).is_err());
        assert!(ExperimentConfig::parse(&text.replace(", extra = 1", "")).is_ok());
    }
}
