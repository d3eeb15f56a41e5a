use std::fs;
use std::path::PathBuf;

use crate::error::CliError;
use crate::output::JobRecord;

const PRELUDE: &str = r##"import csv
import math
import os

import matplotlib.pyplot as plt

HERE = os.path.dirname(os.path.abspath(__file__))


def load(name):
    with open(os.path.join(HERE, name)) as f:
        rows = list(csv.DictReader(line for line in f if not line.startswith("#")))
    return {k: [float(r[k]) if _num(r[k]) else r[k] for r in rows] for k in rows[0]}


def _num(s):
    try:
        float(s)
        return True
    except ValueError:
        return False

"##;

fn body(kind: &str) -> Option<(&'static [&'static str], &'static str)> {
    Some(match kind {
        "sharpness" => (
            &["decay.csv", "fit.csv"],
            r#"d = load("decay.csv")
fit = load("fit.csv")
fig, ax = plt.subplots()
ax.plot(d["x2"], d["log_abs_u0"], label="log|u(0)|")
ax.plot(d["x2"], d["log_abs_u1"], label="log|u(1)|")
ax.plot(d["x2"], d["log_abs_exact1"], "--", label="closed form at t=1")
for t, c, r, lo, hi in zip(fit["t"], fit["intercept"], fit["rate"], fit["window_lo"], fit["window_hi"]):
    xs = [lo * lo, hi * hi]
    ax.plot(xs, [c - r * v for v in xs], "k:", lw=2, label=f"fit t={t:g}: rate {r:.4g}")
ax.set_xlabel("x^2")
ax.set_ylabel("log|u|")
ax.set_ylim(-40, 1)
ax.legend()
fig.savefig(os.path.join(HERE, "decay.png"), dpi=150)
"#,
        ),
        "kernel-compare" | "reduce-tree" => (
            if kind == "kernel-compare" { &["compare.csv"] } else { &["diagram.csv"] },
            r#"name = "compare.csv" if os.path.exists(os.path.join(HERE, "compare.csv")) else "diagram.csv"
d = load(name)
keys = [k for k in d if k.startswith("re_")]
fig, (top, bottom) = plt.subplots(2, 1, sharex=True)
for k in keys:
    top.plot(d["x"], d[k], label=k)
top.legend()
top.set_ylabel("Re u")
bottom.semilogy(d["x"], [max(v, 1e-300) for v in d["abs_diff"]])
bottom.set_ylabel("|difference|")
bottom.set_xlabel("x")
fig.savefig(os.path.join(HERE, name.replace(".csv", ".png")), dpi=150)
"#,
        ),
        "simulate" => (
            &["checkpoint.csv"],
            r#"d = load("checkpoint.csv")
fig, ax = plt.subplots()
for e in sorted(set(d["edge_id"])):
    idx = [i for i, v in enumerate(d["edge_id"]) if v == e]
    ax.plot([d["x"][i] for i in idx], [math.hypot(d["re_u"][i], d["im_u"][i]) for i in idx], label=f"edge {int(e)}")
ax.set_xlabel("x")
ax.set_ylabel("|u|")
ax.legend()
fig.savefig(os.path.join(HERE, "state.png"), dpi=150)
"#,
        ),
        "carleman" => (
            &["margins.csv"],
            r#"d = load("margins.csv")
fig, ax = plt.subplots()
ax.loglog(d["rhs"], d["lhs"], ".", alpha=0.5)
lo, hi = min(d["rhs"]), max(d["rhs"])
ax.loglog([lo, hi], [lo, hi], "k--", label="lhs = rhs")
ax.set_xlabel("rhs")
ax.set_ylabel("lhs")
ax.legend()
fig.savefig(os.path.join(HERE, "margins.png"), dpi=150)
"#,
        ),
        "appell" => (
            &["appell.csv"],
            r#"d = load("appell.csv")
fig, ax = plt.subplots()
ax.plot(d["t"], d["norm_transformed"], "o-", label="transformed")
ax.plot(d["t"], d["norm_original"], "x--", label="original at s(t)")
ax.set_xlabel("t")
ax.set_ylabel("weighted norm")
ax.legend()
fig.savefig(os.path.join(HERE, "appell.png"), dpi=150)
"#,
        ),
        "threshold-sweep" => (
            &["verdicts.csv"],
            r#"d = load("verdicts.csv")
fig, ax = plt.subplots()
for regime, marker in (("above", "o"), ("below", "x"), ("boundary", "s")):
    idx = [i for i, r in enumerate(d["regime"]) if r == regime]
    ax.loglog([d["alpha"][i] for i in idx], [d["beta"][i] for i in idx], marker, ls="", label=regime)
thr = d["threshold"][0]
xs = sorted(set(d["alpha"]))
ax.loglog(xs, [thr / x for x in xs], "k--", label="alpha*beta = threshold")
ax.set_xlabel("alpha")
ax.set_ylabel("beta")
ax.legend()
fig.savefig(os.path.join(HERE, "verdicts.png"), dpi=150)
"#,
        ),
        _ => return None,
    })
}

/// Writes `plot.py` next to the CSVs of every job.
pub fn emit_plots(records: &[JobRecord]) -> Result<Vec<PathBuf>, CliError> {
    if records.is_empty() {
        return Err(CliError::MissingResults("empty result set".into()));
    }
    records
        .iter()
        .map(|r| {
            let (needs, script) =
                body(r.kind).ok_or_else(|| CliError::MissingResults(format!("no plot for kind `{}`", r.kind)))?;
            for f in needs {
                if !r.dir.join(f).is_file() {
                    return Err(CliError::MissingResults(format!("{}: missing {f}", r.name)));
                }
            }
            let path = r.dir.join("plot.py");
            fs::write(&path, format!("{PRELUDE}\n{script}"))?;
            Ok(path)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_kind_has_a_script() {
        for kind in ["simulate", "kernel-compare", "sharpness", "reduce-tree", "carleman", "appell", "threshold-sweep"] {
            assert!(body(kind).is_some(), "{kind}");
        }
    }

    #[test]
    fn empty_set_is_an_error() {
        assert!(matches!(emit_plots(&[]), Err(CliError::MissingResults(_))));
    }

    #[test]
    fn missing_files_are_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let rec = JobRecord {
            name: "j".into(),
            kind: "carleman",
            dir: dir.path().to_path_buf(),
            files: vec![],
        };
        assert!(emit_plots(std::slice::from_ref(&rec)).is_err());
        fs::write(dir.path().join("margins.csv"), "N\n").unwrap();
        let written = emit_plots(&[rec]).unwrap();
        assert!(written[0].ends_with("plot.py"));
    }
}
