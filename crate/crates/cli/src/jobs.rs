use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use qgraph::carleman::{
    alpha_vectors, sample_zcomp, write_margins, CarlemanWeight, MarginRow, Quadrature, SampledSample,
    SmoothnessBudget,
};
use qgraph::evolution::{
    boundary_leakage, evolve_graph, evolve_line_sigma, line_boundary_leakage, read_checkpoint,
    write_graph_checkpoint, write_line_checkpoint, EvolutionConfig, PiecewiseCoefficient, LEAKAGE_TOLERANCE,
};
use qgraph::graph::{weighted_l2_norm, GraphSpec, GraphState};
use qgraph::lab::{
    classify_threshold_with, fit_gaussian_decay, free_gaussian, sharp_example_star, sharp_example_two_step,
    write_verdicts, AppellTransform, DecayEstimate, DecayFit, DecayWindow, LineCase, Side, ThresholdContext,
    ThresholdVerdict,
};
use qgraph::line::{uniform_nodes, LineSamples};
use qgraph::reduction::{averaged_sums, fold_to_line, reduction_map};
use qgraph::transfer::{invert_e, layer_params, solve_negative_halfline};
use qgraph::{Complex64, GraphState64, LineSamples64};
use rayon::prelude::*;

use crate::config::{
    Appell, Carleman, ContextSpec, InitialData, JobSpec, KernelCompare, LineCaseName, ReduceTree, SharpExample,
    Sharpness, Simulate, ThresholdSweep,
};
use crate::error::CliError;

/// One output file of a job, held in memory until the job succeeds.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub file: &'static str,
    pub bytes: Vec<u8>,
}

type JobResult = Result<Vec<Artifact>, CliError>;

fn artifact(file: &'static str, write: impl FnOnce(&mut Vec<u8>) -> qgraph::Result<()>) -> Result<Artifact, CliError> {
    let mut bytes = Vec::new();
    write(&mut bytes)?;
    Ok(Artifact { file, bytes })
}

fn table<H: AsRef<[u8]>, const K: usize>(
    file: &'static str,
    header: [H; K],
    rows: impl IntoIterator<Item = [String; K]>,
) -> Result<Artifact, CliError> {
    artifact(file, |buf| {
        let mut w = csv::Writer::from_writer(buf);
        w.write_record(header)?;
        for r in rows {
            w.write_record(&r)?;
        }
        w.flush()?;
        Ok(())
    })
}

fn num(x: f64) -> String {
    format!("{x:e}")
}

fn guard_leakage(leak: f64) -> Result<(), CliError> {
    if leak > LEAKAGE_TOLERANCE {
        Err(CliError::Guard(format!(
            "wavefront reached 0.8 L (relative amplitude {leak:e} > {LEAKAGE_TOLERANCE:e})"
        )))
    } else {
        Ok(())
    }
}

pub fn run(spec: &JobSpec, seed: u64, base: &Path) -> JobResult {
    match spec {
        JobSpec::Simulate(s) => simulate(s, base),
        JobSpec::KernelCompare(k) => kernel_compare(k, base),
        JobSpec::Sharpness(s) => sharpness(s),
        JobSpec::ReduceTree(r) => reduce_tree(r, base),
        JobSpec::Carleman(c) => carleman(c, seed),
        JobSpec::Appell(a) => appell(a),
        JobSpec::ThresholdSweep(t) => threshold_sweep(t),
    }
}

fn analytic(init: &InitialData) -> Option<impl Fn(f64) -> Complex64 + '_> {
    match init {
        InitialData::File { .. } => None,
        _ => Some(move |x: f64| match *init {
            InitialData::Gaussian { alpha, chirp, center } => {
                let d = x - center;
                (-Complex64::new(alpha, chirp) * d * d).exp()
            }
            InitialData::Piecewise { alpha_minus, alpha_plus, chirp_minus, chirp_plus } => {
                let b = if x < 0.0 {
                    Complex64::new(alpha_minus, chirp_minus)
                } else {
                    Complex64::new(alpha_plus, chirp_plus)
                };
                (-b * x * x).exp()
            }
            InitialData::File { .. } => unreachable!(),
        }),
    }
}

fn resolve(base: &Path, path: &str) -> std::path::PathBuf {
    let p = Path::new(path);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

fn read_file(base: &Path, path: &str) -> Result<qgraph::evolution::Checkpoint<f64>, CliError> {
    let f = File::open(resolve(base, path))?;
    read_checkpoint(BufReader::new(f)).map_err(|e| CliError::Config(format!("{path}: {e}")))
}

fn graph_initial(spec: &GraphSpec, init: &InitialData, base: &Path) -> Result<GraphState64, CliError> {
    let (graph, grid) = spec
        .build_graph::<f64>()?
        .ok_or_else(|| CliError::Config("expected a star or regular_tree graph".into()))?;
    match (analytic(init), init) {
        (Some(f), _) => {
            let offsets: Vec<f64> = (0..graph.edge_count()).map(|e| graph.edge_offset(e)).collect();
            Ok(GraphState::from_fn(graph, grid, |e, x| f(offsets[e] + x)))
        }
        (None, InitialData::File { path }) => {
            let cp = read_file(base, path)?;
            let values = cp.edges.into_iter().map(|(_, s)| s.u).collect();
            GraphState::new(graph, grid, values, cp.header.t).map_err(|e| CliError::Config(format!("{path}: {e}")))
        }
        _ => unreachable!(),
    }
}

fn line_grid(spec: &GraphSpec) -> Result<(PiecewiseCoefficient<f64>, f64, usize), CliError> {
    match spec {
        GraphSpec::LineSigma { a, spacing, truncation, h } => {
            let sigma = PiecewiseCoefficient::uniform(a.clone(), *spacing)?;
            Ok((sigma, *truncation, (2.0 * truncation / h).round() as usize))
        }
        _ => Err(CliError::Config("expected a line_sigma graph".into())),
    }
}

fn line_initial(spec: &GraphSpec, init: &InitialData, base: &Path) -> Result<LineSamples64, CliError> {
    let (_, l, n) = line_grid(spec)?;
    match (analytic(init), init) {
        (Some(f), _) => Ok(LineSamples::from_fn(-l, l, n, f)),
        (None, InitialData::File { path }) => {
            let mut cp = read_file(base, path)?;
            match cp.edges.len() {
                1 => Ok(cp.edges.remove(0).1),
                k => Err(CliError::Config(format!("{path}: a line checkpoint has one edge, found {k}"))),
            }
        }
        _ => unreachable!(),
    }
}

fn simulate(s: &Simulate, base: &Path) -> JobResult {
    let cfg = EvolutionConfig::new(s.time.dt)?;
    let steps = (s.time.t_final.abs() / s.time.dt).round() as u64;
    let (checkpoint, n0, n1, leak) = match s.graph {
        GraphSpec::LineSigma { .. } => {
            let (sigma, _, _) = line_grid(&s.graph)?;
            let u0 = line_initial(&s.graph, &s.initial, base)?;
            let u1 = evolve_line_sigma(&u0, &sigma, s.time.t_final, &cfg)?;
            let leak = line_boundary_leakage(&u1);
            let cp = artifact("checkpoint.csv", |b| write_line_checkpoint(b, &u1, s.time.t_final, s.time.dt))?;
            (cp, u0.l2_norm(), u1.l2_norm(), leak)
        }
        _ => {
            let u0 = graph_initial(&s.graph, &s.initial, base)?;
            let u1 = evolve_graph(&u0, s.time.t_final, &cfg)?;
            let leak = boundary_leakage(&u1);
            let cp = artifact("checkpoint.csv", |b| write_graph_checkpoint(b, &u1, s.time.dt))?;
            (cp, weighted_l2_norm(&u0, 0.0)?, weighted_l2_norm(&u1, 0.0)?, leak)
        }
    };
    guard_leakage(leak)?;
    let summary = table(
        "summary.csv",
        ["t_final", "dt", "steps", "norm_initial", "norm_final", "relative_norm_drift", "leakage"],
        [[
            s.time.t_final.to_string(),
            s.time.dt.to_string(),
            steps.to_string(),
            num(n0),
            num(n1),
            num((n1 - n0).abs() / n0),
            num(leak),
        ]],
    )?;
    Ok(vec![checkpoint, summary])
}

fn relative_l2(a: &[Complex64], b: &[Complex64]) -> f64 {
    let (num, den) = a
        .iter()
        .zip(b)
        .fold((0.0, 0.0), |(n, d), (x, y)| (n + (x - y).norm_sqr(), d + y.norm_sqr()));
    (num / den).sqrt()
}

fn overlay(
    file: &'static str,
    names: [&str; 2],
    x: &[f64],
    a: &[Complex64],
    b: &[Complex64],
) -> Result<Artifact, CliError> {
    let [p, q] = names;
    let header = [
        "x".to_string(),
        format!("re_{p}"),
        format!("im_{p}"),
        format!("re_{q}"),
        format!("im_{q}"),
        "abs_diff".to_string(),
    ];
    let rows = x
        .iter()
        .zip(a.iter().zip(b))
        .map(|(&x, (p, q))| [num(x), num(p.re), num(p.im), num(q.re), num(q.im), num((p - q).norm())]);
    table(file, header, rows)
}

fn kernel_compare(k: &KernelCompare, base: &Path) -> JobResult {
    let (sigma, _, _) = line_grid(&k.graph)?;
    let u0 = line_initial(&k.graph, &k.initial, base)?;
    let cfg = EvolutionConfig::new(k.time.dt)?;
    let fd = evolve_line_sigma(&u0, &sigma, k.time.t_final, &cfg)?;
    let leak = line_boundary_leakage(&fd);
    guard_leakage(leak)?;
    let params = layer_params(sigma.a(), sigma.spacing().expect("uniform breakpoints"))?;
    let series = invert_e(&params, k.order, &uniform_nodes(-10.0, 10.0, 2047))?;
    let count = (-k.x_min / k.x_step).round() as usize;
    let x = uniform_nodes(k.x_min, 0.0, count);
    let kernel = solve_negative_halfline(&u0, &sigma, k.time.t_final, &x, &series)?;
    let reference: Vec<Complex64> = x.iter().map(|&v| fd.interpolate(v)).collect();
    let err = relative_l2(&kernel.u, &reference);
    Ok(vec![
        overlay("compare.csv", ["kernel", "fd"], &x, &kernel.u, &reference)?,
        artifact("series.csv", |b| series.write_csv(b))?,
        table(
            "summary.csv",
            ["t", "order", "rho", "tail_bound", "relative_l2_error", "leakage"],
            [[
                k.time.t_final.to_string(),
                k.order.to_string(),
                num(series.rho()),
                num(series.tail_bound()),
                num(err),
                num(leak),
            ]],
        )?,
    ])
}

struct SharpRun {
    initial: LineSamples64,
    evolved: LineSamples64,
    exact: Vec<Complex64>,
    side: Side,
    rates: (f64, f64),
    context: ThresholdContext<f64>,
    leakage: f64,
}

fn sharp_run(s: &Sharpness) -> Result<SharpRun, CliError> {
    let cfg = EvolutionConfig::new(s.dt)?;
    match s.example {
        SharpExample::Star => {
            let ex = sharp_example_star(s.alpha.unwrap_or_default(), s.n.unwrap_or(3))?;
            let u0 = ex.initial_state(s.truncation, s.h)?;
            let u1 = evolve_graph(&u0, 1.0, &cfg)?;
            let edge = |st: &GraphState64| LineSamples::new(st.coords(0), st.values[0].clone());
            let evolved = edge(&u1)?;
            Ok(SharpRun {
                exact: evolved.x.iter().map(|&x| ex.at_one(x)).collect(),
                initial: edge(&u0)?,
                evolved,
                side: Side::Positive,
                rates: ex.rates(),
                context: ThresholdContext::StarFree,
                leakage: boundary_leakage(&u1),
            })
        }
        SharpExample::TwoStep => {
            let a = s.a.as_deref().unwrap_or_default();
            let ex = sharp_example_two_step(a[0], a[1])?;
            let intervals = (2.0 * s.truncation / s.h).round() as usize;
            let u0 = ex.initial_samples(-s.truncation, s.truncation, intervals);
            let u1 = evolve_line_sigma(&u0, &ex.coefficient()?, 1.0, &cfg)?;
            Ok(SharpRun {
                exact: u1.x.iter().map(|&x| ex.at_one(x)).collect(),
                leakage: line_boundary_leakage(&u1),
                initial: u0,
                evolved: u1,
                side: Side::Both,
                rates: ex.rates(),
                context: ThresholdContext::Line {
                    case: LineCase::Both,
                    sigma_minus: (a[0] * a[0]).recip(),
                    sigma_plus: (a[1] * a[1]).recip(),
                },
            })
        }
    }
}

fn fitted(est: DecayEstimate<f64>, when: &str) -> Result<DecayFit<f64>, CliError> {
    match est {
        DecayEstimate::Fitted(f) => Ok(f),
        DecayEstimate::IdenticallyZero { .. } => {
            Err(CliError::Guard(format!("solution at {when} vanishes on the fit window")))
        }
    }
}

fn sharpness(s: &Sharpness) -> JobResult {
    let run = sharp_run(s)?;
    guard_leakage(run.leakage)?;
    let window = |w: Option<[f64; 2]>| w.map_or(DecayWindow::amplitude(), |[lo, hi]| DecayWindow::Explicit(lo, hi));
    let f0 = fitted(fit_gaussian_decay(&run.initial, run.side, window(s.window_initial))?, "t = 0")?;
    let f1 = fitted(fit_gaussian_decay(&run.evolved, run.side, window(s.window_final))?, "t = 1")?;
    let verdict = classify_threshold_with(f0.rate, f1.rate, run.context, s.tolerance)?;
    let fit_row = |t: &str, f: &DecayFit<f64>, expected: f64| {
        [
            t.to_string(),
            num(f.rate),
            num(expected),
            num((f.rate - expected).abs() / expected),
            num(f.intercept),
            num(f.residual),
            num(f.window.0),
            num(f.window.1),
            f.samples.to_string(),
        ]
    };
    let fit = table(
        "fit.csv",
        ["t", "rate", "expected_rate", "relative_error", "intercept", "residual", "window_lo", "window_hi", "samples"],
        [fit_row("0", &f0, run.rates.0), fit_row("1", &f1, run.rates.1)],
    )?;
    let verdicts: [ThresholdVerdict<f64>; 1] = [verdict];
    let verdict_csv = artifact("verdict.csv", |b| write_verdicts(b, &verdicts))?;
    let ln = |z: &Complex64| num(z.norm().max(f64::MIN_POSITIVE).ln());
    let decay = table(
        "decay.csv",
        ["x", "x2", "log_abs_u0", "log_abs_u1", "log_abs_exact1"],
        run.evolved.x.iter().enumerate().map(|(i, &x)| {
            [num(x), num(x * x), ln(&run.initial.u[i]), ln(&run.evolved.u[i]), ln(&run.exact[i])]
        }),
    )?;
    let solution = table(
        "solution.csv",
        ["t", "relative_l2_error", "leakage"],
        [["1".to_string(), num(relative_l2(&run.evolved.u, &run.exact)), num(run.leakage)]],
    )?;
    Ok(vec![fit, verdict_csv, decay, solution])
}

fn reduce_tree(r: &ReduceTree, base: &Path) -> JobResult {
    let u0 = graph_initial(&r.graph, &r.initial, base)?;
    let meta = u0
        .graph
        .tree
        .clone()
        .ok_or_else(|| CliError::Config("reduce-tree needs a regular tree".into()))?;
    let map = reduction_map(&meta)?;
    let cfg = EvolutionConfig::new(r.time.dt)?;
    let w0 = fold_to_line(&averaged_sums(&u0)?, &map)?;
    let line = evolve_line_sigma(&w0, &map.coefficient()?, r.time.t_final, &cfg)?;
    let tree = evolve_graph(&u0, r.time.t_final, &cfg)?;
    let leak = boundary_leakage(&tree);
    guard_leakage(leak)?;
    let folded = fold_to_line(&averaged_sums(&tree)?, &map)?;
    let err = relative_l2(&folded.u, &line.u);
    Ok(vec![
        artifact("reduction.csv", |b| map.write_report(b))?,
        overlay("diagram.csv", ["line", "fold"], &line.x, &line.u, &folded.u)?,
        table(
            "summary.csv",
            ["t", "relative_l2_error", "leakage"],
            [[r.time.t_final.to_string(), num(err), num(leak)]],
        )?,
    ])
}

fn carleman(c: &Carleman, seed: u64) -> JobResult {
    let budget = SmoothnessBudget {
        terms: c.terms,
        max_frequency: c.max_frequency,
    };
    let quad = Quadrature {
        time_nodes: c.time_nodes,
        space_nodes: c.space_nodes,
    };
    let weights = c
        .mu
        .iter()
        .flat_map(|&mu| c.eps.iter().flat_map(move |&eps| c.r.iter().map(move |&r| (mu, eps, r))))
        .map(|(mu, eps, r)| CarlemanWeight::new(mu, eps, r))
        .collect::<qgraph::Result<Vec<_>>>()?;
    let cases: Vec<(usize, u64)> = c
        .n
        .iter()
        .flat_map(|&n| (0..c.seeds).map(move |s| (n, seed.wrapping_add(s))))
        .collect();
    let rows = cases
        .par_iter()
        .map(|&(n, s)| {
            let alphas = alpha_vectors(n)?;
            let sampled = SampledSample::new(&sample_zcomp::<f64>(n, s, budget), quad)?;
            weights
                .iter()
                .map(|w| {
                    Ok(MarginRow {
                        n,
                        seed: s,
                        weight: *w,
                        sides: sampled.sides(w, &alphas)?,
                    })
                })
                .collect::<qgraph::Result<Vec<_>>>()
        })
        .collect::<qgraph::Result<Vec<Vec<_>>>>()?
        .concat();
    let violations = rows.iter().filter(|r| !r.sides.holds()).count();
    let worst = rows
        .iter()
        .filter(|r| r.sides.rhs > 0.0)
        .map(|r| r.sides.lhs / r.sides.rhs)
        .fold(0.0, f64::max);
    Ok(vec![
        artifact("margins.csv", |b| write_margins(b, &rows))?,
        table(
            "summary.csv",
            ["rows", "violations", "max_lhs_over_rhs"],
            [[rows.len().to_string(), violations.to_string(), num(worst)]],
        )?,
    ])
}

fn appell(a: &Appell) -> JobResult {
    let map = AppellTransform::new(a.alpha, a.beta, a.a, a.b)?;
    let inverse = map.inverse();
    let b = Complex64::new(a.initial[0], a.initial[1]);
    let u = |s: f64, y: f64| free_gaussian(b, s, y);
    let probes = uniform_nodes(-0.25 * a.extent, 0.25 * a.extent, 16);
    let rows = a
        .times
        .iter()
        .map(|&t| {
            let (lhs, rhs) = map.norm_pair(u, a.gamma, t, a.extent, a.intervals);
            if !(lhs.is_finite() && rhs.is_finite()) {
                return Err(CliError::Guard(format!("weighted norm at t = {t} is not finite")));
            }
            let round = probes
                .iter()
                .map(|&x| (inverse.apply(|s, y| map.apply(u, s, y), t, x) - u(t, x)).norm())
                .fold(0.0, f64::max);
            Ok([
                t.to_string(),
                num(map.time_map(t)),
                num(lhs),
                num(rhs),
                num((lhs - rhs).abs() / rhs),
                num(round),
            ])
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(vec![table(
        "appell.csv",
        ["t", "s", "norm_transformed", "norm_original", "relative_gap", "round_trip_error"],
        rows,
    )?])
}

fn threshold_sweep(t: &ThresholdSweep) -> JobResult {
    let context = match t.context {
        ContextSpec::Line { case, sigma_minus, sigma_plus } => ThresholdContext::Line {
            case: match case {
                LineCaseName::Negative => LineCase::Negative,
                LineCaseName::Positive => LineCase::Positive,
                LineCaseName::Both => LineCase::Both,
            },
            sigma_minus,
            sigma_plus,
        },
        ContextSpec::StarFree => ThresholdContext::StarFree,
        ContextSpec::StarPotential { n } => ThresholdContext::StarPotential { n },
    };
    let verdicts = t
        .alpha
        .iter()
        .flat_map(|&a| t.beta.iter().map(move |&b| (a, b)))
        .map(|(a, b)| classify_threshold_with(a, b, context, t.tolerance))
        .collect::<qgraph::Result<Vec<_>>>()?;
    Ok(vec![artifact("verdicts.csv", |b| write_verdicts(b, &verdicts))?])
}
