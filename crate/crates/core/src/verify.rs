//! Quick runtime self-checks of each module's core invariants, used by the
//! command-line `--verify` flag.

use std::fmt;

use crate::carleman::{alpha_vectors, carleman_sides, sample_zcomp, CarlemanWeight, Quadrature, SmoothnessBudget};
use crate::error::Result;
use crate::evolution::{evolve_graph, EvolutionConfig};
use crate::graph::{build_regular_tree, build_star, kirchhoff_residual, weighted_l2_norm, GraphState};
use crate::lab::{appell_transform, fit_gaussian_decay, free_gaussian, gamma_gamma, AppellDirection, DecayWindow, Side};
use crate::line::{uniform_nodes, LineSamples};
use crate::reduction::{averaged_sums, fold_to_line, reduction_map};
use crate::scalar::c;
use crate::transfer::{chain_entries_closed_form, chain_product, determinant_closed_form, invert_e, layer_params};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Module {
    Graph,
    Evolution,
    Transfer,
    Reduction,
    Lab,
    Carleman,
}

impl Module {
    pub const ALL: [Module; 6] = [
        Module::Graph,
        Module::Evolution,
        Module::Transfer,
        Module::Reduction,
        Module::Lab,
        Module::Carleman,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Module::Graph => "graph",
            Module::Evolution => "evolution",
            Module::Transfer => "transfer",
            Module::Reduction => "reduction",
            Module::Lab => "lab",
            Module::Carleman => "carleman",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub module: Module,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{verdict}] {}::{}: {}", self.module.name(), self.name, self.detail)
    }
}

fn check(module: Module, name: &'static str, value: f64, bound: f64) -> Check {
    Check {
        module,
        name,
        passed: value <= bound,
        detail: format!("{value:.3e} <= {bound:.1e}"),
    }
}

fn failed(module: Module, name: &'static str, err: crate::error::Error) -> Check {
    Check {
        module,
        name,
        passed: false,
        detail: err.to_string(),
    }
}

fn gaussian_star(n: usize, truncation: f64, h: f64) -> Result<GraphState<f64>> {
    let (g, grid) = build_star(n, truncation, h)?;
    Ok(GraphState::from_fn(g, grid, |_, x| c((-x * x).exp(), 0.0)))
}

fn graph_checks() -> Result<Vec<Check>> {
    let s = gaussian_star(3, 12.0, 0.02)?;
    let norm = weighted_l2_norm(&s, 0.0)?;
    let exact = (3.0 * (std::f64::consts::PI / 8.0).sqrt()).sqrt();
    let k = kirchhoff_residual(&s);
    Ok(vec![
        check(Module::Graph, "gaussian norm", (norm - exact).abs(), 1e-10),
        check(Module::Graph, "even data continuity", k.continuity, 0.0),
        check(Module::Graph, "even data flux", k.flux, 1e-4),
    ])
}

fn evolution_checks() -> Result<Vec<Check>> {
    let u0 = gaussian_star(3, 20.0, 0.05)?;
    let cfg = EvolutionConfig::new(0.01)?;
    let n0 = weighted_l2_norm(&u0, 0.0)?;
    let u1 = evolve_graph(&u0, 1.0, &cfg)?;
    let back = evolve_graph(&u1, -1.0, &cfg)?;
    Ok(vec![
        check(Module::Evolution, "unitarity", (weighted_l2_norm(&u1, 0.0)? - n0).abs() / n0, 1e-10),
        check(Module::Evolution, "reversibility", back.relative_l2_error(&u0), 1e-9),
    ])
}

fn transfer_checks() -> Result<Vec<Check>> {
    let p = layer_params(&[1.0, 2.0, 0.7, 1.4], 0.8)?;
    let mut chain = 0.0f64;
    let mut det = 0.0f64;
    for xi in [-2.3, -0.4, 0.0, 0.9, 3.1] {
        for k in 1..=3 {
            for j in k..=3 {
                let m = chain_product(j, k, xi, &p)?;
                if j > k {
                    let (b, a) = chain_entries_closed_form(j, k, xi, &p)?;
                    chain = chain.max((m.at(2, 1) - b).norm()).max((m.at(2, 2) - a).norm());
                }
                let d = determinant_closed_form(j, k, &p)?;
                det = det.max((m.at(1, 1).norm_sqr() - m.at(2, 1).norm_sqr() - d).abs());
            }
        }
    }
    let series = invert_e(&layer_params(&[1.0, 2.0, 1.0], 1.0)?, 20, &uniform_nodes(-10.0, 10.0, 2047))?;
    let grid = uniform_nodes(-10.0, 10.0, 2047);
    let residual = series.residual(&grid)?;
    Ok(vec![
        check(Module::Transfer, "closed-form chain entries", chain, 1e-12),
        check(Module::Transfer, "determinant identity", det, 1e-12),
        check(Module::Transfer, "wiener residual", residual, 1e-6),
        check(Module::Transfer, "wiener tail bound", residual, series.tail_bound()),
    ])
}

fn reduction_checks() -> Result<Vec<Check>> {
    let (g, grid) = build_regular_tree(&[1.0], &[1, 2], 8.0, 0.05)?;
    let tree = g.tree.clone().expect("regular tree metadata");
    let map = reduction_map(&tree)?;
    let sigma = map.sigma();
    let expected = [1.0_f64, 0.25, 0.25, 1.0];
    let sigma_err = sigma.iter().zip(expected).map(|(s, e): (&f64, f64)| (s - e).abs()).fold(0.0, f64::max);
    let state = GraphState::from_fn(g, grid, |_, _| c(1.0, 0.0));
    let folded = fold_to_line(&averaged_sums(&state)?, &map)?;
    let flat = folded.u.iter().map(|z| (z - c(1.0, 0.0)).norm()).fold(0.0, f64::max);
    Ok(vec![
        check(Module::Reduction, "binary tree sigma", sigma_err, 1e-15),
        check(Module::Reduction, "constant fold", flat, 1e-14),
    ])
}

fn lab_checks() -> Result<Vec<Check>> {
    let gammas = [(3, 1.0), (4, 0.5), (5, 0.75)]
        .iter()
        .map(|&(n, g)| Ok((gamma_gamma::<f64>(n)? - g).abs()))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let samples = LineSamples::from_fn(-10.0, 10.0, 2000, |x: f64| c((-0.25 * x * x).exp(), 0.0));
    let fit = fit_gaussian_decay(&samples, Side::Both, DecayWindow::Default)?;
    let rate_err = fit.rate().map(|r: f64| (r - 0.25).abs()).unwrap_or(f64::INFINITY);
    let family = |s: f64, y: f64| free_gaussian(c(0.5, 0.3), s, y);
    let fwd = appell_transform(family, 0.6, 1.9, 0.0, 1.0, AppellDirection::Forward)?;
    let back = appell_transform(fwd, 0.6, 1.9, 0.0, 1.0, AppellDirection::Inverse)?;
    let round: f64 = [(0.2, -1.0), (0.5, 0.3), (0.9, 2.0)]
        .iter()
        .map(|&(t, x)| (back(t, x) - family(t, x)).norm())
        .fold(0.0, f64::max);
    Ok(vec![
        check(Module::Lab, "critical exponent", gammas, 0.0),
        check(Module::Lab, "planted decay rate", rate_err, 1e-6),
        check(Module::Lab, "appell round trip", round, 1e-10),
    ])
}

fn carleman_checks() -> Result<Vec<Check>> {
    let invariants = (2..=8).filter(|&n| alpha_vectors(n).is_err()).count();
    let q = sample_zcomp::<f64>(3, 1, SmoothnessBudget::default());
    let (spread, flux) = q.membership_defect(&uniform_nodes(0.0, 1.0, 200));
    let s = carleman_sides(&q, &CarlemanWeight::new(1.0, 0.5, 4.0)?, &alpha_vectors(3)?, Quadrature::default())?;
    Ok(vec![
        check(Module::Carleman, "alpha-vector invariants", invariants as f64, 0.0),
        check(Module::Carleman, "sample membership", spread.max(flux), 1e-12),
        Check {
            module: Module::Carleman,
            name: "inequality margin",
            passed: s.holds(),
            detail: format!("rhs - lhs = {:.3e}, error estimate {:.1e}", s.margin, s.error_estimate),
        },
    ])
}

/// Runs the checks of one module; errors become failed checks.
pub fn verify(module: Module) -> Vec<Check> {
    let run = match module {
        Module::Graph => graph_checks,
        Module::Evolution => evolution_checks,
        Module::Transfer => transfer_checks,
        Module::Reduction => reduction_checks,
        Module::Lab => lab_checks,
        Module::Carleman => carleman_checks,
    };
    run().unwrap_or_else(|e| vec![failed(module, "setup", e)])
}
