use super::operator::{CrankNicolson, TreeSystem};
use super::{EvolutionConfig, PiecewiseCoefficient};
use crate::error::{Error, Result};
use crate::line::LineSamples;
use crate::scalar::{c, Real};

/// Evolves `i u_t + (σ u_x)_x = 0` on the sample grid of `u0` with Dirichlet
/// ends. The grid may be non-uniform but every breakpoint of `σ` inside it
/// must be a node.
pub fn evolve_line_sigma<T: Real>(
    u0: &LineSamples<T>,
    sigma: &PiecewiseCoefficient<T>,
    t_final: T,
    cfg: &EvolutionConfig<T>,
) -> Result<LineSamples<T>> {
    let x = &u0.x;
    let n = x.len();
    if n < 3 {
        return Err(Error::InvalidParameter(format!("line grid needs at least 3 nodes, got {n}")));
    }
    for &b in sigma.breakpoints() {
        if b <= x[0] || b >= x[n - 1] {
            continue;
        }
        let i = x.partition_point(|&xi| xi < b);
        let near = [i.saturating_sub(1), i.min(n - 1)]
            .iter()
            .map(|&k| (x[k] - b).abs())
            .fold(T::infinity(), T::min);
        let local = x[i.min(n - 1)] - x[i.saturating_sub(1).min(n - 2)];
        if near > T::lit(1e-9) * local.abs().max(T::epsilon()) {
            return Err(Error::BreakpointOffGrid(b.to_f64_lossy()));
        }
    }
    let (steps, dt) = cfg.steps_for(t_final)?;
    let mut out = u0.clone();
    out.u[0] = c(T::zero(), T::zero());
    out.u[n - 1] = c(T::zero(), T::zero());
    if steps == 0 {
        return Ok(out);
    }

    let cond = |i: usize| {
        let mid = T::lit(0.5) * (x[i] + x[i + 1]);
        sigma.sigma_at(mid) / (x[i + 1] - x[i])
    };
    let mut system = TreeSystem::with_capacity(n - 2);
    for i in 1..n - 1 {
        let mass = T::lit(0.5) * (x[i + 1] - x[i - 1]);
        let parent = if i == 1 { None } else { Some((i - 2, cond(i - 1))) };
        system.push(mass, parent);
    }
    system.anchor[0] += cond(0);
    system.anchor[n - 3] += cond(n - 2);

    let cn = CrankNicolson::new(system, dt)?;
    let mut u: Vec<_> = u0.u[1..n - 1].to_vec();
    for _ in 0..steps {
        cn.step(&mut u);
    }
    out.u[1..n - 1].copy_from_slice(&u);
    Ok(out)
}

/// Largest `|u|` on the outer tenth of the sampled interval at either end,
/// relative to the global maximum.
pub fn line_boundary_leakage<T: Real>(samples: &LineSamples<T>) -> T {
    let peak = samples.u.iter().map(|z| z.norm()).fold(T::zero(), T::max);
    if peak == T::zero() || samples.x.is_empty() {
        return T::zero();
    }
    let lo = samples.x[0];
    let hi = samples.x[samples.x.len() - 1];
    let band = T::lit(0.1) * (hi - lo);
    let tail = samples
        .x
        .iter()
        .zip(&samples.u)
        .filter(|(&x, _)| x <= lo + band || x >= hi - band)
        .map(|(_, z)| z.norm())
        .fold(T::zero(), T::max);
    tail / peak
}
