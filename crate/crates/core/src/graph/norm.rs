use super::GraphState;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// `(Σ_e ∫ e^{2γ x²} |u^e|² dx)^{1/2}` by the trapezoid rule, with `x` the
/// distance from the root vertex. `γ = 0` gives the plain L² norm.
///
/// Fails with [`Error::Overflow`] when `e^{2γx²}` is not representable on the
/// grid, and with [`Error::NotDecaying`] when the weighted integrand is still
/// significant on the outer fifth of the rays.
pub fn weighted_l2_norm<T: Real>(state: &GraphState<T>, gamma: T) -> Result<T> {
    let two_gamma = T::lit(2.0) * gamma;
    let mut x_max = T::zero();
    for (e, g) in state.grid.edges.iter().enumerate() {
        x_max = x_max.max(state.graph.edge_offset(e) + g.end());
    }
    let max_exponent = two_gamma * x_max * x_max;
    if max_exponent >= T::max_value().ln() {
        return Err(Error::Overflow {
            max_exponent: max_exponent.to_f64_lossy(),
        });
    }

    let mut total = T::zero();
    let mut peak = T::zero();
    let mut tail_peak = T::zero();
    for (e, g) in state.grid.edges.iter().enumerate() {
        let offset = state.graph.edge_offset(e);
        let half = T::lit(0.5) * g.h;
        for (i, z) in state.values[e].iter().enumerate() {
            let x = offset + g.node(i);
            let f = (two_gamma * x * x).exp() * z.norm_sqr();
            let w = if i == 0 || i == g.intervals { half } else { g.h };
            total += w * f;
            peak = peak.max(f);
            if let Some(l) = g.truncation {
                if g.node(i) >= T::lit(0.8) * l {
                    tail_peak = tail_peak.max(f);
                }
            }
        }
    }
    if gamma > T::zero() && peak > T::zero() {
        let tail_ratio = tail_peak / peak;
        if tail_ratio > T::lit(1e-6) {
            return Err(Error::NotDecaying {
                tail_ratio: tail_ratio.to_f64_lossy(),
            });
        }
    }
    Ok(total.sqrt())
}
