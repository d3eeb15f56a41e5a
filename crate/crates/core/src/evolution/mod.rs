//! Crank–Nicolson evolution for `i u_t + Δ_Γ u = 0` on trees, for
//! `i u_t + ∂_x(σ ∂_x u) = 0` on the line, and for `u_t = i(Δ_Γ + V)u`.
//!
//! The Laplacian part is exactly unitary in the trapezoid norm. Potentials are
//! applied by Strang splitting with exact phase factors, so spatially constant
//! potentials are reproduced to round-off.

mod checkpoint;
mod coefficient;
mod graph;
mod line;
pub(crate) mod operator;

pub use checkpoint::{read_checkpoint, write_graph_checkpoint, write_line_checkpoint, Checkpoint, CheckpointHeader};
pub use coefficient::PiecewiseCoefficient;
pub use graph::{boundary_leakage, evolve_graph, evolve_graph_potential};
pub use line::{evolve_line_sigma, line_boundary_leakage};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Relative amplitude beyond `0.8 L` above which a run counts as having hit
/// the truncation boundary.
pub const LEAKAGE_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scheme {
    #[default]
    CrankNicolson,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolutionConfig<T: Real> {
    pub dt: T,
    pub scheme: Scheme,
}

impl<T: Real> EvolutionConfig<T> {
    pub fn new(dt: T) -> Result<Self> {
        if !(dt > T::zero()) || !dt.is_finite() {
            return Err(Error::InvalidParameter(format!("time step must be positive, got {dt}")));
        }
        Ok(Self {
            dt,
            scheme: Scheme::CrankNicolson,
        })
    }

    /// Number of steps and the signed step for a run of length `t_final`.
    pub fn steps_for(&self, t_final: T) -> Result<(usize, T)> {
        let ratio = t_final.abs() / self.dt;
        let n = ratio.round();
        if (ratio - n).abs() > T::lit(1e-9) * n.max(T::one()) {
            return Err(Error::StepMismatch {
                dt: self.dt.to_f64_lossy(),
                t_final: t_final.to_f64_lossy(),
            });
        }
        let signed = if t_final < T::zero() { -self.dt } else { self.dt };
        Ok((n.to_usize().expect("finite step count"), signed))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_counts() {
        let cfg = EvolutionConfig::new(1e-3).unwrap();
        assert_eq!(cfg.steps_for(1.0).unwrap(), (1000, 1e-3));
        assert_eq!(cfg.steps_for(-0.5).unwrap(), (500, -1e-3));
        assert_eq!(cfg.steps_for(0.0).unwrap().0, 0);
        assert!(matches!(cfg.steps_for(1.00005), Err(Error::StepMismatch { .. })));
        assert!(EvolutionConfig::new(0.0).is_err());
    }
}
