//! Schrödinger evolution on metric graphs and layered lines.
//!
//! * [`graph`]: star graphs, regular trees, grids, sampled states, norms and
//!   Kirchhoff diagnostics.
//! * [`evolution`]: unitary Crank–Nicolson evolution on trees and on the line
//!   with a step coefficient, with optional potentials.
//! * [`transfer`]: transfer matrices, exponential polynomials, the Wiener
//!   inversion of the transmission denominator and the exact kernels on the
//!   left half-line.
//! * [`reduction`]: star sums, averaged tree sums and the fold onto a line.
//! * [`lab`]: Gaussian decay fits, threshold verdicts, sharp examples and the
//!   Appell transform.
//! * [`carleman`]: Carleman weights, α-vectors and numerical checks of the
//!   weighted inequality.
//!
//! Numerical code is generic over [`Real`]; `f64` aliases are provided below.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod carleman;
pub mod error;
pub mod evolution;
pub mod graph;
pub mod lab;
pub mod line;
pub mod reduction;
pub mod scalar;
pub mod transfer;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::{Cplx, Real};

pub type GraphState64 = graph::GraphState<f64>;
pub type MetricGraph64 = graph::MetricGraph<f64>;
pub type LineSamples64 = line::LineSamples<f64>;
pub type PiecewiseCoefficient64 = evolution::PiecewiseCoefficient<f64>;
pub type Complex64 = Cplx<f64>;
pub type ExpPolynomial64 = transfer::ExpPolynomial<f64>;
pub type WienerSeries64 = transfer::WienerSeries<f64>;
pub type ReductionMap64 = reduction::ReductionMap<f64>;
pub type DecayEstimate64 = lab::DecayEstimate<f64>;
pub type ThresholdVerdict64 = lab::ThresholdVerdict<f64>;
pub type ZcompSample64 = carleman::ZcompSample<f64>;
pub type CarlemanWeight64 = carleman::CarlemanWeight<f64>;
