//! Exact solution of `i u_t + (σ u_x)_x = 0` for a step coefficient with
//! equally spaced breakpoints `0, l, …, (N−2)l` and values `σ = a_j^{-2}`.
//!
//! The frequency-domain transfer matrices are encoded symbolically as
//! [`ExpPolynomial`]s. The denominator of the reflection coefficient is
//! inverted by a level-by-level geometric series ([`invert_e`]), which turns
//! the first-row kernels into finite sums of shifted free kernels
//! ([`KernelAtom`]). [`solve_negative_halfline`] assembles the solution on
//! `x ≤ 0` and exposes the profile η with `u(t,x) = (k_t ∗ η)(a_1 x)`.

mod coefficients;
mod exppoly;
mod halfline;
mod kernel;
mod layers;
mod wiener;

pub use coefficients::{
    chain_entries_closed_form, coefficients_c, coefficients_c_direct, determinant_closed_form, ef_recursion,
    DEGENERACY_TOLERANCE,
};
pub use exppoly::{weight, Direction, ExpPolynomial, PRUNE_TOLERANCE};
pub use halfline::{
    solve_negative_halfline, two_step_psi, EtaAtom, EtaProfile, HalfLineSolution, Support, QUADRATURE_TAIL_TOLERANCE,
};
pub use kernel::{
    k_t, k_t_regularized, kernel_h, kernel_p1k, kernel_p1k_atoms, layer_interval, KernelAtom, KernelBase, Propagator,
};
pub use layers::{chain_product, layer_params, transfer_matrix, LayerParams, Mat2};
pub use wiener::{invert_e, WienerSeries};
