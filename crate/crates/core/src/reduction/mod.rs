//! Reductions of star and regular-tree problems to the line.
//!
//! On a star, the sum of the components solves the Neumann problem on the
//! half-line and the differences `u_k − S/N` solve the Dirichlet problem;
//! [`star_sum`] returns their even and odd extensions. On a regular tree,
//! [`averaged_sums`] computes the descendant averages `Z^ᾱ`,
//! [`reduction_map`] builds the piecewise linear maps `T_k` that turn the
//! derivative-jump conditions of the even extension of `Z` into the flux
//! continuity of a step coefficient, and [`fold_to_line`] applies them.

mod averaged;
mod fold;
mod map;
mod star;

pub use averaged::{averaged_sums, difference_z, AveragedSums};
pub use fold::fold_to_line;
pub use map::{reduction_map, ReductionMap};
pub use star::{star_sum, StarMode};
