//! Carleman weights on a star, the α-vectors they are built from, random
//! admissible test functions and a quadrature check of the weighted
//! inequality `R²ε/(8μ) Σ_k ‖e^{φ^k} q‖² ≤ Σ_k ‖e^{φ^k}(∂_t + iΔ) q‖²`.

mod alpha;
mod jet;
mod sides;
mod zcomp;

pub use alpha::{alpha_vectors, AlphaVectors, Rational};
pub use jet::Jet;
pub use sides::{
    carleman_sides, parameter_grid, write_margins, CarlemanSides, CarlemanWeight, MarginRow, Quadrature,
    SampledSample,
};
pub use zcomp::{sample_zcomp, PointValues, SmoothnessBudget, SpaceProfile, Term, TimeProfile, ZcompSample};
