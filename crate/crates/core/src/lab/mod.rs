//! Decay-rate estimation, the `αβ` threshold classifiers, closed-form
//! sharpness examples and the Appell transform.

mod appell;
mod decay;
mod sharp;
mod threshold;

pub use appell::{appell_transform, AppellDirection, AppellTransform};
pub use decay::{fit_gaussian_decay, DecayEstimate, DecayFit, DecayWindow, Side, MIN_SAMPLES, NOISE_FLOOR};
pub use sharp::{free_gaussian, sharp_example_star, sharp_example_two_step, StarSharpness, TwoStepSharpness};
pub use threshold::{
    classify_threshold, classify_threshold_with, gamma_gamma, gamma_gamma_exact, write_verdicts, LineCase,
    Regime, ThresholdContext, ThresholdVerdict, BOUNDARY_TOLERANCE,
};
