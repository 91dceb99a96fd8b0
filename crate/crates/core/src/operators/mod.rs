//! Sine-spectral discretisation of the Dirichlet Laplacian on `(0, L)`, the
//! observation (feedback) operator and the source nonlinearities.

mod feedback;
mod nonlinearity;
mod spectrum;

pub use feedback::{build_feedback, FeedbackOperator};
pub use nonlinearity::{
    build_nonlinearity, sampled_gradient_mismatch, sampled_growth_ratio, sampled_lipschitz_ratio, CoefficientSource,
    Nonlinearity, NonlinearitySpec,
};
pub use spectrum::{build_spectrum, Spectrum};
