//! Hermitian functional calculus, divided differences and the classical
//! integral representations of monotone and convex functions.

mod kernel;
mod measure;
mod moments;
mod scalar_fn;

pub use kernel::{kraus_eval, nevanlinna_eval, IntegralForm};
pub use measure::{kraus_series, nevanlinna_series, taylor_coefficients, DiscreteMeasure};
pub use moments::fit_measure_from_moments;
pub use scalar_fn::{herm_apply, herm_derivative, loewner_matrix, HermitianCalculus, ScalarFunction};
