//! Words, truncated free power series with matrix coefficients, matrix
//! tuples, and the [`FreeFunction`] abstraction with exact coefficient and
//! derivative read-off.

mod function;
pub mod series;
mod tuple;
mod word;

pub use function::{
    directional_derivative, extract_coefficient, finite_difference, nilpotent_probe, FnEvaluator, FreeFunction,
};
pub use series::{all_ones_series, geometric_series, univariate, FreeSeries};
pub use tuple::MatrixTuple;
pub use word::Word;
