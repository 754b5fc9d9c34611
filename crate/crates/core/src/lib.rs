//! Numerical toolkit for free noncommutative function theory.

pub mod error;
pub mod freecore;
pub mod funcalc;
pub mod io;
pub mod linalg;
pub mod ncexpr;
pub mod ordertest;
pub mod realize;
pub mod sample;
pub mod scalar;
pub mod wedge;

pub use error::{Error, Result};
pub use scalar::Real;

pub use freecore::{FreeFunction, FreeSeries, MatrixTuple, Word};
pub use linalg::CMat;

pub type FreeSeries64 = FreeSeries<f64>;
pub type FreeSeries32 = FreeSeries<f32>;
pub type MatrixTuple64 = MatrixTuple<f64>;
pub type MatrixTuple32 = MatrixTuple<f32>;
pub type CMat64 = CMat<f64>;
pub type CMat32 = CMat<f32>;
pub type MonotoneRealization64 = realize::MonotoneRealization<f64>;
pub type ButterflyRealization64 = realize::ButterflyRealization<f64>;
pub type DiscreteMeasure64 = funcalc::DiscreteMeasure<f64>;
pub type TestReport64 = ordertest::TestReport<f64>;
pub type DomainSpec64 = ordertest::DomainSpec<f64>;
