//! Randomized testers for matrix monotonicity and convexity, the control
//! function, and two classical multivariable examples.

mod domain;
mod examples;
mod gamma;
mod report;
mod tester;

pub use domain::{parse_domain_kind, parse_levels, DomainKind, DomainSpec};
pub use examples::{geometric_mean_evaluator, schur_complement_evaluator, GeometricMean, SchurComplement};
pub use gamma::{control_gamma, GammaKind};
pub use report::{TestReport, Verdict, Witness, WitnessKind};
pub use tester::{check_convex, check_monotone, recheck, violation, Recheck};

#[cfg(test)]
mod tests;
