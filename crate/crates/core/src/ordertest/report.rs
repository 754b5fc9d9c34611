use std::fmt;

use crate::error::{Error, Result};
use crate::freecore::MatrixTuple;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "pass" => Ok(Verdict::Pass),
            "fail" => Ok(Verdict::Fail),
            _ => Err(Error::Invalid(format!("unknown verdict '{s}'"))),
        }
    }
}

/// Which inequality a witness violates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WitnessKind {
    /// `f(B) − f(A)` for `A ≤ B`.
    Difference,
    /// `Df(A)[B]` for PSD `B`.
    Derivative,
    /// `(f(A) + f(B))/2 − f((A + B)/2)`.
    Midpoint,
    /// `D²f(A)[B]`.
    Hessian,
}

impl WitnessKind {
    pub fn as_str(self) -> &'static str {
        match self {
            WitnessKind::Difference => "difference",
            WitnessKind::Derivative => "derivative",
            WitnessKind::Midpoint => "midpoint",
            WitnessKind::Hessian => "hessian",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "difference" => Ok(WitnessKind::Difference),
            "derivative" => Ok(WitnessKind::Derivative),
            "midpoint" => Ok(WitnessKind::Midpoint),
            "hessian" => Ok(WitnessKind::Hessian),
            _ => Err(Error::Invalid(format!("unknown witness kind '{s}'"))),
        }
    }
}

impl fmt::Display for WitnessKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A pair of tuples exhibiting a negative eigenvalue.
#[derive(Clone, Debug, PartialEq)]
pub struct Witness<T: crate::Real> {
    pub kind: WitnessKind,
    pub a: MatrixTuple<T>,
    pub b: MatrixTuple<T>,
    pub min_eig: T,
    pub level: usize,
    pub trial: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TestReport<T: crate::Real> {
    pub verdict: Verdict,
    pub samples: usize,
    pub witness: Option<Witness<T>>,
    pub tol: T,
    pub seed: u64,
}

impl<T: crate::Real> TestReport<T> {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}
