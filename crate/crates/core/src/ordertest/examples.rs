use super::domain::corner22;
use crate::error::{Error, Result};
use crate::freecore::{FreeFunction, MatrixTuple};
use crate::funcalc::{herm_apply, ScalarFunction};
use crate::linalg::{self, CMat};
use crate::scalar::{lit, Real};

const HERM_TOL: f64 = 1e-10;

fn corner11<T: Real>(x: &CMat<T>) -> CMat<T> {
    let n = x.nrows() / 2;
    CMat::from_fn(n, n, |i, j| x[(2 * i, 2 * j)])
}

fn corner12<T: Real>(x: &CMat<T>) -> CMat<T> {
    let n = x.nrows() / 2;
    CMat::from_fn(n, n, |i, j| x[(2 * i, 2 * j + 1)])
}

fn corner21<T: Real>(x: &CMat<T>) -> CMat<T> {
    let n = x.nrows() / 2;
    CMat::from_fn(n, n, |i, j| x[(2 * i + 1, 2 * j)])
}

/// `X ↦ X_11 − X_12 X_22⁻¹ X_21` on one letter whose level-`n` value is a
/// `2n × 2n` matrix stored level-major (even indices form `X_11`).
#[derive(Clone, Copy, Debug, Default)]
pub struct SchurComplement;

pub fn schur_complement_evaluator() -> SchurComplement {
    SchurComplement
}

impl<T: Real> FreeFunction<T> for SchurComplement {
    fn letters(&self) -> usize {
        1
    }

    fn input_block(&self) -> usize {
        2
    }

    fn eval(&self, z: &MatrixTuple<T>) -> Result<CMat<T>> {
        let x = z.letter(1);
        if !x.nrows().is_multiple_of(2) {
            return Err(Error::DimensionMismatch(format!("Schur complement needs even size, got {}", x.nrows())));
        }
        let x22 = corner22(x);
        if linalg::is_hermitian(x, lit(HERM_TOL)) && linalg::min_eig(&x22) <= T::zero() {
            return Err(Error::Domain("X_22 is not positive definite".into()));
        }
        let solved = linalg::solve(&x22, &corner21(x), "X_22").map_err(|_| Error::Domain("X_22 is singular".into()))?;
        Ok(corner11(x) - corner12(x) * solved)
    }

    fn domain(&self) -> String {
        "Hermitian 2x2-block X with X_22 positive definite".into()
    }

    fn contains(&self, z: &MatrixTuple<T>) -> bool {
        let x = z.letter(1);
        x.nrows().is_multiple_of(2) && linalg::is_hermitian(x, lit(HERM_TOL)) && linalg::min_eig(&corner22(x)) > T::zero()
    }
}

const SQRT_ITERATIONS: usize = 100;

/// Principal square root: spectral for Hermitian input, Denman–Beavers
/// iteration otherwise.
fn principal_sqrt<T: Real>(a: &CMat<T>) -> Result<CMat<T>> {
    if linalg::is_hermitian(a, lit(HERM_TOL)) {
        if linalg::min_eig(a) <= T::zero() {
            return Err(Error::Domain("geometric mean needs positive definite arguments".into()));
        }
        return herm_apply(&ScalarFunction::Power(lit(0.5)), a);
    }
    let n = a.nrows();
    let mut y = a.clone();
    let mut z = linalg::identity::<T>(n);
    let half = num_complex::Complex::new(lit::<T>(0.5), T::zero());
    let tol = T::default_epsilon() * lit(16.0);
    for _ in 0..SQRT_ITERATIONS {
        let yi = linalg::inverse(&y, "square root iterate").map_err(|e| Error::Domain(e.to_string()))?;
        let zi = linalg::inverse(&z, "square root iterate").map_err(|e| Error::Domain(e.to_string()))?;
        let y_next = (&y + zi) * half;
        let z_next = (&z + yi) * half;
        let step = (&y_next - &y).norm();
        y = y_next;
        z = z_next;
        if step <= tol * (T::one() + y.norm()) {
            return Ok(y);
        }
    }
    Err(Error::Domain("square root iteration did not converge".into()))
}

/// `X_1^{1/2} (X_1^{-1/2} X_2 X_1^{-1/2})^{1/2} X_1^{1/2}` on pairs of positive matrices.
#[derive(Clone, Copy, Debug, Default)]
pub struct GeometricMean;

pub fn geometric_mean_evaluator() -> GeometricMean {
    GeometricMean
}

impl<T: Real> FreeFunction<T> for GeometricMean {
    fn letters(&self) -> usize {
        2
    }

    fn eval(&self, z: &MatrixTuple<T>) -> Result<CMat<T>> {
        let (x1, x2) = (z.letter(1), z.letter(2));
        let hermitian = z.is_hermitian(lit(HERM_TOL));
        if hermitian && linalg::min_eig(x2) <= T::zero() {
            return Err(Error::Domain("geometric mean needs positive definite arguments".into()));
        }
        let s = principal_sqrt(x1)?;
        let si = linalg::inverse(&s, "X_1^{1/2}").map_err(|e| Error::Domain(e.to_string()))?;
        let inner = &si * x2 * &si;
        let out = &s * principal_sqrt(&inner)? * &s;
        Ok(if hermitian { linalg::herm_part(&out) } else { out })
    }

    fn domain(&self) -> String {
        "pairs of positive definite matrices".into()
    }

    fn contains(&self, z: &MatrixTuple<T>) -> bool {
        z.is_hermitian(lit(HERM_TOL)) && z.entries().iter().all(|x| linalg::min_eig(x) > T::zero())
    }
}
