use super::DiscreteMeasure;
use crate::error::{Error, Result};
use crate::freecore::{FreeFunction, MatrixTuple};
use crate::linalg::{self, CMat};
use crate::scalar::{lit, real, to_f64, Real};

fn check_square<T: Real>(a: &CMat<T>) -> Result<()> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!("expected a square matrix, got {}x{}", a.nrows(), a.ncols())));
    }
    Ok(())
}

/// `Σ_j w_j A^p (I + t_j A)^{-1}`.
fn kernel_sum<T: Real>(mu: &DiscreteMeasure<T>, a: &CMat<T>, power: usize) -> Result<CMat<T>> {
    let n = a.nrows();
    let id = linalg::identity::<T>(n);
    let mut ap = id.clone();
    for _ in 0..power {
        ap = &ap * a;
    }
    let mut out = linalg::zeros(n, n);
    for (&t, &w) in mu.atoms().iter().zip(mu.weights()) {
        if w == T::zero() {
            continue;
        }
        let shifted = &id + a * real(t);
        let what = format!("I + ({})A is singular", to_f64(t));
        out += linalg::solve(&shifted, &ap, &what)? * real(w);
    }
    Ok(out)
}

fn symmetrize_if_hermitian<T: Real>(a: &CMat<T>, out: CMat<T>) -> CMat<T> {
    if linalg::is_hermitian(a, lit(1e-12)) {
        linalg::herm_part(&out)
    } else {
        out
    }
}

/// `a·I + Σ_j w_j A (I + t_j A)^{-1}`.
pub fn nevanlinna_eval<T: Real>(a: T, mu: &DiscreteMeasure<T>, x: &CMat<T>) -> Result<CMat<T>> {
    check_square(x)?;
    let n = x.nrows();
    let out = linalg::identity::<T>(n) * real(a) + kernel_sum(mu, x, 1)?;
    Ok(symmetrize_if_hermitian(x, out))
}

/// `a·I + b·A + Σ_j w_j A² (I + t_j A)^{-1}`.
pub fn kraus_eval<T: Real>(a: T, b: T, mu: &DiscreteMeasure<T>, x: &CMat<T>) -> Result<CMat<T>> {
    check_square(x)?;
    let n = x.nrows();
    let out = linalg::identity::<T>(n) * real(a) + x * real(b) + kernel_sum(mu, x, 2)?;
    Ok(symmetrize_if_hermitian(x, out))
}

/// One-letter free function given by a Nevanlinna or Kraus integral form,
/// evaluated through resolvents so that it accepts arbitrary square input.
#[derive(Clone, Debug, PartialEq)]
pub struct IntegralForm<T: Real> {
    pub a: T,
    /// `None` selects the Nevanlinna kernel, `Some(b)` the Kraus kernel.
    pub b: Option<T>,
    pub mu: DiscreteMeasure<T>,
}

impl<T: Real> IntegralForm<T> {
    pub fn nevanlinna(a: T, mu: DiscreteMeasure<T>) -> Self {
        IntegralForm { a, b: None, mu }
    }

    pub fn kraus(a: T, b: T, mu: DiscreteMeasure<T>) -> Self {
        IntegralForm { a, b: Some(b), mu }
    }
}

impl<T: Real> FreeFunction<T> for IntegralForm<T> {
    fn letters(&self) -> usize {
        1
    }

    fn eval(&self, z: &MatrixTuple<T>) -> Result<CMat<T>> {
        match self.b {
            None => nevanlinna_eval(self.a, &self.mu, z.letter(1)),
            Some(b) => kraus_eval(self.a, b, &self.mu, z.letter(1)),
        }
    }

    fn domain(&self) -> String {
        "square X with I + tX invertible for every atom t".into()
    }

    fn contains(&self, z: &MatrixTuple<T>) -> bool {
        self.eval(z).is_ok()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freecore::{extract_coefficient, Word};

    fn scalar(x: f64) -> CMat<f64> {
        linalg::diag(&[x])
    }

    #[test]
    fn nevanlinna_examples() {
        let a = linalg::from_rows::<f64>(&[&[0.1, 0.2], &[0.2, -0.3]]);
        let empty = DiscreteMeasure::empty();
        assert!((nevanlinna_eval(0.7, &empty, &a).unwrap() - linalg::identity::<f64>(2) * real(0.7)).norm() < 1e-15);
        let delta = DiscreteMeasure::dirac(-1.0, 1.0).unwrap();
        assert!((nevanlinna_eval(0.0, &delta, &scalar(0.5)).unwrap()[(0, 0)].re - 1.0).abs() < 1e-14);
        let at_zero = DiscreteMeasure::dirac(0.0, 3.0).unwrap();
        assert!((nevanlinna_eval(0.0, &at_zero, &a).unwrap() - &a * real(3.0)).norm() < 1e-14);
    }

    #[test]
    fn kraus_examples() {
        let a = linalg::from_rows::<f64>(&[&[0.1, 0.2], &[0.2, -0.3]]);
        let empty = DiscreteMeasure::empty();
        let affine = linalg::identity::<f64>(2) * real(0.5) + &a * real(2.0);
        assert!((kraus_eval(0.5, 2.0, &empty, &a).unwrap() - affine).norm() < 1e-15);
        let delta = DiscreteMeasure::dirac(-1.0, 1.0).unwrap();
        assert!((kraus_eval(0.0, 0.0, &delta, &scalar(0.5)).unwrap()[(0, 0)].re - 0.5).abs() < 1e-14);
        let at_zero = DiscreteMeasure::dirac(0.0, 1.0).unwrap();
        assert!((kraus_eval(0.0, 0.0, &at_zero, &a).unwrap() - &a * &a).norm() < 1e-14);
    }

    #[test]
    fn singular_resolvent_is_reported() {
        let delta = DiscreteMeasure::dirac(-1.0, 1.0).unwrap();
        assert!(matches!(nevanlinna_eval(0.0, &delta, &scalar(1.0)), Err(Error::Singular(_))));
    }

    #[test]
    fn extracted_coefficients_are_moments() {
        let mu = DiscreteMeasure::<f64>::new(vec![-0.5, 0.25], vec![2.0, 1.0]).unwrap();
        let f = IntegralForm::nevanlinna(0.3, mu.clone());
        for n in 0..5usize {
            let c: f64 = extract_coefficient(&f, &Word::new(vec![1; n])).unwrap()[(0, 0)].re;
            let expected = if n == 0 { 0.3 } else { mu.integrate(|t| (-t).powi(n as i32 - 1)) };
            assert!((c - expected).abs() < 1e-12, "n = {n}: {c} vs {expected}");
        }
    }
}
