use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::scalar::{real, Real};

/// A `d`-tuple of square complex matrices of a common size.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixTuple<T: Real> {
    entries: Vec<CMat<T>>,
}

impl<T: Real> MatrixTuple<T> {
    pub fn new(entries: Vec<CMat<T>>) -> Result<Self> {
        let first = entries
            .first()
            .ok_or_else(|| Error::DimensionMismatch("empty matrix tuple".into()))?;
        let n = first.nrows();
        for (i, e) in entries.iter().enumerate() {
            if e.nrows() != n || e.ncols() != n {
                return Err(Error::DimensionMismatch(format!(
                    "entry {} is {}x{}, expected {n}x{n}",
                    i + 1,
                    e.nrows(),
                    e.ncols()
                )));
            }
        }
        Ok(MatrixTuple { entries })
    }

    /// Level-one tuple of scalars.
    pub fn scalars(values: &[Complex<T>]) -> Result<Self> {
        Self::new(values.iter().map(|&z| CMat::from_element(1, 1, z)).collect())
    }

    pub fn zeros(d: usize, n: usize) -> Self {
        MatrixTuple { entries: vec![linalg::zeros(n, n); d] }
    }

    /// Matrix size of every entry.
    pub fn level(&self) -> usize {
        self.entries[0].nrows()
    }

    /// Number of letters `d`.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[CMat<T>] {
        &self.entries
    }

    /// Entry for letter `i` (1-based).
    pub fn letter(&self, i: usize) -> &CMat<T> {
        &self.entries[i - 1]
    }

    pub fn into_entries(self) -> Vec<CMat<T>> {
        self.entries
    }

    pub fn map(&self, f: impl Fn(&CMat<T>) -> CMat<T>) -> Self {
        MatrixTuple { entries: self.entries.iter().map(f).collect() }
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(&CMat<T>, &CMat<T>) -> CMat<T>) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(MatrixTuple {
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| f(a, b)).collect(),
        })
    }

    pub fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.len() != other.len() || self.level() != other.level() {
            return Err(Error::DimensionMismatch(format!(
                "tuples of shape ({}, {}) and ({}, {})",
                self.len(),
                self.level(),
                other.len(),
                other.level()
            )));
        }
        Ok(())
    }

    /// `self + s·other`.
    pub fn add_scaled(&self, other: &Self, s: T) -> Result<Self> {
        self.zip_with(other, |a, b| a + b * real(s))
    }

    pub fn scale(&self, s: T) -> Self {
        self.map(|a| a * real(s))
    }

    /// Entrywise adjoint `(Z_1ᴴ, …, Z_dᴴ)`.
    pub fn adjoint(&self) -> Self {
        self.map(|a| a.adjoint())
    }

    /// Level-wise direct sum `X ⊕ Y`.
    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch("direct sum of tuples with different d".into()));
        }
        Ok(MatrixTuple {
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| linalg::block_diag(&[a, b]))
                .collect(),
        })
    }

    /// `m`-fold ampliation `X^{⊕m}`.
    pub fn ampliate(&self, m: usize) -> Self {
        self.map(|a| linalg::kron(&linalg::identity(m), a))
    }

    /// `S⁻¹ X S` entrywise.
    pub fn similarity(&self, s: &CMat<T>) -> Result<Self> {
        let inv = linalg::inverse(s, "similarity transform")?;
        Ok(self.map(|a| &inv * a * s))
    }

    /// `Uᴴ X U` entrywise.
    pub fn conjugate(&self, u: &CMat<T>) -> Self {
        self.map(|a| u.adjoint() * a * u)
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        self.entries.iter().all(|e| linalg::is_hermitian(e, tol))
    }

    /// `Σ_i ‖Z_i‖`.
    pub fn norm_sum(&self) -> T {
        self.entries.iter().map(linalg::op_norm).fold(T::zero(), |a, b| a + b)
    }

    /// `max_i ‖Z_i‖`.
    pub fn norm_max(&self) -> T {
        self.entries.iter().map(linalg::op_norm).fold(T::zero(), |a, b| a.max(b))
    }

    /// `[[X, H], [0, X]]` entrywise.
    pub fn upper_block(x: &Self, h: &Self) -> Result<Self> {
        x.zip_with(h, |a, b| {
            let n = a.nrows();
            let mut m = linalg::zeros(2 * n, 2 * n);
            m.view_mut((0, 0), (n, n)).copy_from(a);
            m.view_mut((0, n), (n, n)).copy_from(b);
            m.view_mut((n, n), (n, n)).copy_from(a);
            m
        })
    }

    /// `[[X, H, 0], [0, X, H], [0, 0, X]]` entrywise.
    pub fn jordan3(x: &Self, h: &Self) -> Result<Self> {
        x.zip_with(h, |a, b| {
            let n = a.nrows();
            let mut m = linalg::zeros(3 * n, 3 * n);
            for k in 0..3 {
                m.view_mut((k * n, k * n), (n, n)).copy_from(a);
            }
            m.view_mut((0, n), (n, n)).copy_from(b);
            m.view_mut((n, 2 * n), (n, n)).copy_from(b);
            m
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_ragged_tuples() {
        let r = MatrixTuple::<f64>::new(vec![linalg::zeros(2, 2), linalg::zeros(3, 3)]);
        assert!(matches!(r, Err(Error::DimensionMismatch(_))));
        assert!(MatrixTuple::<f64>::new(vec![linalg::zeros(2, 3)]).is_err());
    }

    #[test]
    fn direct_sum_levels_add() {
        let a = MatrixTuple::<f64>::zeros(2, 2);
        let b = MatrixTuple::<f64>::zeros(2, 3);
        assert_eq!(a.direct_sum(&b).unwrap().level(), 5);
    }
}
