use std::collections::BTreeMap;

use num_complex::Complex;

use super::{MatrixTuple, Word};
use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::scalar::{lit, real, Real};

/// Truncated free power series `Σ_{|α| ≤ D} c_α Z^α` with `k × k` complex
/// coefficients over `d` letters.
///
/// Coefficients are stored sparsely; a missing word has coefficient zero.
/// The monomial `Z^α` for `α = x_{i1} ⋯ x_{iL}` is `Z_{i1} ⋯ Z_{iL}`, and the
/// value at a level-`n` tuple is `Σ_α Z^α ⊗ c_α`, an `n × n` array of
/// `k × k` blocks.
#[derive(Clone, Debug, PartialEq)]
pub struct FreeSeries<T: Real> {
    letters: usize,
    degree: usize,
    dim: usize,
    coeffs: BTreeMap<Word, CMat<T>>,
}

impl<T: Real> FreeSeries<T> {
    pub fn zero(letters: usize, degree: usize, dim: usize) -> Self {
        FreeSeries { letters, degree, dim, coeffs: BTreeMap::new() }
    }

    /// Scalar (`k = 1`) series from `(word, coefficient)` pairs.
    pub fn scalar_terms<I>(letters: usize, degree: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Word, Complex<T>)>,
    {
        let mut s = Self::zero(letters, degree, 1);
        for (w, c) in terms {
            s.insert(w, CMat::from_element(1, 1, c))?;
        }
        Ok(s)
    }

    pub fn from_terms<I>(letters: usize, degree: usize, dim: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Word, CMat<T>)>,
    {
        let mut s = Self::zero(letters, degree, dim);
        for (w, c) in terms {
            s.insert(w, c)?;
        }
        Ok(s)
    }

    /// Constant series `c·1` with `k = 1`.
    pub fn constant(letters: usize, degree: usize, c: Complex<T>) -> Self {
        let mut s = Self::zero(letters, degree, 1);
        s.coeffs.insert(Word::empty(), CMat::from_element(1, 1, c));
        s
    }

    /// The coordinate series `x_i` with `k = 1`.
    pub fn variable(letters: usize, degree: usize, i: usize) -> Result<Self> {
        let mut s = Self::zero(letters, degree, 1);
        if degree >= 1 {
            s.insert(Word::letter(i), linalg::identity(1))?;
        } else if i == 0 || i > letters {
            return Err(Error::Invalid(format!("letter x{i} outside 1..={letters}")));
        }
        Ok(s)
    }

    /// Adds `c` to the coefficient of `w`. Words longer than the truncation
    /// degree are rejected.
    pub fn insert(&mut self, w: Word, c: CMat<T>) -> Result<()> {
        if !w.fits(self.letters) {
            return Err(Error::Invalid(format!("word {w} uses letters outside 1..={}", self.letters)));
        }
        if w.len() > self.degree {
            return Err(Error::Invalid(format!(
                "word {w} of length {} exceeds truncation degree {}",
                w.len(),
                self.degree
            )));
        }
        if c.nrows() != self.dim || c.ncols() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "coefficient of {w} is {}x{}, expected {}x{}",
                c.nrows(),
                c.ncols(),
                self.dim,
                self.dim
            )));
        }
        match self.coeffs.get_mut(&w) {
            Some(existing) => *existing += c,
            None => {
                self.coeffs.insert(w, c);
            }
        }
        Ok(())
    }

    pub fn letters(&self) -> usize {
        self.letters
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Coefficient dimension `k`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coeff(&self, w: &Word) -> CMat<T> {
        self.coeffs.get(w).cloned().unwrap_or_else(|| linalg::zeros(self.dim, self.dim))
    }

    pub fn coeff_ref(&self, w: &Word) -> Option<&CMat<T>> {
        self.coeffs.get(w)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &CMat<T>)> {
        self.coeffs.iter()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn constant_term(&self) -> CMat<T> {
        self.coeff(&Word::empty())
    }

    /// Whether `c_αᴴ = c_{α*}` for every word, to `tol` per entry.
    pub fn is_hermitian(&self, tol: T) -> bool {
        self.coeffs.iter().all(|(w, c)| {
            let other = self.coeff(&w.reverse());
            linalg::max_abs_entry(&(c.adjoint() - other)) <= tol
        })
    }

    /// Largest Frobenius norm among stored coefficients.
    pub fn max_coeff_norm(&self) -> T {
        self.coeffs.values().map(|c| c.norm()).fold(T::zero(), |a, b| a.max(b))
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.letters != other.letters || self.dim != other.dim {
            return Err(Error::DimensionMismatch(format!(
                "series over (d={}, k={}) and (d={}, k={})",
                self.letters, self.dim, other.letters, other.dim
            )));
        }
        Ok(())
    }

    /// Coefficientwise sum, truncated at the larger degree.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let mut out = self.clone();
        out.degree = self.degree.max(other.degree);
        for (w, c) in &other.coeffs {
            out.insert(w.clone(), c.clone())?;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(real(-T::one()))
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        FreeSeries {
            letters: self.letters,
            degree: self.degree,
            dim: self.dim,
            coeffs: self.coeffs.iter().map(|(w, c)| (w.clone(), c * s)).collect(),
        }
    }

    /// Truncated product: `coeff(ω) = Σ_{uv = ω} a(u)·b(v)` for `|ω| ≤ min(D_a, D_b)`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let degree = self.degree.min(other.degree);
        let mut out = Self::zero(self.letters, degree, self.dim);
        for (u, a) in &self.coeffs {
            if u.len() > degree {
                continue;
            }
            for (v, b) in &other.coeffs {
                if u.len() + v.len() > degree {
                    continue;
                }
                out.insert(u.concat(v), a * b)?;
            }
        }
        Ok(out)
    }

    /// Drops words longer than `degree` and lowers the truncation degree.
    pub fn truncate(&self, degree: usize) -> Self {
        FreeSeries {
            letters: self.letters,
            degree: degree.min(self.degree),
            dim: self.dim,
            coeffs: self
                .coeffs
                .iter()
                .filter(|(w, _)| w.len() <= degree)
                .map(|(w, c)| (w.clone(), c.clone()))
                .collect(),
        }
    }

    /// Same coefficients, larger nominal truncation degree.
    pub fn with_degree(mut self, degree: usize) -> Result<Self> {
        if let Some(w) = self.coeffs.keys().find(|w| w.len() > degree) {
            return Err(Error::Invalid(format!("word {w} exceeds requested degree {degree}")));
        }
        self.degree = degree;
        Ok(self)
    }

    /// The part supported on words of length exactly `len`.
    pub fn homogeneous(&self, len: usize) -> Self {
        FreeSeries {
            letters: self.letters,
            degree: self.degree,
            dim: self.dim,
            coeffs: self
                .coeffs
                .iter()
                .filter(|(w, _)| w.len() == len)
                .map(|(w, c)| (w.clone(), c.clone()))
                .collect(),
        }
    }

    /// Removes coefficients whose entries are all below `tol` in modulus.
    pub fn prune(&mut self, tol: T) {
        self.coeffs.retain(|_, c| linalg::max_abs_entry(c) > tol);
    }

    /// `Σ_α Z^α ⊗ c_α` over the stored words.
    pub fn evaluate(&self, z: &MatrixTuple<T>) -> Result<CMat<T>> {
        if z.len() != self.letters {
            return Err(Error::DimensionMismatch(format!(
                "series in {} letters evaluated at a {}-tuple",
                self.letters,
                z.len()
            )));
        }
        let n = z.level();
        let mut out = linalg::zeros(n * self.dim, n * self.dim);
        let mut cache: BTreeMap<Word, CMat<T>> = BTreeMap::new();
        cache.insert(Word::empty(), linalg::identity(n));
        for (w, c) in &self.coeffs {
            let p = word_power(z, w, &mut cache);
            out += linalg::kron(&p, c);
        }
        Ok(out)
    }

    /// Partial sums `S_0, …, S_D` where `S_j` keeps words of length `≤ j`.
    pub fn partial_sums(&self, z: &MatrixTuple<T>) -> Result<Vec<CMat<T>>> {
        let mut sums = Vec::with_capacity(self.degree + 1);
        let mut acc = linalg::zeros(z.level() * self.dim, z.level() * self.dim);
        for len in 0..=self.degree {
            acc += self.homogeneous(len).evaluate(z)?;
            sums.push(acc.clone());
        }
        Ok(sums)
    }
}

/// `Z^w`, memoized on prefixes.
pub(crate) fn word_power<T: Real>(
    z: &MatrixTuple<T>,
    w: &Word,
    cache: &mut BTreeMap<Word, CMat<T>>,
) -> CMat<T> {
    if let Some(p) = cache.get(w) {
        return p.clone();
    }
    let letters = w.letters();
    let prefix = Word::from(&letters[..letters.len() - 1]);
    let last = letters[letters.len() - 1];
    let p = word_power(z, &prefix, cache) * z.letter(last);
    cache.insert(w.clone(), p.clone());
    p
}

/// `Σ_{n ≥ 1} x^n` truncated at `degree`, one letter.
pub fn geometric_series<T: Real>(degree: usize) -> FreeSeries<T> {
    FreeSeries::scalar_terms(
        1,
        degree,
        (1..=degree).map(|n| (Word::new(vec![1; n]), real(T::one()))),
    )
    .expect("valid geometric series")
}

/// The series with coefficient one on every nonempty word over `d` letters.
pub fn all_ones_series<T: Real>(letters: usize, degree: usize) -> FreeSeries<T> {
    FreeSeries::scalar_terms(
        letters,
        degree,
        Word::enumerate(letters, 1, degree).into_iter().map(|w| (w, real(T::one()))),
    )
    .expect("valid all-ones series")
}

/// Scalar one-letter series from Taylor coefficients `c_0, c_1, …`.
pub fn univariate<T: Real>(coeffs: &[f64]) -> FreeSeries<T> {
    let degree = coeffs.len().saturating_sub(1);
    FreeSeries::scalar_terms(
        1,
        degree,
        coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0.0)
            .map(|(n, &c)| (Word::new(vec![1; n]), real(lit(c)))),
    )
    .expect("valid univariate series")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cplx;

    fn x(i: usize, d: usize, degree: usize) -> FreeSeries<f64> {
        FreeSeries::variable(d, degree, i).unwrap()
    }

    #[test]
    fn product_of_letters() {
        let p = x(1, 2, 3).mul(&x(2, 2, 3)).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p.coeff(&Word::new(vec![1, 2]))[(0, 0)], cplx(1.0, 0.0));
        assert_eq!(p.coeff(&Word::new(vec![2, 1]))[(0, 0)], cplx(0.0, 0.0));
    }

    #[test]
    fn additive_identity() {
        let s = all_ones_series::<f64>(2, 3);
        let z = FreeSeries::zero(2, 3, 1);
        assert_eq!(s.add(&z).unwrap(), s);
    }

    #[test]
    fn geometric_times_one_minus_x() {
        // Expanding (Σ_{n≥1} xⁿ)(1 − x) symbolically leaves x plus terms of degree > 4.
        let g = geometric_series::<f64>(4);
        let one_minus_x = univariate::<f64>(&[1.0, -1.0]).with_degree(4).unwrap();
        let mut p = g.mul(&one_minus_x).unwrap();
        p.prune(1e-15);
        assert_eq!(p.len(), 1);
        assert_eq!(p.coeff(&Word::letter(1))[(0, 0)], cplx(1.0, 0.0));
    }

    #[test]
    fn mismatched_shapes_rejected() {
        let a = FreeSeries::<f64>::zero(2, 3, 1);
        let b = FreeSeries::<f64>::zero(3, 3, 1);
        assert!(matches!(a.add(&b), Err(Error::DimensionMismatch(_))));
        assert!(matches!(a.mul(&b), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn evaluate_geometric_at_nilpotent() {
        let g = geometric_series::<f64>(6);
        let z = MatrixTuple::new(vec![linalg::from_rows(&[&[0.0, 1.0], &[0.0, 0.0]])]).unwrap();
        let v = g.evaluate(&z).unwrap();
        assert!((v - z.letter(1)).norm() < 1e-15);
    }

    #[test]
    fn evaluate_zero_series() {
        let s = FreeSeries::<f64>::zero(2, 3, 2);
        let z = MatrixTuple::new(vec![linalg::identity(3), linalg::identity(3)]).unwrap();
        let v = s.evaluate(&z).unwrap();
        assert_eq!(v.shape(), (6, 6));
        assert_eq!(v.norm(), 0.0);
    }

    #[test]
    fn evaluate_all_ones_scalar() {
        // Scalar Neumann series: Σ_{n≥1} (0.2)^n = 1/(1 − 0.2) − 1.
        // Truncation at degree 14 leaves a tail below 0.2^15/0.8 ≈ 4e-11.
        let s = all_ones_series::<f64>(2, 14);
        let z = MatrixTuple::scalars(&[cplx(0.1, 0.0), cplx(0.1, 0.0)]).unwrap();
        let v = s.evaluate(&z).unwrap()[(0, 0)];
        assert!((v.re - 0.25).abs() < 1e-10 && v.im.abs() < 1e-15);
    }

    #[test]
    fn hermitian_flag() {
        let mut s = FreeSeries::<f64>::scalar_terms(
            2,
            2,
            [(Word::new(vec![1, 2]), cplx(1.0, 1.0)), (Word::new(vec![2, 1]), cplx(1.0, -1.0))],
        )
        .unwrap();
        assert!(s.is_hermitian(1e-12));
        s.insert(Word::letter(1), CMat::from_element(1, 1, cplx(0.0, 1.0))).unwrap();
        assert!(!s.is_hermitian(1e-12));
    }

    #[test]
    fn insert_rejects_long_words() {
        let mut s = FreeSeries::<f64>::zero(1, 2, 1);
        assert!(s.insert(Word::new(vec![1, 1, 1]), linalg::identity(1)).is_err());
        assert!(s.insert(Word::new(vec![2]), linalg::identity(1)).is_err());
    }
}
