use crate::error::{Error, Result};
use crate::freecore::{FreeSeries, Word};
use crate::scalar::{lit, real, to_f64, Real};

/// Finitely atomic measure on `[-1, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteMeasure<T: Real> {
    atoms: Vec<T>,
    weights: Vec<T>,
}

impl<T: Real> DiscreteMeasure<T> {
    /// Validates nonnegative weights and strictly increasing atoms in `[-1, 1]`.
    pub fn new(atoms: Vec<T>, weights: Vec<T>) -> Result<Self> {
        if atoms.len() != weights.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} atoms but {} weights",
                atoms.len(),
                weights.len()
            )));
        }
        for (&t, &w) in atoms.iter().zip(&weights) {
            if !(t >= -T::one() && t <= T::one()) {
                return Err(Error::Invalid(format!("atom {} outside [-1, 1]", to_f64(t))));
            }
            if !(w >= T::zero()) {
                return Err(Error::Invalid(format!("negative weight {}", to_f64(w))));
            }
        }
        if atoms.windows(2).any(|p| !(p[0] < p[1])) {
            return Err(Error::Invalid("atoms must be strictly increasing".into()));
        }
        Ok(DiscreteMeasure { atoms, weights })
    }

    pub fn empty() -> Self {
        DiscreteMeasure { atoms: Vec::new(), weights: Vec::new() }
    }

    /// Point mass `w·δ_t`.
    pub fn dirac(t: T, w: T) -> Result<Self> {
        Self::new(vec![t], vec![w])
    }

    pub fn atoms(&self) -> &[T] {
        &self.atoms
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total_mass(&self) -> T {
        self.weights.iter().fold(T::zero(), |a, &b| a + b)
    }

    /// `m_j = ∫ t^j dμ` for `j < count`.
    pub fn moments(&self, count: usize) -> Vec<T> {
        (0..count)
            .map(|j| {
                self.atoms
                    .iter()
                    .zip(&self.weights)
                    .fold(T::zero(), |acc, (&t, &w)| acc + w * t.powi(j as i32))
            })
            .collect()
    }

    /// Pushforward under `t ↦ −t`.
    pub fn reflect(&self) -> Self {
        DiscreteMeasure {
            atoms: self.atoms.iter().rev().map(|&t| -t).collect(),
            weights: self.weights.iter().rev().copied().collect(),
        }
    }

    /// `Σ_j w_j k(t_j)`.
    pub fn integrate(&self, k: impl Fn(T) -> T) -> T {
        self.atoms
            .iter()
            .zip(&self.weights)
            .fold(T::zero(), |acc, (&t, &w)| acc + w * k(t))
    }
}

/// Taylor series of `a + ∫ x/(1 + t x) dμ(t)`: `c_0 = a`, `c_{n+1} = ∫ (−t)^n dμ`.
pub fn nevanlinna_series<T: Real>(a: T, mu: &DiscreteMeasure<T>, degree: usize) -> FreeSeries<T> {
    let mut coeffs = vec![a];
    for n in 0..degree {
        coeffs.push(mu.integrate(|t| (-t).powi(n as i32)));
    }
    scalar_univariate(&coeffs)
}

/// Taylor series of `a + b x + ∫ x²/(1 + t x) dμ(t)`.
pub fn kraus_series<T: Real>(a: T, b: T, mu: &DiscreteMeasure<T>, degree: usize) -> FreeSeries<T> {
    let mut coeffs = vec![a];
    if degree >= 1 {
        coeffs.push(b);
    }
    for n in 0..degree.saturating_sub(1) {
        coeffs.push(mu.integrate(|t| (-t).powi(n as i32)));
    }
    scalar_univariate(&coeffs)
}

fn scalar_univariate<T: Real>(coeffs: &[T]) -> FreeSeries<T> {
    let degree = coeffs.len().saturating_sub(1);
    FreeSeries::scalar_terms(
        1,
        degree,
        coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != T::zero())
            .map(|(n, &c)| (Word::new(vec![1; n]), real(c))),
    )
    .expect("univariate series is well formed")
}

/// Reads Taylor coefficients `c_0, …, c_D` from a one-letter scalar series.
pub fn taylor_coefficients<T: Real>(s: &FreeSeries<T>) -> Result<Vec<T>> {
    if s.letters() != 1 || s.dim() != 1 {
        return Err(Error::Invalid("expected a one-letter scalar series".into()));
    }
    let tol: T = lit(1e-12);
    (0..=s.degree())
        .map(|n| {
            let c = s.coeff(&Word::new(vec![1; n]))[(0, 0)];
            if c.im.abs() > tol * (T::one() + c.re.abs()) {
                return Err(Error::Invalid(format!("coefficient c_{n} is not real")));
            }
            Ok(c.re)
        })
        .collect()
}
