use nalgebra::DMatrix;

use super::DiscreteMeasure;
use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Real};

/// Gaussian-quadrature representative of a truncated moment sequence.
///
/// Uses `m_0, …, m_{2q−1}`. The Hankel matrix `[m_{i+j}]` is factored by an
/// eigendecomposition so rank deficiency simply lowers the atom count.
pub fn fit_measure_from_moments<T: Real>(moments: &[T], q: usize) -> Result<DiscreteMeasure<T>> {
    if moments.len() < 2 * q {
        return Err(Error::InsufficientDegree { needed: 2 * q, have: moments.len() });
    }
    if q == 0 {
        return Ok(DiscreteMeasure::empty());
    }
    let m0 = moments[0];
    if m0 == T::zero() && moments[..2 * q].iter().all(|&m| m == T::zero()) {
        return Ok(DiscreteMeasure::empty());
    }
    if !(m0 > T::zero()) {
        return Err(Error::NotAMomentSequence(format!("m_0 = {} is not positive", to_f64(m0))));
    }
    let h0 = DMatrix::from_fn(q, q, |i, j| moments[i + j]);
    let h1 = DMatrix::from_fn(q, q, |i, j| moments[i + j + 1]);
    let eig = h0.symmetric_eigen();
    let lmax = eig.eigenvalues.iter().copied().fold(T::zero(), |a, b| a.max(b));
    let lmin = eig.eigenvalues.iter().copied().fold(lmax, |a, b| a.min(b));
    if lmin < -lit::<T>(1e-10) * m0 {
        return Err(Error::NotAMomentSequence(format!(
            "Hankel matrix has eigenvalue {:e}",
            to_f64(lmin)
        )));
    }
    let cut = lmax * lit(1e-12);
    let keep: Vec<usize> = (0..q).filter(|&i| eig.eigenvalues[i] > cut).collect();
    let r = keep.len();
    let w = DMatrix::from_fn(q, r, |i, k| {
        let idx = keep[k];
        eig.eigenvectors[(i, idx)] / eig.eigenvalues[idx].sqrt()
    });
    let j = w.transpose() * &h1 * &w;
    let j = (&j + j.transpose()) * lit::<T>(0.5);
    let proj = w.transpose() * nalgebra::DVector::from_fn(q, |i, _| moments[i]);
    let jeig = j.symmetric_eigen();

    let tol: T = lit(1e-8);
    let mut pairs = Vec::with_capacity(r);
    for k in 0..r {
        let mut t = jeig.eigenvalues[k];
        if t.abs() > T::one() + tol {
            return Err(Error::NotAMomentSequence(format!(
                "recovered atom {} lies outside [-1, 1]",
                to_f64(t)
            )));
        }
        t = t.max(-T::one()).min(T::one());
        let weight = jeig.eigenvectors.column(k).dot(&proj).powi(2);
        pairs.push((t, weight));
    }
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
    let mut atoms: Vec<T> = Vec::new();
    let mut weights: Vec<T> = Vec::new();
    for (t, wgt) in pairs {
        match atoms.last() {
            Some(&prev) if t <= prev => *weights.last_mut().expect("paired") += wgt,
            _ => {
                atoms.push(t);
                weights.push(wgt);
            }
        }
    }
    DiscreteMeasure::new(atoms, weights)
}
