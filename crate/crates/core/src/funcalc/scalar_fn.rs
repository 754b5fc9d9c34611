use std::fmt;

use nalgebra::DMatrix;

use super::DiscreteMeasure;
use crate::error::{Error, Result};
use crate::freecore::{FreeFunction, MatrixTuple};
use crate::linalg::{self, CMat};
use crate::scalar::{lit, real, to_f64, Real};

/// Real functions of one variable with closed-form first and second
/// derivatives, applied to Hermitian matrices through the spectral theorem.
#[derive(Clone, Debug, PartialEq)]
pub enum ScalarFunction<T: Real> {
    /// `√(1 + t)` on `(−1, ∞)`.
    Sqrt1p,
    /// `log(1 + t)` on `(−1, ∞)`.
    Log1p,
    /// `t/(1 − t)` on `(−∞, 1)`.
    Geom,
    Exp,
    /// `t^p`; all of ℝ for integer `p ≥ 0`, `(0, ∞)` otherwise.
    Power(T),
    /// `a + ∫ t/(1 + s t) dμ(s)` on `(−1, 1)`.
    Nevanlinna { a: T, mu: DiscreteMeasure<T> },
    /// `a + b t + ∫ t²/(1 + s t) dμ(s)` on `(−1, 1)`.
    Kraus { a: T, b: T, mu: DiscreteMeasure<T> },
}

fn is_nonneg_integer<T: Real>(p: T) -> bool {
    p >= T::zero() && p == p.round()
}

/// `coef · x^e`, exactly zero when `coef` is zero.
fn mono<T: Real>(coef: T, x: T, e: T) -> T {
    if coef == T::zero() {
        return T::zero();
    }
    if e == e.round() {
        coef * x.powi(to_f64(e) as i32)
    } else {
        coef * x.powf(e)
    }
}

impl<T: Real> ScalarFunction<T> {
    pub fn name(&self) -> String {
        match self {
            ScalarFunction::Sqrt1p => "sqrt1p".into(),
            ScalarFunction::Log1p => "log1p".into(),
            ScalarFunction::Geom => "geom".into(),
            ScalarFunction::Exp => "exp".into(),
            ScalarFunction::Power(p) => format!("power({})", to_f64(*p)),
            ScalarFunction::Nevanlinna { .. } => "nevanlinna".into(),
            ScalarFunction::Kraus { .. } => "kraus".into(),
        }
    }

    /// Open interval `(lo, hi)`; `None` means unbounded.
    pub fn interval(&self) -> (Option<T>, Option<T>) {
        match self {
            ScalarFunction::Sqrt1p | ScalarFunction::Log1p => (Some(-T::one()), None),
            ScalarFunction::Geom => (None, Some(T::one())),
            ScalarFunction::Exp => (None, None),
            ScalarFunction::Power(p) if is_nonneg_integer(*p) => (None, None),
            ScalarFunction::Power(_) => (Some(T::zero()), None),
            ScalarFunction::Nevanlinna { .. } | ScalarFunction::Kraus { .. } => {
                (Some(-T::one()), Some(T::one()))
            }
        }
    }

    pub fn contains(&self, x: T) -> bool {
        let (lo, hi) = self.interval();
        x.is_finite() && lo.is_none_or(|l| x > l) && hi.is_none_or(|h| x < h)
    }

    pub fn value(&self, x: T) -> T {
        let one = T::one();
        match self {
            ScalarFunction::Sqrt1p => (one + x).sqrt(),
            ScalarFunction::Log1p => x.ln_1p(),
            ScalarFunction::Geom => x / (one - x),
            ScalarFunction::Exp => x.exp(),
            ScalarFunction::Power(p) => {
                if *p == T::zero() {
                    one
                } else {
                    mono(one, x, *p)
                }
            }
            ScalarFunction::Nevanlinna { a, mu } => *a + mu.integrate(|s| x / (one + s * x)),
            ScalarFunction::Kraus { a, b, mu } => *a + *b * x + mu.integrate(|s| x * x / (one + s * x)),
        }
    }

    pub fn d1(&self, x: T) -> T {
        let one = T::one();
        let two: T = lit(2.0);
        match self {
            ScalarFunction::Sqrt1p => one / (two * (one + x).sqrt()),
            ScalarFunction::Log1p => one / (one + x),
            ScalarFunction::Geom => one / ((one - x) * (one - x)),
            ScalarFunction::Exp => x.exp(),
            ScalarFunction::Power(p) => mono(*p, x, *p - one),
            ScalarFunction::Nevanlinna { mu, .. } => mu.integrate(|s| {
                let q = one + s * x;
                one / (q * q)
            }),
            ScalarFunction::Kraus { b, mu, .. } => {
                *b + mu.integrate(|s| {
                    let q = one + s * x;
                    (two * x + s * x * x) / (q * q)
                })
            }
        }
    }

    pub fn d2(&self, x: T) -> T {
        let one = T::one();
        let two: T = lit(2.0);
        match self {
            ScalarFunction::Sqrt1p => -one / (lit::<T>(4.0) * (one + x).powf(lit(1.5))),
            ScalarFunction::Log1p => -one / ((one + x) * (one + x)),
            ScalarFunction::Geom => two / ((one - x) * (one - x) * (one - x)),
            ScalarFunction::Exp => x.exp(),
            ScalarFunction::Power(p) => mono(*p * (*p - one), x, *p - two),
            ScalarFunction::Nevanlinna { mu, .. } => mu.integrate(|s| {
                let q = one + s * x;
                -two * s / (q * q * q)
            }),
            ScalarFunction::Kraus { mu, .. } => mu.integrate(|s| {
                let q = one + s * x;
                two / (q * q * q)
            }),
        }
    }

    fn check_spectrum(&self, eigs: &[T]) -> Result<()> {
        if let Some(bad) = eigs.iter().find(|&&x| !self.contains(x)) {
            let (lo, hi) = self.interval();
            return Err(Error::Domain(format!(
                "eigenvalue {:e} outside the domain ({}, {}) of {}",
                to_f64(*bad),
                lo.map_or("-inf".to_string(), |v| to_f64(v).to_string()),
                hi.map_or("inf".to_string(), |v| to_f64(v).to_string()),
                self.name()
            )));
        }
        Ok(())
    }

    /// First divided difference `f[x, y]`, derivative at the midpoint when
    /// the nodes are closer than `1e-8·scale`.
    pub fn divided_difference(&self, x: T, y: T, scale: T) -> T {
        if (x - y).abs() < lit::<T>(1e-8) * scale {
            self.d1((x + y) * lit(0.5))
        } else {
            (self.value(x) - self.value(y)) / (x - y)
        }
    }

    /// Second divided difference `f[x, y, z]`.
    pub fn divided_difference2(&self, x: T, y: T, z: T, scale: T) -> T {
        let mut v = [x, y, z];
        v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        let [a, b, c] = v;
        if (c - a).abs() < lit::<T>(1e-8) * scale {
            return self.d2((a + b + c) / lit(3.0)) * lit(0.5);
        }
        (self.divided_difference(c, b, scale) - self.divided_difference(b, a, scale)) / (c - a)
    }
}

impl<T: Real> fmt::Display for ScalarFunction<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

fn require_hermitian<T: Real>(a: &CMat<T>) -> Result<()> {
    if !linalg::is_hermitian(a, lit(1e-10)) {
        return Err(Error::Domain("functional calculus needs a Hermitian argument".into()));
    }
    Ok(())
}

/// `U f(Λ) Uᴴ` for Hermitian `A = U Λ Uᴴ`.
pub fn herm_apply<T: Real>(f: &ScalarFunction<T>, a: &CMat<T>) -> Result<CMat<T>> {
    require_hermitian(a)?;
    let (vals, vecs) = linalg::eigh(a);
    let vals: Vec<T> = vals.iter().copied().collect();
    f.check_spectrum(&vals)?;
    let fv: Vec<T> = vals.iter().map(|&x| f.value(x)).collect();
    Ok(linalg::herm_part(&(&vecs * linalg::diag(&fv) * vecs.adjoint())))
}

fn spectral_scale<T: Real>(eigs: &[T]) -> T {
    eigs.iter().fold(T::one(), |acc, &x| acc.max(x.abs()))
}

/// Divided-difference (Loewner) matrix `[f[λ_i, λ_j]]`.
pub fn loewner_matrix<T: Real>(f: &ScalarFunction<T>, eigs: &[T]) -> Result<DMatrix<T>> {
    f.check_spectrum(eigs)?;
    let scale = spectral_scale(eigs);
    let n = eigs.len();
    Ok(DMatrix::from_fn(n, n, |i, j| f.divided_difference(eigs[i], eigs[j], scale)))
}

/// Daleckii–Krein formulas for `D f(A)[H]` and `D² f(A)[H]`.
pub fn herm_derivative<T: Real>(f: &ScalarFunction<T>, a: &CMat<T>, h: &CMat<T>, order: usize) -> Result<CMat<T>> {
    require_hermitian(a)?;
    let (vals, u) = linalg::eigh(a);
    let vals: Vec<T> = vals.iter().copied().collect();
    f.check_spectrum(&vals)?;
    let scale = spectral_scale(&vals);
    let ht = u.adjoint() * h * &u;
    let n = vals.len();
    let inner = match order {
        1 => CMat::from_fn(n, n, |i, j| ht[(i, j)] * real(f.divided_difference(vals[i], vals[j], scale))),
        2 => CMat::from_fn(n, n, |i, j| {
            let mut acc = real(T::zero());
            for k in 0..n {
                acc += ht[(i, k)] * ht[(k, j)] * real(f.divided_difference2(vals[i], vals[k], vals[j], scale));
            }
            acc * real(lit::<T>(2.0))
        }),
        _ => return Err(Error::Invalid(format!("derivative order {order} not supported"))),
    };
    Ok(&u * inner * u.adjoint())
}

/// One-letter free function `X ↦ f(X)` through the Hermitian functional calculus.
#[derive(Clone, Debug)]
pub struct HermitianCalculus<T: Real> {
    pub f: ScalarFunction<T>,
}

impl<T: Real> HermitianCalculus<T> {
    pub fn new(f: ScalarFunction<T>) -> Self {
        HermitianCalculus { f }
    }
}

impl<T: Real> FreeFunction<T> for HermitianCalculus<T> {
    fn letters(&self) -> usize {
        1
    }

    fn eval(&self, z: &MatrixTuple<T>) -> Result<CMat<T>> {
        herm_apply(&self.f, z.letter(1))
    }

    fn domain(&self) -> String {
        let (lo, hi) = self.f.interval();
        format!(
            "Hermitian X with spectrum in ({}, {})",
            lo.map_or("-inf".to_string(), |v| to_f64(v).to_string()),
            hi.map_or("inf".to_string(), |v| to_f64(v).to_string())
        )
    }

    fn contains(&self, z: &MatrixTuple<T>) -> bool {
        z.is_hermitian(lit(1e-10)) && {
            let (vals, _) = linalg::eigh(z.letter(1));
            vals.iter().all(|&x| self.f.contains(x))
        }
    }

    fn derivative(&self, x: &MatrixTuple<T>, h: &MatrixTuple<T>, order: usize) -> Option<Result<CMat<T>>> {
        Some(herm_derivative(&self.f, x.letter(1), h.letter(1), order))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freecore::{directional_derivative, finite_difference};
    use crate::sample;

    #[test]
    fn identity_power_is_identity() {
        let mut rng = sample::stream_rng(5, 0);
        let a = sample::gue::<f64>(&mut rng, 4);
        let out = herm_apply(&ScalarFunction::Power(1.0), &a).unwrap();
        assert!((out - a).norm() < 1e-12);
    }

    #[test]
    fn sqrt_of_diagonal() {
        let a = linalg::diag(&[1.0, 4.0]);
        let out = herm_apply(&ScalarFunction::Power(0.5), &a).unwrap();
        assert!((out - linalg::diag(&[1.0, 2.0])).norm() < 1e-14);
    }

    #[test]
    fn exp_of_swap() {
        // Eigenvalues ±1 with eigenvectors (1, ±1)/√2.
        let a = linalg::from_rows::<f64>(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let out = herm_apply(&ScalarFunction::Exp, &a).unwrap();
        let (c, s) = (1f64.cosh(), 1f64.sinh());
        let expected = linalg::from_rows::<f64>(&[&[c, s], &[s, c]]);
        assert!((out - expected).norm() < 1e-14);
    }

    #[test]
    fn domain_violation_lists_eigenvalue() {
        let a = linalg::diag(&[-2.0, 0.5]);
        match herm_apply(&ScalarFunction::Sqrt1p, &a) {
            Err(Error::Domain(msg)) => assert!(msg.contains("-2e0"), "{msg}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn loewner_examples() {
        let l = loewner_matrix(&ScalarFunction::Power(1.0), &[0.0, 1.0]).unwrap();
        assert_eq!(l, DMatrix::from_element(2, 2, 1.0));
        let l = loewner_matrix(&ScalarFunction::Power(2.0), &[0.0, 1.0, 2.0]).unwrap();
        let expected = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 2.0, 1.0, 2.0, 3.0, 2.0, 3.0, 4.0]);
        assert!((l - expected).norm() < 1e-14);
        let l = loewner_matrix(&ScalarFunction::Geom, &[0.0, 0.5]).unwrap();
        let expected = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        assert!((l - expected).norm() < 1e-14);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let fs = [
            ScalarFunction::Sqrt1p,
            ScalarFunction::Log1p,
            ScalarFunction::Geom,
            ScalarFunction::Exp,
            ScalarFunction::Power(3.0),
            ScalarFunction::Nevanlinna { a: 0.2, mu: DiscreteMeasure::new(vec![-0.5, 0.3], vec![1.0, 0.5]).unwrap() },
            ScalarFunction::Kraus { a: 0.1, b: -0.4, mu: DiscreteMeasure::new(vec![-0.7, 0.9], vec![0.3, 1.2]).unwrap() },
        ];
        let mut rng = sample::stream_rng(9, 0);
        for f in fs {
            let x = MatrixTuple::new(vec![sample::hermitian_with_norm::<f64>(&mut rng, 3, 0.5)]).unwrap();
            let h = MatrixTuple::new(vec![sample::hermitian_with_norm::<f64>(&mut rng, 3, 1.0)]).unwrap();
            let calc = HermitianCalculus::new(f.clone());
            for order in [1, 2] {
                let exact = directional_derivative(&calc, &x, &h, order).unwrap();
                let fd = finite_difference(&calc, &x, &h, order).unwrap();
                let tol = if order == 1 { 1e-8 } else { 1e-3 * (1.0 + exact.norm()) };
                assert!((&exact - &fd).norm() < tol, "{f} order {order}: {}", (exact - fd).norm());
            }
        }
    }

    #[test]
    fn coincident_eigenvalues_use_derivative() {
        let f = ScalarFunction::Exp;
        let l = loewner_matrix(&f, &[0.3, 0.3 + 1e-12]).unwrap();
        assert!((l[(0, 1)] - 0.3f64.exp()).abs() < 1e-10);
        let dd2 = f.divided_difference2(0.2, 0.2, 0.2, 1.0);
        assert!((dd2 - 0.2f64.exp() / 2.0).abs() < 1e-12);
    }
}
