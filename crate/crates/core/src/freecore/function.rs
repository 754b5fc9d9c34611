use super::{FreeSeries, MatrixTuple, Word};
use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::scalar::{lit, real, Real};

/// A free function on tuples of matrices.
///
/// At level `n` (each letter an `(n·b) × (n·b)` matrix, `b = input_block`)
/// the output is `(n·k) × (n·k)`, laid out as an `n × n` array of `k × k`
/// blocks. Implementations must respect direct sums and similarities on
/// their domain.
pub trait FreeFunction<T: Real>: Sync {
    /// Number of letters `d`.
    fn letters(&self) -> usize;

    /// Output block size `k`.
    fn output_dim(&self) -> usize {
        1
    }

    /// Size `b` of the matrix realization of one input coordinate.
    fn input_block(&self) -> usize {
        1
    }

    fn eval(&self, z: &MatrixTuple<T>) -> Result<CMat<T>>;

    /// Human-readable domain statement.
    fn domain(&self) -> String {
        "all tuples".to_string()
    }

    /// Declared domain predicate.
    fn contains(&self, _z: &MatrixTuple<T>) -> bool {
        true
    }

    /// Closed-form directional derivative of the given order, when the
    /// evaluator has one (e.g. Daleckii–Krein for functional calculus).
    fn derivative(&self, _x: &MatrixTuple<T>, _h: &MatrixTuple<T>, _order: usize) -> Option<Result<CMat<T>>> {
        None
    }

    /// Output size at input matrix size `size`.
    fn output_size(&self, size: usize) -> usize {
        size / self.input_block() * self.output_dim()
    }
}

impl<T: Real, F: FreeFunction<T> + ?Sized> FreeFunction<T> for &F {
    fn letters(&self) -> usize {
        (**self).letters()
    }
    fn output_dim(&self) -> usize {
        (**self).output_dim()
    }
    fn input_block(&self) -> usize {
        (**self).input_block()
    }
    fn eval(&self, z: &MatrixTuple<T>) -> Result<CMat<T>> {
        (**self).eval(z)
    }
    fn domain(&self) -> String {
        (**self).domain()
    }
    fn contains(&self, z: &MatrixTuple<T>) -> bool {
        (**self).contains(z)
    }
    fn derivative(&self, x: &MatrixTuple<T>, h: &MatrixTuple<T>, order: usize) -> Option<Result<CMat<T>>> {
        (**self).derivative(x, h, order)
    }
}

impl<T: Real> FreeFunction<T> for FreeSeries<T> {
    fn letters(&self) -> usize {
        FreeSeries::letters(self)
    }
    fn output_dim(&self) -> usize {
        self.dim()
    }
    fn eval(&self, z: &MatrixTuple<T>) -> Result<CMat<T>> {
        self.evaluate(z)
    }
    fn domain(&self) -> String {
        "tuples with Σ‖Z_i‖ < 1 or nilpotent".to_string()
    }
}

/// Wraps a closure as a [`FreeFunction`].
pub struct FnEvaluator<F> {
    letters: usize,
    dim: usize,
    domain: String,
    f: F,
}

impl<F> FnEvaluator<F> {
    pub fn new(letters: usize, dim: usize, domain: impl Into<String>, f: F) -> Self {
        FnEvaluator { letters, dim, domain: domain.into(), f }
    }
}

impl<T: Real, F> FreeFunction<T> for FnEvaluator<F>
where
    F: Fn(&MatrixTuple<T>) -> Result<CMat<T>> + Sync,
{
    fn letters(&self) -> usize {
        self.letters
    }
    fn output_dim(&self) -> usize {
        self.dim
    }
    fn eval(&self, z: &MatrixTuple<T>) -> Result<CMat<T>> {
        (self.f)(z)
    }
    fn domain(&self) -> String {
        self.domain.clone()
    }
}

/// The nilpotent tuple `Z_i = Σ_{j : w_j = i} E_{j, j+1}` at level `|w| + 1`.
pub fn nilpotent_probe<T: Real>(letters: usize, w: &Word) -> Result<MatrixTuple<T>> {
    if !w.fits(letters) {
        return Err(Error::Invalid(format!("word {w} uses letters outside 1..={letters}")));
    }
    let n = w.len() + 1;
    let mut entries = vec![linalg::zeros::<T>(n, n); letters];
    for (j, &i) in w.letters().iter().enumerate() {
        entries[i - 1][(j, j + 1)] = real(T::one());
    }
    MatrixTuple::new(entries)
}

/// Reads off the coefficient `c_w` exactly from the `(1, |w|+1)` output
/// block at the nilpotent probe tuple.
pub fn extract_coefficient<T: Real>(f: &(impl FreeFunction<T> + ?Sized), w: &Word) -> Result<CMat<T>> {
    if f.input_block() != 1 {
        return Err(Error::Invalid("coefficient extraction needs scalar input coordinates".into()));
    }
    let z = nilpotent_probe(f.letters(), w)?;
    let k = f.output_dim();
    let value = f.eval(&z).map_err(|e| match e {
        Error::Domain(msg) | Error::NonSelfAdjoint(msg) => Error::NilpotentRejected(msg),
        other => other,
    })?;
    let n = w.len() + 1;
    if value.nrows() != n * k {
        return Err(Error::DimensionMismatch(format!(
            "evaluator returned {} rows at level {n}, expected {}",
            value.nrows(),
            n * k
        )));
    }
    Ok(linalg::block(&value, 0, n - 1, k, k))
}

/// Finite-difference step for the given order.
fn fd_step<T: Real>(x: &MatrixTuple<T>, order: usize) -> T {
    let base = if order == 1 { 1e-5 } else { 1e-3 };
    lit::<T>(base) * (T::one() + x.norm_max())
}

/// `D f(X)[H]` (order 1) or `D² f(X)[H]` (order 2).
///
/// Uses the block upper-triangular lifting `[[X, H], [0, X]]` (resp. the
/// 3×3 block Jordan tuple). Evaluators that reject non-Hermitian input fall
/// back to their closed-form derivative, then to central differences.
pub fn directional_derivative<T: Real>(
    f: &(impl FreeFunction<T> + ?Sized),
    x: &MatrixTuple<T>,
    h: &MatrixTuple<T>,
    order: usize,
) -> Result<CMat<T>> {
    if order != 1 && order != 2 {
        return Err(Error::Invalid(format!("derivative order {order} not supported")));
    }
    x.check_compatible(h)?;
    let out_n = f.output_size(x.level());
    let lifted = if order == 1 { MatrixTuple::upper_block(x, h)? } else { MatrixTuple::jordan3(x, h)? };
    match f.eval(&lifted) {
        Ok(v) => {
            if order == 1 {
                Ok(linalg::block(&v, 0, 1, out_n, out_n))
            } else {
                Ok(linalg::block(&v, 0, 2, out_n, out_n) * real(lit::<T>(2.0)))
            }
        }
        Err(Error::Domain(_)) | Err(Error::NonSelfAdjoint(_)) => {
            if let Some(d) = f.derivative(x, h, order) {
                return d;
            }
            finite_difference(f, x, h, order)
        }
        Err(e) => Err(e),
    }
}

/// Central finite differences along `X + tH`.
pub fn finite_difference<T: Real>(
    f: &(impl FreeFunction<T> + ?Sized),
    x: &MatrixTuple<T>,
    h: &MatrixTuple<T>,
    order: usize,
) -> Result<CMat<T>> {
    let step = fd_step(x, order);
    let plus = f.eval(&x.add_scaled(h, step)?)?;
    let minus = f.eval(&x.add_scaled(h, -step)?)?;
    if order == 1 {
        Ok((plus - minus) * real(T::one() / (lit::<T>(2.0) * step)))
    } else {
        let mid = f.eval(x)?;
        Ok((plus - mid * real(lit::<T>(2.0)) + minus) * real(T::one() / (step * step)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freecore::series::{all_ones_series, geometric_series};
    use crate::sample;
    use crate::scalar::cplx;

    #[test]
    fn extract_from_geometric() {
        let g = geometric_series::<f64>(5);
        let c = extract_coefficient(&g, &Word::new(vec![1, 1, 1])).unwrap();
        assert_eq!(c[(0, 0)], cplx(1.0, 0.0));
        let c0 = extract_coefficient(&g, &Word::empty()).unwrap();
        assert_eq!(c0[(0, 0)], cplx(0.0, 0.0));
    }

    #[test]
    fn extract_from_resolvent_closure() {
        // (1 − x1 − x2)^{-1} − 1 evaluated exactly through a matrix inverse.
        let f = FnEvaluator::new(2, 1, "‖Z1 + Z2‖ < 1", |z: &MatrixTuple<f64>| {
            let n = z.level();
            let m = linalg::identity::<f64>(n) - z.letter(1) - z.letter(2);
            Ok(linalg::inverse(&m, "resolvent")? - linalg::identity::<f64>(n))
        });
        let c = extract_coefficient(&f, &Word::new(vec![1, 2])).unwrap();
        assert!((c[(0, 0)] - cplx(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn extraction_rejected_by_hermitian_only_evaluator() {
        let f = FnEvaluator::new(1, 1, "Hermitian", |z: &MatrixTuple<f64>| {
            if !z.is_hermitian(1e-12) {
                return Err(Error::Domain("needs Hermitian input".into()));
            }
            Ok(z.letter(1).clone())
        });
        let r = extract_coefficient(&f, &Word::letter(1));
        assert!(matches!(r, Err(Error::NilpotentRejected(_))));
    }

    #[test]
    fn second_derivative_of_square_at_zero() {
        let f = FnEvaluator::new(1, 1, "all", |z: &MatrixTuple<f64>| Ok(z.letter(1) * z.letter(1)));
        let mut rng = sample::stream_rng(3, 0);
        let h = MatrixTuple::new(vec![sample::gue::<f64>(&mut rng, 3)]).unwrap();
        let x = MatrixTuple::zeros(1, 3);
        let d2 = directional_derivative(&f, &x, &h, 2).unwrap();
        let expected = h.letter(1) * h.letter(1) * cplx(2.0, 0.0);
        assert!((d2 - expected).norm() < 1e-13);
    }

    #[test]
    fn first_derivative_of_linear_map() {
        let f = FnEvaluator::new(2, 1, "all", |z: &MatrixTuple<f64>| {
            Ok(z.letter(1) * cplx(2.0, 0.0) - z.letter(2) * cplx(0.5, 0.0))
        });
        let mut rng = sample::stream_rng(4, 0);
        let x = MatrixTuple::new(vec![sample::gue::<f64>(&mut rng, 2), sample::gue(&mut rng, 2)]).unwrap();
        let h = MatrixTuple::new(vec![sample::gue::<f64>(&mut rng, 2), sample::gue(&mut rng, 2)]).unwrap();
        let d = directional_derivative(&f, &x, &h, 1).unwrap();
        assert!((d - f.eval(&h).unwrap()).norm() < 1e-13);
    }

    #[test]
    fn geometric_derivative_at_zero() {
        // Termwise: d/dt Σ (tH)^n at t = 0 is H.
        let g = geometric_series::<f64>(8);
        let x = MatrixTuple::zeros(1, 1);
        let h = MatrixTuple::scalars(&[cplx(1.0, 0.0)]).unwrap();
        let d = directional_derivative(&g, &x, &h, 1).unwrap();
        assert!((d[(0, 0)] - cplx(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn block_derivative_matches_finite_differences() {
        let s = all_ones_series::<f64>(2, 6);
        let mut rng = sample::stream_rng(11, 0);
        for _ in 0..5 {
            let x = MatrixTuple::new(vec![
                sample::hermitian_with_norm::<f64>(&mut rng, 3, 0.2),
                sample::hermitian_with_norm(&mut rng, 3, 0.2),
            ])
            .unwrap();
            let h = MatrixTuple::new(vec![sample::gue::<f64>(&mut rng, 3), sample::gue(&mut rng, 3)]).unwrap();
            let exact = directional_derivative(&s, &x, &h, 1).unwrap();
            let fd = finite_difference(&s, &x, &h, 1).unwrap();
            let scale = 1.0 + linalg::op_norm(&s.evaluate(&x).unwrap());
            assert!((exact - fd).norm() <= 1e-6 * scale);
        }
    }
}
