use super::gram::{gns_factor, hermitian_shift, localizing_matrices, psd_check, RANK_TOL};
use crate::error::{Error, Result};
use crate::freecore::{FreeFunction, FreeSeries, MatrixTuple, Word};
use crate::linalg::{self, CMat};
use crate::scalar::{lit, to_f64, Real};

/// `f(Z) = a0 + Qᴴ (Σ_i P_i Z_i⁻¹ − A)⁻¹ Q` on `H = ⊕_i H_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct MonotoneRealization<T: Real> {
    pub a0: CMat<T>,
    pub a: CMat<T>,
    /// Orthogonal projections onto the summands `H_i`.
    pub p: Vec<CMat<T>>,
    /// `r × k`.
    pub q: CMat<T>,
    pub m: usize,
}

impl<T: Real> MonotoneRealization<T> {
    pub fn r(&self) -> usize {
        self.a.nrows()
    }

    pub fn k(&self) -> usize {
        self.a0.nrows()
    }

    pub fn letters(&self) -> usize {
        self.p.len()
    }

    /// Validates shapes, Hermitian `A` and a resolution of the identity by the `P_i`.
    pub fn validate(&self, tol: T) -> Result<()> {
        let (r, k) = (self.r(), self.k());
        let shape_ok = self.a.is_square()
            && self.a0.is_square()
            && self.q.shape() == (r, k)
            && self.p.iter().all(|p| p.shape() == (r, r));
        if !shape_ok || self.p.is_empty() {
            return Err(Error::DimensionMismatch("inconsistent monotone realization shapes".into()));
        }
        if !linalg::is_hermitian(&self.a, tol) {
            return Err(Error::Invalid("A is not Hermitian".into()));
        }
        let mut sum = linalg::zeros::<T>(r, r);
        for (i, p) in self.p.iter().enumerate() {
            if !linalg::is_hermitian(p, tol) || (p * p - p).norm() > tol * (T::one() + p.norm()) {
                return Err(Error::Invalid(format!("P_{} is not an orthogonal projection", i + 1)));
            }
            sum += p;
        }
        if (sum - linalg::identity::<T>(r)).norm() > tol * lit((r.max(1)) as f64) {
            return Err(Error::Invalid("projections do not sum to the identity".into()));
        }
        Ok(())
    }

    fn check_point(&self, z: &MatrixTuple<T>) -> Result<()> {
        if z.len() != self.letters() {
            return Err(Error::DimensionMismatch(format!(
                "realization in {} letters evaluated at a {}-tuple",
                self.letters(),
                z.len()
            )));
        }
        Ok(())
    }

    fn lifted(&self, n: usize) -> (CMat<T>, CMat<T>, CMat<T>) {
        let id = linalg::identity::<T>(n);
        (linalg::kron(&id, &self.a0), linalg::kron(&id, &self.a), linalg::kron(&id, &self.q))
    }

    /// Transfer form `a0 + Qᴴ Z_P (I − A Z_P)⁻¹ Q` with `Z_P = Σ Z_i ⊗ P_i`;
    /// needs no inverse of the `Z_i`.
    pub fn eval_transfer(&self, z: &MatrixTuple<T>) -> Result<CMat<T>> {
        self.check_point(z)?;
        let n = z.level();
        let (a0, a, q) = self.lifted(n);
        let mut zp = linalg::zeros::<T>(n * self.r(), n * self.r());
        for (zi, pi) in z.entries().iter().zip(&self.p) {
            zp += linalg::kron(zi, pi);
        }
        let middle = linalg::identity::<T>(n * self.r()) - &a * &zp;
        let solved = linalg::solve(&middle, &q, "I - A Z_P")?;
        Ok(a0 + q.adjoint() * zp * solved)
    }
}

/// Builds the realization from the localizing matrices on words of length `≤ m`.
pub fn build_monotone_realization<T: Real>(s: &FreeSeries<T>, m: usize) -> Result<MonotoneRealization<T>> {
    build_monotone_realization_with(s, m, lit(RANK_TOL))
}

pub fn build_monotone_realization_with<T: Real>(
    s: &FreeSeries<T>,
    m: usize,
    rank_tol: T,
) -> Result<MonotoneRealization<T>> {
    let grams = localizing_matrices(s, m)?;
    let mut factors = Vec::with_capacity(grams.len());
    for (i, g) in grams.iter().enumerate() {
        let (ok, min) = psd_check(g, rank_tol);
        if !ok {
            return Err(Error::NotPsd { letter: Some(i + 1), min_eig: to_f64(min) });
        }
        factors.push(gns_factor(g, rank_tol)?.v);
    }
    let basis = &grams[0].basis;
    let k = s.dim();
    let d = s.letters();
    let r: usize = factors.iter().map(|v| v.nrows()).sum();
    let cols = basis.len();

    // Column (α, v) of E is the image of α ⊗ v in ⊕_i H_i.
    let mut e = linalg::zeros::<T>(r, cols);
    let mut offsets = Vec::with_capacity(d);
    let mut row = 0;
    for v in &factors {
        offsets.push(row);
        e.view_mut((row, 0), v.shape()).copy_from(v);
        row += v.nrows();
    }
    let p: Vec<CMat<T>> = (0..d)
        .map(|i| {
            let mut pi = linalg::zeros::<T>(r, r);
            for j in 0..factors[i].nrows() {
                pi[(offsets[i] + j, offsets[i] + j)] = crate::scalar::real(T::one());
            }
            pi
        })
        .collect();

    let index = |w: &Word, v: usize| basis.iter().position(|(b, j)| b == w && *j == v);
    let mut inputs = Vec::new();
    let mut targets = Vec::new();
    for (col, (beta, v)) in basis.iter().enumerate() {
        if beta.len() >= m {
            continue;
        }
        for (j, pj) in p.iter().enumerate() {
            let target = index(&beta.prepend(j + 1), *v).expect("shifted word within basis");
            inputs.push(pj * e.column(col));
            targets.push(e.column(target).into_owned());
        }
    }
    let a = hermitian_shift(&stack_columns(&inputs, r), &stack_columns(&targets, r));
    let q = CMat::from_fn(r, k, |i, v| e[(i, index(&Word::empty(), v).expect("empty word in basis"))]);
    Ok(MonotoneRealization { a0: s.constant_term(), a, p, q, m })
}

pub(crate) fn stack_columns<T: Real>(cols: &[nalgebra::DVector<num_complex::Complex<T>>], rows: usize) -> CMat<T> {
    CMat::from_fn(rows, cols.len(), |i, j| cols[j][i])
}

/// `a0 + Qᴴ (Σ P_i ⊗ Z_i⁻¹ − A)⁻¹ Q` at a tuple of invertible matrices.
pub fn eval_monotone<T: Real>(r: &MonotoneRealization<T>, z: &MatrixTuple<T>) -> Result<CMat<T>> {
    r.check_point(z)?;
    let n = z.level();
    let (a0, a, q) = r.lifted(n);
    let mut resolvent = -a;
    for (i, (zi, pi)) in z.entries().iter().zip(&r.p).enumerate() {
        let inv = linalg::inverse(zi, "").map_err(|_| {
            Error::Domain(format!("Z_{} is not invertible; evaluate via the series or the transfer form instead", i + 1))
        })?;
        resolvent += linalg::kron(&inv, pi);
    }
    let solved = linalg::solve(&resolvent, &q, "resolvent sum P_i Z_i^-1 - A")?;
    Ok(a0 + q.adjoint() * solved)
}

impl<T: Real> FreeFunction<T> for MonotoneRealization<T> {
    fn letters(&self) -> usize {
        self.p.len()
    }

    fn output_dim(&self) -> usize {
        self.k()
    }

    fn eval(&self, z: &MatrixTuple<T>) -> Result<CMat<T>> {
        self.eval_transfer(z)
    }

    fn domain(&self) -> String {
        "tuples with I - A Z_P invertible".into()
    }
}
