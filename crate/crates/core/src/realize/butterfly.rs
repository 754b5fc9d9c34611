use super::gram::{convex_gram, gns_factor, hermitian_shift, psd_check, RANK_TOL};
use super::monotone::stack_columns;
use crate::error::{Error, Result};
use crate::freecore::{FreeFunction, FreeSeries, MatrixTuple, Word};
use crate::linalg::{self, CMat};
use crate::scalar::{lit, to_f64, Real};

/// `f(Z) = a0 + Σ Z_i ⊗ L_i + Λ(Z*)ᴴ (I − Γ(Z))⁻¹ Λ(Z)` with
/// `Λ(Z) = Σ Z_i ⊗ Q_i` and `Γ(Z) = Σ Z_i ⊗ T_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct ButterflyRealization<T: Real> {
    pub a0: CMat<T>,
    pub l: Vec<CMat<T>>,
    pub t: Vec<CMat<T>>,
    /// Each `r × k`.
    pub q: Vec<CMat<T>>,
    pub m: usize,
}

impl<T: Real> ButterflyRealization<T> {
    pub fn r(&self) -> usize {
        self.t.first().map_or(0, |t| t.nrows())
    }

    pub fn k(&self) -> usize {
        self.a0.nrows()
    }

    pub fn letters(&self) -> usize {
        self.t.len()
    }

    pub fn validate(&self, tol: T) -> Result<()> {
        let (r, k, d) = (self.r(), self.k(), self.letters());
        let shape_ok = d > 0
            && self.a0.is_square()
            && self.l.len() == d
            && self.q.len() == d
            && self.l.iter().all(|l| l.shape() == (k, k))
            && self.t.iter().all(|t| t.shape() == (r, r))
            && self.q.iter().all(|q| q.shape() == (r, k));
        if !shape_ok {
            return Err(Error::DimensionMismatch("inconsistent butterfly realization shapes".into()));
        }
        if let Some(i) = self.t.iter().position(|t| !linalg::is_hermitian(t, tol)) {
            return Err(Error::Invalid(format!("T_{} is not Hermitian", i + 1)));
        }
        Ok(())
    }

    /// `Γ(Z) = Σ Z_i ⊗ T_i`.
    pub fn gamma(&self, z: &MatrixTuple<T>) -> CMat<T> {
        let n = z.level() * self.r();
        z.entries().iter().zip(&self.t).fold(linalg::zeros(n, n), |acc, (zi, ti)| acc + linalg::kron(zi, ti))
    }

    fn lambda(&self, z: &MatrixTuple<T>) -> CMat<T> {
        let (rows, cols) = (z.level() * self.r(), z.level() * self.k());
        z.entries().iter().zip(&self.q).fold(linalg::zeros(rows, cols), |acc, (zi, qi)| acc + linalg::kron(zi, qi))
    }

    /// `‖[Q_1 … Q_d]‖`.
    pub fn lambda_norm(&self) -> T {
        let (r, k) = (self.r(), self.k());
        let mut wide = linalg::zeros::<T>(r, k * self.letters());
        for (i, q) in self.q.iter().enumerate() {
            wide.view_mut((0, i * k), (r, k)).copy_from(q);
        }
        linalg::op_norm(&wide)
    }

    /// `Σ ‖L_i‖`.
    pub fn linear_norm(&self) -> T {
        self.l.iter().map(linalg::op_norm).fold(T::zero(), |a, b| a + b)
    }
}

/// Builds the realization from the convexity Gram matrix on words of length `1..=m`.
pub fn build_butterfly_realization<T: Real>(s: &FreeSeries<T>, m: usize) -> Result<ButterflyRealization<T>> {
    build_butterfly_realization_with(s, m, lit(RANK_TOL))
}

pub fn build_butterfly_realization_with<T: Real>(
    s: &FreeSeries<T>,
    m: usize,
    rank_tol: T,
) -> Result<ButterflyRealization<T>> {
    let g = convex_gram(s, m)?;
    let (ok, min) = psd_check(&g, rank_tol);
    if !ok {
        return Err(Error::NotPsd { letter: None, min_eig: to_f64(min) });
    }
    let v = gns_factor(&g, rank_tol)?.v;
    let r = v.nrows();
    let k = s.dim();
    let d = s.letters();
    let index = |w: &Word, j: usize| g.basis.iter().position(|(b, c)| b == w && *c == j);

    let t = (1..=d)
        .map(|i| {
            let mut inputs = Vec::new();
            let mut targets = Vec::new();
            for (col, (beta, j)) in g.basis.iter().enumerate() {
                if beta.len() < m {
                    let target = index(&beta.prepend(i), *j).expect("shifted word within basis");
                    inputs.push(v.column(col).into_owned());
                    targets.push(v.column(target).into_owned());
                }
            }
            hermitian_shift(&stack_columns(&inputs, r), &stack_columns(&targets, r))
        })
        .collect();
    let q = (1..=d)
        .map(|i| CMat::from_fn(r, k, |row, j| v[(row, index(&Word::letter(i), j).expect("letter in basis"))]))
        .collect();
    let l = (1..=d).map(|i| s.coeff(&Word::letter(i))).collect();
    Ok(ButterflyRealization { a0: s.constant_term(), l, t, q, m })
}

/// Evaluates the butterfly form; Hermitian input gives symmetrized output.
pub fn eval_butterfly<T: Real>(r: &ButterflyRealization<T>, z: &MatrixTuple<T>) -> Result<CMat<T>> {
    let out = eval_butterfly_raw(r, z)?;
    Ok(if z.is_hermitian(lit(1e-12)) { linalg::herm_part(&out) } else { out })
}

/// Evaluation without the final symmetrization.
pub fn eval_butterfly_raw<T: Real>(r: &ButterflyRealization<T>, z: &MatrixTuple<T>) -> Result<CMat<T>> {
    if z.len() != r.letters() {
        return Err(Error::DimensionMismatch(format!(
            "realization in {} letters evaluated at a {}-tuple",
            r.letters(),
            z.len()
        )));
    }
    let n = z.level();
    let mut out = linalg::kron(&linalg::identity(n), &r.a0);
    for (zi, li) in z.entries().iter().zip(&r.l) {
        out += linalg::kron(zi, li);
    }
    let middle = linalg::identity::<T>(n * r.r()) - r.gamma(z);
    let right = r.lambda(z);
    let left = r.lambda(&z.adjoint());
    let solved = linalg::solve(&middle, &right, "")
        .map_err(|_| Error::TubeBoundary("I - sum T_i Z_i is singular".into()))?;
    Ok(out + left.adjoint() * solved)
}

impl<T: Real> FreeFunction<T> for ButterflyRealization<T> {
    fn letters(&self) -> usize {
        self.t.len()
    }

    fn output_dim(&self) -> usize {
        self.k()
    }

    fn eval(&self, z: &MatrixTuple<T>) -> Result<CMat<T>> {
        eval_butterfly(self, z)
    }

    fn domain(&self) -> String {
        "tuples with I - sum T_i Z_i invertible".into()
    }
}
