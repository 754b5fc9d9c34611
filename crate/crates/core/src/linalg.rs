//! Dense complex matrix helpers on top of nalgebra.

use nalgebra::{ComplexField, DMatrix, DVector};
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{lit, real, Real};

/// Dense complex matrix.
pub type CMat<T> = DMatrix<Complex<T>>;

pub fn zeros<T: Real>(rows: usize, cols: usize) -> CMat<T> {
    CMat::zeros(rows, cols)
}

pub fn identity<T: Real>(n: usize) -> CMat<T> {
    CMat::identity(n, n)
}

pub fn from_real<T: Real>(m: &DMatrix<T>) -> CMat<T> {
    m.map(real)
}

/// Builds a complex matrix from row-major real entries.
pub fn from_rows<T: Real>(rows: &[&[f64]]) -> CMat<T> {
    let r = rows.len();
    let c = rows.first().map_or(0, |x| x.len());
    CMat::from_fn(r, c, |i, j| real(lit(rows[i][j])))
}

pub fn diag<T: Real>(values: &[T]) -> CMat<T> {
    let n = values.len();
    CMat::from_fn(n, n, |i, j| if i == j { real(values[i]) } else { Complex::new(T::zero(), T::zero()) })
}

/// `(M + Mᴴ)/2`.
pub fn herm_part<T: Real>(m: &CMat<T>) -> CMat<T> {
    (m + m.adjoint()) * real(lit::<T>(0.5))
}

/// `(M − Mᴴ)/2i`, the imaginary part in the operator sense.
pub fn im_part<T: Real>(m: &CMat<T>) -> CMat<T> {
    (m - m.adjoint()) * Complex::new(T::zero(), lit(-0.5))
}

/// Frobenius norm of the anti-Hermitian part.
pub fn hermitian_defect<T: Real>(m: &CMat<T>) -> T {
    (m - m.adjoint()).norm()
}

pub fn is_hermitian<T: Real>(m: &CMat<T>, tol: T) -> bool {
    m.is_square() && hermitian_defect(m) <= tol * (T::one() + m.norm())
}

/// Eigendecomposition of the Hermitian part of `m`, eigenvalues ascending.
pub fn eigh<T: Real>(m: &CMat<T>) -> (DVector<T>, CMat<T>) {
    let n = m.nrows();
    if n == 0 {
        return (DVector::zeros(0), zeros(0, 0));
    }
    let eig = herm_part(m).symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[a]
            .partial_cmp(&eig.eigenvalues[b])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let values = DVector::from_fn(n, |i, _| eig.eigenvalues[order[i]]);
    let vectors = CMat::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    (values, vectors)
}

/// Smallest eigenvalue of the Hermitian part (`+∞`-free: 0 for empty input).
pub fn min_eig<T: Real>(m: &CMat<T>) -> T {
    let (vals, _) = eigh(m);
    vals.iter().copied().fold(None, |acc: Option<T>, v| Some(acc.map_or(v, |a| a.min(v)))).unwrap_or(T::zero())
}

pub fn max_eig<T: Real>(m: &CMat<T>) -> T {
    let (vals, _) = eigh(m);
    vals.iter().copied().fold(None, |acc: Option<T>, v| Some(acc.map_or(v, |a| a.max(v)))).unwrap_or(T::zero())
}

fn singular_values<T: Real>(m: &CMat<T>) -> DVector<T> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return DVector::zeros(0);
    }
    m.clone().svd(false, false).singular_values
}

/// Spectral (operator 2-) norm.
pub fn op_norm<T: Real>(m: &CMat<T>) -> T {
    singular_values(m).iter().copied().fold(T::zero(), |a, b| a.max(b))
}

/// Smallest singular value of a square matrix.
pub fn min_singular<T: Real>(m: &CMat<T>) -> T {
    let s = singular_values(m);
    s.iter().copied().fold(None, |acc: Option<T>, v| Some(acc.map_or(v, |a| a.min(v)))).unwrap_or(T::zero())
}

/// Relative singularity threshold for inverses and solves.
pub fn singular_rtol<T: Real>() -> T {
    T::default_epsilon() * lit(64.0)
}

/// Inverse of a square matrix, rejecting numerically singular input.
pub fn inverse<T: Real>(m: &CMat<T>, what: &str) -> Result<CMat<T>> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!("{what}: inverse of non-square matrix")));
    }
    if m.nrows() == 0 {
        return Ok(zeros(0, 0));
    }
    let s = singular_values(m);
    let smax = s.iter().copied().fold(T::zero(), |a, b| a.max(b));
    let smin = s.iter().copied().fold(smax, |a, b| a.min(b));
    if smax == T::zero() || smin <= singular_rtol::<T>() * smax {
        return Err(Error::Singular(what.to_string()));
    }
    m.clone()
        .try_inverse()
        .ok_or_else(|| Error::Singular(what.to_string()))
}

/// Solves `M X = B` for square invertible `M`.
pub fn solve<T: Real>(m: &CMat<T>, b: &CMat<T>, what: &str) -> Result<CMat<T>> {
    if m.nrows() == 0 {
        return Ok(zeros(0, b.ncols()));
    }
    let s = singular_values(m);
    let smax = s.iter().copied().fold(T::zero(), |a, b| a.max(b));
    let smin = s.iter().copied().fold(smax, |a, b| a.min(b));
    if smax == T::zero() || smin <= singular_rtol::<T>() * smax {
        return Err(Error::Singular(what.to_string()));
    }
    m.clone()
        .lu()
        .solve(b)
        .ok_or_else(|| Error::Singular(what.to_string()))
}

/// Moore–Penrose pseudo-inverse with relative cutoff `rtol·σ_max`.
pub fn pinv<T: Real>(m: &CMat<T>, rtol: T) -> CMat<T> {
    let (r, c) = m.shape();
    if r == 0 || c == 0 {
        return zeros(c, r);
    }
    let svd = m.clone().svd(true, true);
    let smax = svd.singular_values.iter().copied().fold(T::zero(), |a, b| a.max(b));
    if smax == T::zero() {
        return zeros(c, r);
    }
    let cut = rtol * smax;
    let u = svd.u.expect("u requested");
    let vt = svd.v_t.expect("v_t requested");
    let mut out = zeros::<T>(c, r);
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s > cut {
            let vk = vt.row(k).adjoint();
            let uk = u.column(k).adjoint();
            out += (vk * uk) * real(T::one() / s);
        }
    }
    out
}

/// Kronecker product `a ⊗ b`.
pub fn kron<T: Real>(a: &CMat<T>, b: &CMat<T>) -> CMat<T> {
    a.kronecker(b)
}

/// Block-diagonal matrix from square or rectangular blocks.
pub fn block_diag<T: Real>(blocks: &[&CMat<T>]) -> CMat<T> {
    let rows = blocks.iter().map(|b| b.nrows()).sum();
    let cols = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = zeros(rows, cols);
    let (mut r0, mut c0) = (0, 0);
    for b in blocks {
        out.view_mut((r0, c0), b.shape()).copy_from(*b);
        r0 += b.nrows();
        c0 += b.ncols();
    }
    out
}

/// Copies the `(bi, bj)` block of size `rows × cols`.
pub fn block<T: Real>(m: &CMat<T>, bi: usize, bj: usize, rows: usize, cols: usize) -> CMat<T> {
    m.view((bi * rows, bj * cols), (rows, cols)).into_owned()
}

/// Hermitian matrix function through an eigendecomposition, symmetrized.
pub fn spectral_map<T: Real>(m: &CMat<T>, f: impl Fn(T) -> T) -> CMat<T> {
    let (vals, vecs) = eigh(m);
    let fv: Vec<T> = vals.iter().map(|&v| f(v)).collect();
    let out = &vecs * diag(&fv) * vecs.adjoint();
    herm_part(&out)
}

/// Positive and negative spectral parts `(M₊, M₋)` of a Hermitian matrix, `M = M₊ − M₋`.
pub fn spectral_split<T: Real>(m: &CMat<T>) -> (CMat<T>, CMat<T>) {
    let pos = spectral_map(m, |v| v.max(T::zero()));
    let neg = spectral_map(m, |v| (-v).max(T::zero()));
    (pos, neg)
}

pub fn max_abs_entry<T: Real>(m: &CMat<T>) -> T {
    m.iter().map(|z| z.modulus()).fold(T::zero(), |a, b| a.max(b))
}
