use crate::error::{Error, Result};
use crate::freecore::{FreeSeries, Word};
use crate::linalg::{self, CMat};
use crate::scalar::{lit, real, to_f64, Real};

/// Default relative rank tolerance for Gram factorizations.
pub const RANK_TOL: f64 = 1e-10;

const SERIES_HERMITIAN_TOL: f64 = 1e-12;

/// Gram matrix of inner products on a basis of `(word, coefficient index)` pairs.
#[derive(Clone, Debug, PartialEq)]
pub struct GramSpec<T: Real> {
    pub basis: Vec<(Word, usize)>,
    pub matrix: CMat<T>,
    pub m: usize,
}

impl<T: Real> GramSpec<T> {
    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    /// Position of `(w, v)` in the basis.
    pub fn index_of(&self, w: &Word, v: usize) -> Option<usize> {
        self.basis.iter().position(|(b, j)| b == w && *j == v)
    }
}

fn tensor_basis(words: Vec<Word>, k: usize) -> Vec<(Word, usize)> {
    words.into_iter().flat_map(|w| (0..k).map(move |v| (w.clone(), v))).collect()
}

fn require_hermitian<T: Real>(s: &FreeSeries<T>) -> Result<()> {
    if !s.is_hermitian(lit(SERIES_HERMITIAN_TOL)) {
        return Err(Error::Invalid("series is not Hermitian: coeff(w)^H differs from coeff(reverse(w))".into()));
    }
    Ok(())
}

fn gram_from<T: Real>(
    s: &FreeSeries<T>,
    basis: Vec<(Word, usize)>,
    m: usize,
    word_of: impl Fn(&Word, &Word) -> Word,
) -> GramSpec<T> {
    let n = basis.len();
    let matrix = CMat::from_fn(n, n, |row, col| {
        let (beta, w) = &basis[row];
        let (alpha, v) = &basis[col];
        s.coeff_ref(&word_of(beta, alpha)).map_or(real(T::zero()), |c| c[(*w, *v)])
    });
    GramSpec { basis, matrix: linalg::herm_part(&matrix), m }
}

/// Localizing matrices `C_i[(β,w),(α,v)] = w* c_{β* x_i α} v` on words of length `≤ m`.
pub fn localizing_matrices<T: Real>(s: &FreeSeries<T>, m: usize) -> Result<Vec<GramSpec<T>>> {
    require_hermitian(s)?;
    if 2 * m + 1 > s.degree() {
        return Err(Error::InsufficientDegree { needed: 2 * m + 1, have: s.degree() });
    }
    let basis = tensor_basis(Word::enumerate(s.letters(), 0, m), s.dim());
    Ok((1..=s.letters())
        .map(|i| gram_from(s, basis.clone(), m, |beta, alpha| beta.reverse().append(i).concat(alpha)))
        .collect())
}

/// Convexity Gram matrix `C[(β,w),(α,v)] = w* c_{β* α} v` on words of length `1..=m`.
pub fn convex_gram<T: Real>(s: &FreeSeries<T>, m: usize) -> Result<GramSpec<T>> {
    require_hermitian(s)?;
    if 2 * m > s.degree() || m == 0 {
        return Err(Error::InsufficientDegree { needed: (2 * m).max(2), have: s.degree() });
    }
    let basis = tensor_basis(Word::enumerate(s.letters(), 1, m), s.dim());
    Ok(gram_from(s, basis, m, |beta, alpha| beta.reverse().concat(alpha)))
}

/// `(passes, min_eig)` with pass iff `min_eig ≥ −tol·max(1, ‖G‖)`.
pub fn psd_check<T: Real>(g: &GramSpec<T>, tol: T) -> (bool, T) {
    let min = linalg::min_eig(&g.matrix);
    let scale = T::one().max(linalg::op_norm(&g.matrix));
    (min >= -tol * scale, min)
}

/// Factor `G = Vᴴ V` with `V` of full row rank.
#[derive(Clone, Debug, PartialEq)]
pub struct GnsFactor<T: Real> {
    /// `r × N`; column `j` is the image of basis vector `j`.
    pub v: CMat<T>,
    pub rank: usize,
}

/// Factorization through the eigenvectors with eigenvalue above `rank_tol·λ_max`.
/// Rows are ordered by decreasing eigenvalue and phased so that their first
/// significant entry is real and positive.
pub fn gns_factor<T: Real>(g: &GramSpec<T>, rank_tol: T) -> Result<GnsFactor<T>> {
    let (ok, min) = psd_check(g, rank_tol);
    if !ok {
        return Err(Error::NotPsd { letter: None, min_eig: to_f64(min) });
    }
    let n = g.matrix.nrows();
    let (vals, vecs) = linalg::eigh(&g.matrix);
    let lmax = vals.iter().copied().fold(T::zero(), |a, b| a.max(b));
    let keep: Vec<usize> = (0..n).rev().filter(|&i| vals[i] > rank_tol * lmax && vals[i] > T::zero()).collect();
    let rank = keep.len();
    let mut v = linalg::zeros::<T>(rank, n);
    for (row, &idx) in keep.iter().enumerate() {
        let s = vals[idx].sqrt();
        let col = vecs.column(idx);
        let big = col.iter().map(|z| z.norm_sqr()).fold(T::zero(), |a, b| a.max(b));
        let phase = col
            .iter()
            .find(|z| z.norm_sqr() > big * lit(1e-12))
            .map(|z| z.conj() / real(z.norm_sqr().sqrt()))
            .unwrap_or(real(T::one()));
        for j in 0..n {
            v[(row, j)] = (col[j] * phase).conj() * real(s);
        }
    }
    Ok(GnsFactor { v, rank })
}

/// Least-squares shift: the Hermitian `M` with `M·inputs ≈ targets` whose
/// block on the orthogonal complement of the input span is zero.
pub(crate) fn hermitian_shift<T: Real>(inputs: &CMat<T>, targets: &CMat<T>) -> CMat<T> {
    let r = inputs.nrows();
    if inputs.ncols() == 0 {
        return linalg::zeros(r, r);
    }
    let pinv = linalg::pinv(inputs, lit(RANK_TOL));
    let m0 = targets * &pinv;
    let proj = inputs * &pinv;
    let comp = linalg::identity::<T>(r) - &proj;
    linalg::herm_part(&(&m0 + &proj * m0.adjoint() * comp))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freecore::geometric_series;
    use crate::ncexpr::{expand, parse};

    fn gram(m: CMat<f64>) -> GramSpec<f64> {
        let n = m.nrows();
        GramSpec { basis: (0..n).map(|j| (Word::empty(), j)).collect(), matrix: m, m: 0 }
    }

    #[test]
    fn geometric_localizing_matrix_is_all_ones() {
        let c = localizing_matrices(&geometric_series::<f64>(5), 2).unwrap();
        assert_eq!(c.len(), 1);
        assert!((&c[0].matrix - CMat::from_element(3, 3, real(1.0))).norm() < 1e-15);
        assert!(psd_check(&c[0], 1e-10).0);
    }

    #[test]
    fn linear_localizing_matrix() {
        let s = expand::<f64>(&parse("x1").unwrap(), 1, 3).unwrap();
        let c = localizing_matrices(&s, 1).unwrap();
        let mut expected = linalg::zeros::<f64>(2, 2);
        expected[(0, 0)] = real(1.0);
        assert_eq!(c[0].matrix, expected);
    }

    #[test]
    fn symmetrized_product_fails() {
        let s = expand::<f64>(&parse("x1*x2 + x2*x1").unwrap(), 2, 3).unwrap();
        let c = localizing_matrices(&s, 1).unwrap();
        let e = c[0].index_of(&Word::empty(), 0).unwrap();
        let x2 = c[0].index_of(&Word::letter(2), 0).unwrap();
        assert_eq!(c[0].matrix[(e, x2)].re, 1.0);
        assert_eq!(c[0].matrix[(x2, e)].re, 1.0);
        let (ok, min) = psd_check(&c[0], 1e-10);
        assert!(!ok);
        assert!((min + 1.0).abs() < 1e-12);
    }

    #[test]
    fn convex_gram_examples() {
        let g = convex_gram(&geometric_series::<f64>(4), 2).unwrap();
        assert!((&g.matrix - CMat::from_element(2, 2, real(1.0))).norm() < 1e-15);
        let sq = expand::<f64>(&parse("x1*x1").unwrap(), 1, 2).unwrap();
        assert_eq!(convex_gram(&sq, 1).unwrap().matrix, CMat::from_element(1, 1, real(1.0)));
        let quartic = expand::<f64>(&parse("x1*x1*x1*x1").unwrap(), 1, 4).unwrap();
        let g = convex_gram(&quartic, 2).unwrap();
        assert_eq!(g.matrix, linalg::diag(&[0.0, 1.0]));
        assert!(psd_check(&g, 1e-10).0);
    }

    #[test]
    fn degree_requirements() {
        assert!(matches!(localizing_matrices(&geometric_series::<f64>(4), 2), Err(Error::InsufficientDegree { .. })));
        assert!(matches!(convex_gram(&geometric_series::<f64>(3), 2), Err(Error::InsufficientDegree { .. })));
    }

    #[test]
    fn psd_check_examples() {
        assert_eq!(psd_check(&gram(linalg::identity(3)), 1e-10), (true, 1.0));
        let (ok, min) = psd_check(&gram(linalg::from_rows(&[&[0.0, 1.0], &[1.0, 0.0]])), 1e-10);
        assert!(!ok && (min + 1.0).abs() < 1e-14);
        let (ok, min) = psd_check(&gram(CMat::from_element(3, 3, real(1.0))), 1e-10);
        assert!(ok && min.abs() < 1e-14);
    }

    #[test]
    fn gns_examples() {
        let f = gns_factor(&gram(linalg::identity(3)), 1e-10).unwrap();
        assert_eq!(f.rank, 3);
        assert!((f.v.adjoint() * &f.v - linalg::identity::<f64>(3)).norm() < 1e-14);
        let f = gns_factor(&gram(CMat::from_element(3, 3, real(1.0))), 1e-10).unwrap();
        assert_eq!(f.rank, 1);
        for j in 0..3 {
            assert!((f.v[(0, j)] - real(1.0)).norm() < 1e-14);
        }
        let f = gns_factor(&gram(linalg::diag(&[1.0, -1e-14])), 1e-10).unwrap();
        assert_eq!(f.rank, 1);
        assert!(matches!(gns_factor(&gram(linalg::diag(&[1.0, -0.5])), 1e-10), Err(Error::NotPsd { .. })));
    }
}
