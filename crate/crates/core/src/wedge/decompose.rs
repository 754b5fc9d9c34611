use crate::linalg::{self, CMat};
use crate::scalar::Real;

/// `Z = A − B + iC − iD` with `A, B, C, D ⪰ 0`, from the spectral splits of
/// the Hermitian and imaginary parts.
pub fn decompose_four_positives<T: Real>(z: &CMat<T>) -> (CMat<T>, CMat<T>, CMat<T>, CMat<T>) {
    let (a, b) = linalg::spectral_split(&linalg::herm_part(z));
    let (c, d) = linalg::spectral_split(&linalg::im_part(z));
    (a, b, c, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample;
    use num_complex::Complex;

    #[test]
    fn psd_input_is_its_own_positive_part() {
        let z = linalg::from_rows::<f64>(&[&[2.0, 1.0], &[1.0, 1.0]]);
        let (a, b, c, d) = decompose_four_positives(&z);
        assert!((a - &z).norm() < 1e-14);
        assert!(b.norm() + c.norm() + d.norm() < 1e-14);
    }

    #[test]
    fn imaginary_identity() {
        let z = linalg::identity::<f64>(3) * Complex::new(0.0, 1.0);
        let (a, b, c, d) = decompose_four_positives(&z);
        assert!((c - linalg::identity::<f64>(3)).norm() < 1e-14);
        assert!(a.norm() + b.norm() + d.norm() < 1e-14);
    }

    #[test]
    fn reconstruction() {
        let mut rng = sample::stream_rng(1, 0);
        let z = sample::ginibre::<f64>(&mut rng, 4, 4);
        let (a, b, c, d) = decompose_four_positives(&z);
        let i = Complex::new(0.0, 1.0);
        assert!((&a - &b + &c * i - &d * i - &z).norm() < 1e-12);
        for p in [&a, &b, &c, &d] {
            assert!(linalg::min_eig(p) > -1e-12);
            assert!(linalg::op_norm(p) <= 2.0 * linalg::op_norm(&z));
        }
    }
}
