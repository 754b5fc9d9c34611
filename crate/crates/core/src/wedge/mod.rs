//! Homogeneous expansions, positive-orthant sup-norms, continuation radii
//! and interpolation-constant estimates.

mod decompose;
mod homogeneous;
mod lagrange;

pub use decompose::decompose_four_positives;
pub use homogeneous::{
    continuation_radius, homogeneous_parts, orthant_sup_norm, partial_sum_tail_ratio, HomogeneousBundle, RadiusFit,
};
pub use lagrange::{estimate_lagrange_constants, union_measure, AxisBox, LagrangeEstimate, LagrangeRecord};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freecore::{all_ones_series, geometric_series, FreeSeries, Word};
    use crate::ncexpr::{expand, parse};
    use crate::scalar::real;

    #[test]
    fn split_geometric() {
        let b = homogeneous_parts(&geometric_series::<f64>(3));
        assert_eq!(b.parts.len(), 4);
        assert!(b.parts[0].is_empty());
        for d in 1..=3 {
            assert_eq!(b.parts[d].len(), 1);
            assert!(b.parts[d].coeff_ref(&Word::new(vec![1; d])).is_some());
        }
        assert_eq!(b.sum().unwrap(), geometric_series(3));
    }

    #[test]
    fn split_constant_and_all_ones() {
        let c = FreeSeries::<f64>::constant(1, 0, real(2.0));
        assert_eq!(homogeneous_parts(&c).parts.len(), 1);
        let b = homogeneous_parts(&all_ones_series::<f64>(2, 2));
        assert_eq!(b.parts[1].len(), 2);
        assert_eq!(b.parts[2].len(), 4);
    }

    #[test]
    fn sup_norm_examples() {
        let x = expand::<f64>(&parse("x1").unwrap(), 1, 1).unwrap();
        let v = orthant_sup_norm(&x, 200, &[1, 2, 3], 1).unwrap();
        assert!((v - 1.0).abs() < 0.02);
        let zero = FreeSeries::<f64>::zero(1, 2, 1);
        assert_eq!(orthant_sup_norm(&zero, 50, &[2], 1).unwrap(), 0.0);
        let avg = expand::<f64>(&parse("0.5*x1 + 0.5*x2").unwrap(), 2, 1).unwrap();
        let v = orthant_sup_norm(&avg, 100, &[1, 2], 1).unwrap();
        assert!(v <= 1.0 + 1e-12 && v > 0.99);
        assert!(orthant_sup_norm(&geometric_series::<f64>(2), 5, &[1], 1).is_err());
    }

    #[test]
    fn sup_norm_is_monotone_in_samples() {
        let h = all_ones_series::<f64>(2, 2).homogeneous(2);
        let a = orthant_sup_norm(&h, 10, &[2, 3], 5).unwrap();
        let b = orthant_sup_norm(&h, 40, &[2, 3], 5).unwrap();
        assert!(b >= a);
    }

    fn bundle_with(bounds: Vec<f64>) -> HomogeneousBundle<f64> {
        let parts = (0..bounds.len()).map(|_| FreeSeries::zero(1, bounds.len() - 1, 1)).collect();
        HomogeneousBundle { parts, bounds, samples: 1 }
    }

    #[test]
    fn radius_examples() {
        let fit = continuation_radius(&bundle_with(vec![0.0, 1.0, 1.0, 1.0, 1.0]), 1.0).unwrap();
        assert!((fit.delta - 0.5).abs() < 1e-12);
        assert!((fit.k - 1.0).abs() < 1e-12 && (fit.c - 1.0).abs() < 1e-12);
        let fit = continuation_radius(&bundle_with(vec![0.5]), 1.0).unwrap();
        assert!(fit.unconstrained());
        let fit = continuation_radius(&bundle_with(vec![0.0, 2.0, 4.0, 8.0]), 1.0).unwrap();
        assert!((fit.c - 2.0).abs() < 1e-12);
        assert!(fit.delta < 0.5 && (fit.delta - 0.25).abs() < 1e-12);
        let fit = continuation_radius(&bundle_with(vec![2.0, 1.0]), 1.0).unwrap();
        assert_eq!(fit.delta, 0.0);
        assert!(fit.diagnostic.is_some());
        assert!(continuation_radius(&HomogeneousBundle::<f64> { parts: vec![], bounds: vec![], samples: 0 }, 1.0).is_err());
    }
}
