use ncrealize::funcalc::{fit_measure_from_moments, herm_apply, loewner_matrix, DiscreteMeasure, ScalarFunction};
use ncrealize::linalg;
use ncrealize::sample;
use proptest::prelude::*;

fn separated_atoms(raw: Vec<f64>) -> Option<Vec<f64>> {
    let mut atoms = raw;
    atoms.sort_by(|a, b| a.partial_cmp(b).unwrap());
    if atoms.windows(2).all(|p| p[1] - p[0] > 0.1) {
        Some(atoms)
    } else {
        None
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn moment_fit_round_trip(
        raw in prop::collection::vec(-1.0f64..=1.0, 1..=3),
        weights in prop::collection::vec(0.1f64..2.0, 3),
    ) {
        let Some(atoms) = separated_atoms(raw) else { return Ok(()) };
        let weights = weights[..atoms.len()].to_vec();
        let truth = DiscreteMeasure::new(atoms, weights).unwrap();
        let fit = fit_measure_from_moments(&truth.moments(2 * truth.len()), truth.len()).unwrap();
        prop_assert_eq!(fit.len(), truth.len());
        for k in 0..truth.len() {
            prop_assert!((fit.atoms()[k] - truth.atoms()[k]).abs() < 1e-6);
            prop_assert!((fit.weights()[k] - truth.weights()[k]).abs() < 1e-6);
        }
    }

    #[test]
    fn loewner_matrix_psd_for_monotone_functions(
        eigs in prop::collection::vec(-0.99f64..0.99, 1..=6),
        atom in -1.0f64..=1.0,
        which in 0usize..4,
    ) {
        let f = match which {
            0 => ScalarFunction::Geom,
            1 => ScalarFunction::Sqrt1p,
            2 => ScalarFunction::Log1p,
            _ => ScalarFunction::Nevanlinna { a: 0.0, mu: DiscreteMeasure::dirac(atom, 1.0).unwrap() },
        };
        let l = loewner_matrix(&f, &eigs).unwrap();
        let scale = 1.0 + l.norm();
        let min = l.symmetric_eigen().eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
        prop_assert!(min >= -1e-10 * scale, "{} min eig {}", f, min);
    }

    #[test]
    fn herm_apply_commutes_with_unitaries(seed in any::<u64>(), n in 1usize..5) {
        let mut rng = sample::stream_rng(seed, 0);
        let a = sample::hermitian_with_norm::<f64>(&mut rng, n, 0.8);
        let u = sample::unitary::<f64>(&mut rng, n);
        for f in [ScalarFunction::Sqrt1p, ScalarFunction::Exp, ScalarFunction::Log1p] {
            let lhs = herm_apply(&f, &(&u * &a * u.adjoint())).unwrap();
            let rhs = &u * herm_apply(&f, &a).unwrap() * u.adjoint();
            prop_assert!((&lhs - &rhs).norm() <= 1e-10 * (1.0 + rhs.norm()));
        }
    }
}

#[test]
fn exp_loewner_matrix_is_not_psd() {
    let l = loewner_matrix(&ScalarFunction::Exp, &[0.0, 3.0]).unwrap();
    let min = l.symmetric_eigen().eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    assert!(min < 0.0);
}

#[test]
fn f32_functional_calculus() {
    let a = linalg::diag::<f32>(&[0.25, 0.5]);
    let out = herm_apply(&ScalarFunction::Geom, &a).unwrap();
    assert!((out[(0, 0)].re - 1.0 / 3.0).abs() < 1e-6);
    assert!((out[(1, 1)].re - 1.0).abs() < 1e-6);
}
