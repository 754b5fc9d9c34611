use super::*;
use crate::error::Error;
use crate::freecore::{directional_derivative, finite_difference, FnEvaluator, FreeFunction, MatrixTuple};
use crate::funcalc::{HermitianCalculus, ScalarFunction};
use crate::linalg::{self, CMat};
use crate::ncexpr::{parse, ExprFunction};
use crate::sample;
use crate::scalar::real;

fn calc(f: ScalarFunction<f64>) -> HermitianCalculus<f64> {
    HermitianCalculus::new(f)
}

fn single(m: CMat<f64>) -> MatrixTuple<f64> {
    MatrixTuple::new(vec![m]).unwrap()
}

#[test]
fn sqrt1p_is_monotone() {
    let dom = DomainSpec::ball(0.9, 1, 5).unwrap();
    let r = check_monotone(&calc(ScalarFunction::Sqrt1p), &dom, 60, 1e-8, 1).unwrap();
    assert!(r.passed(), "{r:?}");
    assert_eq!(r.samples, 60);
}

#[test]
fn exp_is_not_monotone_and_witness_rechecks() {
    let f = calc(ScalarFunction::Exp);
    let dom = DomainSpec::ball(0.9, 1, 2).unwrap();
    let r = check_monotone(&f, &dom, 200, 1e-8, 2).unwrap();
    assert_eq!(r.verdict, Verdict::Fail);
    let w = r.witness.as_ref().unwrap();
    assert_eq!(w.level, 2);
    let again = recheck(&f, &r).unwrap().unwrap();
    assert!(again.reproduced);
    assert_eq!(again.min_eig, w.min_eig);
}

#[test]
fn constant_is_monotone() {
    let f = FnEvaluator::new(1, 1, "all", |z: &MatrixTuple<f64>| Ok(linalg::identity(z.level()) * real(3.0)));
    let dom = DomainSpec::ball(0.9, 1, 3).unwrap();
    assert!(check_monotone(&f, &dom, 30, 1e-8, 3).unwrap().passed());
}

#[test]
fn convexity_examples() {
    let dom = DomainSpec::ball(2.0, 1, 3).unwrap();
    assert!(check_convex(&calc(ScalarFunction::Power(2.0)), &dom, 60, 1e-8, 4).unwrap().passed());
    let r = check_convex(&calc(ScalarFunction::Power(4.0)), &DomainSpec::ball(0.9, 1, 2).unwrap(), 200, 1e-8, 5).unwrap();
    assert_eq!(r.verdict, Verdict::Fail);
    assert!(r.witness.unwrap().level <= 2);
    let affine = ExprFunction::new(parse("2*x1 - 1").unwrap(), 1).unwrap();
    let r = check_convex::<f64>(&affine, &dom, 30, 1e-8, 6).unwrap();
    assert!(r.passed());
}

#[test]
fn quartic_expression_fails_convexity() {
    let f = ExprFunction::new(parse("x1*x1*x1*x1").unwrap(), 1).unwrap();
    let dom = DomainSpec::ball(0.9, 1, 3).unwrap();
    let r = check_convex::<f64>(&f, &dom, 200, 1e-8, 7).unwrap();
    assert_eq!(r.verdict, Verdict::Fail);
    assert!(recheck::<f64>(&f, &r).unwrap().unwrap().reproduced);
}

#[test]
fn reports_are_independent_of_thread_count() {
    let f = calc(ScalarFunction::Power(3.0));
    let dom = DomainSpec::ball(0.9, 1, 4).unwrap();
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| check_monotone(&f, &dom, 100, 1e-8, 11).unwrap())
    };
    assert_eq!(run(1), run(4));
}

#[test]
fn gamma_examples() {
    let x = single(linalg::zeros(1, 1));
    let id = ExprFunction::new(parse("x1").unwrap(), 1).unwrap();
    let g = control_gamma::<f64>(&id, &x, GammaKind::Monotone, 10, 1).unwrap();
    assert!((g - 1.0).abs() < 1e-12);
    let c = ExprFunction::new(parse("2.5").unwrap(), 1).unwrap();
    let g = control_gamma::<f64>(&c, &single(linalg::diag(&[0.3, -0.2])), GammaKind::Convex, 10, 1).unwrap();
    assert!((g - 2.5).abs() < 1e-12);
    let sq = ExprFunction::new(parse("x1*x1").unwrap(), 1).unwrap();
    let g = control_gamma::<f64>(&sq, &x, GammaKind::Convex, 10, 1).unwrap();
    assert!((g - 2.0).abs() < 1e-12);
}

#[test]
fn schur_examples() {
    let s = schur_complement_evaluator();
    let id = FreeFunction::<f64>::eval(&s, &single(linalg::identity(6))).unwrap();
    assert!((id - linalg::identity::<f64>(3)).norm() < 1e-15);
    let v = FreeFunction::<f64>::eval(&s, &single(linalg::from_rows(&[&[2.0, 1.0], &[1.0, 1.0]]))).unwrap();
    assert!((v[(0, 0)].re - 1.0).abs() < 1e-15);
    let singular = single(linalg::from_rows::<f64>(&[&[1.0, 0.0], &[0.0, 0.0]]));
    assert!(matches!(FreeFunction::<f64>::eval(&s, &singular), Err(Error::Domain(_))));
}

#[test]
fn schur_is_monotone_on_block_domain() {
    let dom = DomainSpec::new(DomainKind::BlockPsd22 { margin: 0.1 }, 1, 3).unwrap();
    let r = check_monotone::<f64>(&schur_complement_evaluator(), &dom, 40, 1e-8, 8).unwrap();
    assert!(r.passed(), "{r:?}");
}

#[test]
fn geometric_mean_examples() {
    let g = geometric_mean_evaluator();
    let mut rng = sample::stream_rng(12, 0);
    let a = sample::psd_unit::<f64>(&mut rng, 3, 3) + linalg::identity::<f64>(3) * real(0.2);
    let v = FreeFunction::<f64>::eval(&g, &MatrixTuple::new(vec![a.clone(), a.clone()]).unwrap()).unwrap();
    assert!((v - &a).norm() < 1e-12);
    let v = FreeFunction::<f64>::eval(&g, &MatrixTuple::new(vec![linalg::diag(&[4.0]), linalg::diag(&[9.0])]).unwrap()).unwrap();
    assert!((v[(0, 0)].re - 6.0).abs() < 1e-13);
    let z = MatrixTuple::new(vec![linalg::diag::<f64>(&[1.0, 2.0]), linalg::diag(&[4.0, 8.0])]).unwrap();
    let v = FreeFunction::<f64>::eval(&g, &z).unwrap();
    assert!((v - linalg::diag(&[2.0, 4.0])).norm() < 1e-13);
}

#[test]
fn geometric_mean_block_derivative_matches_differences() {
    let g = geometric_mean_evaluator();
    let dom = DomainSpec::new(DomainKind::PsdCone { margin: 0.3 }, 2, 2).unwrap();
    let mut rng = sample::stream_rng(13, 0);
    let x = dom.sample_point(&mut rng, 2, 2);
    let h = dom.sample_point(&mut rng, 2, 2);
    let exact = directional_derivative::<f64>(&g, &x, &h, 1).unwrap();
    let fd = finite_difference::<f64>(&g, &x, &h, 1).unwrap();
    assert!((&exact - &fd).norm() < 1e-7 * (1.0 + exact.norm()));
}

#[test]
fn geometric_mean_is_monotone() {
    let dom = DomainSpec::new(DomainKind::PsdCone { margin: 0.1 }, 1, 3).unwrap();
    let r = check_monotone::<f64>(&geometric_mean_evaluator(), &dom, 40, 1e-8, 9).unwrap();
    assert!(r.passed(), "{r:?}");
}

#[test]
fn block_mismatch_is_rejected() {
    let dom = DomainSpec::ball(0.9, 1, 2).unwrap();
    assert!(matches!(check_monotone::<f64>(&schur_complement_evaluator(), &dom, 5, 1e-8, 0), Err(Error::Invalid(_))));
}
