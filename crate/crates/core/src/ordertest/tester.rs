use rayon::prelude::*;

use super::domain::DomainSpec;
use super::report::{TestReport, Verdict, Witness, WitnessKind};
use crate::error::{Error, Result};
use crate::freecore::{directional_derivative, FreeFunction, MatrixTuple};
use crate::linalg::{self, CMat};
use crate::sample;
use crate::scalar::{lit, real, Real};

const DOMAIN_RETRIES: usize = 20;
const CHUNK: usize = 32;
const SELF_ADJOINT_TOL: f64 = 1e-8;

fn hermitian_output<T: Real>(v: CMat<T>) -> Result<CMat<T>> {
    if !linalg::is_hermitian(&v, lit(SELF_ADJOINT_TOL)) {
        return Err(Error::NonSelfAdjoint(format!(
            "output has anti-Hermitian part of size {:e}",
            crate::scalar::to_f64(linalg::hermitian_defect(&v))
        )));
    }
    Ok(linalg::herm_part(&v))
}

fn eval_herm<T: Real>(f: &(impl FreeFunction<T> + ?Sized), z: &MatrixTuple<T>) -> Result<CMat<T>> {
    hermitian_output(f.eval(z)?)
}

/// Smallest eigenvalue of the tested quantity and the scale its tolerance is
/// measured against. Deterministic in `(kind, a, b)`.
pub fn violation<T: Real>(
    f: &(impl FreeFunction<T> + ?Sized),
    kind: WitnessKind,
    a: &MatrixTuple<T>,
    b: &MatrixTuple<T>,
) -> Result<(T, T)> {
    let one = T::one();
    let (q, scale) = match kind {
        WitnessKind::Difference => {
            let fa = eval_herm(f, a)?;
            let fb = eval_herm(f, b)?;
            let scale = one + linalg::op_norm(&fb);
            (fb - fa, scale)
        }
        WitnessKind::Midpoint => {
            let fa = eval_herm(f, a)?;
            let fb = eval_herm(f, b)?;
            let mid = a.zip_with(b, |x, y| (x + y) * real(lit::<T>(0.5)))?;
            let fm = eval_herm(f, &mid)?;
            let scale = one + linalg::op_norm(&fa).max(linalg::op_norm(&fb));
            ((fa + fb) * real(lit::<T>(0.5)) - fm, scale)
        }
        WitnessKind::Derivative | WitnessKind::Hessian => {
            let order = if kind == WitnessKind::Derivative { 1 } else { 2 };
            let fx = eval_herm(f, a)?;
            let d = linalg::herm_part(&directional_derivative(f, a, b, order)?);
            let scale = one + linalg::op_norm(&fx).max(linalg::op_norm(&d));
            (d, scale)
        }
    };
    Ok((linalg::min_eig(&linalg::herm_part(&q)), scale))
}

fn sample_in<T: Real>(
    f: &(impl FreeFunction<T> + ?Sized),
    dom: &DomainSpec<T>,
    rng: &mut impl rand::Rng,
    n: usize,
) -> Result<MatrixTuple<T>> {
    for _ in 0..DOMAIN_RETRIES {
        let z = dom.sample_point(rng, f.letters(), n);
        if f.contains(&z) {
            return Ok(z);
        }
    }
    Err(Error::Sampling(format!(
        "no point of {dom} at level {n} in the domain of the function after {DOMAIN_RETRIES} tries"
    )))
}

fn check_block<T: Real>(f: &(impl FreeFunction<T> + ?Sized), dom: &DomainSpec<T>) -> Result<()> {
    if f.input_block() != dom.block() {
        return Err(Error::Invalid(format!(
            "function expects {}x{} input blocks, domain {dom} provides {}x{}",
            f.input_block(),
            f.input_block(),
            dom.block(),
            dom.block()
        )));
    }
    Ok(())
}

enum Outcome<T: Real> {
    Pass,
    Fail(Witness<T>),
}

fn judge<T: Real>(
    f: &(impl FreeFunction<T> + ?Sized),
    kind: WitnessKind,
    a: MatrixTuple<T>,
    b: MatrixTuple<T>,
    tol: T,
    level: usize,
    trial: usize,
) -> Result<Outcome<T>> {
    let (min_eig, scale) = violation(f, kind, &a, &b)?;
    if min_eig < -tol * scale {
        Ok(Outcome::Fail(Witness { kind, a, b, min_eig, level, trial }))
    } else {
        Ok(Outcome::Pass)
    }
}

fn run_trials<T: Real, F>(samples: usize, tol: T, seed: u64, trial: F) -> Result<TestReport<T>>
where
    F: Fn(usize) -> Result<Outcome<T>> + Sync,
{
    let mut start = 0;
    while start < samples {
        let end = (start + CHUNK).min(samples);
        let outcomes: Vec<Result<Outcome<T>>> = (start..end).into_par_iter().map(&trial).collect();
        for outcome in outcomes {
            match outcome? {
                Outcome::Pass => {}
                Outcome::Fail(w) => {
                    let samples = w.trial + 1;
                    return Ok(TestReport { verdict: Verdict::Fail, samples, witness: Some(w), tol, seed });
                }
            }
        }
        start = end;
    }
    Ok(TestReport { verdict: Verdict::Pass, samples, witness: None, tol, seed })
}

/// Randomized matrix-monotonicity test.
///
/// Trial `t` draws `A` in the domain at level `dom.level_for_trial(t)`, a PSD
/// direction `P` and a step keeping `B = A + sP` inside, then checks both
/// `f(B) − f(A) ⪰ 0` and `Df(A)[P] ⪰ 0` up to `tol` relative to the output
/// norm. The earliest failing trial is reported regardless of scheduling.
pub fn check_monotone<T: Real>(
    f: &(impl FreeFunction<T> + ?Sized),
    dom: &DomainSpec<T>,
    samples: usize,
    tol: T,
    seed: u64,
) -> Result<TestReport<T>> {
    check_block(f, dom)?;
    run_trials(samples, tol, seed, |t| {
        let mut rng = sample::stream_rng(seed, t as u64);
        let n = dom.level_for_trial(t);
        let a = sample_in(f, dom, &mut rng, n)?;
        let size = a.level();
        let p = MatrixTuple::new((0..f.letters()).map(|_| sample::psd_direction::<T>(&mut rng, size)).collect())?;
        let cap = dom.max_step(&a, &p, T::one());
        let s = cap * lit(sample::uniform(&mut rng).max(1e-3));
        let b = a.add_scaled(&p, s)?;
        if !f.contains(&b) {
            return Err(Error::Sampling(format!("step left the domain of the function at trial {t}")));
        }
        if let Outcome::Fail(w) = judge(f, WitnessKind::Difference, a.clone(), b, tol, n, t)? {
            return Ok(Outcome::Fail(w));
        }
        judge(f, WitnessKind::Derivative, a, p, tol, n, t)
    })
}

/// Randomized matrix-convexity test: midpoint inequality on random pairs
/// and `D²f(X)[H] ⪰ 0` on random Hermitian directions.
pub fn check_convex<T: Real>(
    f: &(impl FreeFunction<T> + ?Sized),
    dom: &DomainSpec<T>,
    samples: usize,
    tol: T,
    seed: u64,
) -> Result<TestReport<T>> {
    check_block(f, dom)?;
    run_trials(samples, tol, seed, |t| {
        let mut rng = sample::stream_rng(seed, t as u64);
        let n = dom.level_for_trial(t);
        let a = sample_in(f, dom, &mut rng, n)?;
        let b = sample_in(f, dom, &mut rng, n)?;
        let size = a.level();
        let h = MatrixTuple::new(
            (0..f.letters()).map(|_| sample::hermitian_with_norm::<T>(&mut rng, size, T::one())).collect(),
        )?;
        if let Outcome::Fail(w) = judge(f, WitnessKind::Midpoint, a.clone(), b, tol, n, t)? {
            return Ok(Outcome::Fail(w));
        }
        judge(f, WitnessKind::Hessian, a, h, tol, n, t)
    })
}

/// Result of re-validating a stored witness.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Recheck<T: Real> {
    pub min_eig: T,
    pub threshold: T,
    pub reproduced: bool,
}

/// Recomputes the violation of a stored witness with the report's tolerance.
pub fn recheck<T: Real>(f: &(impl FreeFunction<T> + ?Sized), report: &TestReport<T>) -> Result<Option<Recheck<T>>> {
    let Some(w) = &report.witness else { return Ok(None) };
    let (min_eig, scale) = violation(f, w.kind, &w.a, &w.b)?;
    let threshold = -report.tol * scale;
    Ok(Some(Recheck { min_eig, threshold, reproduced: min_eig < threshold }))
}
