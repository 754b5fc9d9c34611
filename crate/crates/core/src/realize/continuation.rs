use rand::Rng;

use super::butterfly::{eval_butterfly, ButterflyRealization};
use super::monotone::{eval_monotone, MonotoneRealization};
use crate::error::{Error, Result};
use crate::freecore::MatrixTuple;
use crate::linalg::{self, CMat};
use crate::sample;
use crate::scalar::{lit, real, to_f64, Real};

fn imaginary_unit<T: Real>() -> num_complex::Complex<T> {
    num_complex::Complex::new(T::zero(), T::one())
}

/// `X + iY` with Hermitian `X` and positive definite `Y`.
pub fn random_upper_half_plane_point<T: Real>(rng: &mut impl Rng, d: usize, n: usize) -> MatrixTuple<T> {
    let entries = (0..d)
        .map(|_| {
            let xn = lit(2.0 * sample::uniform(rng));
            let x = sample::hermitian_with_norm::<T>(rng, n, xn);
            let y = sample::psd_direction::<T>(rng, n) * real(lit::<T>(2.0 * sample::uniform(rng)))
                + linalg::identity::<T>(n) * real(lit::<T>(0.05 + sample::uniform(rng)));
            x + y * imaginary_unit()
        })
        .collect();
    MatrixTuple::new(entries).expect("equal sizes")
}

/// Smallest eigenvalue of `Im f(Z)` for `Z` in the matrix upper half-plane.
pub fn pick_value<T: Real>(r: &MonotoneRealization<T>, z: &MatrixTuple<T>) -> Result<T> {
    for (i, zi) in z.entries().iter().enumerate() {
        if linalg::min_eig(&linalg::im_part(zi)) <= T::zero() {
            return Err(Error::Domain(format!("Im Z_{} is not positive definite", i + 1)));
        }
    }
    Ok(linalg::min_eig(&linalg::im_part(&eval_monotone(r, z)?)))
}

/// Worst `min_eig(Im f(Z))` over `samples` random upper half-plane points at
/// levels `1..=max_level`.
pub fn pick_check<T: Real>(r: &MonotoneRealization<T>, samples: usize, max_level: usize, seed: u64) -> Result<T> {
    let mut worst: Option<T> = None;
    for t in 0..samples {
        let mut rng = sample::stream_rng(seed, t as u64);
        let n = 1 + t % max_level.max(1);
        let z = random_upper_half_plane_point(&mut rng, r.letters(), n);
        let v = pick_value(r, &z)?;
        worst = Some(worst.map_or(v, |w| w.min(v)));
    }
    worst.ok_or_else(|| Error::NoData("no sample points requested".into()))
}

/// Outcome of comparing `‖f(Z)‖` with the growth bound in the tube.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TubeBound<T: Real> {
    pub value_norm: T,
    pub bound: T,
    /// Certified lower bound on the smallest singular value of `I − Γ(Z)`.
    pub eps: T,
}

impl<T: Real> TubeBound<T> {
    pub fn holds(&self) -> bool {
        self.value_norm <= self.bound * lit(1.0 + 1e-10) + lit(1e-14)
    }
}

/// Checks `‖f(Z)‖ ≤ ‖a0‖ + ‖L‖‖Z‖ + ε⁻¹‖Λ‖²‖Z‖²` where `‖Z‖ = Σ‖Z_i‖`,
/// after verifying that `σ_min(I − Γ(Z)) ≥ ε`.
pub fn tube_bound_check<T: Real>(r: &ButterflyRealization<T>, z: &MatrixTuple<T>, eps: T) -> Result<TubeBound<T>> {
    if !(eps > T::zero()) {
        return Err(Error::Invalid("eps must be positive".into()));
    }
    let middle = linalg::identity::<T>(z.level() * r.r()) - r.gamma(z);
    let smin = linalg::min_singular(&middle);
    if smin < eps * lit(1.0 - 1e-12) {
        return Err(Error::TubeBoundary(format!(
            "smallest singular value {:e} of I - sum T_i Z_i is below eps = {:e}",
            to_f64(smin),
            to_f64(eps)
        )));
    }
    let value = eval_butterfly(r, z)?;
    let zn = z.norm_sum();
    let lam = r.lambda_norm();
    let bound = linalg::op_norm(&r.a0) + r.linear_norm() * zn + lam * lam * zn * zn / eps;
    Ok(TubeBound { value_norm: linalg::op_norm(&value), bound, eps })
}

/// Random tube point `X + iY` with `Σ_i ‖T_i‖‖X_i‖ ≤ 1/2`, together with the
/// certified `ε = λ_min(I − Σ T_i ⊗ X_i)`.
pub fn random_tube_point<T: Real>(r: &ButterflyRealization<T>, rng: &mut impl Rng, n: usize) -> (MatrixTuple<T>, T) {
    let d = r.letters();
    let tnorm: T = r.t.iter().map(linalg::op_norm).fold(T::zero(), |a, b| a.max(b));
    let budget = if tnorm > T::zero() { lit::<T>(0.5) / (tnorm * lit(d as f64)) } else { lit(2.0) };
    let entries: Vec<CMat<T>> = (0..d)
        .map(|_| {
            let xn = budget * lit(sample::uniform(rng));
            let x = sample::hermitian_with_norm::<T>(rng, n, xn);
            let yn = lit(3.0 * sample::uniform(rng));
            let y = sample::hermitian_with_norm::<T>(rng, n, yn);
            x + y * imaginary_unit()
        })
        .collect();
    let z = MatrixTuple::new(entries).expect("equal sizes");
    let re = z.map(linalg::herm_part);
    let eps = linalg::min_eig(&(linalg::identity::<T>(n * r.r()) - r.gamma(&re)));
    (z, eps)
}
