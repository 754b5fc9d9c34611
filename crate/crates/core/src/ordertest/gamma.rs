use crate::error::Result;
use crate::freecore::{directional_derivative, FreeFunction, MatrixTuple};
use crate::linalg;
use crate::sample;
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GammaKind {
    Monotone,
    Convex,
}

/// `‖f(X)‖` plus sampled positive-orthant norms of the derivatives.
///
/// Directions are tuples of unit-norm PSD matrices at the ampliations
/// `X^{⊕m}`, `m = 1, 2, 3`; the first sample is the identity direction.
/// Second derivatives are added for [`GammaKind::Convex`].
pub fn control_gamma<T: Real>(
    f: &(impl FreeFunction<T> + ?Sized),
    x: &MatrixTuple<T>,
    kind: GammaKind,
    samples: usize,
    seed: u64,
) -> Result<T> {
    let value = linalg::op_norm(&f.eval(x)?);
    let orders: &[usize] = match kind {
        GammaKind::Monotone => &[1],
        GammaKind::Convex => &[1, 2],
    };
    let mut sup = vec![T::zero(); orders.len()];
    for t in 0..samples.max(1) {
        let m = 1 + t % 3;
        let xm = x.ampliate(m);
        let size = xm.level();
        let h = if t == 0 {
            MatrixTuple::new(vec![linalg::identity::<T>(size); x.len()])?
        } else {
            let mut rng = sample::stream_rng(seed, t as u64);
            MatrixTuple::new((0..x.len()).map(|_| sample::psd_direction::<T>(&mut rng, size)).collect())?
        };
        for (slot, &order) in sup.iter_mut().zip(orders) {
            let d = directional_derivative(f, &xm, &h, order)?;
            *slot = slot.max(linalg::op_norm(&d));
        }
    }
    Ok(sup.into_iter().fold(value, |a, b| a + b))
}
