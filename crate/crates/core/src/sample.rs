//! Seeded random matrices.
//!
//! Every sampling routine draws from a [`ChaCha8Rng`] obtained through
//! [`stream_rng`], so a trial's randomness depends only on the master seed
//! and the trial index, never on scheduling.

use nalgebra::ComplexField;
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{self, CMat};
use crate::scalar::{lit, real, Real};

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent generator for sub-stream `stream` of `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(splitmix64(seed ^ splitmix64(stream.wrapping_add(0x5851_F42D_4C95_7F2D))))
}

pub fn normal(rng: &mut impl Rng) -> f64 {
    rng.sample(StandardNormal)
}

pub fn uniform(rng: &mut impl Rng) -> f64 {
    rng.random::<f64>()
}

/// Complex Ginibre matrix with i.i.d. standard complex Gaussian entries.
pub fn ginibre<T: Real>(rng: &mut impl Rng, rows: usize, cols: usize) -> CMat<T> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    CMat::from_fn(rows, cols, |_, _| {
        Complex::new(lit(normal(rng) * s), lit(normal(rng) * s))
    })
}

/// GUE-style Hermitian matrix (unnormalized).
pub fn gue<T: Real>(rng: &mut impl Rng, n: usize) -> CMat<T> {
    linalg::herm_part(&ginibre(rng, n, n))
}

/// Hermitian matrix of operator norm exactly `norm` (zero if `n = 0`).
pub fn hermitian_with_norm<T: Real>(rng: &mut impl Rng, n: usize, norm: T) -> CMat<T> {
    let g = gue::<T>(rng, n);
    let s = linalg::op_norm(&g);
    if s == T::zero() {
        return g;
    }
    g * real(norm / s)
}

/// PSD matrix `GᴴG` of the given rank, normalized to operator norm one.
pub fn psd_unit<T: Real>(rng: &mut impl Rng, n: usize, rank: usize) -> CMat<T> {
    let g = ginibre::<T>(rng, rank.max(1), n);
    let p = linalg::herm_part(&(g.adjoint() * g));
    let s = linalg::op_norm(&p);
    if s == T::zero() {
        return p;
    }
    p * real(T::one() / s)
}

/// PSD direction of random rank in `1..=n`, unit norm.
pub fn psd_direction<T: Real>(rng: &mut impl Rng, n: usize) -> CMat<T> {
    let rank = 1 + (rng.random::<u32>() as usize) % n.max(1);
    psd_unit(rng, n, rank)
}

/// Haar-distributed unitary via QR of a Ginibre matrix with phase correction.
pub fn unitary<T: Real>(rng: &mut impl Rng, n: usize) -> CMat<T> {
    let g = ginibre::<T>(rng, n, n);
    let qr = g.qr();
    let q = qr.q();
    let r = qr.r();
    let mut out = q.clone();
    for j in 0..n {
        let d = r[(j, j)];
        let norm = d.modulus();
        if norm > T::zero() {
            let phase = d / real(norm);
            for i in 0..n {
                out[(i, j)] *= phase;
            }
        }
    }
    out
}
