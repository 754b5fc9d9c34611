use crate::error::{Error, Result};
use crate::freecore::{FreeSeries, MatrixTuple};
use crate::linalg::{self, CMat};
use crate::sample;
use crate::scalar::{lit, real, to_f64, Real};

/// A series split by word length, with optional sampled sup-norms `M_d`.
#[derive(Clone, Debug, PartialEq)]
pub struct HomogeneousBundle<T: Real> {
    /// `parts[d]` holds the words of length exactly `d`.
    pub parts: Vec<FreeSeries<T>>,
    pub bounds: Vec<T>,
    /// Number of sample tuples behind `bounds`.
    pub samples: usize,
}

pub fn homogeneous_parts<T: Real>(s: &FreeSeries<T>) -> HomogeneousBundle<T> {
    HomogeneousBundle { parts: (0..=s.degree()).map(|d| s.homogeneous(d)).collect(), bounds: Vec::new(), samples: 0 }
}

impl<T: Real> HomogeneousBundle<T> {
    /// `Σ_d parts[d]`.
    pub fn sum(&self) -> Result<FreeSeries<T>> {
        let mut parts = self.parts.iter();
        let first = parts.next().ok_or_else(|| Error::NoData("empty bundle".into()))?.clone();
        parts.try_fold(first, |acc, p| acc.add(p))
    }

    /// Fills `bounds` with [`orthant_sup_norm`] of every part.
    pub fn estimate_bounds(&mut self, samples: usize, sizes: &[usize], seed: u64) -> Result<()> {
        self.bounds = self
            .parts
            .iter()
            .enumerate()
            .map(|(d, h)| orthant_sup_norm(h, samples, sizes, seed.wrapping_add(d as u64)))
            .collect::<Result<_>>()?;
        self.samples = samples;
        Ok(())
    }
}

fn psd_contraction<T: Real>(rng: &mut impl rand::Rng, n: usize) -> CMat<T> {
    let scale = lit::<T>(sample::uniform(rng).powf(0.25));
    sample::psd_direction::<T>(rng, n) * real(scale)
}

/// Sampled sup of `‖h(X)‖` over tuples of positive contractions.
///
/// Sample 0 is the identity tuple at `sizes[0]`; later samples are random
/// PSD tuples with `‖X_i‖ ≤ 1` at sizes cycling through `sizes`. The value
/// is a running maximum, so it never decreases as `samples` grows.
pub fn orthant_sup_norm<T: Real>(h: &FreeSeries<T>, samples: usize, sizes: &[usize], seed: u64) -> Result<T> {
    if let Some(w) = h.terms().map(|(w, _)| w.len()).collect::<std::collections::BTreeSet<_>>().iter().nth(1) {
        return Err(Error::Invalid(format!("series is not homogeneous (contains words of length {w} and others)")));
    }
    if sizes.is_empty() || sizes.contains(&0) {
        return Err(Error::Invalid("sample sizes must be positive".into()));
    }
    let d = h.letters();
    let mut sup = T::zero();
    for t in 0..samples {
        let n = sizes[t % sizes.len()];
        let z = if t == 0 {
            MatrixTuple::new(vec![linalg::identity::<T>(n); d])?
        } else {
            let mut rng = sample::stream_rng(seed, t as u64);
            MatrixTuple::new((0..d).map(|_| psd_contraction::<T>(&mut rng, n)).collect())?
        };
        sup = sup.max(linalg::op_norm(&h.evaluate(&z)?));
    }
    Ok(sup)
}

/// Fitted envelope `M_d ≈ K·C^d` and the resulting radius.
#[derive(Clone, Debug, PartialEq)]
pub struct RadiusFit<T: Real> {
    /// Largest `δ` with `M_0 + Σ_{d≥1} K(Cδ)^d ≤ target`; `+∞` when unconstrained.
    pub delta: T,
    pub k: T,
    pub c: T,
    pub diagnostic: Option<String>,
}

impl<T: Real> RadiusFit<T> {
    pub fn unconstrained(&self) -> bool {
        !self.delta.is_finite()
    }

    /// `K·Σ_{d>j} (C·s)^d`, the tail bound beyond degree `j` at size `s`.
    pub fn tail_bound(&self, j: usize, s: T) -> T {
        let q = self.c * s;
        if q >= T::one() {
            return T::one() / T::zero();
        }
        self.k * q.powi(j as i32 + 1) / (T::one() - q)
    }
}

fn infinity<T: Real>() -> T {
    T::one() / T::zero()
}

/// Fits `log M_d = log K + d log C` over degrees `d ≥ 1` with `M_d > 0` and
/// returns the radius where the geometric majorant reaches `target`.
pub fn continuation_radius<T: Real>(bundle: &HomogeneousBundle<T>, target: T) -> Result<RadiusFit<T>> {
    if bundle.parts.is_empty() {
        return Err(Error::NoData("empty bundle".into()));
    }
    if bundle.bounds.len() != bundle.parts.len() {
        return Err(Error::Invalid("bundle has no sup-norm estimates; run estimate_bounds first".into()));
    }
    if let Some(b) = bundle.bounds.iter().find(|b| !b.is_finite() || **b < T::zero()) {
        return Err(Error::Invalid(format!("invalid sup-norm estimate {}", to_f64(*b))));
    }
    let m0 = bundle.bounds[0];
    let pts: Vec<(f64, f64)> = bundle
        .bounds
        .iter()
        .enumerate()
        .skip(1)
        .filter(|(_, b)| **b > T::zero())
        .map(|(d, b)| (d as f64, to_f64(*b).ln()))
        .collect();
    if m0 > target {
        return Ok(RadiusFit {
            delta: T::zero(),
            k: T::zero(),
            c: T::zero(),
            diagnostic: Some(format!("constant part {} already exceeds the target", to_f64(m0))),
        });
    }
    if pts.is_empty() {
        return Ok(RadiusFit {
            delta: infinity(),
            k: T::zero(),
            c: T::zero(),
            diagnostic: Some("unconstrained: no nonzero part of positive degree".into()),
        });
    }
    let (log_k, log_c) = if pts.len() == 1 {
        (0.0, pts[0].1 / pts[0].0)
    } else {
        let nf = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / nf;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / nf;
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let slope = sxy / sxx;
        (my - slope * mx, slope)
    };
    let k: T = lit(log_k.exp());
    let c: T = lit(log_c.exp());
    let g = target - m0;
    if g <= T::zero() {
        return Ok(RadiusFit {
            delta: T::zero(),
            k,
            c,
            diagnostic: Some("no room above the constant part: target equals M_0".into()),
        });
    }
    // K·q/(1 − q) = g at q = Cδ.
    let delta = g / ((k + g) * c);
    Ok(RadiusFit { delta, k, c, diagnostic: None })
}

/// Verifies the geometric tail bound on the partial sums of `s` at `z`:
/// `‖S_D − S_j‖ ≤ K Σ_{d>j} (C‖Z‖)^d` for every `j < D`, `‖Z‖ = Σ‖Z_i‖`.
/// Returns the largest ratio of observed difference to bound.
pub fn partial_sum_tail_ratio<T: Real>(s: &FreeSeries<T>, fit: &RadiusFit<T>, z: &MatrixTuple<T>) -> Result<T> {
    let sums = s.partial_sums(z)?;
    let last = sums.last().ok_or_else(|| Error::NoData("empty series".into()))?;
    let size = z.norm_sum();
    let mut worst = T::zero();
    for (j, sj) in sums.iter().enumerate().take(sums.len() - 1) {
        let diff = linalg::op_norm(&(last - sj));
        let bound = fit.tail_bound(j, size);
        if diff > T::zero() {
            worst = worst.max(if bound > T::zero() { diff / bound } else { infinity() });
        }
    }
    Ok(worst)
}
