use num_complex::Complex;
use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::sample;

const MAX_BOXES: usize = 8;
const SET_TRIES: usize = 10_000;
const SUP_SAMPLES: usize = 2000;
const TORUS_SAMPLES: usize = 2000;

/// Axis-aligned box `Π [lo_i, hi_i]`.
#[derive(Clone, Debug, PartialEq)]
pub struct AxisBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl AxisBox {
    fn volume(&self) -> f64 {
        self.lo.iter().zip(&self.hi).map(|(l, h)| (h - l).max(0.0)).product()
    }

    fn intersect(&self, other: &AxisBox) -> AxisBox {
        AxisBox {
            lo: self.lo.iter().zip(&other.lo).map(|(a, b)| a.max(*b)).collect(),
            hi: self.hi.iter().zip(&other.hi).map(|(a, b)| a.min(*b)).collect(),
        }
    }
}

/// Lebesgue measure of a union of boxes by inclusion–exclusion.
pub fn union_measure(boxes: &[AxisBox]) -> f64 {
    let count = boxes.len();
    let mut total = 0.0;
    for mask in 1u32..(1 << count) {
        let mut members = (0..count).filter(|i| mask & (1 << i) != 0);
        let first = boxes[members.next().expect("nonempty mask")].clone();
        let inter = members.fold(first, |acc, i| acc.intersect(&boxes[i]));
        let sign = if mask.count_ones() % 2 == 1 { 1.0 } else { -1.0 };
        total += sign * inter.volume();
    }
    total
}

fn random_set(rng: &mut impl Rng, n: usize, p: f64) -> Result<Vec<AxisBox>> {
    if p >= 1.0 {
        return Ok(vec![AxisBox { lo: vec![0.0; n], hi: vec![1.0; n] }]);
    }
    let side = p.powf(1.0 / n as f64);
    for _ in 0..SET_TRIES {
        let count = 1 + (rng.random::<u32>() as usize) % MAX_BOXES;
        let boxes: Vec<AxisBox> = (0..count)
            .map(|_| {
                let mut lo = Vec::with_capacity(n);
                let mut hi = Vec::with_capacity(n);
                for _ in 0..n {
                    let len = side * (0.5 + 0.5 * sample::uniform(rng));
                    let start = (1.0 - len) * sample::uniform(rng);
                    lo.push(start);
                    hi.push(start + len);
                }
                AxisBox { lo, hi }
            })
            .collect();
        if union_measure(&boxes) >= p {
            return Ok(boxes);
        }
    }
    Err(Error::Sampling(format!("no union of boxes with measure at least {p} found")))
}

/// Exponent vectors of the degree-`d` monomials in `n` variables.
fn monomials(n: usize, d: usize) -> Vec<Vec<usize>> {
    if n == 1 {
        return vec![vec![d]];
    }
    (0..=d)
        .flat_map(|first| {
            monomials(n - 1, d - first).into_iter().map(move |mut rest| {
                rest.insert(0, first);
                rest
            })
        })
        .collect()
}

struct Poly {
    terms: Vec<(f64, Vec<usize>)>,
}

impl Poly {
    fn eval_real(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(c, e)| c * x.iter().zip(e).map(|(xi, &k)| xi.powi(k as i32)).product::<f64>())
            .sum()
    }

    fn eval_complex(&self, z: &[Complex<f64>]) -> Complex<f64> {
        self.terms
            .iter()
            .map(|(c, e)| z.iter().zip(e).map(|(zi, &k)| zi.powi(k as i32)).product::<Complex<f64>>() * *c)
            .sum()
    }
}

fn set_points(rng: &mut impl Rng, boxes: &[AxisBox]) -> Vec<Vec<f64>> {
    let n = boxes[0].lo.len();
    let mut pts = Vec::new();
    for b in boxes {
        for corner in 0u32..(1 << n) {
            pts.push((0..n).map(|i| if corner & (1 << i) != 0 { b.hi[i] } else { b.lo[i] }).collect());
        }
    }
    for _ in 0..SUP_SAMPLES {
        let b = &boxes[(rng.random::<u32>() as usize) % boxes.len()];
        pts.push((0..n).map(|i| b.lo[i] + (b.hi[i] - b.lo[i]) * sample::uniform(rng)).collect());
    }
    pts
}

/// One recorded ratio `max_{torus} |h| / sup_S |h|`.
#[derive(Clone, Debug, PartialEq)]
pub struct LagrangeRecord {
    pub trial: usize,
    pub degree: usize,
    pub set_measure: f64,
    pub ratio: f64,
}

/// Envelope `K̂·Ĉ^d` over all records.
#[derive(Clone, Debug, PartialEq)]
pub struct LagrangeEstimate {
    pub k_hat: f64,
    pub c_hat: f64,
    pub records: Vec<LagrangeRecord>,
    pub note: String,
}

impl LagrangeEstimate {
    pub fn envelope(&self, degree: usize) -> f64 {
        self.k_hat * self.c_hat.powi(degree as i32)
    }
}

/// Monte-Carlo estimate of constants with `|h(z)| ≤ K C^d ‖z‖_∞^d` for
/// degree-`d` homogeneous `h` bounded by one on a set of measure `≥ p`.
///
/// Each trial draws a union of at most eight boxes in `[0,1]^n`, then for
/// every degree a random real homogeneous polynomial normalized by its
/// sampled sup over the set, and records its sampled max on the unit torus.
/// `C` comes from a log-linear fit of the per-degree maxima; `K` is raised
/// until the envelope dominates every record.
pub fn estimate_lagrange_constants(n: usize, p: f64, d_max: usize, trials: usize, seed: u64) -> Result<LagrangeEstimate> {
    if !(1..=4).contains(&n) {
        return Err(Error::Invalid(format!("vars = {n} outside 1..=4")));
    }
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::Invalid(format!("measure p = {p} outside (0, 1]")));
    }
    if !(1..=8).contains(&d_max) {
        return Err(Error::Invalid(format!("dmax = {d_max} outside 1..=8")));
    }
    if trials == 0 {
        return Err(Error::NoData("no data: zero trials requested".into()));
    }
    let per_trial: Vec<Result<Vec<LagrangeRecord>>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = sample::stream_rng(seed, t as u64);
            let boxes = random_set(&mut rng, n, p)?;
            let measure = union_measure(&boxes);
            let pts = set_points(&mut rng, &boxes);
            let torus: Vec<Vec<Complex<f64>>> = (0..TORUS_SAMPLES)
                .map(|j| {
                    (0..n)
                        .map(|_| {
                            // First torus point is (1, …, 1).
                            let theta = if j == 0 { 0.0 } else { std::f64::consts::TAU * sample::uniform(&mut rng) };
                            Complex::from_polar(1.0, theta)
                        })
                        .collect()
                })
                .collect();
            let mut out = Vec::with_capacity(d_max);
            for degree in 1..=d_max {
                let poly = Poly {
                    terms: monomials(n, degree).into_iter().map(|e| (sample::normal(&mut rng), e)).collect(),
                };
                let sup = pts.iter().map(|x| poly.eval_real(x).abs()).fold(0.0, f64::max);
                if sup == 0.0 {
                    continue;
                }
                let peak = torus.iter().map(|z| poly.eval_complex(z).norm()).fold(0.0, f64::max);
                out.push(LagrangeRecord { trial: t, degree, set_measure: measure, ratio: peak / sup });
            }
            Ok(out)
        })
        .collect();
    let mut records = Vec::new();
    for r in per_trial {
        records.extend(r?);
    }
    if records.is_empty() {
        return Err(Error::NoData("no data: every sampled polynomial vanished on its set".into()));
    }
    let mut best = vec![0.0f64; d_max + 1];
    for r in &records {
        best[r.degree] = best[r.degree].max(r.ratio);
    }
    let pts: Vec<(f64, f64)> = (1..=d_max).filter(|&d| best[d] > 0.0).map(|d| (d as f64, best[d].ln())).collect();
    let log_c = if pts.len() >= 2 {
        let nf = pts.len() as f64;
        let mx = pts.iter().map(|q| q.0).sum::<f64>() / nf;
        let my = pts.iter().map(|q| q.1).sum::<f64>() / nf;
        let sxx: f64 = pts.iter().map(|q| (q.0 - mx).powi(2)).sum();
        let sxy: f64 = pts.iter().map(|q| (q.0 - mx) * (q.1 - my)).sum();
        sxy / sxx
    } else {
        0.0
    };
    let c_hat = log_c.exp().max(1.0);
    let k_hat = records.iter().map(|r| r.ratio / c_hat.powi(r.degree as i32)).fold(0.0, f64::max);
    Ok(LagrangeEstimate {
        k_hat,
        c_hat,
        records,
        note: "empirical envelope over random instances; typical rather than worst-case behaviour".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inclusion_exclusion() {
        let a = AxisBox { lo: vec![0.0, 0.0], hi: vec![0.5, 1.0] };
        let b = AxisBox { lo: vec![0.25, 0.0], hi: vec![1.0, 0.5] };
        assert!((union_measure(&[a, b]) - (0.5 + 0.375 - 0.125)).abs() < 1e-15);
    }

    #[test]
    fn monomial_count() {
        assert_eq!(monomials(3, 2).len(), 6);
        assert!(monomials(2, 4).iter().all(|e| e.iter().sum::<usize>() == 4));
    }

    #[test]
    fn one_variable_full_interval() {
        let est = estimate_lagrange_constants(1, 1.0, 5, 4, 1).unwrap();
        assert!((est.k_hat - 1.0).abs() < 1e-12);
        assert!((est.c_hat - 1.0).abs() < 1e-9);
    }

    #[test]
    fn zero_trials_is_an_error() {
        assert!(matches!(estimate_lagrange_constants(2, 0.5, 3, 0, 1), Err(Error::NoData(_))));
    }

    #[test]
    fn envelope_dominates_records() {
        let est = estimate_lagrange_constants(2, 0.5, 4, 6, 3).unwrap();
        assert!(est.records.iter().all(|r| r.ratio <= est.envelope(r.degree) * (1.0 + 1e-12)));
        assert!(est.records.iter().all(|r| r.set_measure >= 0.5));
    }
}
