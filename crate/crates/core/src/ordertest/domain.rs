use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use crate::freecore::MatrixTuple;
use crate::linalg::{self, CMat};
use crate::sample;
use crate::scalar::{lit, real, to_f64, Real};

/// Shape of each level set of a test domain.
#[derive(Clone, Debug, PartialEq)]
pub enum DomainKind<T: Real> {
    /// Hermitian tuples with `‖X_i − c·I‖ < radius` for every letter.
    HermBall { center: T, radius: T },
    /// Hermitian tuples with every `X_i ⪰ margin·I`.
    PsdCone { margin: T },
    /// Hermitian `2n × 2n` letters (level-major, inner `2 × 2` blocks) whose
    /// `(2, 2)` corner satisfies `X_22 ⪰ margin·I`.
    BlockPsd22 { margin: T },
}

/// Convex matrix domain together with the range of levels tested.
#[derive(Clone, Debug, PartialEq)]
pub struct DomainSpec<T: Real> {
    pub kind: DomainKind<T>,
    pub n_min: usize,
    pub n_max: usize,
}

const MEMBERSHIP_TOL: f64 = 1e-10;

/// Odd-indexed principal submatrix of a level-major `2n × 2n` matrix.
pub(crate) fn corner22<T: Real>(x: &CMat<T>) -> CMat<T> {
    let n = x.nrows() / 2;
    CMat::from_fn(n, n, |i, j| x[(2 * i + 1, 2 * j + 1)])
}

impl<T: Real> DomainSpec<T> {
    pub fn new(kind: DomainKind<T>, n_min: usize, n_max: usize) -> Result<Self> {
        if n_min == 0 || n_min > n_max {
            return Err(Error::Invalid(format!("invalid level range {n_min}..{n_max}")));
        }
        match &kind {
            DomainKind::HermBall { radius, .. } if !(*radius > T::zero()) => {
                return Err(Error::Invalid("ball radius must be positive".into()))
            }
            DomainKind::PsdCone { margin } | DomainKind::BlockPsd22 { margin } if *margin < T::zero() => {
                return Err(Error::Invalid("margin must be nonnegative".into()))
            }
            _ => {}
        }
        Ok(DomainSpec { kind, n_min, n_max })
    }

    pub fn ball(radius: T, n_min: usize, n_max: usize) -> Result<Self> {
        Self::new(DomainKind::HermBall { center: T::zero(), radius }, n_min, n_max)
    }

    /// Size of one input coordinate at level 1.
    pub fn block(&self) -> usize {
        match self.kind {
            DomainKind::BlockPsd22 { .. } => 2,
            _ => 1,
        }
    }

    /// Level used by trial `t`; levels are visited cyclically.
    pub fn level_for_trial(&self, t: usize) -> usize {
        self.n_min + t % (self.n_max - self.n_min + 1)
    }

    pub fn contains(&self, z: &MatrixTuple<T>) -> bool {
        let tol: T = lit(MEMBERSHIP_TOL);
        if !z.is_hermitian(tol) {
            return false;
        }
        z.entries().iter().all(|x| match &self.kind {
            DomainKind::HermBall { center, radius } => {
                let shifted = x - linalg::identity::<T>(x.nrows()) * real(*center);
                linalg::op_norm(&shifted) < *radius + tol
            }
            DomainKind::PsdCone { margin } => linalg::min_eig(x) >= *margin - tol,
            DomainKind::BlockPsd22 { margin } => {
                x.nrows() % 2 == 0 && linalg::min_eig(&corner22(x)) >= *margin - tol
            }
        })
    }

    /// Random Hermitian `d`-tuple at level `n`.
    pub fn sample_point(&self, rng: &mut impl Rng, d: usize, n: usize) -> MatrixTuple<T> {
        let size = n * self.block();
        let entries = (0..d)
            .map(|_| match &self.kind {
                DomainKind::HermBall { center, radius } => {
                    let r = to_f64(*radius) * (1.0 - 1e-3) * sample::uniform(rng).sqrt();
                    sample::hermitian_with_norm::<T>(rng, size, lit(r))
                        + linalg::identity::<T>(size) * real(*center)
                }
                DomainKind::PsdCone { margin } => {
                    let w = sample::psd_direction::<T>(rng, size) * real(lit::<T>(2.0 * sample::uniform(rng)));
                    w + linalg::identity::<T>(size) * real(*margin + lit(0.05))
                }
                DomainKind::BlockPsd22 { margin } => {
                    let norm = lit(2.0 * sample::uniform(rng));
                    let mut x = sample::hermitian_with_norm::<T>(rng, size, norm);
                    let low = linalg::min_eig(&corner22(&x));
                    let shift = *margin + lit::<T>(0.05 + sample::uniform(rng)) - low;
                    for i in 0..n {
                        x[(2 * i + 1, 2 * i + 1)] += real(shift);
                    }
                    linalg::herm_part(&x)
                }
            })
            .collect();
        MatrixTuple::new(entries).expect("sampled letters share a size")
    }

    /// Largest `s` (up to `cap`) with `A + sP` still in the domain.
    pub fn max_step(&self, a: &MatrixTuple<T>, p: &MatrixTuple<T>, cap: T) -> T {
        match self.kind {
            DomainKind::HermBall { .. } => {
                let inside = |s: T| a.add_scaled(p, s).map(|b| self.contains_strict(&b)).unwrap_or(false);
                if inside(cap) {
                    return cap;
                }
                let (mut lo, mut hi) = (T::zero(), cap);
                for _ in 0..60 {
                    let mid = (lo + hi) * lit(0.5);
                    if inside(mid) {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                lo
            }
            // Cones are closed under adding PSD directions.
            _ => cap,
        }
    }

    fn contains_strict(&self, z: &MatrixTuple<T>) -> bool {
        match &self.kind {
            DomainKind::HermBall { center, radius } => z.entries().iter().all(|x| {
                let shifted = x - linalg::identity::<T>(x.nrows()) * real(*center);
                linalg::op_norm(&shifted) < *radius * lit(1.0 - 1e-6)
            }),
            _ => self.contains(z),
        }
    }
}

impl<T: Real> fmt::Display for DomainSpec<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            DomainKind::HermBall { center, radius } => {
                write!(f, "ball:{}", to_f64(*radius))?;
                if *center != T::zero() {
                    write!(f, "@{}", to_f64(*center))?;
                }
            }
            DomainKind::PsdCone { margin } => write!(f, "psd:{}", to_f64(*margin))?,
            DomainKind::BlockPsd22 { margin } => write!(f, "block22:{}", to_f64(*margin))?,
        }
        write!(f, " levels {}..{}", self.n_min, self.n_max)
    }
}

/// Parses `ball:r`, `ball:r@c`, `psd:margin` or `block22:margin`.
pub fn parse_domain_kind<T: Real>(text: &str) -> Result<DomainKind<T>> {
    let bad = || Error::Invalid(format!("unrecognized domain '{text}' (use ball:r, ball:r@c, psd:m or block22:m)"));
    let (head, rest) = text.split_once(':').ok_or_else(bad)?;
    let num = |s: &str| s.trim().parse::<f64>().map(lit::<T>).map_err(|_| bad());
    match head.trim() {
        "ball" => {
            let (r, c) = match rest.split_once('@') {
                Some((r, c)) => (num(r)?, num(c)?),
                None => (num(rest)?, T::zero()),
            };
            Ok(DomainKind::HermBall { center: c, radius: r })
        }
        "psd" => Ok(DomainKind::PsdCone { margin: num(rest)? }),
        "block22" => Ok(DomainKind::BlockPsd22 { margin: num(rest)? }),
        _ => Err(bad()),
    }
}

/// Parses `a..b` (inclusive) or a single level.
pub fn parse_levels(text: &str) -> Result<(usize, usize)> {
    let bad = || Error::Invalid(format!("unrecognized level range '{text}' (use a..b)"));
    let parse = |s: &str| s.trim().parse::<usize>().map_err(|_| bad());
    match text.split_once("..") {
        Some((a, b)) => Ok((parse(a)?, parse(b.trim_start_matches('='))?)),
        None => {
            let n = parse(text)?;
            Ok((n, n))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn samples_lie_in_domain() {
        let mut rng = sample::stream_rng(3, 0);
        for kind in [
            DomainKind::HermBall { center: 0.5, radius: 0.9 },
            DomainKind::PsdCone { margin: 0.1 },
            DomainKind::BlockPsd22 { margin: 0.1 },
        ] {
            let dom = DomainSpec::<f64>::new(kind, 1, 4).unwrap();
            for n in 1..=4 {
                let z = dom.sample_point(&mut rng, 2, n);
                assert_eq!(z.level(), n * dom.block());
                assert!(dom.contains(&z), "{dom}");
            }
        }
    }

    #[test]
    fn ball_step_stays_inside() {
        let mut rng = sample::stream_rng(4, 0);
        let dom = DomainSpec::<f64>::ball(0.9, 1, 3).unwrap();
        let a = dom.sample_point(&mut rng, 1, 3);
        let p = MatrixTuple::new(vec![sample::psd_direction(&mut rng, 3)]).unwrap();
        let s = dom.max_step(&a, &p, 2.0);
        assert!(s > 0.0);
        assert!(dom.contains(&a.add_scaled(&p, s).unwrap()));
        assert!(!dom.contains(&a.add_scaled(&p, s + 1e-3).unwrap()));
    }

    #[test]
    fn parsing() {
        assert_eq!(parse_domain_kind::<f64>("ball:0.9").unwrap(), DomainKind::HermBall { center: 0.0, radius: 0.9 });
        assert_eq!(parse_domain_kind::<f64>("ball:0.5@1").unwrap(), DomainKind::HermBall { center: 1.0, radius: 0.5 });
        assert_eq!(parse_domain_kind::<f64>("psd:0.1").unwrap(), DomainKind::PsdCone { margin: 0.1 });
        assert!(parse_domain_kind::<f64>("disk:1").is_err());
        assert_eq!(parse_levels("1..5").unwrap(), (1, 5));
        assert_eq!(parse_levels("1..=3").unwrap(), (1, 3));
        assert_eq!(parse_levels("2").unwrap(), (2, 2));
    }
}
