use super::ast::Expr;
use crate::error::{Error, Result};
use crate::freecore::FreeSeries;
use crate::scalar::{lit, real, to_f64, Real};

/// Truncated free power series of `ast` at the origin, in `d` letters up to degree `degree`.
pub fn expand<T: Real>(ast: &Expr, d: usize, degree: usize) -> Result<FreeSeries<T>> {
    if ast.max_var() > d {
        return Err(Error::Invalid(format!("x{} used but only {d} letters declared", ast.max_var())));
    }
    let mut s = expand_node(ast, d, degree)?;
    s.prune(T::zero());
    Ok(s)
}

fn constant_of<T: Real>(s: &FreeSeries<T>) -> num_complex::Complex<T> {
    s.constant_term()[(0, 0)]
}

fn expand_node<T: Real>(ast: &Expr, d: usize, degree: usize) -> Result<FreeSeries<T>> {
    let one = || FreeSeries::constant(d, degree, real(T::one()));
    Ok(match ast {
        Expr::Const(c) => FreeSeries::constant(d, degree, real(lit(*c))),
        Expr::Var(i) => FreeSeries::variable(d, degree, *i)?,
        Expr::Add(a, b) => expand_node(a, d, degree)?.add(&expand_node(b, d, degree)?)?,
        Expr::Sub(a, b) => expand_node(a, d, degree)?.sub(&expand_node(b, d, degree)?)?,
        Expr::Mul(a, b) => expand_node(a, d, degree)?.mul(&expand_node(b, d, degree)?)?,
        Expr::Neg(a) => expand_node(a, d, degree)?.neg(),
        Expr::ScalarMul(c, a) => expand_node(a, d, degree)?.scale(real(lit(*c))),
        Expr::Inv(a) => {
            let s = expand_node::<T>(a, d, degree)?;
            let c = constant_of(&s);
            if c.norm_sqr() <= lit::<T>(1e-24) {
                return Err(Error::Domain(format!("inv({a}) is not expandable at 0: constant term vanishes")));
            }
            let cinv = num_complex::Complex::new(T::one(), T::zero()) / c;
            // N = 1 − s/c has no constant term, so Σ_{n≤D} Nⁿ is exact to degree D.
            let n = one().sub(&s.scale(cinv))?;
            let mut acc = one();
            for _ in 0..degree {
                acc = one().add(&n.mul(&acc)?)?;
            }
            acc.scale(cinv)
        }
        Expr::Builtin(b, a) => {
            let s = expand_node::<T>(a, d, degree)?;
            let c = constant_of(&s);
            if c.norm_sqr() > lit::<T>(1e-24) {
                return Err(Error::Domain(format!(
                    "{b}({a}) needs an argument vanishing at 0, constant term is {}",
                    to_f64(c.re)
                )));
            }
            let coeffs = b.taylor(degree);
            let mut acc = FreeSeries::constant(d, degree, real(lit(coeffs[degree])));
            for &an in coeffs[..degree].iter().rev() {
                acc = FreeSeries::constant(d, degree, real(lit(an))).add(&s.mul(&acc)?)?;
            }
            acc
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freecore::Word;
    use crate::ncexpr::parse;

    fn c(s: &FreeSeries<f64>, w: &[usize]) -> f64 {
        s.coeff(&Word::from(w))[(0, 0)].re
    }

    #[test]
    fn neumann_resolvent() {
        let s = expand::<f64>(&parse("inv(1 - x1 - x2) - 1").unwrap(), 2, 3).unwrap();
        assert_eq!(s.len(), 2 + 4 + 8);
        for w in Word::enumerate(2, 1, 3) {
            assert!((c(&s, w.letters()) - 1.0).abs() < 1e-14, "{w}");
        }
        assert_eq!(c(&s, &[]), 0.0);
    }

    #[test]
    fn commutator_coefficients() {
        let s = expand::<f64>(&parse("x1*x2 - x2*x1").unwrap(), 2, 4).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(c(&s, &[1, 2]), 1.0);
        assert_eq!(c(&s, &[2, 1]), -1.0);
    }

    #[test]
    fn sqrt_taylor() {
        let s = expand::<f64>(&parse("sqrt1p(x1)").unwrap(), 1, 3).unwrap();
        assert_eq!(c(&s, &[]), 1.0);
        assert_eq!(c(&s, &[1]), 0.5);
        assert_eq!(c(&s, &[1, 1]), -0.125);
        assert_eq!(c(&s, &[1, 1, 1]), 0.0625);
    }

    #[test]
    fn composition_of_builtins() {
        // exp(log1p(x)) = 1 + x.
        let s = expand::<f64>(&parse("exp(log1p(x1))").unwrap(), 1, 6).unwrap();
        for n in 0..=6 {
            let expected = if n <= 1 { 1.0 } else { 0.0 };
            assert!((c(&s, &vec![1; n]) - expected).abs() < 1e-14, "n = {n}");
        }
    }

    #[test]
    fn expansion_errors() {
        assert!(matches!(expand::<f64>(&parse("inv(x1)").unwrap(), 1, 3), Err(Error::Domain(_))));
        assert!(matches!(expand::<f64>(&parse("geom(1 + x1)").unwrap(), 1, 3), Err(Error::Domain(_))));
        assert!(matches!(expand::<f64>(&parse("x3").unwrap(), 2, 3), Err(Error::Invalid(_))));
    }
}
