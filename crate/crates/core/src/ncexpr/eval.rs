use super::ast::{Builtin, Expr};
use crate::error::{Error, Result};
use crate::freecore::{FreeFunction, MatrixTuple};
use crate::funcalc::{herm_apply, ScalarFunction};
use crate::linalg::{self, CMat};
use crate::scalar::{lit, real, Real};

fn scalar_function<T: Real>(b: Builtin) -> ScalarFunction<T> {
    match b {
        Builtin::Sqrt1p => ScalarFunction::Sqrt1p,
        Builtin::Log1p => ScalarFunction::Log1p,
        Builtin::Geom => ScalarFunction::Geom,
        Builtin::Exp => ScalarFunction::Exp,
    }
}

fn is_nilpotent<T: Real>(a: &CMat<T>) -> bool {
    let n = a.nrows();
    let scale = T::one() + a.norm();
    let mut p = a.clone();
    for _ in 1..n {
        p = &p * a;
    }
    p.norm() <= lit::<T>(1e-13) * scale.powi(n as i32)
}

const MAX_TERMS: usize = 4000;

/// Taylor series of a builtin summed until the terms stall below roundoff.
fn builtin_series<T: Real>(b: Builtin, a: &CMat<T>) -> Option<CMat<T>> {
    let n = a.nrows();
    let eps = T::default_epsilon();
    let mut sum = linalg::zeros::<T>(n, n);
    let mut power = linalg::identity::<T>(n);
    let mut small = 0;
    // Coefficients a_k computed incrementally to avoid factorial overflow.
    let mut sqrt_c = 1.0f64;
    let mut exp_c = 1.0f64;
    for k in 0..MAX_TERMS {
        let ak = match b {
            Builtin::Sqrt1p => {
                let v = sqrt_c;
                sqrt_c *= (0.5 - k as f64) / (k as f64 + 1.0);
                v
            }
            Builtin::Log1p if k == 0 => 0.0,
            Builtin::Log1p => (if k % 2 == 1 { 1.0 } else { -1.0 }) / k as f64,
            Builtin::Geom => {
                if k == 0 {
                    0.0
                } else {
                    1.0
                }
            }
            Builtin::Exp => {
                let v = exp_c;
                exp_c /= k as f64 + 1.0;
                v
            }
        };
        let term = &power * real(lit::<T>(ak));
        let tn = term.norm();
        sum += term;
        if k > 0 && tn <= eps * (T::one() + sum.norm()) {
            small += 1;
            if small >= 3 || power.norm() == T::zero() {
                return Some(sum);
            }
        } else {
            small = 0;
        }
        power = &power * a;
    }
    None
}

fn apply_builtin<T: Real>(b: Builtin, arg: &CMat<T>, node: &Expr) -> Result<CMat<T>> {
    if linalg::is_hermitian(arg, lit(1e-10)) {
        return herm_apply(&scalar_function(b), arg).map_err(|e| match e {
            Error::Domain(msg) => Error::Domain(format!("{node}: {msg}")),
            other => other,
        });
    }
    if b == Builtin::Exp || linalg::op_norm(arg) < T::one() || is_nilpotent(arg) {
        if let Some(v) = builtin_series(b, arg) {
            return Ok(v);
        }
    }
    Err(Error::Domain(format!("{node}: non-Hermitian argument outside the unit ball")))
}

/// Evaluates `ast` at the tuple `z` without truncation.
pub fn eval_ast<T: Real>(ast: &Expr, z: &MatrixTuple<T>) -> Result<CMat<T>> {
    if ast.max_var() > z.len() {
        return Err(Error::DimensionMismatch(format!(
            "x{} used but the tuple has {} entries",
            ast.max_var(),
            z.len()
        )));
    }
    eval_node(ast, z)
}

fn eval_node<T: Real>(ast: &Expr, z: &MatrixTuple<T>) -> Result<CMat<T>> {
    let n = z.level();
    Ok(match ast {
        Expr::Const(c) => linalg::identity::<T>(n) * real(lit::<T>(*c)),
        Expr::Var(i) => z.letter(*i).clone(),
        Expr::Add(a, b) => eval_node(a, z)? + eval_node(b, z)?,
        Expr::Sub(a, b) => eval_node(a, z)? - eval_node(b, z)?,
        Expr::Mul(a, b) => eval_node(a, z)? * eval_node(b, z)?,
        Expr::Neg(a) => -eval_node(a, z)?,
        Expr::ScalarMul(c, a) => eval_node(a, z)? * real(lit::<T>(*c)),
        Expr::Inv(a) => {
            let v = eval_node(a, z)?;
            linalg::inverse(&v, "").map_err(|_| Error::Domain(format!("argument of {ast} is singular")))?
        }
        Expr::Builtin(b, a) => apply_builtin(*b, &eval_node(a, z)?, ast)?,
    })
}

/// Free function defined by an expression in `letters` variables.
#[derive(Clone, Debug, PartialEq)]
pub struct ExprFunction {
    pub ast: Expr,
    pub letters: usize,
}

impl ExprFunction {
    pub fn new(ast: Expr, letters: usize) -> Result<Self> {
        if ast.max_var() > letters {
            return Err(Error::Invalid(format!("x{} used but only {letters} letters declared", ast.max_var())));
        }
        Ok(ExprFunction { ast, letters })
    }
}

impl<T: Real> FreeFunction<T> for ExprFunction {
    fn letters(&self) -> usize {
        self.letters
    }

    fn eval(&self, z: &MatrixTuple<T>) -> Result<CMat<T>> {
        if z.len() != self.letters {
            return Err(Error::DimensionMismatch(format!("expected {} letters, got {}", self.letters, z.len())));
        }
        eval_ast(&self.ast, z)
    }

    fn domain(&self) -> String {
        format!("tuples where {} is defined", self.ast)
    }

    fn contains(&self, z: &MatrixTuple<T>) -> bool {
        FreeFunction::<T>::eval(self, z).is_ok()
    }
}
