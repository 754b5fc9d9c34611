use std::fmt;

/// Named one-variable functions available in expressions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Builtin {
    Sqrt1p,
    Log1p,
    Geom,
    Exp,
}

impl Builtin {
    pub const ALL: [Builtin; 4] = [Builtin::Sqrt1p, Builtin::Log1p, Builtin::Geom, Builtin::Exp];

    pub fn name(self) -> &'static str {
        match self {
            Builtin::Sqrt1p => "sqrt1p",
            Builtin::Log1p => "log1p",
            Builtin::Geom => "geom",
            Builtin::Exp => "exp",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|b| b.name() == name)
    }

    /// Taylor coefficients `a_0, …, a_degree` at the origin.
    pub fn taylor(self, degree: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(degree + 1);
        match self {
            Builtin::Sqrt1p => {
                let mut c = 1.0;
                for n in 0..=degree {
                    out.push(c);
                    c *= (0.5 - n as f64) / (n as f64 + 1.0);
                }
            }
            Builtin::Log1p => {
                out.push(0.0);
                for n in 1..=degree {
                    let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
                    out.push(sign / n as f64);
                }
            }
            Builtin::Geom => {
                out.push(0.0);
                out.extend(std::iter::repeat_n(1.0, degree));
            }
            Builtin::Exp => {
                let mut c = 1.0;
                for n in 0..=degree {
                    out.push(c);
                    c /= n as f64 + 1.0;
                }
            }
        }
        out
    }
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Noncommutative expression tree. Variables are 1-based.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(usize),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    ScalarMul(f64, Box<Expr>),
    Inv(Box<Expr>),
    Builtin(Builtin, Box<Expr>),
}

impl Expr {
    pub fn add(a: Expr, b: Expr) -> Expr {
        Expr::Add(Box::new(a), Box::new(b))
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        Expr::Sub(Box::new(a), Box::new(b))
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        Expr::Mul(Box::new(a), Box::new(b))
    }

    pub fn neg(a: Expr) -> Expr {
        Expr::Neg(Box::new(a))
    }

    pub fn scalar_mul(c: f64, a: Expr) -> Expr {
        Expr::ScalarMul(c, Box::new(a))
    }

    pub fn inv(a: Expr) -> Expr {
        Expr::Inv(Box::new(a))
    }

    pub fn builtin(b: Builtin, a: Expr) -> Expr {
        Expr::Builtin(b, Box::new(a))
    }

    /// Largest variable index, 0 for closed expressions.
    pub fn max_var(&self) -> usize {
        match self {
            Expr::Const(_) => 0,
            Expr::Var(i) => *i,
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => a.max_var().max(b.max_var()),
            Expr::Neg(a) | Expr::ScalarMul(_, a) | Expr::Inv(a) | Expr::Builtin(_, a) => a.max_var(),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::ScalarMul(..) => 2,
            _ => 3,
        }
    }

    fn write_at(&self, f: &mut fmt::Formatter<'_>, min_prec: u8) -> fmt::Result {
        if self.precedence() < min_prec {
            f.write_str("(")?;
            self.write_at(f, 0)?;
            return f.write_str(")");
        }
        match self {
            Expr::Const(c) => write_number(f, *c),
            Expr::Var(i) => write!(f, "x{i}"),
            Expr::Add(a, b) => {
                a.write_at(f, 1)?;
                f.write_str(" + ")?;
                b.write_at(f, 2)
            }
            Expr::Sub(a, b) => {
                a.write_at(f, 1)?;
                f.write_str(" - ")?;
                b.write_at(f, 2)
            }
            Expr::Mul(a, b) => {
                // A bare literal on the left would read back as a scalar multiple.
                if matches!(**a, Expr::Const(_)) {
                    f.write_str("(")?;
                    a.write_at(f, 0)?;
                    f.write_str(")")?;
                } else {
                    a.write_at(f, 2)?;
                }
                f.write_str("*")?;
                b.write_at(f, 3)
            }
            Expr::ScalarMul(c, a) => {
                write_number(f, *c)?;
                f.write_str("*")?;
                a.write_at(f, 3)
            }
            Expr::Neg(a) => {
                f.write_str("-")?;
                a.write_at(f, 3)
            }
            Expr::Inv(a) => {
                f.write_str("inv(")?;
                a.write_at(f, 0)?;
                f.write_str(")")
            }
            Expr::Builtin(b, a) => {
                write!(f, "{b}(")?;
                a.write_at(f, 0)?;
                f.write_str(")")
            }
        }
    }
}

fn write_number(f: &mut fmt::Formatter<'_>, c: f64) -> fmt::Result {
    if c < 0.0 {
        write!(f, "(-{})", -c)
    } else {
        write!(f, "{c}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_at(f, 0)
    }
}
