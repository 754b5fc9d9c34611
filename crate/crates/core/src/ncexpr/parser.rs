use super::ast::{Builtin, Expr};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    LParen,
    RParen,
    End,
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => out.push((Tok::Plus, start)),
            b'-' => out.push((Tok::Minus, start)),
            b'*' => out.push((Tok::Star, start)),
            b'(' => out.push((Tok::LParen, start)),
            b')' => out.push((Tok::RParen, start)),
            b'0'..=b'9' | b'.' => {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        while j < bytes.len() && bytes[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let lexeme = &text[start..i];
                let value: f64 = lexeme
                    .parse()
                    .map_err(|_| Error::Parse { pos: start, msg: format!("malformed number '{lexeme}'") })?;
                out.push((Tok::Num(value), start));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Ident(text[start..i].to_string()), start));
                continue;
            }
            _ => {
                let ch = text[start..].chars().next().unwrap_or('?');
                return Err(Error::Parse { pos: start, msg: format!("unexpected character '{ch}'") });
            }
        }
        i += 1;
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<()> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(Error::Parse { pos: self.pos(), msg: format!("expected {what}") })
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    acc = Expr::add(acc, self.term()?);
                }
                Tok::Minus => {
                    self.bump();
                    acc = Expr::sub(acc, self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let (mut acc, mut literal) = self.factor()?;
        while *self.peek() == Tok::Star {
            self.bump();
            let (rhs, _) = self.factor()?;
            acc = match (literal, acc) {
                (true, Expr::Const(c)) => Expr::scalar_mul(c, rhs),
                (_, lhs) => Expr::mul(lhs, rhs),
            };
            literal = false;
        }
        Ok(acc)
    }

    /// Returns the factor and whether it was a bare number literal.
    fn factor(&mut self) -> Result<(Expr, bool)> {
        let pos = self.pos();
        match self.bump() {
            Tok::Num(v) => Ok((Expr::Const(v), true)),
            Tok::Minus => Ok((Expr::neg(self.factor()?.0), false)),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok((e, false))
            }
            Tok::Ident(name) => {
                if let Some(idx) = name.strip_prefix('x').filter(|s| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit())) {
                    let i: usize = idx
                        .parse()
                        .map_err(|_| Error::Parse { pos, msg: format!("variable index too large in '{name}'") })?;
                    if i == 0 {
                        return Err(Error::Parse { pos, msg: "variable indices start at 1".into() });
                    }
                    return Ok((Expr::Var(i), false));
                }
                let wrap: Box<dyn Fn(Expr) -> Expr> = if name == "inv" {
                    Box::new(Expr::inv)
                } else if let Some(b) = Builtin::from_name(&name) {
                    Box::new(move |e| Expr::builtin(b, e))
                } else {
                    return Err(Error::Parse { pos, msg: format!("unknown identifier '{name}'") });
                };
                self.expect(Tok::LParen, &format!("'(' after {name}"))?;
                let e = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok((wrap(e), false))
            }
            Tok::End => Err(Error::Parse { pos, msg: "unexpected end of input".into() }),
            other => Err(Error::Parse { pos, msg: format!("unexpected token {other:?}") }),
        }
    }
}

/// Parses an expression such as `inv(1 - x1 - x2) - 1`.
///
/// Multiplication must be written with `*`; a number literal on the left of
/// `*` produces a scalar multiple.
pub fn parse(text: &str) -> Result<Expr> {
    let mut p = Parser { toks: tokenize(text)?, at: 0 };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(Error::Parse { pos: p.pos(), msg: "unexpected trailing input".into() });
    }
    Ok(e)
}
