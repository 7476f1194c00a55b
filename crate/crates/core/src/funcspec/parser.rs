//! Recursive-descent parser for the function mini-language.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | factor
//! factor := atom ('^' integer)?
//! atom   := number | 'x' | 'pi' | 'i' | '(' expr ')'
//!         | ('sin' | 'cos' | 'exp' | 'abs') '(' expr ')'
//!         | 'chi' '(' const ',' const ')' | 'gauss' '(' const ')'
//! ```
//!
//! `const` is any expression free of `x` and `i`. Whitespace is ignored.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{Expr, Func, Literal};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Sym(char),
    End,
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            // Exponent only when digits follow, so `2exp(x)` still fails cleanly.
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let s: String = chars[start..i].iter().collect();
            if s.matches('.').count() > 1 {
                return Err(Error::Syntax { position: start, message: format!("malformed number `{s}`") });
            }
            out.push((Tok::Num(s), start));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((Tok::Ident(chars[start..i].iter().collect()), start));
        } else if "+-*/^(),".contains(c) {
            out.push((Tok::Sym(c), i));
            i += 1;
        } else {
            return Err(Error::Syntax { position: i, message: format!("unexpected character `{c}`") });
        }
    }
    out.push((Tok::End, chars.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn at(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if *self.peek() == Tok::Sym(c) {
            self.bump();
            Ok(())
        } else {
            Err(Error::Syntax { position: self.at(), message: format!("expected `{c}`") })
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Sym('+') => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Sym('-') => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Tok::Sym('*') => {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Tok::Sym('/') => {
                    self.bump();
                    let at = self.at();
                    let rhs = self.unary()?;
                    if !rhs.is_real_constant() {
                        return Err(Error::Syntax { position: at, message: "divisor must be a real constant".into() });
                    }
                    if rhs.eval_real(0.0) == 0.0 {
                        return Err(Error::Syntax { position: at, message: "division by zero".into() });
                    }
                    lhs = Expr::Div(Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if *self.peek() == Tok::Sym('-') {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.factor()
    }

    fn factor(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if *self.peek() != Tok::Sym('^') {
            return Ok(base);
        }
        self.bump();
        let at = self.at();
        match self.bump() {
            Tok::Num(s) => match s.parse::<u32>() {
                Ok(n) => Ok(Expr::Pow(Box::new(base), n)),
                Err(_) => Err(Error::Syntax { position: at, message: format!("exponent `{s}` is not a small non-negative integer") }),
            },
            _ => Err(Error::Syntax { position: at, message: "exponent must be an integer literal".into() }),
        }
    }

    fn constant(&mut self) -> Result<Expr> {
        let at = self.at();
        let e = self.expr()?;
        if !e.is_real_constant() {
            return Err(Error::Syntax { position: at, message: "argument must be a real constant".into() });
        }
        if !e.eval_real(0.0).is_finite() {
            return Err(Error::Syntax { position: at, message: "argument is not finite".into() });
        }
        Ok(e)
    }

    fn atom(&mut self) -> Result<Expr> {
        let at = self.at();
        match self.bump() {
            Tok::Num(s) => {
                let value: f64 = s
                    .parse()
                    .map_err(|_| Error::Syntax { position: at, message: format!("malformed number `{s}`") })?;
                if !value.is_finite() {
                    return Err(Error::Syntax { position: at, message: format!("number `{s}` overflows") });
                }
                Ok(Expr::Num(Literal { value, text: s }))
            }
            Tok::Sym('(') => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Ident(name) => match name.as_str() {
                "x" => Ok(Expr::X),
                "pi" => Ok(Expr::Pi),
                "i" => Ok(Expr::I),
                "sin" | "cos" | "exp" | "abs" => {
                    let func = match name.as_str() {
                        "sin" => Func::Sin,
                        "cos" => Func::Cos,
                        "exp" => Func::Exp,
                        _ => Func::Abs,
                    };
                    self.expect('(')?;
                    let arg = self.expr()?;
                    self.expect(')')?;
                    Ok(Expr::Func(func, Box::new(arg)))
                }
                "chi" => {
                    self.expect('(')?;
                    let lo = self.constant()?;
                    self.expect(',')?;
                    let hi = self.constant()?;
                    self.expect(')')?;
                    Ok(Expr::Chi(Box::new(lo), Box::new(hi)))
                }
                "gauss" => {
                    self.expect('(')?;
                    let c = self.constant()?;
                    self.expect(')')?;
                    Ok(Expr::Gauss(Box::new(c)))
                }
                _ => Err(Error::UnknownSymbol { symbol: name, position: at }),
            },
            Tok::End => Err(Error::Syntax { position: at, message: "unexpected end of input".into() }),
            Tok::Sym(c) => Err(Error::Syntax { position: at, message: format!("unexpected `{c}`") }),
        }
    }
}

pub(super) fn parse_expr(text: &str) -> Result<Expr> {
    let mut p = Parser { toks: tokenize(text)?, pos: 0 };
    let e = p.expr()?;
    match p.peek() {
        Tok::End => Ok(e),
        t => {
            let what = match t {
                Tok::Num(s) | Tok::Ident(s) => s.clone(),
                Tok::Sym(c) => c.to_string(),
                Tok::End => String::new(),
            };
            Err(Error::Syntax { position: p.at(), message: format!("unexpected `{what}`") })
        }
    }
}
