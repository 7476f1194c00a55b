//! Target functions: a small expression language with exact knowledge of
//! where a function vanishes and where it jumps.
//!
//! Indicators `chi(a, b)` are closed intervals, so `chi(-1, 2)` is 1 at both
//! endpoints. Reversed endpoints are accepted and mean the same interval.

mod parser;

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

use crate::numerics::{BigCtx, BigReal, Domain};
use crate::{Error, Result};

/// A decimal literal, kept verbatim so extended-precision evaluation sees the
/// exact digits the user wrote.
#[derive(Debug, Clone, PartialEq)]
pub struct Literal {
    pub value: f64,
    pub text: String,
}

impl Literal {
    pub fn from_f64(value: f64) -> Self {
        Literal { value, text: format!("{value}") }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Abs,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Abs => "abs",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(Literal),
    Pi,
    /// Imaginary unit.
    I,
    X,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    /// Division by a nonzero real constant.
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
    Func(Func, Box<Expr>),
    /// Indicator of the closed interval between two real constants.
    Chi(Box<Expr>, Box<Expr>),
    /// `e^{-(x-c)²}` for a real constant `c`.
    Gauss(Box<Expr>),
}

fn bx(e: Expr) -> Box<Expr> {
    Box::new(e)
}

impl Expr {
    pub fn num(v: f64) -> Expr {
        Expr::Num(Literal::from_f64(v))
    }

    fn mentions(&self, pred: &dyn Fn(&Expr) -> bool) -> bool {
        if pred(self) {
            return true;
        }
        match self {
            Expr::Num(_) | Expr::Pi | Expr::I | Expr::X => false,
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Func(_, a) | Expr::Gauss(a) => a.mentions(pred),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) | Expr::Chi(a, b) => {
                a.mentions(pred) || b.mentions(pred)
            }
        }
    }

    /// True when the expression depends on `x` (through `x`, `chi` or `gauss`).
    pub fn depends_on_x(&self) -> bool {
        self.mentions(&|e| matches!(e, Expr::X | Expr::Chi(..) | Expr::Gauss(_)))
    }

    pub fn is_complex(&self) -> bool {
        self.mentions(&|e| matches!(e, Expr::I))
    }

    pub fn is_real_constant(&self) -> bool {
        !self.depends_on_x() && !self.is_complex()
    }

    fn chi_bounds(lo: &Expr, hi: &Expr) -> (f64, f64) {
        let (a, b) = (lo.eval_real(0.0), hi.eval_real(0.0));
        if a <= b {
            (a, b)
        } else {
            (b, a)
        }
    }

    /// Real evaluation. For expressions containing `i` this is the real part.
    pub fn eval_real(&self, x: f64) -> f64 {
        if self.is_complex() {
            return self.eval_complex(x).re;
        }
        self.eval_f64(x)
    }

    fn eval_f64(&self, x: f64) -> f64 {
        match self {
            Expr::Num(l) => l.value,
            Expr::Pi => core::f64::consts::PI,
            Expr::I => 0.0,
            Expr::X => x,
            Expr::Neg(a) => -a.eval_f64(x),
            Expr::Add(a, b) => a.eval_f64(x) + b.eval_f64(x),
            Expr::Sub(a, b) => a.eval_f64(x) - b.eval_f64(x),
            Expr::Mul(a, b) => {
                let u = a.eval_f64(x);
                // Indicator factors kill non-finite partners outside their support.
                if u == 0.0 {
                    return 0.0;
                }
                let v = b.eval_f64(x);
                if v == 0.0 {
                    0.0
                } else {
                    u * v
                }
            }
            Expr::Div(a, b) => a.eval_f64(x) / b.eval_f64(x),
            Expr::Pow(a, n) => libm::pow(a.eval_f64(x), *n as f64),
            Expr::Func(f, a) => {
                let u = a.eval_f64(x);
                match f {
                    Func::Sin => libm::sin(u),
                    Func::Cos => libm::cos(u),
                    Func::Exp => libm::exp(u),
                    Func::Abs => u.abs(),
                }
            }
            Expr::Chi(lo, hi) => {
                let (a, b) = Self::chi_bounds(lo, hi);
                if x >= a && x <= b {
                    1.0
                } else {
                    0.0
                }
            }
            Expr::Gauss(c) => {
                let d = x - c.eval_f64(0.0);
                libm::exp(-d * d)
            }
        }
    }

    pub fn eval_complex(&self, x: f64) -> Complex64 {
        let re = |v: f64| Complex64::new(v, 0.0);
        match self {
            Expr::I => Complex64::new(0.0, 1.0),
            Expr::Num(_) | Expr::Pi | Expr::X | Expr::Chi(..) | Expr::Gauss(_) => re(self.eval_f64(x)),
            Expr::Neg(a) => -a.eval_complex(x),
            Expr::Add(a, b) => a.eval_complex(x) + b.eval_complex(x),
            Expr::Sub(a, b) => a.eval_complex(x) - b.eval_complex(x),
            Expr::Mul(a, b) => {
                let u = a.eval_complex(x);
                if u == Complex64::new(0.0, 0.0) {
                    return u;
                }
                let v = b.eval_complex(x);
                if v == Complex64::new(0.0, 0.0) {
                    v
                } else {
                    u * v
                }
            }
            Expr::Div(a, b) => a.eval_complex(x) / b.eval_complex(x),
            Expr::Pow(a, n) => a.eval_complex(x).powu(*n),
            Expr::Func(f, a) => {
                let u = a.eval_complex(x);
                match f {
                    Func::Sin => u.sin(),
                    Func::Cos => u.cos(),
                    Func::Exp => u.exp(),
                    Func::Abs => re(u.norm()),
                }
            }
        }
    }

    /// Extended-precision evaluation of a real expression.
    pub fn eval_big(&self, x: &BigReal, ctx: &mut BigCtx) -> Result<BigReal> {
        Ok(match self {
            Expr::Num(l) => ctx.parse_decimal(&l.text),
            Expr::Pi => ctx.pi(),
            Expr::I => return Err(Error::InvalidParameter("complex expression in a real-only computation".into())),
            Expr::X => ctx.lift(x),
            Expr::Neg(a) => -a.eval_big(x, ctx)?,
            Expr::Add(a, b) => &a.eval_big(x, ctx)? + &b.eval_big(x, ctx)?,
            Expr::Sub(a, b) => &a.eval_big(x, ctx)? - &b.eval_big(x, ctx)?,
            Expr::Mul(a, b) => {
                let u = a.eval_big(x, ctx)?;
                if u.is_zero() {
                    return Ok(u);
                }
                &u * &b.eval_big(x, ctx)?
            }
            Expr::Div(a, b) => &a.eval_big(x, ctx)? / &b.eval_big(x, ctx)?,
            Expr::Pow(a, n) => a.eval_big(x, ctx)?.powi(*n as usize),
            Expr::Func(f, a) => {
                let u = a.eval_big(x, ctx)?;
                match f {
                    Func::Sin => ctx.sin(&u),
                    Func::Cos => ctx.cos(&u),
                    Func::Exp => ctx.exp(&u),
                    Func::Abs => u.abs(),
                }
            }
            Expr::Chi(lo, hi) => {
                let (mut a, mut b) = (lo.eval_big(x, ctx)?, hi.eval_big(x, ctx)?);
                if a > b {
                    core::mem::swap(&mut a, &mut b);
                }
                if *x >= a && *x <= b {
                    ctx.one()
                } else {
                    ctx.zero()
                }
            }
            Expr::Gauss(c) => {
                let d = &ctx.lift(x) - &c.eval_big(x, ctx)?;
                ctx.exp(&-(&d * &d))
            }
        })
    }

    /// Smallest interval outside which the expression is identically zero,
    /// as far as the structure reveals.
    pub fn support(&self) -> Support {
        match self {
            Expr::Num(l) if l.value == 0.0 => Support::Empty,
            Expr::Num(_) | Expr::Pi | Expr::I | Expr::X | Expr::Gauss(_) => Support::WholeLine,
            Expr::Neg(a) | Expr::Div(a, _) => a.support(),
            Expr::Pow(_, 0) => Support::WholeLine,
            Expr::Pow(a, _) => a.support(),
            Expr::Add(a, b) | Expr::Sub(a, b) => a.support().hull(b.support()),
            Expr::Mul(a, b) => a.support().intersect(b.support()),
            Expr::Func(Func::Sin | Func::Abs, a) => a.support(),
            Expr::Func(_, _) => Support::WholeLine,
            Expr::Chi(lo, hi) => {
                let (a, b) = Self::chi_bounds(lo, hi);
                Support::Interval(a, b)
            }
        }
    }

    fn collect_breakpoints(&self, out: &mut Vec<f64>) {
        match self {
            Expr::Chi(lo, hi) => {
                let (a, b) = Self::chi_bounds(lo, hi);
                out.push(a);
                out.push(b);
            }
            Expr::Func(Func::Abs, a) if **a == Expr::X => out.push(0.0),
            Expr::Num(_) | Expr::Pi | Expr::I | Expr::X | Expr::Gauss(_) => {}
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Func(_, a) => a.collect_breakpoints(out),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.collect_breakpoints(out);
                b.collect_breakpoints(out);
            }
        }
    }

    /// Replace `x` by `x + r`.
    pub fn shifted(&self, r: f64) -> Expr {
        let map = |e: &Expr| e.shifted(r);
        match self {
            Expr::X => Expr::Add(bx(Expr::X), bx(Expr::num(r))),
            Expr::Num(_) | Expr::Pi | Expr::I => self.clone(),
            Expr::Chi(lo, hi) => {
                Expr::Chi(bx(Expr::Sub(lo.clone(), bx(Expr::num(r)))), bx(Expr::Sub(hi.clone(), bx(Expr::num(r)))))
            }
            Expr::Gauss(c) => Expr::Gauss(bx(Expr::Sub(c.clone(), bx(Expr::num(r))))),
            _ => self.map_children(&map),
        }
    }

    /// Replace `x` by `|x|`.
    pub fn even_extension(&self) -> Expr {
        let map = |e: &Expr| e.even_extension();
        match self {
            Expr::X => Expr::Func(Func::Abs, bx(Expr::X)),
            Expr::Num(_) | Expr::Pi | Expr::I => self.clone(),
            Expr::Chi(lo, hi) => {
                let (a, b) = Self::chi_bounds(lo, hi);
                if b < 0.0 {
                    Expr::num(0.0)
                } else if a <= 0.0 {
                    Expr::Chi(bx(Expr::Neg(bx(Expr::num(b)))), bx(Expr::num(b)))
                } else {
                    Expr::Add(
                        bx(Expr::Chi(bx(Expr::num(-b)), bx(Expr::num(-a)))),
                        bx(Expr::Chi(bx(Expr::num(a)), bx(Expr::num(b)))),
                    )
                }
            }
            Expr::Gauss(c) => {
                let d = Expr::Sub(bx(Expr::Func(Func::Abs, bx(Expr::X))), c.clone());
                Expr::Func(Func::Exp, bx(Expr::Neg(bx(Expr::Pow(bx(d), 2)))))
            }
            _ => self.map_children(&map),
        }
    }

    fn map_children(&self, f: &dyn Fn(&Expr) -> Expr) -> Expr {
        match self {
            Expr::Neg(a) => Expr::Neg(bx(f(a))),
            Expr::Add(a, b) => Expr::Add(bx(f(a)), bx(f(b))),
            Expr::Sub(a, b) => Expr::Sub(bx(f(a)), bx(f(b))),
            Expr::Mul(a, b) => Expr::Mul(bx(f(a)), bx(f(b))),
            Expr::Div(a, b) => Expr::Div(bx(f(a)), b.clone()),
            Expr::Pow(a, n) => Expr::Pow(bx(f(a)), *n),
            Expr::Func(g, a) => Expr::Func(*g, bx(f(a))),
            _ => self.clone(),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(l) if l.text.starts_with('-') => write!(f, "({})", l.text),
            Expr::Num(l) => f.write_str(&l.text),
            Expr::Pi => f.write_str("pi"),
            Expr::I => f.write_str("i"),
            Expr::X => f.write_str("x"),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "({a} * {b})"),
            Expr::Div(a, b) => write!(f, "({a} / {b})"),
            Expr::Pow(a, n) => write!(f, "({a})^{n}"),
            Expr::Func(g, a) => write!(f, "{}({a})", g.name()),
            Expr::Chi(a, b) => write!(f, "chi({a}, {b})"),
            Expr::Gauss(c) => write!(f, "gauss({c})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Support {
    /// The function is identically zero.
    Empty,
    Interval(f64, f64),
    WholeLine,
}

impl Support {
    pub fn hull(self, other: Support) -> Support {
        match (self, other) {
            (Support::Empty, s) | (s, Support::Empty) => s,
            (Support::Interval(a, b), Support::Interval(c, d)) => Support::Interval(a.min(c), b.max(d)),
            _ => Support::WholeLine,
        }
    }

    pub fn intersect(self, other: Support) -> Support {
        match (self, other) {
            (Support::Empty, _) | (_, Support::Empty) => Support::Empty,
            (Support::WholeLine, s) | (s, Support::WholeLine) => s,
            (Support::Interval(a, b), Support::Interval(c, d)) => {
                let (lo, hi) = (a.max(c), b.min(d));
                if lo <= hi {
                    Support::Interval(lo, hi)
                } else {
                    Support::Empty
                }
            }
        }
    }

    pub fn contains(self, x: f64) -> bool {
        match self {
            Support::Empty => false,
            Support::Interval(a, b) => x >= a && x <= b,
            Support::WholeLine => true,
        }
    }

    pub fn is_bounded(self) -> bool {
        !matches!(self, Support::WholeLine)
    }
}

/// A parsed target function together with its support and breakpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetFunction {
    expr: Expr,
    support: Support,
    breakpoints: Vec<f64>,
    is_complex: bool,
}

impl TargetFunction {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(Self::from_expr(parser::parse_expr(text)?))
    }

    pub fn from_expr(expr: Expr) -> Self {
        let support = expr.support();
        let mut breakpoints = Vec::new();
        expr.collect_breakpoints(&mut breakpoints);
        breakpoints.retain(|&b| support.contains(b));
        breakpoints.sort_by(f64::total_cmp);
        breakpoints.dedup();
        let is_complex = expr.is_complex();
        TargetFunction { expr, support, breakpoints, is_complex }
    }

    pub fn zero() -> Self {
        Self::from_expr(Expr::num(0.0))
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn support(&self) -> Support {
        self.support
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn is_complex(&self) -> bool {
        self.is_complex
    }

    pub fn evaluate(&self, x: f64) -> Complex64 {
        if self.is_complex {
            self.expr.eval_complex(x)
        } else {
            Complex64::new(self.expr.eval_f64(x), 0.0)
        }
    }

    /// Real part of the value.
    pub fn evaluate_real(&self, x: f64) -> f64 {
        self.expr.eval_real(x)
    }

    /// Extended-precision value; fails for complex functions.
    pub fn evaluate_big(&self, x: &BigReal, ctx: &mut BigCtx) -> Result<BigReal> {
        if !self.support.contains(x.to_f64()) && self.support.is_bounded() {
            return Ok(ctx.zero());
        }
        self.expr.eval_big(x, ctx)
    }

    /// Quadrature domain covering the support, split at the breakpoints.
    pub fn domain(&self) -> Domain {
        match self.support {
            Support::Empty => Domain::interval(0.0, 0.0),
            Support::Interval(a, b) => Domain::interval(a, b).with_breakpoints(self.breakpoints.iter().copied()),
            Support::WholeLine => Domain::whole_line().with_breakpoints(self.breakpoints.iter().copied()),
        }
    }

    /// Text that parses back to the same function.
    pub fn render(&self) -> String {
        format!("{}", self.expr)
    }

    /// `g(x) = f(x)(x-a)ⁿ(x+a)ⁿ χ_[-a,a](x)`
    pub fn clamp(&self, a: f64, n: u32) -> Result<Self> {
        if !(a.is_finite() && a > 0.0) {
            return Err(Error::InvalidParameter(format!("clamp half-width must be positive, got {a}")));
        }
        if n < 1 {
            return Err(Error::InvalidParameter("clamp power must be at least 1".into()));
        }
        let lit = Expr::num(a);
        let left = Expr::Pow(bx(Expr::Sub(bx(Expr::X), bx(lit.clone()))), n);
        let right = Expr::Pow(bx(Expr::Add(bx(Expr::X), bx(lit.clone()))), n);
        let chi = Expr::Chi(bx(Expr::Neg(bx(lit.clone()))), bx(lit));
        let e = Expr::Mul(bx(Expr::Mul(bx(Expr::Mul(bx(self.expr.clone()), bx(left))), bx(right))), bx(chi));
        Ok(Self::from_expr(e))
    }

    /// `α f + β g`
    pub fn linear_combination(alpha: f64, f: &Self, beta: f64, g: &Self) -> Self {
        Self::from_expr(Expr::Add(
            bx(Expr::Mul(bx(Expr::num(alpha)), bx(f.expr.clone()))),
            bx(Expr::Mul(bx(Expr::num(beta)), bx(g.expr.clone()))),
        ))
    }

    /// `x ↦ f(x + r)`
    pub fn shifted(&self, r: f64) -> Self {
        Self::from_expr(self.expr.shifted(r))
    }

    /// `x ↦ f(|x|)`
    pub fn even_extension(&self) -> Self {
        Self::from_expr(self.expr.even_extension())
    }

    /// `f · χ_[a,b]`
    pub fn restricted(&self, a: f64, b: f64) -> Self {
        Self::from_expr(Expr::Mul(bx(self.expr.clone()), bx(Expr::Chi(bx(Expr::num(a)), bx(Expr::num(b))))))
    }
}

impl fmt::Display for TargetFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.expr)
    }
}

impl core::str::FromStr for TargetFunction {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

/// The worked examples shipped with the library, by name.
pub fn catalog() -> Vec<(&'static str, TargetFunction)> {
    let parse = |s: &str| TargetFunction::parse(s).expect("catalog entry parses");
    let one = parse("1");
    let mut out = alloc::vec![
        ("far-indicator", parse("chi(-11,-10)")),
        ("shifted-parabola", parse("(x-1)^2*chi(-1,2)")),
        ("sine-period", parse("sin(x)*chi(-pi,pi)")),
        ("gauss", parse("gauss(0)")),
        ("gauss-shifted", parse("gauss(1.5)")),
    ];
    out.push(("clamped-one", one.clamp(1.0, 2).expect("valid clamp")));
    out.push(("clamped-cubic", parse("x^3 - x + 0.5").clamp(2.0, 2).expect("valid clamp")));
    out.push(("clamped-exp", parse("exp(x)").clamp(1.5, 3).expect("valid clamp")));
    out
}

#[cfg(test)]
mod tests;
