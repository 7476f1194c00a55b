//! Sums of Gaussian translates `x ↦ Σ a_n e^{-(x-nt)²}` built from Hermite
//! coefficients by replacing each derivative with a backward difference:
//!
//! ```text
//! a_k = Σ_{n=k}^{N} b_n (-1)^k C(n,k) / tⁿ
//! ```
//!
//! The weights grow like `t^{-N}` and alternate in sign, so the sum cancels
//! catastrophically in double precision. Weights are therefore kept as
//! [`BigReal`] and every evaluation runs with enough digits to absorb the
//! cancellation.

use alloc::format;
use alloc::vec::Vec;

use crate::funcspec::{Support, TargetFunction};
use crate::hermite::{compute_bn_truncated, HermiteCoefficients};
use crate::numerics::{integrate, BigCtx, BigReal, Domain, QuadratureConfig};
use crate::{Error, Result};

/// Guard digits kept beyond the largest term of any sum.
const GUARD_DIGITS: u32 = 25;
const MIN_EVAL_DIGITS: u32 = 30;

fn digits_for_magnitude(log10_max: f64) -> u32 {
    if log10_max.is_finite() {
        (libm::ceil(log10_max).max(0.0) as u32 + GUARD_DIGITS).max(MIN_EVAL_DIGITS)
    } else {
        MIN_EVAL_DIGITS
    }
}

#[derive(Debug, Clone)]
pub struct GaussianCombination {
    t: f64,
    a: Vec<BigReal>,
    eval_digits: u32,
    /// Hermite coefficients the weights came from, when built by [`fit`].
    pub hermite: Option<HermiteCoefficients>,
}

impl GaussianCombination {
    pub fn new(t: f64, a: Vec<BigReal>) -> Result<Self> {
        if t == 0.0 {
            return Err(Error::ZeroStep);
        }
        if !t.is_finite() {
            return Err(Error::InvalidParameter(format!("step must be finite, got {t}")));
        }
        if a.is_empty() {
            return Err(Error::DimensionMismatch("a combination needs at least one weight".into()));
        }
        let top = a.iter().map(BigReal::log10_abs).fold(f64::NEG_INFINITY, f64::max);
        let eval_digits = digits_for_magnitude(top);
        Ok(GaussianCombination { t, a, eval_digits, hermite: None })
    }

    pub fn from_f64(t: f64, a: &[f64]) -> Result<Self> {
        Self::new(t, a.iter().map(|&v| BigReal::from_f64(v, MIN_EVAL_DIGITS)).collect())
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// Highest index `N`.
    pub fn order(&self) -> usize {
        self.a.len() - 1
    }

    pub fn weights(&self) -> &[BigReal] {
        &self.a
    }

    /// Weights rounded to `f64` (may overflow to ±inf).
    pub fn weights_f64(&self) -> Vec<f64> {
        self.a.iter().map(BigReal::to_f64).collect()
    }

    /// Precision used for evaluation.
    pub fn eval_digits(&self) -> u32 {
        self.eval_digits
    }

    /// Shifts `n t`.
    pub fn shifts(&self) -> Vec<f64> {
        (0..self.a.len()).map(|n| n as f64 * self.t).collect()
    }

    pub fn evaluator(&self) -> ComboEvaluator<'_> {
        ComboEvaluator::new(self)
    }

    /// `[lo, hi]` containing every centre `n t`.
    pub fn centre_span(&self) -> (f64, f64) {
        let end = self.order() as f64 * self.t;
        (end.min(0.0), end.max(0.0))
    }
}

/// Reusable evaluation state for one combination.
pub struct ComboEvaluator<'a> {
    combo: &'a GaussianCombination,
    ctx: BigCtx,
    a: Vec<BigReal>,
    t: BigReal,
    /// `e^{-2t²}`
    q: BigReal,
}

impl<'a> ComboEvaluator<'a> {
    fn new(combo: &'a GaussianCombination) -> Self {
        let mut ctx = BigCtx::new(combo.eval_digits);
        let a = combo.a.iter().map(|v| ctx.lift(v)).collect();
        let t = ctx.num(combo.t);
        let q = ctx.exp(&(&t * &t).mul_f64(-2.0));
        ComboEvaluator { combo, ctx, a, t, q }
    }

    /// Value at `x` in extended precision.
    pub fn eval_big(&mut self, x: f64) -> BigReal {
        let ctx = &mut self.ctx;
        let x = ctx.num(x);
        // e^{-(x-(n+1)t)²} = e^{-(x-nt)²} · R_n,  R_n = e^{2tx - (2n+1)t²}
        let mut e = ctx.exp(&-(&x * &x));
        let tt = &self.t * &self.t;
        let mut r = ctx.exp(&(&(&self.t * &x).mul_f64(2.0) - &tt));
        let mut acc = &self.a[0] * &e;
        for a in &self.a[1..] {
            e = &e * &r;
            r = &r * &self.q;
            acc = &acc + &(a * &e);
        }
        acc
    }

    pub fn eval(&mut self, x: f64) -> f64 {
        self.eval_big(x).to_f64()
    }

    pub fn combination(&self) -> &GaussianCombination {
        self.combo
    }
}

/// `Σ a_n e^{-(x-nt)²}`
pub fn eval_combo(c: &GaussianCombination, x: f64) -> f64 {
    c.evaluator().eval(x)
}

fn binomial_row(n: usize, ctx: &BigCtx) -> Vec<BigReal> {
    let mut row = Vec::with_capacity(n + 1);
    let mut v = ctx.one();
    for k in 0..=n {
        row.push(v.clone());
        v = &(&v * &ctx.int((n - k) as i64)) / &ctx.int(k as i64 + 1);
    }
    row
}

/// Hermite coefficient `b_n` rebuilt in extended precision from `c_n`.
fn big_b(h: &HermiteCoefficients, ctx: &mut BigCtx) -> Vec<BigReal> {
    let pi = ctx.pi();
    let sqrt_pi = ctx.sqrt(&pi);
    let mut k2 = sqrt_pi;
    let mut out = Vec::with_capacity(h.c.len());
    for (n, &c) in h.c.iter().enumerate() {
        if n > 0 {
            k2 = &k2 * &ctx.int(2 * n as i64);
        }
        let b = &ctx.num(c) / &ctx.sqrt(&k2);
        out.push(if n % 2 == 0 { b } else { -b });
    }
    out
}

/// Translate weights from Hermite coefficients.
pub fn bn_to_an(b: &HermiteCoefficients, t: f64) -> Result<GaussianCombination> {
    if t == 0.0 {
        return Err(Error::ZeroStep);
    }
    if !t.is_finite() {
        return Err(Error::InvalidParameter(format!("step must be finite, got {t}")));
    }
    let n_max = b.b.len() - 1;
    // Largest term is about max_n |b_n| 2ⁿ |t|^{-n}.
    let top = b
        .b
        .iter()
        .enumerate()
        .filter(|(_, v)| **v != 0.0)
        .map(|(n, v)| libm::log10(v.abs()) + n as f64 * (libm::log10(2.0) - libm::log10(t.abs())))
        .fold(f64::NEG_INFINITY, f64::max);
    let mut ctx = BigCtx::new(digits_for_magnitude(top) + 10);
    let bb = big_b(b, &mut ctx);
    let inv_t = ctx.one() / ctx.num(t);
    let mut a: Vec<BigReal> = (0..=n_max).map(|_| ctx.zero()).collect();
    let mut scale = ctx.one();
    for (n, bn) in bb.iter().enumerate() {
        if n > 0 {
            scale = &scale * &inv_t;
        }
        if bn.is_zero() {
            continue;
        }
        let w = bn * &scale;
        for (k, c) in binomial_row(n, &ctx).iter().enumerate() {
            let term = &w * c;
            a[k] = if k % 2 == 0 { &a[k] + &term } else { &a[k] - &term };
        }
    }
    GaussianCombination::new(t, a)
}

/// Hermite coefficients of `f` turned into translate weights.
pub fn fit(f: &TargetFunction, n: usize, t: f64, cfg: &QuadratureConfig) -> Result<GaussianCombination> {
    fit_truncated(f, n, t, None, cfg)
}

/// [`fit`] with an explicit truncation radius.
pub fn fit_truncated(
    f: &TargetFunction,
    n: usize,
    t: f64,
    m: Option<f64>,
    cfg: &QuadratureConfig,
) -> Result<GaussianCombination> {
    if t == 0.0 {
        return Err(Error::ZeroStep);
    }
    let h = compute_bn_truncated(f, n, m, cfg)?;
    let mut c = bn_to_an(&h, t)?;
    c.hermite = Some(h);
    Ok(c)
}

/// Domain covering `f`, the centres and the tails, split at `f`'s breakpoints.
pub fn error_domain(f: &TargetFunction, c: &GaussianCombination, cfg: &QuadratureConfig) -> Domain {
    let tail = cfg.tail_cutoff;
    let (c0, c1) = c.centre_span();
    let (mut lo, mut hi) = (c0 - tail, c1 + tail);
    if let Support::Interval(a, b) = f.support() {
        lo = lo.min(a);
        hi = hi.max(b);
    }
    Domain::interval(lo, hi).with_breakpoints(f.breakpoints().iter().copied())
}

/// `‖f - Σ a_n e^{-(x-nt)²}‖₂`
pub fn l2_fit_error(f: &TargetFunction, c: &GaussianCombination, cfg: &QuadratureConfig) -> Result<f64> {
    let domain = error_domain(f, c, cfg);
    let mut ev = c.evaluator();
    let s: f64 = integrate(|x| (f.evaluate_real(x) - ev.eval(x)).powi(2), &domain, cfg)?;
    Ok(libm::sqrt(s.max(0.0)))
}

/// Weighted Dirac train `Σ w_n δ_{nt}` with every time inside `[0, τ)`.
#[derive(Debug, Clone)]
pub struct ImpulseTrain {
    /// `n t`, rounded for display; filtering uses the exact products.
    pub times: Vec<f64>,
    pub weights: Vec<BigReal>,
    pub load_time: f64,
    pub step: f64,
}

impl ImpulseTrain {
    pub fn weights_f64(&self) -> Vec<f64> {
        self.weights.iter().map(BigReal::to_f64).collect()
    }

    /// The train passed through `G(x) = e^{-x²}/√π`: `Σ w_n G(x - n t)`.
    pub fn filter_big(&self, x: f64, ctx: &mut BigCtx) -> BigReal {
        let pi = ctx.pi();
        let inv_sqrt_pi = ctx.one() / ctx.sqrt(&pi);
        let x = ctx.num(x);
        let t = ctx.num(self.step);
        let mut acc = ctx.zero();
        for (n, w) in self.weights.iter().enumerate() {
            let d = &x - &(&t * &ctx.int(n as i64));
            let g = ctx.exp(&-(&d * &d));
            acc = &acc + &(&ctx.lift(w) * &g);
        }
        &acc * &inv_sqrt_pi
    }

    /// Precision needed to filter without cancellation loss.
    pub fn filter_digits(&self) -> u32 {
        let top = self.weights.iter().map(BigReal::log10_abs).fold(f64::NEG_INFINITY, f64::max);
        digits_for_magnitude(top)
    }

    pub fn filter(&self, x: f64) -> f64 {
        let mut ctx = BigCtx::new(self.filter_digits());
        self.filter_big(x, &mut ctx).to_f64()
    }
}

/// Impulse train whose Gaussian-filtered output is the backward-difference fit of `f`
/// with `t = τ/(N+1)`, so every impulse lands strictly before `τ`.
pub fn impulse_synthesis(
    f: &TargetFunction,
    n: usize,
    tau: f64,
    cfg: &QuadratureConfig,
) -> Result<(ImpulseTrain, GaussianCombination)> {
    if !(tau.is_finite() && tau > 0.0) {
        return Err(Error::InvalidParameter(format!("load time tau must be positive, got {tau}")));
    }
    if n < 1 {
        return Err(Error::InvalidParameter("impulse synthesis needs N >= 1".into()));
    }
    let t = tau / (n as f64 + 1.0);
    let combo = fit(f, n, t, cfg)?;
    let mut ctx = BigCtx::new(combo.eval_digits());
    let pi = ctx.pi();
    let sqrt_pi = ctx.sqrt(&pi);
    let weights = combo.weights().iter().map(|a| &ctx.lift(a) * &sqrt_pi).collect();
    let train = ImpulseTrain { times: combo.shifts(), weights, load_time: tau, step: t };
    Ok((train, combo))
}
