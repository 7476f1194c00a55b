//! Low-frequency trigonometric sums under the Gaussian weight.
//!
//! With `F[f](s) = (2π)^{-1/2} ∫ f(x) e^{-isx} dx` the transform of a
//! translate is `F[e^{-(x-nt)²}](s) = e^{-ints} e^{-s²/4}/√2`. So fitting
//!
//! ```text
//! f₂ = (2π)^{-1/2} e^{-x²} ∗ F⁻¹[f] = F⁻¹[e^{-s²/4} f(s)/√2]
//! ```
//!
//! by Gaussian translates and transforming back gives
//! `f(s) ≈ Σ a_n e^{-ints}` in the norm `‖g‖_{2,G}² = ∫ |g|² e^{-s²}`.

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::funcspec::{Support, TargetFunction};
use crate::gaussfit::{bn_to_an, GaussianCombination};
use crate::hermite::compute_bn_on;
use crate::numerics::hpquad::GaussLegendre;
use crate::numerics::{integrate, BigComplex, BigCtx, BigReal, Domain, QuadratureConfig};
use crate::{Error, Result};

const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;
const GUARD_DIGITS: u32 = 25;
const MIN_EVAL_DIGITS: u32 = 30;
/// Spacing of the candidate truncation radii.
pub const TRUNCATION_STEP: f64 = 0.5;
/// Points of the fixed rule used for grid transforms.
const GRID_RULE_POINTS: usize = 10;

/// Samples on a uniform grid, read back by linear interpolation and taken
/// as zero off the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    x0: f64,
    spacing: f64,
    values: Vec<Complex64>,
}

impl GridFunction {
    pub fn new(x0: f64, spacing: f64, values: Vec<Complex64>) -> Result<Self> {
        if !(spacing.is_finite() && spacing > 0.0 && x0.is_finite()) {
            return Err(Error::InvalidParameter(format!("grid needs a finite origin and positive spacing, got {x0}, {spacing}")));
        }
        if values.len() < 2 {
            return Err(Error::InvalidParameter("grid needs at least two points".into()));
        }
        if let Some(i) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::InvalidParameter(format!("grid value {i} is not finite")));
        }
        Ok(GridFunction { x0, spacing, values })
    }

    /// Sample `g` on `[-half_width, half_width]` at spacing close to `spacing`
    /// (adjusted so the end points are grid points).
    pub fn sample<F: FnMut(f64) -> Complex64>(half_width: f64, spacing: f64, mut g: F) -> Result<Self> {
        let (cells, h) = grid_shape(half_width, spacing)?;
        let values = (0..=cells).map(|i| g(-half_width + i as f64 * h)).collect();
        Self::new(-half_width, h, values)
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x0 + i as f64 * self.spacing
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.values.len()).map(|i| self.x(i)).collect()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn lo(&self) -> f64 {
        self.x0
    }

    pub fn hi(&self) -> f64 {
        self.x(self.values.len() - 1)
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        let u = (x - self.x0) / self.spacing;
        let last = self.values.len() - 1;
        if !(u >= 0.0 && u <= last as f64) {
            return Complex64::new(0.0, 0.0);
        }
        let i = (libm::floor(u) as usize).min(last - 1);
        let w = u - i as f64;
        self.values[i] * (1.0 - w) + self.values[i + 1] * w
    }

    /// Largest magnitude at the two ends.
    pub fn edge_magnitude(&self) -> f64 {
        self.values[0].norm().max(self.values[self.values.len() - 1].norm())
    }

    pub fn is_real(&self) -> bool {
        self.values.iter().all(|v| v.im == 0.0)
    }
}

fn grid_shape(half_width: f64, spacing: f64) -> Result<(usize, f64)> {
    if !(half_width.is_finite() && half_width > 0.0 && spacing.is_finite() && spacing > 0.0) {
        return Err(Error::InvalidParameter(format!("grid half-width {half_width} and spacing {spacing} must be positive")));
    }
    let cells = libm::ceil(2.0 * half_width / spacing - 1e-9).max(1.0) as usize;
    Ok((cells, 2.0 * half_width / cells as f64))
}

/// How `f₂` is produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SmoothingMethod {
    /// `F⁻¹[e^{-s²/4} f(s)/√2]` evaluated directly on the grid.
    #[default]
    DampedTransform,
    /// `F⁻¹[f]` on the grid, then [`gaussian_convolve`].
    Convolution,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowFreqConfig {
    pub spacing: f64,
    /// Grid covers `[-L, L]`.
    pub half_width: f64,
    pub method: SmoothingMethod,
    /// Truncation radius for the Hermite step. `None` tries every multiple of
    /// [`TRUNCATION_STEP`] up to `L` and keeps the one with the smallest L²
    /// error of the `f₂` fit.
    pub truncation_m: Option<f64>,
}

impl Default for LowFreqConfig {
    fn default() -> Self {
        LowFreqConfig { spacing: 0.01, half_width: 15.0, method: SmoothingMethod::DampedTransform, truncation_m: None }
    }
}

/// `F[f](s)` by adaptive quadrature, split at whole periods when `|s|` is large.
pub fn fourier_transform(f: &TargetFunction, s: f64, cfg: &QuadratureConfig) -> Result<Complex64> {
    if matches!(f.support(), Support::Empty) {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let mut domain = f.domain();
    let period = 2.0 * core::f64::consts::PI / s.abs();
    if period < 1.0 {
        let (lo, hi) = domain.limits(cfg)?;
        let count = ((hi - lo) / period).min(20_000.0) as usize;
        let step = (hi - lo) / (count.max(1) as f64);
        domain = domain.with_breakpoints((1..count).map(|k| lo + k as f64 * step));
    }
    let v: Complex64 = integrate(|x| f.evaluate(x) * Complex64::new(0.0, -s * x).exp(), &domain, cfg)?;
    Ok(v * FRAC_1_SQRT_2PI)
}

/// `F` of the interpolant of `g` (zero off the grid; end cells treated as
/// full hats, which is exact when `g` vanishes at both ends).
pub fn grid_fourier_transform(g: &GridFunction, s: f64) -> Complex64 {
    let h = g.spacing;
    let half = 0.5 * s * h;
    let sinc = if half == 0.0 { 1.0 } else { libm::sin(half) / half };
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, v) in g.values.iter().enumerate() {
        acc += v * Complex64::new(0.0, -s * g.x(i)).exp();
    }
    acc * (h * sinc * sinc * FRAC_1_SQRT_2PI)
}

/// Composite fixed-rule nodes and weights over `[lo, hi]`, split at `breaks`.
fn spectral_nodes(lo: f64, hi: f64, breaks: &[f64], panel: f64) -> Vec<(f64, f64)> {
    let mut ctx = BigCtx::new(30);
    let rule = GaussLegendre::new(GRID_RULE_POINTS, &mut ctx).to_f64();
    let domain = Domain::interval(lo, hi).with_breakpoints(breaks.iter().copied());
    let Ok(edges) = domain.panel_edges(&QuadratureConfig::default(), panel) else {
        return Vec::new();
    };
    let mut out = Vec::with_capacity(edges.len() * rule.len());
    for w in edges.windows(2) {
        let (mid, half) = (0.5 * (w[0] + w[1]), 0.5 * (w[1] - w[0]));
        for &(x, wt) in &rule {
            out.push((mid + half * x, wt * half));
        }
    }
    out
}

/// Spectral range and weights for an inverse transform of `f·damp` onto a
/// grid reaching `|x| ≤ reach`.
fn inverse_on_grid<D>(
    f: &TargetFunction,
    lf: &LowFreqConfig,
    range: (f64, f64),
    damp: D,
) -> Result<GridFunction>
where
    D: Fn(f64) -> f64,
{
    let (lo, hi) = match f.support() {
        Support::Empty => (0.0, 0.0),
        Support::Interval(a, b) => (a.max(range.0), b.min(range.1)),
        Support::WholeLine => range,
    };
    // Phase change per panel stays below 3 radians at the grid edge.
    let panel = (3.0 / lf.half_width).min(0.25);
    let nodes = if lo < hi { spectral_nodes(lo, hi, f.breakpoints(), panel) } else { Vec::new() };
    let weighted: Vec<(f64, Complex64)> = nodes
        .iter()
        .filter_map(|&(s, w)| {
            let v = f.evaluate(s) * (w * damp(s) * FRAC_1_SQRT_2PI);
            (v.re != 0.0 || v.im != 0.0).then_some((s, v))
        })
        .collect();
    GridFunction::sample(lf.half_width, lf.spacing, |x| {
        let mut acc = Complex64::new(0.0, 0.0);
        for &(s, v) in &weighted {
            acc += v * Complex64::new(0.0, s * x).exp();
        }
        acc
    })
}

/// `F⁻¹[f]` on the grid of `lf`.
pub fn inverse_fourier_grid(f: &TargetFunction, lf: &LowFreqConfig, cfg: &QuadratureConfig) -> Result<GridFunction> {
    let range = f.domain().limits(cfg)?;
    inverse_on_grid(f, lf, range, |_| 1.0)
}

/// `f₂ = F⁻¹[e^{-s²/4} f(s)/√2]` on the grid of `lf`.
pub fn damped_inverse_grid(f: &TargetFunction, lf: &LowFreqConfig, cfg: &QuadratureConfig) -> Result<GridFunction> {
    // e^{-s²/4} is below abs_tol·e^{-10} past this radius.
    let reach = 2.0 * libm::sqrt(-libm::log(cfg.abs_tol) + 10.0) + 2.0;
    inverse_on_grid(f, lf, (-reach, reach), |s| libm::exp(-0.25 * s * s) * core::f64::consts::FRAC_1_SQRT_2)
}

/// `∫_{a}^{b} e^{-v²} dv` without cancellation in the tails.
fn gauss_mass(a: f64, b: f64) -> f64 {
    let half_sqrt_pi = 0.886_226_925_452_758;
    let d = if a >= 0.0 {
        libm::erfc(a) - libm::erfc(b)
    } else if b <= 0.0 {
        libm::erfc(-b) - libm::erfc(-a)
    } else {
        libm::erf(b) - libm::erf(a)
    };
    half_sqrt_pi * d
}

/// `(2π)^{-1/2} ∫ g(x - y) e^{-y²} dy` on `g`'s own grid, integrating the
/// linear interpolant of `g` exactly cell by cell.
pub fn gaussian_convolve(g: &GridFunction, cfg: &QuadratureConfig) -> Result<GridFunction> {
    let edge = g.edge_magnitude();
    if edge > cfg.abs_tol {
        return Err(Error::EdgeLeakage { edge, tolerance: cfg.abs_tol });
    }
    // e^{-v²} < 1e-27 beyond this distance.
    let reach = 8.0;
    let h = g.spacing;
    let last = g.values.len() - 1;
    let values = (0..=last)
        .map(|i| {
            let x = g.x(i);
            let first = libm::floor(((x - reach - g.x0) / h).max(0.0)) as usize;
            let stop = (libm::ceil((x + reach - g.x0) / h).max(0.0) as usize).min(last);
            let mut acc = Complex64::new(0.0, 0.0);
            for k in first..stop {
                let (u0, u1) = (g.x(k), g.x(k + 1));
                let slope = (g.values[k + 1] - g.values[k]) / h;
                // g = A + slope·v on the cell, with v = u - x.
                let a = g.values[k] + slope * (x - u0);
                let (v0, v1) = (u0 - x, u1 - x);
                let m0 = gauss_mass(v0, v1);
                let m1 = 0.5 * (libm::exp(-v0 * v0) - libm::exp(-v1 * v1));
                acc += a * m0 + slope * m1;
            }
            acc * FRAC_1_SQRT_2PI
        })
        .collect();
    GridFunction::new(g.x0, h, values)
}

/// `f₂` by the method of `lf`.
pub fn smoothed_target(f: &TargetFunction, lf: &LowFreqConfig, cfg: &QuadratureConfig) -> Result<GridFunction> {
    match lf.method {
        SmoothingMethod::DampedTransform => damped_inverse_grid(f, lf, cfg),
        SmoothingMethod::Convolution => gaussian_convolve(&inverse_fourier_grid(f, lf, cfg)?, cfg),
    }
}

/// `s ↦ Σ a_n e^{-ints}`
#[derive(Debug, Clone)]
pub struct TrigCombination {
    t: f64,
    a: Vec<BigComplex>,
    eval_digits: u32,
    /// Truncation radius of the Hermite step, when built by a fit.
    pub truncation_m: Option<f64>,
}

impl TrigCombination {
    pub fn new(t: f64, a: Vec<BigComplex>) -> Result<Self> {
        if t == 0.0 {
            return Err(Error::ZeroStep);
        }
        if !t.is_finite() {
            return Err(Error::InvalidParameter(format!("step must be finite, got {t}")));
        }
        if a.is_empty() {
            return Err(Error::DimensionMismatch("a trigonometric sum needs at least one coefficient".into()));
        }
        let top = a
            .iter()
            .flat_map(|z| [z.re.log10_abs(), z.im.log10_abs()])
            .fold(f64::NEG_INFINITY, f64::max);
        let eval_digits = if top.is_finite() {
            (libm::ceil(top).max(0.0) as u32 + GUARD_DIGITS).max(MIN_EVAL_DIGITS)
        } else {
            MIN_EVAL_DIGITS
        };
        Ok(TrigCombination { t, a, eval_digits, truncation_m: None })
    }

    pub fn from_c64(t: f64, a: &[Complex64]) -> Result<Self> {
        Self::new(t, a.iter().map(|&z| BigComplex::from_c64(z, MIN_EVAL_DIGITS)).collect())
    }

    /// `re + i·im` from two translate fits with the same step.
    pub fn from_parts(re: &GaussianCombination, im: &GaussianCombination) -> Result<Self> {
        if re.order() != im.order() || re.t() != im.t() {
            return Err(Error::DimensionMismatch("real and imaginary fits differ in N or t".into()));
        }
        let a = re.weights().iter().zip(im.weights()).map(|(r, i)| BigComplex::new(r.clone(), i.clone())).collect();
        Self::new(re.t(), a)
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn order(&self) -> usize {
        self.a.len() - 1
    }

    /// `N·|t|`
    pub fn max_frequency(&self) -> f64 {
        self.order() as f64 * self.t.abs()
    }

    pub fn frequencies(&self) -> Vec<f64> {
        (0..self.a.len()).map(|n| n as f64 * self.t).collect()
    }

    pub fn coeffs(&self) -> &[BigComplex] {
        &self.a
    }

    pub fn coeffs_c64(&self) -> Vec<Complex64> {
        self.a.iter().map(BigComplex::to_c64).collect()
    }

    pub fn eval_digits(&self) -> u32 {
        self.eval_digits
    }

    /// Keep only the real parts of the coefficients.
    pub fn real_part(&self) -> Result<Self> {
        let a = self.a.iter().map(|z| BigComplex::new(z.re.clone(), BigReal::zero(z.re.precision_digits()))).collect();
        let mut c = Self::new(self.t, a)?;
        c.truncation_m = self.truncation_m;
        Ok(c)
    }

    pub fn evaluator(&self) -> TrigEvaluator<'_> {
        let ctx = BigCtx::new(self.eval_digits);
        let a = self.a.iter().map(|z| BigComplex::new(ctx.lift(&z.re), ctx.lift(&z.im))).collect();
        let t = ctx.num(self.t);
        TrigEvaluator { combo: self, ctx, a, t }
    }

    pub fn eval(&self, s: f64) -> Complex64 {
        self.evaluator().eval(s)
    }
}

pub struct TrigEvaluator<'a> {
    combo: &'a TrigCombination,
    ctx: BigCtx,
    a: Vec<BigComplex>,
    t: BigReal,
}

impl TrigEvaluator<'_> {
    pub fn eval_big(&mut self, s: f64) -> BigComplex {
        let ctx = &mut self.ctx;
        let theta = &self.t * &ctx.num(s);
        let w = BigComplex::new(ctx.cos(&theta), -ctx.sin(&theta));
        let mut p = BigComplex::new(ctx.one(), ctx.zero());
        let mut acc = BigComplex::new(ctx.zero(), ctx.zero());
        for (n, a) in self.a.iter().enumerate() {
            if n > 0 {
                p = &p * &w;
            }
            acc = &acc + &(a * &p);
        }
        acc
    }

    pub fn eval(&mut self, s: f64) -> Complex64 {
        self.eval_big(s).to_c64()
    }

    pub fn combination(&self) -> &TrigCombination {
        self.combo
    }
}

/// Translate fits of the real and imaginary parts of `f₂`, read as
/// trigonometric coefficients.
pub fn fit_lowfreq(f: &TargetFunction, n: usize, t: f64, cfg: &QuadratureConfig) -> Result<TrigCombination> {
    fit_lowfreq_with(f, n, t, &LowFreqConfig::default(), cfg)
}

pub fn fit_lowfreq_with(
    f: &TargetFunction,
    n: usize,
    t: f64,
    lf: &LowFreqConfig,
    cfg: &QuadratureConfig,
) -> Result<TrigCombination> {
    if t == 0.0 {
        return Err(Error::ZeroStep);
    }
    cfg.validate()?;
    let f2 = smoothed_target(f, lf, cfg)?;
    match lf.truncation_m {
        Some(m) => fit_smoothed(&f2, n, t, m, cfg),
        None => {
            let steps = libm::floor(lf.half_width / TRUNCATION_STEP).max(1.0) as usize;
            let candidates = (1..=steps)
                .map(|k| fit_smoothed(&f2, n, t, (k as f64 * TRUNCATION_STEP).min(lf.half_width), cfg))
                .collect::<Result<Vec<_>>>()?;
            let digits = candidates.iter().map(|c| c.eval_digits).max().unwrap_or(MIN_EVAL_DIGITS);
            let basis = TranslateBasis::new(&f2, n, t, digits);
            let mut best: Option<(f64, TrigCombination)> = None;
            for c in candidates {
                let e = basis.error(&f2, &c);
                if best.as_ref().is_none_or(|(b, _)| e < *b) {
                    best = Some((e, c));
                }
            }
            best.map(|(_, c)| c).ok_or_else(|| Error::InvalidParameter("empty truncation search".into()))
        }
    }
}

/// `e^{-(x_i - nt)²}` at every grid node, in extended precision.
struct TranslateBasis {
    rows: Vec<Vec<BigReal>>,
    digits: u32,
}

impl TranslateBasis {
    fn new(f2: &GridFunction, n: usize, t: f64, digits: u32) -> Self {
        let mut ctx = BigCtx::new(digits);
        let tb = ctx.num(t);
        let tt = &tb * &tb;
        let q = ctx.exp(&tt.mul_f64(-2.0));
        let rows = (0..f2.len())
            .map(|i| {
                let x = ctx.num(f2.x(i));
                let mut e = ctx.exp(&-(&x * &x));
                let mut r = ctx.exp(&(&(&tb * &x).mul_f64(2.0) - &tt));
                let mut row = Vec::with_capacity(n + 1);
                for _ in 0..=n {
                    row.push(e.clone());
                    e = &e * &r;
                    r = &r * &q;
                }
                row
            })
            .collect();
        TranslateBasis { rows, digits }
    }

    /// Trapezoid-rule L² distance between `f₂` and the translate sum behind `c`.
    fn error(&self, f2: &GridFunction, c: &TrigCombination) -> f64 {
        let re: Vec<BigReal> = c.a.iter().map(|z| z.re.with_digits(self.digits)).collect();
        let im: Vec<BigReal> = c.a.iter().map(|z| z.im.with_digits(self.digits)).collect();
        let last = f2.len() - 1;
        let mut acc = crate::numerics::NeumaierSum::new();
        for (i, (v, row)) in f2.values.iter().zip(&self.rows).enumerate() {
            let dot = |w: &[BigReal]| {
                w.iter().zip(row).fold(BigReal::zero(self.digits), |s, (a, g)| &s + &(a * g)).to_f64()
            };
            let d = (v.re - dot(&re)).powi(2) + (v.im - dot(&im)).powi(2);
            acc.add(if i == 0 || i == last { 0.5 * d } else { d });
        }
        libm::sqrt(acc.sum() * f2.spacing)
    }
}

/// Fit an already computed `f₂` with truncation radius `m`.
pub fn fit_smoothed(f2: &GridFunction, n: usize, t: f64, m: f64, cfg: &QuadratureConfig) -> Result<TrigCombination> {
    if !(m.is_finite() && m > 0.0) {
        return Err(Error::InvalidParameter(format!("truncation radius must be positive, got {m}")));
    }
    let (lo, hi) = (f2.lo().max(-m), f2.hi().min(m));
    let domain = Domain::interval(lo, hi).with_breakpoints(f2.xs().into_iter().filter(|&x| x > lo && x < hi));
    let part = |im: bool| -> Result<GaussianCombination> {
        let h = compute_bn_on(|x| if im { f2.eval(x).im } else { f2.eval(x).re }, &domain, n, Some(m), cfg)?;
        bn_to_an(&h, t)
    };
    let mut c = TrigCombination::from_parts(&part(false)?, &part(true)?)?;
    c.truncation_m = Some(m);
    Ok(c)
}

/// Trapezoid-rule L² distance on the grid between `f₂` and the translate
/// sum whose transform is `c`.
pub fn smoothed_fit_error(f2: &GridFunction, c: &TrigCombination) -> f64 {
    TranslateBasis::new(f2, c.order(), c.t, c.eval_digits).error(f2, c)
}

/// `‖f - c‖_{2,G}`
pub fn weighted_fit_error(f: &TargetFunction, c: &TrigCombination, cfg: &QuadratureConfig) -> Result<f64> {
    let domain = Domain::whole_line().with_breakpoints(f.breakpoints().iter().copied());
    let mut ev = c.evaluator();
    let s: f64 = integrate(|x| (f.evaluate(x) - ev.eval(x)).norm_sqr() * libm::exp(-x * x), &domain, cfg)?;
    Ok(libm::sqrt(s.max(0.0)))
}

/// `Σ Re(a_n) cos(ntx) + Im(a_n) sin(ntx)` on `[a, b]`.
#[derive(Debug, Clone)]
pub struct SinCosFit {
    pub combination: TrigCombination,
    pub interval: (f64, f64),
    /// Unweighted L² error on the interval.
    pub error_l2: f64,
    /// `‖f χ - c‖_{2,G}` over the whole line.
    pub error_weighted: f64,
}

impl SinCosFit {
    pub fn cos_coeffs(&self) -> Vec<BigReal> {
        self.combination.coeffs().iter().map(|z| z.re.clone()).collect()
    }

    pub fn sin_coeffs(&self) -> Vec<BigReal> {
        self.combination.coeffs().iter().map(|z| z.im.clone()).collect()
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.combination.eval(x).re
    }
}

fn check_real_interval(f: &TargetFunction, a: f64, b: f64) -> Result<()> {
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(Error::InvalidDomain { lo: a, hi: b });
    }
    if f.is_complex() {
        return Err(Error::InvalidParameter("sine/cosine fits need a real target".into()));
    }
    Ok(())
}

fn interval_error<G: FnMut(f64) -> f64>(f: &TargetFunction, a: f64, b: f64, mut approx: G, cfg: &QuadratureConfig) -> Result<f64> {
    let domain = Domain::interval(a, b).with_breakpoints(f.breakpoints().iter().copied());
    let s: f64 = integrate(|x| (f.evaluate_real(x) - approx(x)).powi(2), &domain, cfg)?;
    Ok(libm::sqrt(s.max(0.0)))
}

/// Sine and cosine series of `f` on `[a, b]` with every frequency below `omega`.
#[allow(clippy::too_many_arguments)]
pub fn fit_sincos_with(
    f: &TargetFunction,
    a: f64,
    b: f64,
    n: usize,
    t: f64,
    omega: f64,
    lf: &LowFreqConfig,
    cfg: &QuadratureConfig,
) -> Result<SinCosFit> {
    check_real_interval(f, a, b)?;
    if !(omega.is_finite() && omega > 0.0) {
        return Err(Error::InvalidParameter(format!("omega must be positive, got {omega}")));
    }
    let max_frequency = n as f64 * t.abs();
    if max_frequency >= omega {
        return Err(Error::FrequencyBound { max_frequency, omega });
    }
    let g = f.restricted(a, b);
    let combination = fit_lowfreq_with(&g, n, t, lf, cfg)?;
    let mut ev = combination.evaluator();
    let error_l2 = interval_error(&g, a, b, |x| ev.eval(x).re, cfg)?;
    let error_weighted = weighted_fit_error(&g, &combination, cfg)?;
    Ok(SinCosFit { combination, interval: (a, b), error_l2, error_weighted })
}

pub fn fit_sincos(
    f: &TargetFunction,
    a: f64,
    b: f64,
    n: usize,
    t: f64,
    omega: f64,
    cfg: &QuadratureConfig,
) -> Result<SinCosFit> {
    fit_sincos_with(f, a, b, n, t, omega, &LowFreqConfig::default(), cfg)
}

/// Cosine-only series on `[0, b]` from the even extension to `[-b, b]`.
#[derive(Debug, Clone)]
pub struct CosineFit {
    /// Real coefficients `a_n` of `Σ a_n cos(ntx)`.
    pub cosine: TrigCombination,
    /// The full sine/cosine fit of the even extension.
    pub sincos: SinCosFit,
    pub b: f64,
    /// L² error of the cosine sum on `[0, b]`.
    pub error_l2: f64,
}

impl CosineFit {
    pub fn coeffs(&self) -> Vec<BigReal> {
        self.cosine.coeffs().iter().map(|z| z.re.clone()).collect()
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.cosine.eval(x).re
    }
}

pub fn fit_cosine_even_with(
    f: &TargetFunction,
    b: f64,
    n: usize,
    t: f64,
    omega: f64,
    lf: &LowFreqConfig,
    cfg: &QuadratureConfig,
) -> Result<CosineFit> {
    check_real_interval(f, 0.0, b)?;
    let even = f.restricted(0.0, b).even_extension();
    let sincos = fit_sincos_with(&even, -b, b, n, t, omega, lf, cfg)?;
    let cosine = sincos.combination.real_part()?;
    let mut ev = cosine.evaluator();
    let error_l2 = interval_error(&f.restricted(0.0, b), 0.0, b, |x| ev.eval(x).re, cfg)?;
    Ok(CosineFit { cosine, sincos, b, error_l2 })
}

pub fn fit_cosine_even(
    f: &TargetFunction,
    b: f64,
    n: usize,
    t: f64,
    omega: f64,
    cfg: &QuadratureConfig,
) -> Result<CosineFit> {
    fit_cosine_even_with(f, b, n, t, omega, &LowFreqConfig::default(), cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspec::catalog;
    use alloc::vec;
    use core::f64::consts::{FRAC_1_SQRT_2, PI};

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    fn f(s: &str) -> TargetFunction {
        TargetFunction::parse(s).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn transform_of_gaussian() {
        let cfg = cfg();
        let g = f("exp(-x^2)");
        assert!((fourier_transform(&g, 0.0, &cfg).unwrap() - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-12);
        assert!((fourier_transform(&g, 2.0, &cfg).unwrap() - c(FRAC_1_SQRT_2 * (-1.0f64).exp(), 0.0)).norm() < 1e-12);
        for s in [0.0, 1.0, -1.0, 2.0, -2.0, 4.0, -4.0] {
            let expect = FRAC_1_SQRT_2 * libm::exp(-s * s / 4.0);
            assert!((fourier_transform(&g, s, &cfg).unwrap() - c(expect, 0.0)).norm() < 1e-6);
        }
        assert_eq!(fourier_transform(&TargetFunction::zero(), 1.5, &cfg).unwrap(), c(0.0, 0.0));
        // Indicator: F[χ_[a,b]](s) = (e^{-isa} - e^{-isb}) / (is √(2π))
        let chi = f("chi(-11,-10)");
        for s in [0.5, 7.0, 40.0] {
            let e = (Complex64::new(0.0, 11.0 * s).exp() - Complex64::new(0.0, 10.0 * s).exp()) / Complex64::new(0.0, s) * FRAC_1_SQRT_2PI;
            assert!((fourier_transform(&chi, s, &cfg).unwrap() - e).norm() < 1e-9, "s = {s}");
        }
    }

    #[test]
    fn shift_rule_has_positive_sign() {
        // F[f(· + r)](s) = e^{+irs} F[f](s) under this convention.
        let cfg = cfg();
        let r = 0.7;
        for (name, g) in catalog() {
            for s in [-2.5, 0.3, 1.0, 3.0] {
                let lhs = fourier_transform(&g.shifted(r), s, &cfg).unwrap();
                let rhs = Complex64::new(0.0, r * s).exp() * fourier_transform(&g, s, &cfg).unwrap();
                assert!((lhs - rhs).norm() < 1e-6, "{name} at {s}");
            }
        }
    }

    #[test]
    fn plancherel() {
        let cfg = cfg();
        for name in ["gauss", "gauss-shifted", "far-indicator", "sine-period", "shifted-parabola"] {
            let g = catalog().into_iter().find(|(k, _)| *k == name).unwrap().1;
            let norm = crate::numerics::l2_norm(|x| g.evaluate(x), &g.domain(), &cfg).unwrap();
            let (h, reach) = (0.01, 100.0);
            let count = (2.0 * reach / h) as usize;
            let mut acc = crate::numerics::NeumaierSum::new();
            for k in 0..=count {
                let s = -reach + k as f64 * h;
                let w = if k == 0 || k == count { 0.5 } else { 1.0 };
                acc.add(w * fourier_transform(&g, s, &cfg).unwrap().norm_sqr());
            }
            let tnorm = libm::sqrt(acc.sum() * h);
            assert!((tnorm / norm - 1.0).abs() < 0.01, "{name}: {tnorm} vs {norm}");
        }
    }

    #[test]
    fn grid_transform_and_interpolation() {
        let g = GridFunction::sample(12.0, 0.01, |x| c(libm::exp(-x * x), 0.0)).unwrap();
        assert_eq!(g.len(), 2401);
        assert!((g.eval(0.005) - c(0.5 * (1.0 + libm::exp(-1e-4)), 0.0)).norm() < 1e-15);
        assert_eq!(g.eval(13.0), c(0.0, 0.0));
        for s in [0.0, 1.0, 3.0] {
            let e = FRAC_1_SQRT_2 * libm::exp(-s * s / 4.0);
            assert!((grid_fourier_transform(&g, s) - c(e, 0.0)).norm() < 1e-5);
        }
        assert!(GridFunction::new(0.0, 0.0, vec![c(0.0, 0.0); 3]).is_err());
        assert!(GridFunction::new(0.0, 1.0, vec![c(f64::NAN, 0.0); 3]).is_err());
    }

    #[test]
    fn convolution_examples() {
        let cfg = cfg();
        let zero = GridFunction::sample(10.0, 0.01, |_| c(0.0, 0.0)).unwrap();
        assert!(gaussian_convolve(&zero, &cfg).unwrap().values().iter().all(|v| v.norm() == 0.0));
        // e^{-x²} ∗ e^{-x²} / √(2π) = √(π/2) e^{-x²/2} / √(2π) = e^{-x²/2} / 2
        let g = GridFunction::sample(10.0, 0.01, |x| c(libm::exp(-x * x), 0.0)).unwrap();
        let out = gaussian_convolve(&g, &cfg).unwrap();
        for (i, v) in out.values().iter().enumerate().step_by(37) {
            let x = out.x(i);
            assert!((v.re - 0.5 * libm::exp(-x * x / 2.0)).abs() < 1e-5, "x = {x}");
        }
        // A unit-mass spike reproduces the kernel.
        let h = 0.01;
        let spike = GridFunction::sample(10.0, h, |x| c(if x.abs() < 0.5 * h { 1.0 / h } else { 0.0 }, 0.0)).unwrap();
        let out = gaussian_convolve(&spike, &cfg).unwrap();
        for (i, v) in out.values().iter().enumerate().step_by(53) {
            let x = out.x(i);
            assert!((v.re - FRAC_1_SQRT_2PI * libm::exp(-x * x)).abs() < 1e-4, "x = {x}");
        }
        let wide = GridFunction::sample(3.0, 0.01, |_| c(1.0, 0.0)).unwrap();
        assert!(matches!(gaussian_convolve(&wide, &cfg), Err(Error::EdgeLeakage { .. })));
    }

    #[test]
    fn both_smoothing_routes_agree() {
        let cfg = cfg();
        let g = f("exp(-x^2) + 0.5*exp(i*x)*exp(-(x-1)^2)");
        let lf = LowFreqConfig::default();
        let a = damped_inverse_grid(&g, &lf, &cfg).unwrap();
        let b = smoothed_target(&g, &LowFreqConfig { method: SmoothingMethod::Convolution, ..lf }, &cfg).unwrap();
        let worst = a.values().iter().zip(b.values()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        assert!(worst < 1e-5, "{worst}");
        // Closed form for the first term: F⁻¹[e^{-5s²/4}/√2] = e^{-x²/5}/√5.
        let only = damped_inverse_grid(&f("exp(-x^2)"), &lf, &cfg).unwrap();
        for (i, v) in only.values().iter().enumerate().step_by(41) {
            let x = only.x(i);
            assert!((v - c(libm::exp(-x * x / 5.0) / libm::sqrt(5.0), 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn trig_combination_evaluation() {
        let t = 0.5;
        let tc = TrigCombination::from_c64(t, &[c(1.0, 0.0), c(2.0, -1.0)]).unwrap();
        for s in [-3.0, 0.0, 1.7] {
            let e = c(1.0, 0.0) + c(2.0, -1.0) * Complex64::new(0.0, -t * s).exp();
            assert!((tc.eval(s) - e).norm() < 1e-15);
        }
        assert_eq!(tc.max_frequency(), 0.5);
        assert_eq!(tc.frequencies(), vec![0.0, 0.5]);
        assert!(matches!(TrigCombination::from_c64(0.0, &[c(1.0, 0.0)]), Err(Error::ZeroStep)));
        // Self-distance.
        let g = f("1 + (2 - i)*exp(-i*0.5*x)");
        assert!(weighted_fit_error(&g, &tc, &cfg()).unwrap() < 10.0 * cfg().abs_tol);
        let zero = TrigCombination::from_c64(t, &[c(0.0, 0.0)]).unwrap();
        assert_eq!(weighted_fit_error(&TargetFunction::zero(), &zero, &cfg()).unwrap(), 0.0);
    }

    #[test]
    fn zero_target_gives_zero_coefficients() {
        let tc = fit_lowfreq(&TargetFunction::zero(), 4, 0.1, &cfg()).unwrap();
        assert!(tc.coeffs().iter().all(BigComplex::is_zero));
    }

    #[test]
    fn even_real_target_has_real_coefficients() {
        let cfg = cfg();
        let g = f("exp(-x^2)");
        let tc = fit_lowfreq(&g, 20, 0.05, &cfg).unwrap();
        let a = tc.coeffs_c64();
        let scale = a.iter().map(|z| z.re.abs()).fold(0.0, f64::max);
        assert!(a.iter().all(|z| z.im.abs() <= 1e-8 * scale));
        let err = weighted_fit_error(&g, &tc, &cfg).unwrap();
        let norm = libm::sqrt(libm::sqrt(PI / 3.0));
        assert!(err < norm, "{err} vs {norm}");
    }

    #[test]
    fn shifted_gaussian_transform_matches_oracle() {
        // f₂ = e^{-(x-0.2)²/2}/2 here. Reference from an independent
        // 40-digit evaluation with truncation radius 2.5.
        let cfg = cfg();
        let g = f("exp(-i*0.2*x) * 0.7071067811865476 * exp(-x^2/4)");
        let lf = LowFreqConfig { truncation_m: Some(2.5), ..Default::default() };
        let tc = fit_lowfreq_with(&g, 5, 0.1, &lf, &cfg).unwrap();
        let oracle = [64.98406084, -254.1528549, 392.7735867, -286.0741694, 87.73652608, -4.570077088];
        for (z, o) in tc.coeffs_c64().iter().zip(oracle) {
            // Linear interpolation of f₂ at spacing 0.01 limits agreement to ~1e-3.
            assert!((z.re - o).abs() < 1e-3 * o.abs().max(1.0) && z.im.abs() < 1e-6, "{z} vs {o}");
        }
        let err = weighted_fit_error(&g, &tc, &cfg).unwrap();
        assert!((err - 0.022874916).abs() < 1e-5, "{err}");
        // The weighted error is controlled by the L² error of the f₂ fit.
        let f2 = smoothed_target(&g, &lf, &cfg).unwrap();
        assert!(err <= core::f64::consts::SQRT_2 * smoothed_fit_error(&f2, &tc) + 1e-8);
    }

    #[test]
    fn pure_exponential_follows_truncated_series() {
        // For f = e^{-i r s} the smoothed target is e^{-(x-r)²} with Hermite
        // weights b_n = (-r)ⁿ/n!, so a_k = (-1)^k Σ_{n≥k} (-r/t)ⁿ C(n,k)/n!.
        // The remaining discrepancy comes from linear interpolation of f₂ and
        // falls like the square of the grid spacing.
        let cfg = cfg();
        let (n, t, r) = (5usize, 0.1, 0.2);
        let g = f("exp(-i*0.2*x)");
        let mut fact = 1.0;
        let mut b = vec![];
        for k in 0..=n {
            if k > 0 {
                fact *= k as f64;
            }
            b.push(libm::pow(-r / t, k as f64) / fact);
        }
        let expect: Vec<f64> = (0..=n)
            .map(|k| {
                let mut binom = 1.0;
                let mut s = 0.0;
                for m in k..=n {
                    if m > k {
                        binom = binom * m as f64 / (m - k) as f64;
                    }
                    s += b[m] * binom;
                }
                if k % 2 == 0 { s } else { -s }
            })
            .collect();
        let worst = |spacing: f64| {
            let lf = LowFreqConfig { truncation_m: Some(8.0), half_width: 10.0, spacing, ..Default::default() };
            let tc = fit_lowfreq_with(&g, n, t, &lf, &cfg).unwrap();
            tc.coeffs_c64().iter().zip(&expect).map(|(z, e)| (z - c(*e, 0.0)).norm()).fold(0.0, f64::max)
        };
        let (coarse, fine) = (worst(0.01), worst(0.005));
        assert!(coarse < 1e-2 && fine < 2e-3, "{coarse} {fine}");
        assert!(fine < coarse / 3.0, "{coarse} {fine}");
    }

    #[test]
    fn automatic_truncation_beats_full_grid() {
        let cfg = cfg();
        let g = f("exp(-x^2)");
        let auto = fit_lowfreq(&g, 10, 0.1, &cfg).unwrap();
        let full = fit_lowfreq_with(&g, 10, 0.1, &LowFreqConfig { truncation_m: Some(15.0), ..Default::default() }, &cfg).unwrap();
        let lf = LowFreqConfig::default();
        let f2 = smoothed_target(&g, &lf, &cfg).unwrap();
        assert!(smoothed_fit_error(&f2, &auto) <= smoothed_fit_error(&f2, &full));
        assert!(auto.truncation_m.unwrap() <= 15.0);
    }

    #[test]
    fn sincos_guards_and_zero() {
        let cfg = cfg();
        let zero = fit_sincos(&TargetFunction::zero(), -1.0, 1.0, 3, 0.1, 1.0, &cfg).unwrap();
        assert!(zero.cos_coeffs().iter().chain(&zero.sin_coeffs()).all(BigReal::is_zero));
        assert!(matches!(
            fit_sincos(&f("x"), -1.0, 1.0, 10, 0.1, 1.0, &cfg),
            Err(Error::FrequencyBound { .. })
        ));
        assert!(matches!(fit_sincos(&f("x"), 1.0, -1.0, 3, 0.1, 1.0, &cfg), Err(Error::InvalidDomain { .. })));
        assert!(fit_sincos(&f("exp(i*x)"), -1.0, 1.0, 3, 0.1, 1.0, &cfg).is_err());
    }

    #[test]
    fn sincos_series_is_real_part() {
        let cfg = cfg();
        let fit = fit_sincos(&f("x^2"), -1.0, 1.0, 4, 0.2, 1.0, &cfg).unwrap();
        let (cs, sn) = (fit.cos_coeffs(), fit.sin_coeffs());
        let x = 0.37;
        let direct: f64 = (0..5)
            .map(|n| {
                let w = n as f64 * 0.2 * x;
                cs[n].to_f64() * libm::cos(w) + sn[n].to_f64() * libm::sin(w)
            })
            .sum();
        assert!((fit.eval(x) - direct).abs() < 1e-9 * (1.0 + direct.abs()));
        assert!(fit.error_l2.is_finite() && fit.error_weighted.is_finite());
    }

    #[test]
    fn cosine_part_no_worse_than_full_fit() {
        let cfg = cfg();
        let one = f("1");
        let fit = fit_cosine_even(&one, 1.0, 5, 0.1, 1.0, &cfg).unwrap();
        // The cosine sum is the even part; its error over [-b, b] is √2 times
        // the error over [0, b].
        let full = fit.error_l2 * core::f64::consts::SQRT_2;
        assert!(full <= fit.sincos.error_l2 + 10.0 * cfg.abs_tol, "{full} vs {}", fit.sincos.error_l2);
        assert!(fit.coeffs().len() == 6);
        let x = 0.4;
        assert!((fit.eval(x) - fit.eval(-x)).abs() < 1e-9);
    }

    #[test]
    fn even_projection_does_not_increase_distance() {
        let cfg = cfg();
        let cat = catalog();
        let pairs = [(0, 1), (1, 2), (2, 5), (3, 6), (4, 7)];
        let b = 3.0;
        for (i, j) in pairs {
            let (g, h) = (&cat[i].1, &cat[j].1);
            let dom = Domain::interval(-b, b).with_breakpoints(g.breakpoints().iter().chain(h.breakpoints()).copied());
            let full: f64 = integrate(|x| (g.evaluate_real(x) - h.evaluate_real(x)).powi(2), &dom, &cfg).unwrap();
            let even: f64 = integrate(
                |x| {
                    let ge = 0.5 * (g.evaluate_real(x) + g.evaluate_real(-x));
                    let he = 0.5 * (h.evaluate_real(x) + h.evaluate_real(-x));
                    (ge - he).powi(2)
                },
                &dom.clone().with_breakpoints(dom.breakpoints.iter().map(|p| -p).collect::<Vec<_>>()),
                &cfg,
            )
            .unwrap();
            assert!(even <= full + 10.0 * cfg.abs_tol, "{} vs {}", cat[i].0, cat[j].0);
        }
    }
}
