//! Hermite polynomials and functions, and expansion of a target in
//! derivatives of the Gaussian: `f ≈ Σ b_n dⁿ/dxⁿ e^{-x²}`.
//!
//! Coefficients are computed through the orthonormal functions
//! `h_n(x) = H_n(x) e^{-x²/2} / √(n! 2ⁿ √π)`. Writing `Ĥ_n = h_n e^{x²/2}`,
//!
//! ```text
//! c_n = ∫ f Ĥ_n,    b_n = (-1)ⁿ c_n / √(n! 2ⁿ √π)
//! ```
//!
//! and the partial sum is `Σ c_n h_n(x) e^{-x²/2}`. Only `Ĥ_n` and the
//! logarithm of the normalisation are ever formed, so nothing overflows
//! for the orders used in practice (a few hundred).

use alloc::vec;
use alloc::vec::Vec;

use crate::funcspec::{Support, TargetFunction};
use crate::numerics::{integrate, Domain, NeumaierSum, QuadratureConfig};
use crate::{Error, Result};

const PI_QUARTER_INV: f64 = 0.751_125_544_464_942_5; // π^{-1/4}
const LN_PI: f64 = 1.144_729_885_849_400_2;

/// Physicists' Hermite polynomial by `H_{n+1} = 2x H_n - 2n H_{n-1}`.
pub fn hermite_poly(n: usize, x: f64) -> f64 {
    let (mut h0, mut h1) = (1.0, 2.0 * x);
    if n == 0 {
        return h0;
    }
    for k in 1..n {
        let h2 = 2.0 * x * h1 - 2.0 * k as f64 * h0;
        h0 = h1;
        h1 = h2;
    }
    h1
}

/// `ln √(n! 2ⁿ √π)`
pub fn log_norm(n: usize) -> f64 {
    0.5 * (libm::lgamma(n as f64 + 1.0) + n as f64 * core::f64::consts::LN_2 + 0.5 * LN_PI)
}

/// Fill `out[n] = Ĥ_n(x) = H_n(x)/√(n! 2ⁿ √π)` for `n < out.len()`.
pub fn normalized_hermite_all(x: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out[0] = PI_QUARTER_INV;
    if out.len() > 1 {
        out[1] = core::f64::consts::SQRT_2 * x * PI_QUARTER_INV;
    }
    for n in 1..out.len() - 1 {
        let nf = n as f64;
        out[n + 1] = libm::sqrt(2.0 / (nf + 1.0)) * x * out[n] - libm::sqrt(nf / (nf + 1.0)) * out[n - 1];
    }
}

/// Orthonormal Hermite function `h_n(x)`.
pub fn hermite_function(n: usize, x: f64) -> f64 {
    let mut v = vec![0.0; n + 1];
    normalized_hermite_all(x, &mut v);
    v[n] * libm::exp(-0.5 * x * x)
}

/// `dⁿ/dxⁿ e^{-x²} = (-1)ⁿ H_n(x) e^{-x²}`
pub fn gaussian_derivative(n: usize, x: f64) -> f64 {
    let mut v = vec![0.0; n + 1];
    normalized_hermite_all(x, &mut v);
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    let h = v[n];
    if h == 0.0 {
        return 0.0;
    }
    // Combine the normalisation and the Gaussian in log space.
    sign * h.signum() * libm::exp(log_norm(n) + libm::log(h.abs()) - x * x)
}

/// Grid maximum of `|dⁿ/dxⁿ e^{-x²}|` over `[-tail, tail]` (spacing 0.01),
/// inflated by 5%.
pub fn gaussian_derivative_bound(n: usize, tail: f64) -> f64 {
    let steps = libm::ceil(tail / 0.01) as i64;
    let mut best: f64 = 0.0;
    for k in -steps..=steps {
        best = best.max(gaussian_derivative(n, k as f64 * 0.01).abs());
    }
    1.05 * best
}

#[derive(Debug, Clone, PartialEq)]
pub struct HermiteCoefficients {
    /// `b_0..b_N`
    pub b: Vec<f64>,
    /// Orthonormal coefficients `c_n = (-1)ⁿ √(n! 2ⁿ √π) b_n`.
    pub c: Vec<f64>,
    /// Half-width of the truncation window, or `None` when `f e^{x²/2}` is
    /// already square integrable.
    pub truncation_m: Option<f64>,
}

impl HermiteCoefficients {
    pub fn from_orthonormal(c: Vec<f64>, truncation_m: Option<f64>) -> Self {
        let b = c
            .iter()
            .enumerate()
            .map(|(n, &cn)| {
                let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                sign * cn * libm::exp(-log_norm(n))
            })
            .collect();
        HermiteCoefficients { b, c, truncation_m }
    }

    pub fn from_b(b: Vec<f64>) -> Self {
        let c = b
            .iter()
            .enumerate()
            .map(|(n, &bn)| {
                let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                sign * bn * libm::exp(log_norm(n))
            })
            .collect();
        HermiteCoefficients { b, c, truncation_m: None }
    }

    /// Highest order `N`.
    pub fn order(&self) -> usize {
        self.b.len() - 1
    }
}

/// `|f(x)| e^{x²/2}` is tiny at the sampled far points, so `f e^{x²/2}` is
/// square integrable for practical purposes.
pub fn decays_like_gaussian<F: FnMut(f64) -> f64>(mut f: F, tail: f64) -> bool {
    [0.5, 0.75, 1.0].iter().all(|&s| {
        let x = s * tail;
        [x, -x].iter().all(|&y| {
            let v = f(y).abs();
            v == 0.0 || libm::log(v) + 0.5 * y * y < -20.0
        })
    })
}

/// Smallest `M` in `1, 2, 4, …` (capped at the tail cutoff) with
/// `‖f (1 - χ_[-M,M])‖₂ < abs_tol`.
fn truncation_radius<F: FnMut(f64) -> f64>(mut f: F, breakpoints: &[f64], cfg: &QuadratureConfig) -> Result<f64> {
    let tail = cfg.tail_cutoff;
    let start = breakpoints.iter().fold(1.0f64, |m, b| m.max(b.abs())).min(tail);
    let mut m = start;
    loop {
        if m >= tail {
            return Ok(tail);
        }
        let right = Domain::interval(m, tail).with_breakpoints(breakpoints.iter().copied());
        let left = Domain::interval(-tail, -m).with_breakpoints(breakpoints.iter().copied());
        let sq: f64 = integrate(|x| f(x).powi(2), &right, cfg)? + integrate(|x| f(x).powi(2), &left, cfg)?;
        if libm::sqrt(sq.max(0.0)) < cfg.abs_tol {
            return Ok(m);
        }
        m *= 2.0;
    }
}

/// Coefficients of a real function given as a closure over `domain`.
/// The caller has already applied any truncation.
pub fn compute_bn_on<F>(mut f: F, domain: &Domain, n_max: usize, truncation_m: Option<f64>, cfg: &QuadratureConfig) -> Result<HermiteCoefficients>
where
    F: FnMut(f64) -> f64,
{
    let mut basis = vec![0.0; n_max + 1];
    let c: Vec<f64> = integrate(
        |x| {
            let v = f(x);
            if v == 0.0 {
                return vec![0.0; n_max + 1];
            }
            normalized_hermite_all(x, &mut basis);
            basis.iter().map(|h| v * h).collect()
        },
        domain,
        cfg,
    )?;
    Ok(HermiteCoefficients::from_orthonormal(c, truncation_m))
}

/// `b_0..b_N` for `f`, truncating to `[-M, M]` only when `f e^{x²/2}` is not
/// square integrable. `m_override` forces a truncation radius.
pub fn compute_bn(f: &TargetFunction, n_max: usize, cfg: &QuadratureConfig) -> Result<HermiteCoefficients> {
    compute_bn_truncated(f, n_max, None, cfg)
}

pub fn compute_bn_truncated(
    f: &TargetFunction,
    n_max: usize,
    m_override: Option<f64>,
    cfg: &QuadratureConfig,
) -> Result<HermiteCoefficients> {
    cfg.validate()?;
    if f.is_complex() {
        return Err(Error::InvalidParameter("Hermite coefficients need a real target".into()));
    }
    let g = |x: f64| f.evaluate_real(x);
    if let Some(m) = m_override {
        if !(m.is_finite() && m > 0.0) {
            return Err(Error::InvalidParameter(alloc::format!("truncation radius must be positive, got {m}")));
        }
        let domain = Domain::interval(-m, m).with_breakpoints(f.breakpoints().iter().copied());
        return compute_bn_on(g, &domain, n_max, Some(m), cfg);
    }
    let (domain, m) = match f.support() {
        Support::Empty => return Ok(HermiteCoefficients::from_orthonormal(vec![0.0; n_max + 1], None)),
        Support::Interval(..) => (f.domain(), None),
        Support::WholeLine if decays_like_gaussian(g, cfg.tail_cutoff) => (f.domain(), None),
        Support::WholeLine => {
            let m = truncation_radius(g, f.breakpoints(), cfg)?;
            (Domain::interval(-m, m).with_breakpoints(f.breakpoints().iter().copied()), Some(m))
        }
    };
    compute_bn_on(g, &domain, n_max, m, cfg)
}

/// `‖(f - S_N) e^{x²/2}‖₂`, the norm in which partial sums are orthogonal
/// projections and hence improve monotonically with `N`.
pub fn expansion_weighted_error(f: &TargetFunction, coeffs: &HermiteCoefficients, cfg: &QuadratureConfig) -> Result<f64> {
    let domain = match coeffs.truncation_m {
        Some(m) => Domain::interval(-m, m),
        None => Domain::whole_line(),
    }
    .with_breakpoints(f.breakpoints().iter().copied());
    let mut basis = vec![0.0; coeffs.c.len()];
    let s: f64 = integrate(
        |x| {
            normalized_hermite_all(x, &mut basis);
            let proj: NeumaierSum = coeffs.c.iter().zip(&basis).map(|(c, h)| c * h).collect();
            let v = f.evaluate_real(x);
            let lifted = if v == 0.0 { 0.0 } else { v * libm::exp(0.5 * x * x) };
            (lifted - proj.sum() * libm::exp(-0.5 * x * x)).powi(2)
        },
        &domain,
        cfg,
    )?;
    Ok(libm::sqrt(s.max(0.0)))
}

/// Partial sum `Σ b_n dⁿ/dxⁿ e^{-x²}` at `x`.
pub fn eval_hermite_expansion(coeffs: &HermiteCoefficients, x: f64) -> f64 {
    let mut basis = vec![0.0; coeffs.c.len()];
    normalized_hermite_all(x, &mut basis);
    let g = libm::exp(-x * x);
    let s: NeumaierSum = coeffs.c.iter().zip(&basis).map(|(c, h)| c * h).collect();
    s.sum() * g
}

/// `‖f - Σ b_n dⁿ/dxⁿ e^{-x²}‖₂`
pub fn expansion_l2_error(f: &TargetFunction, coeffs: &HermiteCoefficients, cfg: &QuadratureConfig) -> Result<f64> {
    let domain = Domain::whole_line().with_breakpoints(f.breakpoints().iter().copied());
    let s: f64 = integrate(|x| (f.evaluate_real(x) - eval_hermite_expansion(coeffs, x)).powi(2), &domain, cfg)?;
    Ok(libm::sqrt(s.max(0.0)))
}
