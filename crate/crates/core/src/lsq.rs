//! Continuous least squares over the translates `e^{-(x-nt)²}`.
//!
//! Minimising `E₂(a) = ∫ (f - Σ a_n e^{-(x-nt)²})²` leads to the normal
//! equations `M a = b` with
//!
//! ```text
//! M[j][k] = √(π/2) e^{-(j-k)² t²/2},   b_j = ∫ f(x) e^{-(x-jt)²} dx
//! ```
//!
//! `M` is a Gram matrix of nearly parallel vectors when `t` is small, so its
//! condition number explodes with `N`. Everything here runs in [`BigReal`].

use alloc::format;
use alloc::vec::Vec;

use crate::funcspec::{Support, TargetFunction};
use crate::gaussfit::{l2_fit_error, GaussianCombination};
use crate::numerics::hpquad::integrate_panels;
use crate::numerics::{condition_estimate, solve_dense, BigCtx, BigReal, QuadratureConfig};
use crate::{Error, Result};

/// Default working precision for `N ≤ 5`.
pub const DEFAULT_DIGITS: u32 = 50;
const GUARD_DIGITS: u32 = 10;
const MAX_PANEL_WIDTH: f64 = 2.0;

#[derive(Debug, Clone)]
pub struct NormalSystem {
    pub m: Vec<Vec<BigReal>>,
    pub rhs: Vec<BigReal>,
    /// `‖f‖₂²` over the integration window, for evaluating `E₂` exactly.
    pub f_norm_sq: BigReal,
    pub t: f64,
    pub n: usize,
    pub precision_digits: u32,
}

/// Normal-equation matrix alone.
pub fn normal_matrix(n: usize, t: f64, digits: u32) -> Result<Vec<Vec<BigReal>>> {
    check_step(t)?;
    let mut ctx = BigCtx::new(digits + GUARD_DIGITS);
    let pi = ctx.pi();
    let diag = ctx.sqrt(&pi.mul_f64(0.5));
    let tt = ctx.num(t);
    let half_tt = (&tt * &tt).mul_f64(-0.5);
    // Entries depend only on |j - k|.
    let band: Vec<BigReal> = (0..=n)
        .map(|d| {
            let e = ctx.exp(&(&half_tt * &ctx.int((d * d) as i64)));
            (&diag * &e).with_digits(digits)
        })
        .collect();
    Ok((0..=n).map(|j| (0..=n).map(|k| band[j.abs_diff(k)].clone()).collect()).collect())
}

fn check_step(t: f64) -> Result<()> {
    if t == 0.0 {
        return Err(Error::ZeroStep);
    }
    if !t.is_finite() {
        return Err(Error::InvalidParameter(format!("step must be finite, got {t}")));
    }
    Ok(())
}

/// Integration window for the right-hand side: the Gaussians are below
/// `10^{-p}` relative outside it.
fn window(f: &TargetFunction, n: usize, t: f64, digits: u32, cfg: &QuadratureConfig) -> Option<(f64, f64)> {
    let r = libm::sqrt(digits as f64 * core::f64::consts::LN_10 + 10.0) + 1.0;
    let end = n as f64 * t;
    let (c0, c1) = (end.min(0.0) - r, end.max(0.0) + r);
    match f.support() {
        Support::Empty => None,
        Support::Interval(a, b) => {
            let (lo, hi) = (a.max(c0), b.min(c1));
            (lo < hi).then_some((lo, hi))
        }
        Support::WholeLine => Some((c0.min(-cfg.tail_cutoff), c1.max(cfg.tail_cutoff))),
    }
}

fn panel_edges(lo: f64, hi: f64, breaks: &[f64]) -> Vec<f64> {
    let mut edges = Vec::new();
    let mut cuts: Vec<f64> = breaks.iter().copied().filter(|&b| b > lo && b < hi).collect();
    cuts.push(hi);
    let mut a = lo;
    edges.push(a);
    for c in cuts {
        let pieces = libm::ceil((c - a) / MAX_PANEL_WIDTH).max(1.0) as usize;
        for i in 1..=pieces {
            edges.push(if i == pieces { c } else { a + (c - a) * i as f64 / pieces as f64 });
        }
        a = c;
    }
    edges
}

/// Build `M`, `b` and `‖f‖²` at `precision` digits.
///
/// The right-hand side is integrated to `min(abs_tol, 10^{-precision/2})`.
pub fn build_normal_system(
    f: &TargetFunction,
    n: usize,
    t: f64,
    precision: u32,
    cfg: &QuadratureConfig,
) -> Result<NormalSystem> {
    check_step(t)?;
    if precision < 15 {
        return Err(Error::InvalidParameter(format!("precision must be at least 15 digits, got {precision}")));
    }
    if f.is_complex() {
        return Err(Error::InvalidParameter("least squares needs a real target".into()));
    }
    cfg.validate()?;
    let m = normal_matrix(n, t, precision)?;
    let work = precision + GUARD_DIGITS;
    let mut ctx = BigCtx::new(work);
    let zero = BigReal::zero(precision);
    let Some((lo, hi)) = window(f, n, t, precision, cfg) else {
        return Ok(NormalSystem { m, rhs: alloc::vec![zero.clone(); n + 1], f_norm_sq: zero, t, n, precision_digits: precision });
    };
    let log10_tol = libm::log10(cfg.abs_tol).min(-(precision as f64) / 2.0);
    let edges = panel_edges(lo, hi, f.breakpoints());

    // e^{-(x-jt)²} = e^{-x²} (e^{2tx})^j e^{-j²t²}
    let tb = ctx.num(t);
    let shift: Vec<BigReal> = (0..=n)
        .map(|j| {
            let jt = &tb * &ctx.int(j as i64);
            ctx.exp(&-(&jt * &jt))
        })
        .collect();
    let mut failure = None;
    let sums = integrate_panels(&edges, n + 2, log10_tol, cfg.max_depth, &mut ctx, |x, ctx| {
        let fx = match f.evaluate_big(x, ctx) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                ctx.zero()
            }
        };
        let mut out = Vec::with_capacity(n + 2);
        let mut g = &fx * &ctx.exp(&-(x * x));
        let step = ctx.exp(&(&tb * x).mul_f64(2.0));
        for s in &shift {
            out.push(&g * s);
            g = &g * &step;
        }
        out.push(&fx * &fx);
        out
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    let mut sums: Vec<BigReal> = sums.iter().map(|v| v.with_digits(precision)).collect();
    let f_norm_sq = sums.pop().unwrap_or(zero);
    Ok(NormalSystem { m, rhs: sums, f_norm_sq, t, n, precision_digits: precision })
}

impl NormalSystem {
    /// `E₂(a) = ‖f‖² - 2 aᵀb + aᵀMa`, exact up to the accuracy of `b` and `‖f‖²`.
    pub fn e2(&self, a: &[BigReal]) -> Result<BigReal> {
        if a.len() != self.n + 1 {
            return Err(Error::DimensionMismatch(format!("{} weights for N = {}", a.len(), self.n)));
        }
        let d = a.iter().map(BigReal::precision_digits).max().unwrap_or(0).max(self.precision_digits);
        let mut acc = self.f_norm_sq.with_digits(d);
        for (j, aj) in a.iter().enumerate() {
            let aj = aj.with_digits(d);
            let mut ma = BigReal::zero(d);
            for (mjk, ak) in self.m[j].iter().zip(a) {
                ma = &ma + &(&mjk.with_digits(d) * &ak.with_digits(d));
            }
            acc = &acc + &(&aj * &(&ma - &self.rhs[j].with_digits(d).mul_f64(2.0)));
        }
        Ok(acc)
    }

    /// Change of `E₂` when `a_j` moves by `delta`: `2δ(Ma - b)_j + δ² M_jj`.
    pub fn e2_change(&self, a: &[BigReal], j: usize, delta: f64) -> Result<BigReal> {
        if a.len() != self.n + 1 || j > self.n {
            return Err(Error::DimensionMismatch(format!("index {j} for N = {}", self.n)));
        }
        let d = a.iter().map(BigReal::precision_digits).max().unwrap_or(0).max(self.precision_digits);
        let mut g = -self.rhs[j].with_digits(d);
        for (mjk, ak) in self.m[j].iter().zip(a) {
            g = &g + &(&mjk.with_digits(d) * &ak.with_digits(d));
        }
        let dl = BigReal::from_f64(delta, d);
        Ok(&(&g * &dl).mul_f64(2.0) + &(&(&dl * &dl) * &self.m[j][j].with_digits(d)))
    }
}

#[derive(Debug, Clone)]
pub struct LeastSquaresFit {
    pub combination: GaussianCombination,
    pub condition: f64,
    /// `‖M a - b‖∞`
    pub residual_inf: f64,
    pub rhs_inf: f64,
    /// Smallest `c` with residual `≤ 10^{c-p} ‖b‖∞`.
    pub residual_constant: i32,
    /// `E₂` at the minimiser.
    pub e2: f64,
}

/// Solve the normal equations.
///
/// Fails with [`Error::IllConditioned`] when the condition number leaves
/// fewer than two correct digits at the system's precision.
pub fn solve_least_squares(sys: &NormalSystem) -> Result<LeastSquaresFit> {
    let p = sys.precision_digits;
    let condition = match condition_estimate(&sys.m) {
        Ok(c) => c,
        Err(Error::Singular { .. }) => {
            return Err(Error::IllConditioned { condition: f64::INFINITY, digits: p });
        }
        Err(e) => return Err(e),
    };
    let log_cond = libm::log10(condition);
    if log_cond.is_nan() || log_cond >= p as f64 - 2.0 {
        return Err(Error::IllConditioned { condition, digits: p });
    }
    let sol = match solve_dense(&sys.m, &sys.rhs) {
        Ok(s) => s,
        Err(Error::Singular { .. }) => return Err(Error::IllConditioned { condition, digits: p }),
        Err(e) => return Err(e),
    };
    let e2 = sys.e2(&sol.x)?.to_f64().max(0.0);
    Ok(LeastSquaresFit {
        combination: GaussianCombination::new(sys.t, sol.x)?,
        condition,
        residual_inf: sol.residual_inf,
        rhs_inf: sol.rhs_inf,
        residual_constant: sol.residual_constant,
        e2,
    })
}

/// Build and solve in one step.
pub fn fit_least_squares(
    f: &TargetFunction,
    n: usize,
    t: f64,
    precision: u32,
    cfg: &QuadratureConfig,
) -> Result<(NormalSystem, LeastSquaresFit)> {
    let sys = build_normal_system(f, n, t, precision, cfg)?;
    let fit = solve_least_squares(&sys)?;
    Ok((sys, fit))
}

/// `E₂^{1/2}` by ordinary quadrature.
pub fn least_squares_error(f: &TargetFunction, c: &GaussianCombination, cfg: &QuadratureConfig) -> Result<f64> {
    l2_fit_error(f, c, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussfit::fit;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    fn f(s: &str) -> TargetFunction {
        TargetFunction::parse(s).unwrap()
    }

    #[test]
    fn matrix_entries() {
        let m = normal_matrix(1, 0.01, 40).unwrap();
        let d = libm::sqrt(core::f64::consts::PI / 2.0);
        assert!((m[0][0].to_f64() - 1.2533141373155003).abs() < 1e-15);
        assert!((m[1][1].to_f64() - d).abs() < 1e-15);
        assert!((m[0][1].to_f64() - d * libm::exp(-0.00005)).abs() < 1e-15);
        let m = normal_matrix(6, 0.3, 30).unwrap();
        for j in 0..7 {
            for k in 0..7 {
                assert_eq!(m[j][k].to_f64(), m[k][j].to_f64());
            }
        }
        assert!(matches!(normal_matrix(2, 0.0, 30), Err(Error::ZeroStep)));
    }

    #[test]
    fn rhs_matches_closed_form() {
        // ∫ e^{-(x-c)²} e^{-(x-jt)²} = √(π/2) e^{-(c-jt)²/2}
        let sys = build_normal_system(&f("gauss(0.3)"), 3, 0.2, 40, &cfg()).unwrap();
        for (j, b) in sys.rhs.iter().enumerate() {
            let d = 0.3 - 0.2 * j as f64;
            let e = libm::sqrt(core::f64::consts::PI / 2.0) * libm::exp(-d * d / 2.0);
            assert!((b.to_f64() - e).abs() < 1e-15, "j = {j}");
        }
        // ‖e^{-(x-c)²}‖² = √(π/2)
        assert!((sys.f_norm_sq.to_f64() - libm::sqrt(core::f64::consts::PI / 2.0)).abs() < 1e-15);
        // Indicator: ∫_{-1}^{2} e^{-x²} = √π/2 (erf 2 + erf 1)
        let sys = build_normal_system(&f("chi(-1,2)"), 0, 0.5, 30, &cfg()).unwrap();
        let e = libm::sqrt(core::f64::consts::PI) / 2.0 * (libm::erf(2.0) + libm::erf(1.0));
        assert!((sys.rhs[0].to_f64() - e).abs() < 1e-15);
    }

    #[test]
    fn zero_target() {
        let sys = build_normal_system(&TargetFunction::zero(), 3, 0.1, 30, &cfg()).unwrap();
        assert!(sys.rhs.iter().all(BigReal::is_zero));
        let fit = solve_least_squares(&sys).unwrap();
        assert!(fit.combination.weights().iter().all(BigReal::is_zero));
    }

    #[test]
    fn target_in_span_gives_unit_vector() {
        let cfg = cfg();
        let t = 0.25;
        for j in 0..4usize {
            let g = f(&format!("gauss({})", j as f64 * t));
            let (_, fit) = fit_least_squares(&g, 3, t, 40, &cfg).unwrap();
            let a = fit.combination.weights_f64();
            for (k, v) in a.iter().enumerate() {
                let e = if k == j { 1.0 } else { 0.0 };
                assert!((v - e).abs() < 1e-12, "j = {j}: {a:?}");
            }
            assert!(fit.e2 < 1e-24);
            assert!(least_squares_error(&g, &fit.combination, &cfg).unwrap() < 1e-6);
        }
    }

    #[test]
    fn beats_difference_fit() {
        let cfg = cfg();
        let g = f("(x-1)^2*chi(-1,2)");
        let (sys, fit) = fit_least_squares(&g, 5, 0.01, 120, &cfg).unwrap();
        let thm = crate::gaussfit::fit(&g, 5, 0.01, &cfg).unwrap();
        let e_thm = sys.e2(thm.weights()).unwrap().to_f64();
        assert!(fit.e2 <= e_thm, "{} vs {e_thm}", fit.e2);
        // Same comparison through plain quadrature.
        let q_lsq = least_squares_error(&g, &fit.combination, &cfg).unwrap();
        let q_thm = least_squares_error(&g, &thm, &cfg).unwrap();
        assert!(q_lsq <= q_thm + 10.0 * cfg.abs_tol);
        assert!((q_lsq * q_lsq - fit.e2).abs() < 1e-8);
        assert!((q_thm * q_thm - e_thm).abs() < 1e-8);
    }

    #[test]
    fn far_indicator_never_worse_than_zero() {
        let cfg = cfg();
        let g = f("chi(-11,-10)");
        let (_, fit) = fit_least_squares(&g, 5, 0.01, 60, &cfg).unwrap();
        assert!(fit.e2.sqrt() <= 1.0);
        assert!(least_squares_error(&g, &fit.combination, &cfg).unwrap() <= 1.0 + 10.0 * cfg.abs_tol);
    }

    #[test]
    fn first_order_optimality_and_residual() {
        let cfg = cfg();
        for (name, g) in crate::funcspec::catalog() {
            let p = 50;
            let (sys, fit) = fit_least_squares(&g, 4, 0.1, p, &cfg).unwrap();
            let b_inf = fit.rhs_inf;
            assert!(fit.residual_inf <= libm::pow(10.0, 5.0 - p as f64) * b_inf, "{name}");
            let a = fit.combination.weights();
            for j in 0..=4 {
                for d in [1e-6, -1e-6] {
                    let change = sys.e2_change(a, j, d).unwrap().to_f64();
                    assert!(change >= -1e-12, "{name} j={j}: {change}");
                }
            }
        }
    }

    #[test]
    fn e2_change_matches_difference() {
        let sys = build_normal_system(&f("(x-1)^2*chi(-1,2)"), 3, 0.2, 40, &cfg()).unwrap();
        let a: Vec<BigReal> = [0.3, -0.1, 0.7, 0.2].iter().map(|&v| BigReal::from_f64(v, 40)).collect();
        let base = sys.e2(&a).unwrap();
        let mut b = a.clone();
        b[2] = &b[2] + &BigReal::from_f64(0.125, 40);
        let diff = &sys.e2(&b).unwrap() - &base;
        let change = sys.e2_change(&a, 2, 0.125).unwrap();
        assert!((&diff - &change).log10_abs() < -30.0);
    }

    #[test]
    fn monotone_in_n() {
        let cfg = cfg();
        let g = f("(x-1)^2*chi(-1,2)");
        let mut last = f64::INFINITY;
        for n in 2..=7 {
            let (_, fit) = fit_least_squares(&g, n, 0.01, 120, &cfg).unwrap();
            assert!(fit.e2 <= last * (1.0 + 1e-12), "N = {n}: {} > {last}", fit.e2);
            last = fit.e2;
        }
    }

    #[test]
    fn conditioning_grows_with_n() {
        let mut last = 0.0;
        for n in 2..=7 {
            let c = condition_estimate(&normal_matrix(n, 0.01, 120).unwrap()).unwrap();
            assert!(c > last, "N = {n}");
            last = c;
        }
        assert!(last > 1e10);
    }

    #[test]
    fn insufficient_precision_is_reported() {
        let sys = build_normal_system(&f("chi(-1,2)"), 7, 0.01, 20, &cfg()).unwrap();
        match solve_least_squares(&sys) {
            Err(e @ Error::IllConditioned { .. }) => {
                assert!(alloc::string::ToString::to_string(&e).contains("increase precision_digits"))
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn lsq_agrees_with_difference_fit_in_span() {
        // e^{-x²} lies in every span, so both methods recover it.
        let cfg = cfg();
        let g = f("exp(-x^2)");
        let (_, ls) = fit_least_squares(&g, 3, 0.05, 50, &cfg).unwrap();
        let th = fit(&g, 3, 0.05, &cfg).unwrap();
        for (a, b) in ls.combination.weights_f64().iter().zip(th.weights_f64()) {
            assert!((a - b).abs() < 1e-8);
        }
    }
}
