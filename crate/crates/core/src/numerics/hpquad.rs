//! Gauss–Legendre quadrature carried out entirely in [`BigReal`].
//!
//! Used where the double-precision integrator cannot reach the accuracy the
//! extended-precision solvers need. The integrand is vector valued so that a
//! family of related integrals shares every function evaluation.

use alloc::vec::Vec;

use super::bigreal::{BigCtx, BigReal};
use crate::{Error, Result};

/// Nodes and weights of an `m`-point rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<BigReal>,
    weights: Vec<BigReal>,
}

impl GaussLegendre {
    /// Rule with `m` points, accurate to the precision of `ctx`.
    pub fn new(m: usize, ctx: &mut BigCtx) -> Self {
        let m = m.max(2);
        let tol = -(ctx.digits() as f64) - 2.0;
        let mut nodes = Vec::with_capacity(m);
        let mut weights = Vec::with_capacity(m);
        let one = ctx.one();
        for i in 0..m / 2 {
            let guess = libm::cos(core::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5));
            let mut x = ctx.num(guess);
            let mut dp = one.clone();
            for _ in 0..64 {
                let (p, d) = legendre(m, &x, ctx);
                dp = d;
                let dx = &p / &dp;
                x = &x - &dx;
                if dx.is_zero() || dx.log10_abs() < tol {
                    let (_, d) = legendre(m, &x, ctx);
                    dp = d;
                    break;
                }
            }
            // w = 2 / ((1 - x²) P'(x)²)
            let w = &ctx.int(2) / &(&(&one - &(&x * &x)) * &(&dp * &dp));
            nodes.push(x.clone());
            weights.push(w.clone());
            nodes.push(-x);
            weights.push(w);
        }
        if m % 2 == 1 {
            let (_, dp) = legendre(m, &ctx.zero(), ctx);
            nodes.push(ctx.zero());
            weights.push(&ctx.int(2) / &(&dp * &dp));
        }
        GaussLegendre { nodes, weights }
    }

    /// Point count suited to `digits` decimal digits on panels of unit width.
    pub fn for_digits(digits: u32, ctx: &mut BigCtx) -> Self {
        Self::new(digits as usize / 4 + 20, ctx)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `(node, weight)` pairs rounded to `f64`.
    pub fn to_f64(&self) -> Vec<(f64, f64)> {
        self.nodes.iter().zip(&self.weights).map(|(x, w)| (x.to_f64(), w.to_f64())).collect()
    }

    /// Apply the rule on `[a, b]` to a vector-valued integrand of length `dim`.
    pub fn apply<F>(&self, a: &BigReal, b: &BigReal, dim: usize, ctx: &mut BigCtx, f: &mut F) -> Vec<BigReal>
    where
        F: FnMut(&BigReal, &mut BigCtx) -> Vec<BigReal>,
    {
        let half = (b - a).mul_f64(0.5);
        let mid = (a + b).mul_f64(0.5);
        let mut acc = alloc::vec![ctx.zero(); dim];
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            let xx = &mid + &(&half * x);
            let v = f(&xx, ctx);
            for (s, vi) in acc.iter_mut().zip(&v) {
                *s = &*s + &(w * vi);
            }
        }
        acc.iter().map(|s| s * &half).collect()
    }
}

/// `(P_m(x), P'_m(x))` by the three-term recurrence.
fn legendre(m: usize, x: &BigReal, ctx: &BigCtx) -> (BigReal, BigReal) {
    let mut p0 = ctx.one();
    let mut p1 = x.clone();
    for k in 1..m {
        let kk = k as i64;
        let p2 = &(&(&ctx.int(2 * kk + 1) * x) * &p1 - &(&ctx.int(kk) * &p0)) / &ctx.int(kk + 1);
        p0 = p1;
        p1 = p2;
    }
    let one = ctx.one();
    let dp = &(&ctx.int(m as i64) * &(&(x * &p1) - &p0)) / &(&(x * x) - &one);
    (p1, dp)
}

fn max_abs_log10(v: &[BigReal]) -> f64 {
    v.iter().map(BigReal::log10_abs).fold(f64::NEG_INFINITY, f64::max)
}

/// Integrate a vector-valued `f` over consecutive panels given by `edges`.
///
/// Each panel is accepted once its value agrees with the sum over its two
/// halves to within its share of `10^{log10_tol}` (absolute, in the max
/// norm); otherwise it is bisected, at most `max_depth` times.
pub fn integrate_panels<F>(
    edges: &[f64],
    dim: usize,
    log10_tol: f64,
    max_depth: u32,
    ctx: &mut BigCtx,
    mut f: F,
) -> Result<Vec<BigReal>>
where
    F: FnMut(&BigReal, &mut BigCtx) -> Vec<BigReal>,
{
    if edges.len() < 2 {
        return Ok(alloc::vec![ctx.zero(); dim]);
    }
    let width = edges[edges.len() - 1] - edges[0];
    if !(width.is_finite() && width > 0.0) {
        return Err(Error::InvalidDomain { lo: edges[0], hi: edges[edges.len() - 1] });
    }
    let rule = GaussLegendre::for_digits(ctx.digits(), ctx);
    let mut total = alloc::vec![ctx.zero(); dim];
    let mut stack: Vec<(BigReal, BigReal, u32, Vec<BigReal>)> = Vec::new();
    for w in edges.windows(2) {
        if w[1] <= w[0] {
            continue;
        }
        let (a, b) = (ctx.num(w[0]), ctx.num(w[1]));
        let whole = rule.apply(&a, &b, dim, ctx, &mut f);
        stack.push((a, b, 0, whole));
        while let Some((a, b, depth, whole)) = stack.pop() {
            let mid = (&a + &b).mul_f64(0.5);
            let left = rule.apply(&a, &mid, dim, ctx, &mut f);
            let right = rule.apply(&mid, &b, dim, ctx, &mut f);
            let halves: Vec<BigReal> = left.iter().zip(&right).map(|(l, r)| l + r).collect();
            let diff: Vec<BigReal> = halves.iter().zip(&whole).map(|(h, w)| h - w).collect();
            let share = libm::log10((&b - &a).to_f64() / width);
            let err = max_abs_log10(&diff);
            if err <= log10_tol + share {
                for (s, h) in total.iter_mut().zip(&halves) {
                    *s = &*s + h;
                }
            } else if depth >= max_depth {
                return Err(Error::NonConvergence {
                    estimate: libm::pow(10.0, err),
                    tolerance: libm::pow(10.0, log10_tol + share),
                });
            } else {
                stack.push((mid.clone(), b, depth + 1, right));
                stack.push((a, mid, depth + 1, left));
            }
        }
    }
    Ok(total)
}
