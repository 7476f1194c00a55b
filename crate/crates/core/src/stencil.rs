//! Finite-difference stencils on arbitrary distinct nodes.
//!
//! For nodes `k_0..k_n` and derivative order `k` the coefficients solve
//!
//! ```text
//! Σ_i c_i k_iʲ / j! = δ_jk,   j = 0..n
//! ```
//!
//! so that `g⁽ᵏ⁾(x) ≈ t^{-k} Σ c_i g(x + k_i t)` with error `O(t^{n+1-k})`.
//! Real nodes are solved exactly over the rationals (every `f64` is a dyadic
//! rational); complex nodes in 40-digit complex arithmetic.

use alloc::format;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::hermite::{gaussian_derivative, gaussian_derivative_bound};
use crate::numerics::linalg::solve_exact;
use crate::numerics::{integrate, BigComplex, Domain, NeumaierSum, QuadratureConfig};
use crate::{Error, Result};

const COMPLEX_DIGITS: u32 = 40;

#[derive(Debug, Clone, PartialEq)]
pub struct Stencil {
    pub deriv_order: usize,
    pub nodes: Vec<Complex64>,
    pub coeffs: Vec<Complex64>,
    /// `n + 1 - k`
    pub order_of_accuracy: usize,
}

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |p, i| p * i as f64)
}

fn check_nodes(k: usize, nodes: &[Complex64]) -> Result<()> {
    if nodes.len() < k + 1 {
        return Err(Error::OrderTooHigh { order: k, needed: k + 1, got: nodes.len() });
    }
    for (i, a) in nodes.iter().enumerate() {
        if !(a.re.is_finite() && a.im.is_finite()) {
            return Err(Error::InvalidParameter(format!("node {i} is not finite")));
        }
        if nodes[..i].contains(a) {
            return Err(Error::DuplicateNodes(i));
        }
    }
    Ok(())
}

fn rational(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite node")
}

fn solve_real(k: usize, nodes: &[f64]) -> Result<Vec<f64>> {
    let n = nodes.len();
    let q: Vec<BigRational> = nodes.iter().map(|&x| rational(x)).collect();
    let mut rows = Vec::with_capacity(n);
    let mut powers: Vec<BigRational> = alloc::vec![BigRational::one(); n];
    let mut fact = BigInt::one();
    for j in 0..n {
        if j > 0 {
            fact *= BigInt::from(j);
            for (p, x) in powers.iter_mut().zip(&q) {
                *p = &*p * x;
            }
        }
        let denom = BigRational::from_integer(fact.clone());
        rows.push(powers.iter().map(|p| p / &denom).collect::<Vec<_>>());
    }
    let rhs: Vec<BigRational> =
        (0..n).map(|j| if j == k { BigRational::one() } else { BigRational::zero() }).collect();
    let c = solve_exact(&rows, &rhs, None)?;
    Ok(c.iter().map(|v| v.to_f64().unwrap_or(f64::NAN)).collect())
}

fn solve_complex(k: usize, nodes: &[Complex64]) -> Result<Vec<Complex64>> {
    let d = COMPLEX_DIGITS;
    let n = nodes.len();
    let z: Vec<BigComplex> = nodes.iter().map(|&v| BigComplex::from_c64(v, d)).collect();
    let one = BigComplex::from_c64(Complex64::new(1.0, 0.0), d);
    let zero = BigComplex::zero(d);
    let mut powers = alloc::vec![one.clone(); n];
    let mut fact = 1.0f64;
    let mut rows = Vec::with_capacity(n);
    for j in 0..n {
        if j > 0 {
            fact *= j as f64;
            for (p, x) in powers.iter_mut().zip(&z) {
                *p = &*p * x;
            }
        }
        let f = BigComplex::from_c64(Complex64::new(fact, 0.0), d);
        rows.push(powers.iter().map(|p| p / &f).collect::<Vec<_>>());
    }
    let rhs: Vec<BigComplex> = (0..n).map(|j| if j == k { one.clone() } else { zero.clone() }).collect();
    let c = solve_exact(&rows, &rhs, Some(d))?;
    Ok(c.iter().map(BigComplex::to_c64).collect())
}

/// Coefficients for the `k`-th derivative on the given nodes.
pub fn solve_stencil(k: usize, nodes: &[Complex64]) -> Result<Stencil> {
    check_nodes(k, nodes)?;
    let coeffs = if nodes.iter().all(|z| z.im == 0.0) {
        let re: Vec<f64> = nodes.iter().map(|z| z.re).collect();
        solve_real(k, &re)?.into_iter().map(|c| Complex64::new(c, 0.0)).collect()
    } else {
        solve_complex(k, nodes)?
    };
    Ok(Stencil { deriv_order: k, nodes: nodes.to_vec(), order_of_accuracy: nodes.len() - k, coeffs })
}

/// [`solve_stencil`] for real nodes.
pub fn solve_stencil_real(k: usize, nodes: &[f64]) -> Result<Stencil> {
    let z: Vec<Complex64> = nodes.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    solve_stencil(k, &z)
}

/// `g⁽ⁿ⁾(x) ≈ t^{-n} Σ (-1)^i C(n,i) g(x - i t)`
pub fn backward_difference_stencil(n: usize) -> Stencil {
    let mut coeffs = Vec::with_capacity(n + 1);
    let mut binom = 1.0f64;
    for i in 0..=n {
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        coeffs.push(Complex64::new(sign * binom, 0.0));
        binom = binom * (n - i) as f64 / (i + 1) as f64;
    }
    let nodes = (0..=n).map(|i| Complex64::new(-(i as f64), 0.0)).collect();
    Stencil { deriv_order: n, nodes, coeffs, order_of_accuracy: 1 }
}

impl Stencil {
    /// Number of points minus one.
    pub fn n(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn is_real(&self) -> bool {
        self.nodes.iter().chain(&self.coeffs).all(|z| z.im == 0.0)
    }

    pub fn real_coeffs(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.re).collect()
    }

    /// `|Σ c_i k_iʲ/j! - δ_jk|` for `j = 0..n`, evaluated in 60-digit
    /// arithmetic from the stored coefficients.
    pub fn moment_residuals(&self) -> Vec<f64> {
        let d = 60;
        let z: Vec<BigComplex> = self.nodes.iter().map(|&v| BigComplex::from_c64(v, d)).collect();
        let c: Vec<BigComplex> = self.coeffs.iter().map(|&v| BigComplex::from_c64(v, d)).collect();
        let mut terms = c.clone();
        let mut out = Vec::with_capacity(self.nodes.len());
        for j in 0..self.nodes.len() {
            if j > 0 {
                let jj = BigComplex::from_c64(Complex64::new(j as f64, 0.0), d);
                for (t, x) in terms.iter_mut().zip(&z) {
                    *t = &(&*t * x) / &jj;
                }
            }
            let mut s = terms.iter().fold(BigComplex::zero(d), |s, t| &s + t);
            if j == self.deriv_order {
                s = &s - &BigComplex::from_c64(Complex64::new(1.0, 0.0), d);
            }
            out.push(s.to_c64().norm());
        }
        out
    }

    /// `Σ |c_i| |k_i|^{n+1} / (n+1)!`, the constant in the truncation bound.
    pub fn error_constant(&self) -> f64 {
        let n1 = self.nodes.len() as i32;
        let s: NeumaierSum = self.coeffs.iter().zip(&self.nodes).map(|(c, k)| c.norm() * k.norm().powi(n1)).collect();
        s.sum() / factorial(self.nodes.len())
    }
}

/// `t^{-k} Σ c_i g(x + k_i t)` for a function analytic at the points used.
pub fn apply_stencil<G>(s: &Stencil, mut g: G, x: f64, t: f64) -> Result<Complex64>
where
    G: FnMut(Complex64) -> Complex64,
{
    if t == 0.0 {
        return Err(Error::ZeroStep);
    }
    let (mut re, mut im) = (NeumaierSum::new(), NeumaierSum::new());
    for (c, k) in s.coeffs.iter().zip(&s.nodes) {
        let v = c * g(Complex64::new(x, 0.0) + k * t);
        re.add(v.re);
        im.add(v.im);
    }
    Ok(Complex64::new(re.sum(), im.sum()) / libm::pow(t, s.deriv_order as f64))
}

/// [`apply_stencil`] for a real stencil and a real function.
pub fn apply_stencil_real<G>(s: &Stencil, mut g: G, x: f64, t: f64) -> Result<f64>
where
    G: FnMut(f64) -> f64,
{
    if t == 0.0 {
        return Err(Error::ZeroStep);
    }
    if !s.is_real() {
        return Err(Error::InvalidParameter("complex stencil needs a complex-analytic function".into()));
    }
    let sum: NeumaierSum = s.coeffs.iter().zip(&s.nodes).map(|(c, k)| c.re * g(x + k.re * t)).collect();
    Ok(sum.sum() / libm::pow(t, s.deriv_order as f64))
}

/// `|t|^{n+1-k}/(n+1)! · max_deriv · Σ |c_i| |k_i|^{n+1}`
pub fn truncation_error_bound(s: &Stencil, max_deriv: f64, t: f64) -> Result<f64> {
    if t == 0.0 {
        return Err(Error::ZeroStep);
    }
    if max_deriv.is_nan() || max_deriv < 0.0 {
        return Err(Error::InvalidParameter(format!("derivative bound must be non-negative, got {max_deriv}")));
    }
    let p = (s.nodes.len() - s.deriv_order) as i32;
    Ok(libm::fabs(t).powi(p) * max_deriv * s.error_constant())
}

/// Bound on `|dⁿ⁺¹/dxⁿ⁺¹ e^{-x²}|` for use with [`truncation_error_bound`].
pub fn gaussian_max_deriv(s: &Stencil, cfg: &QuadratureConfig) -> f64 {
    gaussian_derivative_bound(s.nodes.len(), cfg.tail_cutoff)
}

/// Determinant of the moment matrix: `Π_{i<j}(k_j - k_i) / Π_{i=2..n} i!`.
pub fn vandermonde_det(nodes: &[Complex64]) -> Complex64 {
    let mut det = Complex64::new(1.0, 0.0);
    for j in 0..nodes.len() {
        for i in 0..j {
            det *= nodes[j] - nodes[i];
        }
        det /= factorial(j);
    }
    det
}

/// `(∫ |dⁿ/dxⁿ e^{-x²} - t^{-n} Σ (-1)^k C(n,k) e^{-(x-kt)²}|^p dx)^{1/p}`
pub fn divided_difference_l2_error(n: usize, t: f64, p: f64, cfg: &QuadratureConfig) -> Result<f64> {
    if t == 0.0 {
        return Err(Error::ZeroStep);
    }
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::InvalidParameter(format!("exponent p must be positive, got {p}")));
    }
    if n == 0 {
        return Ok(0.0);
    }
    let s = backward_difference_stencil(n);
    let tail = cfg.tail_cutoff;
    let shift = n as f64 * t;
    let domain = Domain::interval(-tail + shift.min(0.0), tail + shift.max(0.0));
    let scale = libm::pow(t, n as f64);
    let v: f64 = integrate(
        |x| {
            // e^{-(x-kt)²} = e^{-x²}(1 + expm1(kt(2x - kt))); the constant part
            // has vanishing n-th difference, which removes most cancellation.
            let sum: NeumaierSum = s
                .coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| {
                    let kt = k as f64 * t;
                    c.re * libm::expm1(kt * (2.0 * x - kt))
                })
                .collect();
            let approx = libm::exp(-x * x) * sum.sum() / scale;
            libm::pow(libm::fabs(gaussian_derivative(n, x) - approx), p)
        },
        &domain,
        cfg,
    )?;
    Ok(libm::pow(v.max(0.0), 1.0 / p))
}
