//! Dense Gaussian elimination with partial pivoting over exact rationals and
//! software floats, iterative refinement, and ∞-norm condition numbers.

use alloc::format;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::bigreal::{BigComplex, BigReal};
use crate::{Error, Result};

/// Arithmetic needed by the elimination kernel.
pub trait Field: Clone {
    fn zero_like(&self) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn is_zero(&self) -> bool;
    /// `log10 |x|`; `-inf` for zero. Drives pivot choice.
    fn log10_abs(&self) -> f64;
}

impl Field for BigReal {
    fn zero_like(&self) -> Self {
        BigReal::zero(self.precision_digits())
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn is_zero(&self) -> bool {
        BigReal::is_zero(self)
    }
    fn log10_abs(&self) -> f64 {
        BigReal::log10_abs(self)
    }
}

impl Field for BigComplex {
    fn zero_like(&self) -> Self {
        BigComplex::zero(self.re.precision_digits())
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn is_zero(&self) -> bool {
        BigComplex::is_zero(self)
    }
    fn log10_abs(&self) -> f64 {
        0.5 * self.norm_sqr().log10_abs()
    }
}

fn log10_bigint(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits == 0 {
        return f64::NEG_INFINITY;
    }
    let shift = bits.saturating_sub(60);
    let top: BigInt = n.abs() >> shift;
    let top = u64::try_from(top).unwrap_or(u64::MAX) as f64;
    libm::log10(top) + shift as f64 * core::f64::consts::LOG10_2
}

impl Field for BigRational {
    fn zero_like(&self) -> Self {
        BigRational::zero()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn log10_abs(&self) -> f64 {
        log10_bigint(self.numer()) - log10_bigint(self.denom())
    }
}

/// Row-permuted LU factors: `P A = L U`, `L` unit lower triangular.
#[derive(Debug, Clone)]
pub struct Lu<F> {
    factors: Vec<Vec<F>>,
    perm: Vec<usize>,
}

fn check_square<F>(a: &[Vec<F>]) -> Result<usize> {
    let n = a.len();
    if n == 0 {
        return Err(Error::DimensionMismatch("empty matrix".into()));
    }
    if let Some(row) = a.iter().find(|r| r.len() != n) {
        return Err(Error::DimensionMismatch(format!("row of length {} in {n}x{n} matrix", row.len())));
    }
    Ok(n)
}

impl<F: Field> Lu<F> {
    /// Factor `a`. A pivot whose magnitude falls more than `digits` decimal
    /// orders below the largest entry counts as zero; `None` means only an
    /// exact zero is singular.
    pub fn factor(a: &[Vec<F>], digits: Option<u32>) -> Result<Self> {
        let n = check_square(a)?;
        let mut m: Vec<Vec<F>> = a.to_vec();
        let scale = a.iter().flatten().map(Field::log10_abs).fold(f64::NEG_INFINITY, f64::max);
        let mut perm: Vec<usize> = (0..n).collect();
        for col in 0..n {
            let (best, best_mag) = (col..n)
                .map(|r| (r, m[r][col].log10_abs()))
                .fold((col, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
            let negligible = match digits {
                Some(d) => best_mag < scale - d as f64,
                None => false,
            };
            if m[best][col].is_zero() || negligible {
                let pivot = if best_mag.is_finite() { libm::pow(10.0, best_mag) } else { 0.0 };
                return Err(Error::Singular { pivot, column: col });
            }
            m.swap(col, best);
            perm.swap(col, best);
            let (upper, lower) = m.split_at_mut(col + 1);
            let prow = &upper[col];
            for row in lower.iter_mut() {
                if row[col].is_zero() {
                    continue;
                }
                let factor = row[col].div(&prow[col]);
                for k in col + 1..n {
                    let d = factor.mul(&prow[k]);
                    row[k] = row[k].sub(&d);
                }
                row[col] = factor;
            }
        }
        Ok(Lu { factors: m, perm })
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    pub fn solve(&self, b: &[F]) -> Result<Vec<F>> {
        let n = self.dim();
        if b.len() != n {
            return Err(Error::DimensionMismatch(format!("rhs of length {} for {n}x{n} system", b.len())));
        }
        let mut y: Vec<F> = self.perm.iter().map(|&p| b[p].clone()).collect();
        for i in 0..n {
            for k in 0..i {
                let d = self.factors[i][k].mul(&y[k]);
                y[i] = y[i].sub(&d);
            }
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                let d = self.factors[i][k].mul(&y[k]);
                y[i] = y[i].sub(&d);
            }
            y[i] = y[i].div(&self.factors[i][i]);
        }
        Ok(y)
    }
}

/// Plain elimination; exact for rationals.
pub fn solve_exact<F: Field>(a: &[Vec<F>], b: &[F], digits: Option<u32>) -> Result<Vec<F>> {
    Lu::factor(a, digits)?.solve(b)
}

#[derive(Debug, Clone)]
pub struct DenseSolution {
    pub x: Vec<BigReal>,
    /// `‖A x - b‖∞`
    pub residual_inf: f64,
    /// `‖b‖∞`
    pub rhs_inf: f64,
    /// Smallest `c ≥ 0` with `residual ≤ 10^{c-p} ‖b‖∞`.
    pub residual_constant: i32,
    /// Working precision `p` of the factorisation.
    pub digits: u32,
}

fn inf_norm(v: &[BigReal]) -> BigReal {
    let mut best = v[0].abs();
    for x in &v[1..] {
        if x.abs_cmp(&best).is_gt() {
            best = x.abs();
        }
    }
    best
}

fn residual(a: &[Vec<BigReal>], x: &[BigReal], b: &[BigReal], digits: u32) -> Vec<BigReal> {
    a.iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut acc = bi.with_digits(digits);
            for (aij, xj) in row.iter().zip(x) {
                acc = &acc - &(&aij.with_digits(digits) * xj);
            }
            acc
        })
        .collect()
}

/// Solve `A x = b` at the precision of `A`'s entries.
///
/// The factorisation runs at the working precision `p`; the solution is then
/// refined with residuals accumulated at `2p + 10` digits, so the returned
/// `x` carries that higher precision.
pub fn solve_dense(a: &[Vec<BigReal>], b: &[BigReal]) -> Result<DenseSolution> {
    let n = check_square(a)?;
    if b.len() != n {
        return Err(Error::DimensionMismatch(format!("rhs of length {} for {n}x{n} system", b.len())));
    }
    let digits = a.iter().flatten().map(BigReal::precision_digits).min().unwrap_or(15);
    let hi = 2 * digits + 10;
    let lu = Lu::factor(a, Some(digits))?;
    let b_inf = inf_norm(b);
    let mut x: Vec<BigReal> = lu.solve(b)?.iter().map(|v| v.with_digits(hi)).collect();
    let mut r = residual(a, &x, b, hi);
    let mut r_inf = inf_norm(&r);
    let target = b_inf.log10_abs() - 2.0 * digits as f64;
    for _ in 0..12 {
        if r_inf.is_zero() || r_inf.log10_abs() <= target {
            break;
        }
        let r_lo: Vec<BigReal> = r.iter().map(|v| v.with_digits(digits)).collect();
        let d = lu.solve(&r_lo)?;
        let candidate: Vec<BigReal> = x.iter().zip(&d).map(|(xi, di)| xi + &di.with_digits(hi)).collect();
        let r_new = residual(a, &candidate, b, hi);
        let r_new_inf = inf_norm(&r_new);
        // Stop once a refinement step no longer halves the residual.
        if r_new_inf.log10_abs() > r_inf.log10_abs() - libm::log10(2.0) {
            if r_new_inf.abs_cmp(&r_inf).is_lt() {
                x = candidate;
                r_inf = r_new_inf;
            }
            break;
        }
        x = candidate;
        r = r_new;
        r_inf = r_new_inf;
    }
    let rel = r_inf.log10_abs() - b_inf.log10_abs();
    let residual_constant =
        if b_inf.is_zero() || !rel.is_finite() { 0 } else { libm::ceil(rel + digits as f64).max(0.0) as i32 };
    Ok(DenseSolution {
        x,
        residual_inf: r_inf.to_f64(),
        rhs_inf: b_inf.to_f64(),
        residual_constant,
        digits,
    })
}

/// `κ∞(A) = ‖A‖∞ ‖A⁻¹‖∞`, with the inverse formed column by column.
pub fn condition_estimate(a: &[Vec<BigReal>]) -> Result<f64> {
    let n = check_square(a)?;
    let digits = a.iter().flatten().map(BigReal::precision_digits).min().unwrap_or(15);
    let lu = Lu::factor(a, Some(digits))?;
    let zero = BigReal::zero(digits);
    let one = BigReal::one(digits);
    let mut row_sums = alloc::vec![zero.clone(); n];
    for j in 0..n {
        let e: Vec<BigReal> = (0..n).map(|i| if i == j { one.clone() } else { zero.clone() }).collect();
        let col = lu.solve(&e)?;
        for (s, v) in row_sums.iter_mut().zip(&col) {
            *s = &*s + &v.abs();
        }
    }
    let inv_norm = inf_norm(&row_sums);
    let a_norm = inf_norm(&a.iter().map(|row| row.iter().fold(zero.clone(), |s, v| &s + &v.abs())).collect::<Vec<_>>());
    Ok(libm::pow(10.0, inv_norm.log10_abs() + a_norm.log10_abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use num_traits::One;

    fn big(m: &[&[f64]], digits: u32) -> Vec<Vec<BigReal>> {
        m.iter().map(|r| r.iter().map(|&x| BigReal::from_f64(x, digits)).collect()).collect()
    }

    fn bigv(v: &[f64], digits: u32) -> Vec<BigReal> {
        v.iter().map(|&x| BigReal::from_f64(x, digits)).collect()
    }

    #[test]
    fn identity_and_diagonal() {
        let id = big(&[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]], 30);
        let s = solve_dense(&id, &bigv(&[1.0, 2.0, 3.0], 30)).unwrap();
        assert_eq!(s.x.iter().map(BigReal::to_f64).collect::<Vec<_>>(), vec![1.0, 2.0, 3.0]);
        let d = big(&[&[2.0, 0.0], &[0.0, 4.0]], 30);
        let s = solve_dense(&d, &bigv(&[2.0, 8.0], 30)).unwrap();
        assert_eq!(s.x.iter().map(BigReal::to_f64).collect::<Vec<_>>(), vec![1.0, 2.0]);
        assert!((condition_estimate(&id).unwrap() - 1.0).abs() < 1e-12);
        let dd = big(&[&[1.0, 0.0], &[0.0, 1e-6]], 30);
        assert!((condition_estimate(&dd).unwrap() / 1e6 - 1.0).abs() < 1e-9);
    }

    fn hilbert_rational(n: usize) -> Vec<Vec<BigRational>> {
        (0..n)
            .map(|i| (0..n).map(|j| BigRational::new(BigInt::one(), BigInt::from(i + j + 1))).collect())
            .collect()
    }

    #[test]
    fn hilbert_seven_recovers_ones() {
        // Oracle: exact rational elimination on the same system.
        let h = hilbert_rational(7);
        let rhs: Vec<BigRational> = h.iter().map(|r| r.iter().fold(BigRational::zero(), |s, v| s + v)).collect();
        let exact = solve_exact(&h, &rhs, None).unwrap();
        assert!(exact.iter().all(|v| v.is_one()));

        let digits = 60;
        let hb: Vec<Vec<BigReal>> = (0..7)
            .map(|i| (0..7).map(|j| &BigReal::one(digits) / &BigReal::from_i64((i + j + 1) as i64, digits)).collect())
            .collect();
        let rb: Vec<BigReal> = hb.iter().map(|r| r.iter().fold(BigReal::zero(digits), |s, v| &s + v)).collect();
        let s = solve_dense(&hb, &rb).unwrap();
        for v in &s.x {
            assert!((v - &BigReal::one(digits)).log10_abs() < -10.0);
        }
        assert!(s.residual_constant <= 3, "c = {}", s.residual_constant);
    }

    #[test]
    fn singular_is_detected() {
        let m = big(&[&[1.0, 2.0], &[2.0, 4.0]], 30);
        assert!(matches!(solve_dense(&m, &bigv(&[1.0, 1.0], 30)), Err(Error::Singular { .. })));
        let r = vec![
            vec![BigRational::one(), BigRational::one()],
            vec![BigRational::one(), BigRational::one()],
        ];
        assert!(matches!(solve_exact(&r, &[BigRational::one(), BigRational::zero()], None), Err(Error::Singular { .. })));
    }

    #[test]
    fn dimension_checks() {
        let m = big(&[&[1.0, 2.0], &[2.0, 4.0]], 30);
        assert!(matches!(solve_dense(&m, &bigv(&[1.0], 30)), Err(Error::DimensionMismatch(_))));
        let ragged = vec![bigv(&[1.0, 2.0], 30), bigv(&[1.0], 30)];
        assert!(matches!(condition_estimate(&ragged), Err(Error::DimensionMismatch(_))));
    }
}
