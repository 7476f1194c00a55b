//! Software floating point with a user-chosen number of decimal digits.
//!
//! Backed by `astro-float`. Every value remembers its own precision; binary
//! operations round to the larger of the two operand precisions.

use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Div, Mul, Neg, Sub};

use astro_float::{BigFloat, Consts, RoundingMode, Sign};
use num_complex::Complex64;

const RM: RoundingMode = RoundingMode::ToEven;

/// Smallest working precision accepted anywhere in the crate.
pub const MIN_DIGITS: u32 = 15;

use core::f64::consts::LOG2_10;

/// Mantissa bits needed for `digits` decimal digits, with a few guard bits.
pub fn bits_for_digits(digits: u32) -> usize {
    let bits = libm::ceil(digits as f64 * LOG2_10) as usize + 8;
    // astro-float allocates whole 64-bit words anyway.
    bits.div_ceil(64) * 64
}

#[derive(Clone)]
pub struct BigReal {
    value: BigFloat,
    bits: usize,
}

impl BigReal {
    pub fn from_f64(x: f64, digits: u32) -> Self {
        Self::from_f64_bits(x, bits_for_digits(digits))
    }

    pub(crate) fn from_f64_bits(x: f64, bits: usize) -> Self {
        BigReal { value: BigFloat::from_f64(x, bits), bits }
    }

    pub fn from_i64(x: i64, digits: u32) -> Self {
        let bits = bits_for_digits(digits);
        BigReal { value: BigFloat::from_i64(x, bits), bits }
    }

    pub fn zero(digits: u32) -> Self {
        Self::from_f64(0.0, digits)
    }

    pub fn one(digits: u32) -> Self {
        Self::from_f64(1.0, digits)
    }

    /// Decimal digits carried by this value.
    pub fn precision_digits(&self) -> u32 {
        ((self.bits - 8) as f64 / LOG2_10) as u32
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    /// Re-round to a different working precision.
    pub fn with_digits(&self, digits: u32) -> Self {
        let bits = bits_for_digits(digits);
        let mut value = self.value.clone();
        // Only fails for NaN/Inf, which keep their value.
        let _ = value.set_precision(bits, RM);
        BigReal { value, bits }
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.value.is_negative()
    }

    pub fn is_finite(&self) -> bool {
        !(self.value.is_nan() || self.value.is_inf())
    }

    pub fn abs(&self) -> Self {
        BigReal { value: self.value.abs(), bits: self.bits }
    }

    pub fn signum(&self) -> f64 {
        if self.is_zero() {
            0.0
        } else if self.is_negative() {
            -1.0
        } else {
            1.0
        }
    }

    pub fn sqrt(&self) -> Self {
        BigReal { value: self.value.sqrt(self.bits, RM), bits: self.bits }
    }

    pub fn powi(&self, n: usize) -> Self {
        BigReal { value: self.value.powi(n, self.bits, RM), bits: self.bits }
    }

    pub fn recip(&self) -> Self {
        BigReal { value: self.value.reciprocal(self.bits, RM), bits: self.bits }
    }

    pub fn mul_f64(&self, x: f64) -> Self {
        self * &BigReal::from_f64_bits(x, self.bits)
    }

    /// Nearest `f64`; overflows to ±inf and underflows to ±0.
    pub fn to_f64(&self) -> f64 {
        if self.value.is_nan() {
            return f64::NAN;
        }
        if self.value.is_inf_pos() {
            return f64::INFINITY;
        }
        if self.value.is_inf_neg() {
            return f64::NEG_INFINITY;
        }
        if self.value.is_zero() {
            return 0.0;
        }
        let Some((words, _, sign, exp, _)) = self.value.as_raw_parts() else {
            return f64::NAN;
        };
        // value = 0.m * 2^exp with the most significant word last.
        let n = words.len();
        let hi = words[n - 1] as f64;
        let lo = if n > 1 { words[n - 2] as f64 } else { 0.0 };
        let frac = (hi + lo * libm::ldexp(1.0, -64)) * libm::ldexp(1.0, -64);
        let mag = scale_pow2(frac, exp as i64);
        if sign == Sign::Neg {
            -mag
        } else {
            mag
        }
    }

    /// `log10 |x|` without materialising `x` as an `f64`; `-inf` for zero.
    pub fn log10_abs(&self) -> f64 {
        if self.value.is_zero() {
            return f64::NEG_INFINITY;
        }
        match self.value.as_raw_parts() {
            Some((words, _, _, exp, _)) => {
                let n = words.len();
                let hi = words[n - 1] as f64 * libm::ldexp(1.0, -64);
                libm::log10(hi) + exp as f64 * core::f64::consts::LOG10_2
            }
            None => f64::INFINITY,
        }
    }

    pub fn abs_cmp(&self, other: &Self) -> Ordering {
        match self.value.abs_cmp(&other.value) {
            Some(c) if c < 0 => Ordering::Less,
            Some(c) if c > 0 => Ordering::Greater,
            _ => Ordering::Equal,
        }
    }

    /// Scientific notation with `sig` significant digits.
    pub fn to_sci_string(&self, sig: usize) -> alloc::string::String {
        use alloc::format;
        if self.is_zero() {
            return "0".into();
        }
        let l = self.log10_abs();
        let e = libm::floor(l) as i64;
        // Mantissa through an exact power-of-ten rescale at working precision.
        let ten = BigReal::from_f64_bits(10.0, self.bits);
        let p = ten.powi(e.unsigned_abs() as usize);
        let m = if e >= 0 { self / &p } else { self * &p };
        let mut mf = m.to_f64();
        let mut e = e;
        if libm::fabs(mf) >= 10.0 {
            mf /= 10.0;
            e += 1;
        }
        format!("{:.*}e{}", sig.saturating_sub(1), mf, e)
    }
}

fn scale_pow2(x: f64, e: i64) -> f64 {
    if e > 2100 {
        return f64::INFINITY * x;
    }
    if e < -2200 {
        return 0.0 * x;
    }
    libm::ldexp(x, e as i32)
}

impl fmt::Debug for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BigReal({})", self.to_sci_string(20))
    }
}

impl PartialEq for BigReal {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value
    }
}

impl PartialOrd for BigReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.value.partial_cmp(&other.value)
    }
}

macro_rules! bin_op {
    ($tr:ident, $method:ident, $call:ident) => {
        impl<'a> $tr<&'a BigReal> for &'a BigReal {
            type Output = BigReal;
            fn $method(self, rhs: &'a BigReal) -> BigReal {
                let bits = self.bits.max(rhs.bits);
                BigReal { value: self.value.$call(&rhs.value, bits, RM), bits }
            }
        }
        impl $tr<BigReal> for BigReal {
            type Output = BigReal;
            fn $method(self, rhs: BigReal) -> BigReal {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $tr<&'a BigReal> for BigReal {
            type Output = BigReal;
            fn $method(self, rhs: &'a BigReal) -> BigReal {
                (&self).$method(rhs)
            }
        }
    };
}

bin_op!(Add, add, add);
bin_op!(Sub, sub, sub);
bin_op!(Mul, mul, mul);
bin_op!(Div, div, div);

impl Neg for BigReal {
    type Output = BigReal;
    fn neg(self) -> BigReal {
        BigReal { value: self.value.neg(), bits: self.bits }
    }
}

impl Neg for &BigReal {
    type Output = BigReal;
    fn neg(self) -> BigReal {
        BigReal { value: self.value.clone().neg(), bits: self.bits }
    }
}

/// Working-precision context: carries the constant cache that astro-float
/// needs for transcendental functions.
pub struct BigCtx {
    digits: u32,
    bits: usize,
    cc: Consts,
}

impl fmt::Debug for BigCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BigCtx").field("digits", &self.digits).finish()
    }
}

impl BigCtx {
    pub fn new(digits: u32) -> Self {
        let digits = digits.max(MIN_DIGITS);
        // Consts::new only fails on allocation failure.
        let cc = Consts::new().expect("allocating astro-float constant cache");
        BigCtx { digits, bits: bits_for_digits(digits), cc }
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn num(&self, x: f64) -> BigReal {
        BigReal::from_f64_bits(x, self.bits)
    }

    pub fn int(&self, x: i64) -> BigReal {
        BigReal { value: BigFloat::from_i64(x, self.bits), bits: self.bits }
    }

    pub fn zero(&self) -> BigReal {
        self.num(0.0)
    }

    pub fn one(&self) -> BigReal {
        self.num(1.0)
    }

    /// Exact ratio `num / den` rounded once.
    pub fn ratio(&self, num: i64, den: i64) -> BigReal {
        &self.int(num) / &self.int(den)
    }

    /// Value re-rounded to this context's precision.
    pub fn lift(&self, x: &BigReal) -> BigReal {
        let mut value = x.value.clone();
        let _ = value.set_precision(self.bits, RM);
        BigReal { value, bits: self.bits }
    }

    pub fn pi(&mut self) -> BigReal {
        BigReal { value: self.cc.pi(self.bits, RM), bits: self.bits }
    }

    pub fn exp(&mut self, x: &BigReal) -> BigReal {
        BigReal { value: x.value.exp(self.bits, RM, &mut self.cc), bits: self.bits }
    }

    pub fn ln(&mut self, x: &BigReal) -> BigReal {
        BigReal { value: x.value.ln(self.bits, RM, &mut self.cc), bits: self.bits }
    }

    pub fn sin(&mut self, x: &BigReal) -> BigReal {
        BigReal { value: x.value.sin(self.bits, RM, &mut self.cc), bits: self.bits }
    }

    pub fn cos(&mut self, x: &BigReal) -> BigReal {
        BigReal { value: x.value.cos(self.bits, RM, &mut self.cc), bits: self.bits }
    }

    pub fn sqrt(&self, x: &BigReal) -> BigReal {
        BigReal { value: x.value.sqrt(self.bits, RM), bits: self.bits }
    }

    /// Parse a decimal literal exactly as far as the precision allows.
    pub fn parse_decimal(&mut self, text: &str) -> BigReal {
        let value = BigFloat::parse(text, astro_float::Radix::Dec, self.bits, RM, &mut self.cc);
        BigReal { value, bits: self.bits }
    }
}

/// Complex number over [`BigReal`].
#[derive(Clone, Debug, PartialEq)]
pub struct BigComplex {
    pub re: BigReal,
    pub im: BigReal,
}

impl BigComplex {
    pub fn new(re: BigReal, im: BigReal) -> Self {
        BigComplex { re, im }
    }

    pub fn from_c64(z: Complex64, digits: u32) -> Self {
        BigComplex { re: BigReal::from_f64(z.re, digits), im: BigReal::from_f64(z.im, digits) }
    }

    pub fn zero(digits: u32) -> Self {
        BigComplex { re: BigReal::zero(digits), im: BigReal::zero(digits) }
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    pub fn norm_sqr(&self) -> BigReal {
        &(&self.re * &self.re) + &(&self.im * &self.im)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        BigComplex { re: self.re.clone(), im: -&self.im }
    }
}

impl<'a> Add<&'a BigComplex> for &'a BigComplex {
    type Output = BigComplex;
    fn add(self, rhs: &'a BigComplex) -> BigComplex {
        BigComplex { re: &self.re + &rhs.re, im: &self.im + &rhs.im }
    }
}

impl<'a> Sub<&'a BigComplex> for &'a BigComplex {
    type Output = BigComplex;
    fn sub(self, rhs: &'a BigComplex) -> BigComplex {
        BigComplex { re: &self.re - &rhs.re, im: &self.im - &rhs.im }
    }
}

impl<'a> Mul<&'a BigComplex> for &'a BigComplex {
    type Output = BigComplex;
    fn mul(self, rhs: &'a BigComplex) -> BigComplex {
        BigComplex {
            re: &(&self.re * &rhs.re) - &(&self.im * &rhs.im),
            im: &(&self.re * &rhs.im) + &(&self.im * &rhs.re),
        }
    }
}

impl<'a> Div<&'a BigComplex> for &'a BigComplex {
    type Output = BigComplex;
    fn div(self, rhs: &'a BigComplex) -> BigComplex {
        let d = rhs.norm_sqr();
        let num = self * &rhs.conj();
        BigComplex { re: &num.re / &d, im: &num.im / &d }
    }
}
