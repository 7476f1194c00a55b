//! CSV output. Every number goes through [`fmt17`], so files are
//! byte-identical across runs and platforms.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use gausskit_core::lowfreq::TrigCombination;
use gausskit_core::{BigReal, GaussianCombination, Stencil};
use num_complex::Complex64;

/// 17 significant digits in scientific notation. Negative zero prints as zero.
pub fn fmt17(v: f64) -> String {
    format!("{:.16e}", v + 0.0)
}

/// `a`, `a+bi` or `a-bi`, each part through [`fmt17`].
pub fn fmt_complex(z: Complex64) -> String {
    if z.im == 0.0 {
        return fmt17(z.re);
    }
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{}{}{}i", fmt17(z.re), sign, fmt17(z.im.abs()))
}

/// `samples` equally spaced points from `lo` to `hi` inclusive.
pub fn sample_points(lo: f64, hi: f64, samples: usize) -> Vec<f64> {
    let last = samples - 1;
    (0..samples)
        .map(|i| if i == last { hi } else { lo + (hi - lo) * i as f64 / last as f64 })
        .collect()
}

fn check_range(range: (f64, f64), samples: usize) -> io::Result<()> {
    let (lo, hi) = range;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(io::Error::new(io::ErrorKind::InvalidInput, format!("range {lo}:{hi} must satisfy lo < hi")));
    }
    if samples < 2 {
        return Err(io::Error::new(io::ErrorKind::InvalidInput, "at least two samples are needed"));
    }
    Ok(())
}

/// Header `x,f,approx,diff`, one row per sample, `diff = f - approx`.
pub fn write_curve_csv<W, F, A>(out: &mut W, mut f: F, mut approx: A, range: (f64, f64), samples: usize) -> io::Result<()>
where
    W: Write,
    F: FnMut(f64) -> f64,
    A: FnMut(f64) -> f64,
{
    check_range(range, samples)?;
    out.write_all(b"x,f,approx,diff\n")?;
    for x in sample_points(range.0, range.1, samples) {
        let fx = f(x);
        let ax = approx(x);
        writeln!(out, "{},{},{},{}", fmt17(x), fmt17(fx), fmt17(ax), fmt17(fx - ax))?;
    }
    Ok(())
}

pub fn emit_curve_csv<F, A>(f: F, approx: A, range: (f64, f64), samples: usize, path: &Path) -> io::Result<()>
where
    F: FnMut(f64) -> f64,
    A: FnMut(f64) -> f64,
{
    check_range(range, samples)?;
    let mut w = BufWriter::new(File::create(path)?);
    write_curve_csv(&mut w, f, approx, range, samples)?;
    w.flush()
}

/// Header `x,re,im`: plain samples of a function.
pub fn write_samples_csv<W: Write, F: FnMut(f64) -> Complex64>(
    out: &mut W,
    mut f: F,
    range: (f64, f64),
    samples: usize,
) -> io::Result<()> {
    check_range(range, samples)?;
    out.write_all(b"x,re,im\n")?;
    for x in sample_points(range.0, range.1, samples) {
        let v = f(x);
        writeln!(out, "{},{},{}", fmt17(x), fmt17(v.re), fmt17(v.im))?;
    }
    Ok(())
}

fn big_value(a: &BigReal) -> String {
    let v = a.to_f64();
    if v.is_finite() {
        fmt17(v)
    } else {
        a.to_sci_string(17)
    }
}

/// `index,shift,coefficient_sign,coefficient_log10_magnitude,coefficient_value`.
///
/// The value column falls back to the extended-precision decimal when the
/// weight does not fit in an `f64`.
pub fn write_translate_coeffs<W: Write>(out: &mut W, c: &GaussianCombination) -> io::Result<()> {
    out.write_all(b"index,shift,coefficient_sign,coefficient_log10_magnitude,coefficient_value\n")?;
    for (n, (a, shift)) in c.weights().iter().zip(c.shifts()).enumerate() {
        let sign = if a.is_zero() { 0 } else if a.is_negative() { -1 } else { 1 };
        let mag = if a.is_zero() { "-inf".to_string() } else { fmt17(a.log10_abs()) };
        writeln!(out, "{n},{},{sign},{mag},{}", fmt17(shift), big_value(a))?;
    }
    Ok(())
}

/// `index,frequency,re,im` with frequency `n·t`.
pub fn write_trig_coeffs<W: Write>(out: &mut W, c: &TrigCombination) -> io::Result<()> {
    out.write_all(b"index,frequency,re,im\n")?;
    for (n, (a, w)) in c.coeffs().iter().zip(c.frequencies()).enumerate() {
        writeln!(out, "{n},{},{},{}", fmt17(w), big_value(&a.re), big_value(&a.im))?;
    }
    Ok(())
}

/// `node,coefficient` rows preceded by `#` metadata lines.
pub fn write_stencil<W: Write>(out: &mut W, s: &Stencil) -> io::Result<()> {
    writeln!(out, "# deriv_order={}", s.deriv_order)?;
    writeln!(out, "# order_of_accuracy={}", s.order_of_accuracy)?;
    writeln!(out, "# error_constant={}", fmt17(s.error_constant()))?;
    out.write_all(b"node,coefficient\n")?;
    for (k, c) in s.nodes.iter().zip(&s.coeffs) {
        writeln!(out, "{},{}", fmt_complex(*k), fmt_complex(*c))?;
    }
    Ok(())
}

/// Write `body` to `path` through a buffered file.
pub fn write_file<F>(path: &Path, body: F) -> io::Result<()>
where
    F: FnOnce(&mut BufWriter<File>) -> io::Result<()>,
{
    let mut w = BufWriter::new(File::create(path)?);
    body(&mut w)?;
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(fmt17(1.0), "1.0000000000000000e0");
        assert_eq!(fmt17(-0.0), "0.0000000000000000e0");
        assert_eq!(fmt17(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt17(0.1).parse::<f64>().unwrap(), 0.1);
        assert_eq!(fmt_complex(Complex64::new(1.0, -2.0)), "1.0000000000000000e0-2.0000000000000000e0i");
    }

    #[test]
    fn two_samples_of_zero() {
        let mut buf = Vec::new();
        write_curve_csv(&mut buf, |_| 0.0, |_| 0.0, (0.0, 1.0), 2).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let z = fmt17(0.0);
        assert_eq!(text, format!("x,f,approx,diff\n{z},{z},{z},{z}\n1.0000000000000000e0,{z},{z},{z}\n"));
    }

    #[test]
    fn identical_curves_have_zero_diff() {
        let mut buf = Vec::new();
        write_curve_csv(&mut buf, f64::sin, f64::sin, (-3.0, 3.0), 101).unwrap();
        let text = String::from_utf8(buf).unwrap();
        for line in text.lines().skip(1) {
            let diff: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
            assert!(diff.abs() < 1e-12);
        }
        assert_eq!(text.lines().count(), 102);
    }

    #[test]
    fn endpoints_are_exact() {
        let xs = sample_points(-2.0, 3.0, 500);
        assert_eq!(xs[0], -2.0);
        assert_eq!(xs[499], 3.0);
        assert!(xs.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn bad_range_is_rejected() {
        let mut buf = Vec::new();
        assert!(write_curve_csv(&mut buf, |_| 0.0, |_| 0.0, (1.0, 1.0), 5).is_err());
        assert!(write_curve_csv(&mut buf, |_| 0.0, |_| 0.0, (0.0, 1.0), 1).is_err());
    }

    #[test]
    fn stencil_table() {
        let s = gausskit_core::stencil::solve_stencil_real(2, &[0.0, 1.0, 2.0]).unwrap();
        let mut buf = Vec::new();
        write_stencil(&mut buf, &s).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("# deriv_order=2\n# order_of_accuracy=1\n"));
        assert!(text.contains("node,coefficient\n0.0000000000000000e0,1.0000000000000000e0\n"));
        assert!(text.contains("1.0000000000000000e0,-2.0000000000000000e0\n"));
    }
}
