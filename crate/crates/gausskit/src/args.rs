use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use gausskit_core::TargetFunction;
use num_complex::Complex64;

#[derive(Parser, Debug)]
#[command(name = "gausskit", version, about = "Approximation by translates of a single Gaussian")]
pub struct Cli {
    /// Include wall_time_ms in the report (makes output run-dependent).
    #[arg(long, global = true)]
    pub timing: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Translate weights from Hermite coefficients (backward differences).
    Fit(FitArgs),
    /// Hermite partial sum only.
    Hermite(HermiteArgs),
    /// Continuous least squares over the translates.
    Lsq(LsqArgs),
    /// Low-frequency trigonometric sum under the Gaussian weight.
    Trig(TrigArgs),
    /// Cosine series on [0, b] from the even extension.
    Cosine(CosineArgs),
    /// Finite-difference stencil for arbitrary nodes.
    Stencil(StencilArgs),
    /// Impulse train whose Gaussian-filtered output is the fit.
    Synth(SynthArgs),
    /// Sample the target function.
    Eval(EvalArgs),
    /// Hermite partial sum and translate fit errors side by side.
    Error(FitArgs),
}

#[derive(Args, Debug, Clone)]
pub struct TargetArg {
    /// Target function, e.g. "sin(x)*chi(-pi,pi)".
    #[arg(long = "f", value_name = "STRING")]
    pub f: String,
}

#[derive(Args, Debug, Clone)]
pub struct QuadArgs {
    /// Absolute quadrature tolerance.
    #[arg(long = "abs-tol", value_name = "REAL")]
    pub abs_tol: Option<f64>,
}

#[derive(Args, Debug, Clone)]
pub struct CurveArgs {
    /// Write x,f,approx,diff samples to this file.
    #[arg(long, value_name = "PATH")]
    pub csv: Option<PathBuf>,
    /// Sampling range LO:HI.
    #[arg(long, value_name = "LO:HI", value_parser = parse_range, allow_hyphen_values = true)]
    pub range: Option<(f64, f64)>,
    #[arg(long, value_name = "INT", default_value_t = 500)]
    pub samples: usize,
}

#[derive(Args, Debug, Clone)]
pub struct CoeffsArg {
    /// Write the coefficient table to this file.
    #[arg(long, value_name = "PATH")]
    pub coeffs: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct FitArgs {
    #[command(flatten)]
    pub target: TargetArg,
    #[arg(long = "N", value_name = "INT")]
    pub n: usize,
    #[arg(long = "t", value_name = "REAL", allow_negative_numbers = true)]
    pub t: f64,
    /// Truncation radius for the Hermite integrals.
    #[arg(long = "M", value_name = "REAL")]
    pub m: Option<f64>,
    #[command(flatten)]
    pub quad: QuadArgs,
    #[command(flatten)]
    pub curve: CurveArgs,
    #[command(flatten)]
    pub coeffs: CoeffsArg,
}

#[derive(Args, Debug, Clone)]
pub struct HermiteArgs {
    #[command(flatten)]
    pub target: TargetArg,
    #[arg(long = "N", value_name = "INT")]
    pub n: usize,
    #[arg(long = "M", value_name = "REAL")]
    pub m: Option<f64>,
    #[command(flatten)]
    pub quad: QuadArgs,
    #[command(flatten)]
    pub curve: CurveArgs,
    #[command(flatten)]
    pub coeffs: CoeffsArg,
}

#[derive(Args, Debug, Clone)]
pub struct LsqArgs {
    #[command(flatten)]
    pub target: TargetArg,
    #[arg(long = "N", value_name = "INT")]
    pub n: usize,
    #[arg(long = "t", value_name = "REAL", allow_negative_numbers = true)]
    pub t: f64,
    /// Working precision in decimal digits.
    #[arg(long, value_name = "INT")]
    pub digits: Option<u32>,
    #[command(flatten)]
    pub quad: QuadArgs,
    #[command(flatten)]
    pub curve: CurveArgs,
    #[command(flatten)]
    pub coeffs: CoeffsArg,
}

#[derive(Args, Debug, Clone)]
pub struct GridArgs {
    #[arg(long = "grid-spacing", value_name = "REAL")]
    pub spacing: Option<f64>,
    #[arg(long = "grid-halfwidth", value_name = "REAL")]
    pub half_width: Option<f64>,
}

#[derive(Args, Debug, Clone)]
pub struct TrigArgs {
    #[command(flatten)]
    pub target: TargetArg,
    #[arg(long = "N", value_name = "INT")]
    pub n: usize,
    #[arg(long = "t", value_name = "REAL", allow_negative_numbers = true)]
    pub t: f64,
    /// Truncation radius of the smoothed target; chosen automatically if absent.
    #[arg(long = "M", value_name = "REAL")]
    pub m: Option<f64>,
    /// Frequency bound; with --range fits a sine/cosine series on that interval.
    #[arg(long, value_name = "REAL")]
    pub omega: Option<f64>,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub quad: QuadArgs,
    #[command(flatten)]
    pub curve: CurveArgs,
    #[command(flatten)]
    pub coeffs: CoeffsArg,
}

#[derive(Args, Debug, Clone)]
pub struct CosineArgs {
    #[command(flatten)]
    pub target: TargetArg,
    #[arg(long = "N", value_name = "INT")]
    pub n: usize,
    #[arg(long = "t", value_name = "REAL", allow_negative_numbers = true)]
    pub t: f64,
    #[arg(long = "M", value_name = "REAL")]
    pub m: Option<f64>,
    #[arg(long, value_name = "REAL")]
    pub omega: f64,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub quad: QuadArgs,
    #[command(flatten)]
    pub curve: CurveArgs,
    #[command(flatten)]
    pub coeffs: CoeffsArg,
}

#[derive(Args, Debug, Clone)]
pub struct StencilArgs {
    /// Derivative order.
    #[arg(long, value_name = "INT")]
    pub order: usize,
    /// Comma-separated nodes; complex nodes as a+bi.
    #[arg(long, value_name = "LIST", value_parser = parse_nodes, allow_hyphen_values = true)]
    pub nodes: Nodes,
    /// Write the stencil table to this file.
    #[arg(long, value_name = "PATH")]
    pub csv: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct SynthArgs {
    #[command(flatten)]
    pub target: TargetArg,
    #[arg(long = "N", value_name = "INT")]
    pub n: usize,
    /// Load time: every impulse fires before it.
    #[arg(long, value_name = "REAL")]
    pub tau: f64,
    #[command(flatten)]
    pub quad: QuadArgs,
    #[command(flatten)]
    pub curve: CurveArgs,
    #[command(flatten)]
    pub coeffs: CoeffsArg,
}

#[derive(Args, Debug, Clone)]
pub struct EvalArgs {
    #[command(flatten)]
    pub target: TargetArg,
    /// Output file; standard output if absent.
    #[arg(long, value_name = "PATH")]
    pub csv: Option<PathBuf>,
    #[arg(long, value_name = "LO:HI", value_parser = parse_range, allow_hyphen_values = true)]
    pub range: Option<(f64, f64)>,
    #[arg(long, value_name = "INT", default_value_t = 500)]
    pub samples: usize,
}

/// Parsed `--nodes`, kept with the original text for the parameter echo.
#[derive(Debug, Clone, PartialEq)]
pub struct Nodes {
    pub text: String,
    pub values: Vec<Complex64>,
}

/// `2i` means `2*i` in node lists.
fn explicit_imaginary(text: &str) -> String {
    let mut out = String::with_capacity(text.len() + 2);
    let mut prev = ' ';
    for ch in text.chars() {
        if ch == 'i' && (prev.is_ascii_digit() || prev == '.') {
            out.push('*');
        }
        out.push(ch);
        prev = ch;
    }
    out
}

fn constant(text: &str) -> Result<Complex64, String> {
    let e = TargetFunction::parse(&explicit_imaginary(text)).map_err(|e| format!("`{text}`: {e}"))?;
    if e.expr().depends_on_x() {
        return Err(format!("`{text}` must be a constant"));
    }
    let v = e.evaluate(0.0);
    if !(v.re.is_finite() && v.im.is_finite()) {
        return Err(format!("`{text}` is not finite"));
    }
    Ok(v)
}

fn real_constant(text: &str) -> Result<f64, String> {
    let v = constant(text)?;
    if v.im != 0.0 {
        return Err(format!("`{text}` must be real"));
    }
    Ok(v.re)
}

/// `LO:HI`, each side a real constant expression such as `-pi`.
pub fn parse_range(text: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = text.split_once(':').ok_or_else(|| format!("expected LO:HI, got `{text}`"))?;
    let lo = real_constant(lo)?;
    let hi = real_constant(hi)?;
    if lo >= hi {
        return Err(format!("range {lo}:{hi} must satisfy LO < HI"));
    }
    Ok((lo, hi))
}

pub fn parse_nodes(text: &str) -> Result<Nodes, String> {
    let values = text.split(',').map(|s| constant(s.trim())).collect::<Result<Vec<_>, _>>()?;
    Ok(Nodes { text: text.to_string(), values })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("-2:3").unwrap(), (-2.0, 3.0));
        let (lo, hi) = parse_range("-pi:pi").unwrap();
        assert_eq!((lo, hi), (-std::f64::consts::PI, std::f64::consts::PI));
        assert!(parse_range("3:2").is_err());
        assert!(parse_range("1").is_err());
        assert!(parse_range("x:2").is_err());
    }

    #[test]
    fn nodes() {
        let n = parse_nodes("0,1,2").unwrap();
        assert_eq!(n.values, vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(2.0, 0.0)]);
        let n = parse_nodes("1+2i, -1-i").unwrap();
        assert_eq!(n.values, vec![Complex64::new(1.0, 2.0), Complex64::new(-1.0, -1.0)]);
        assert!(parse_nodes("0,,1").is_err());
    }

    #[test]
    fn negative_step_and_range_parse() {
        let cli = Cli::try_parse_from(["gausskit", "fit", "--f", "gauss(0)", "--N", "3", "--t", "-0.05", "--range", "-2:3"]).unwrap();
        match cli.command {
            Command::Fit(a) => {
                assert_eq!(a.t, -0.05);
                assert_eq!(a.curve.range, Some((-2.0, 3.0)));
            }
            _ => panic!("wrong subcommand"),
        }
    }
}
