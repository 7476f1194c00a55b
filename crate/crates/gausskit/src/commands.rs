use std::io::Write;

use gausskit_core::funcspec::Support;
use gausskit_core::gaussfit::{self, bn_to_an, impulse_synthesis, l2_fit_error};
use gausskit_core::hermite::{compute_bn_truncated, eval_hermite_expansion, expansion_l2_error, expansion_weighted_error};
use gausskit_core::lowfreq::{self, LowFreqConfig, SmoothingMethod, TrigCombination};
use gausskit_core::lsq::{self, DEFAULT_DIGITS};
use gausskit_core::numerics::{condition_estimate, l2_norm};
use gausskit_core::stencil::solve_stencil;
use gausskit_core::{Error, GaussianCombination, QuadratureConfig, TargetFunction};
use serde_json::Value;

use crate::args::*;
use crate::error::CliError;
use crate::formats;
use crate::report::{Coefficient, Method, RunReport};

pub const DIGITS_ENV: &str = "GAUSSKIT_DEFAULT_DIGITS";

/// Where a command's outputs go.
pub enum Output {
    Report(RunReport),
    /// Raw text for standard output (the `eval` table).
    Text(Vec<u8>),
}

type CmdResult = Result<Output, CliError>;

pub fn execute(cmd: Command) -> CmdResult {
    match cmd {
        Command::Fit(a) => fit(a),
        Command::Hermite(a) => hermite(a),
        Command::Lsq(a) => least_squares(a),
        Command::Trig(a) => trig(a),
        Command::Cosine(a) => cosine(a),
        Command::Stencil(a) => stencil(a),
        Command::Synth(a) => synth(a),
        Command::Eval(a) => eval(a),
        Command::Error(a) => compare_errors(a),
    }
}

fn target(t: &TargetArg) -> Result<TargetFunction, CliError> {
    TargetFunction::parse(&t.f).map_err(|e| CliError::usage(format!("--f: {e}")))
}

fn real_target(t: &TargetArg) -> Result<TargetFunction, CliError> {
    let f = target(t)?;
    if f.is_complex() {
        return Err(CliError::usage("--f: this method needs a real target"));
    }
    Ok(f)
}

fn step(t: f64) -> Result<f64, CliError> {
    if t == 0.0 || !t.is_finite() {
        return Err(CliError::usage("--t must be finite and nonzero"));
    }
    Ok(t)
}

fn positive(name: &str, v: f64) -> Result<f64, CliError> {
    if !(v.is_finite() && v > 0.0) {
        return Err(CliError::usage(format!("{name} must be positive")));
    }
    Ok(v)
}

fn quad_config(q: &QuadArgs) -> Result<QuadratureConfig, CliError> {
    let mut cfg = QuadratureConfig::default();
    if let Some(tol) = q.abs_tol {
        cfg.abs_tol = positive("--abs-tol", tol)?;
    }
    Ok(cfg)
}

fn echo_quad(r: &mut RunReport, cfg: &QuadratureConfig) {
    r.param("abs_tol", cfg.abs_tol)
        .param("rel_tol", cfg.rel_tol)
        .param("max_depth", cfg.max_depth)
        .param("tail_cutoff", cfg.tail_cutoff);
}

fn echo_target(r: &mut RunReport, f: &TargetFunction) {
    r.param("f", f.render());
}

fn opt_number(v: Option<f64>) -> Value {
    v.map_or(Value::Null, Value::from)
}

/// Support plus a margin of one, widened to cover `extra`.
fn default_range(f: &TargetFunction, extra: Option<(f64, f64)>) -> (f64, f64) {
    let (mut lo, mut hi) = match f.support() {
        Support::Interval(a, b) => (a - 1.0, b + 1.0),
        Support::WholeLine => (-5.0, 5.0),
        Support::Empty => (-1.0, 1.0),
    };
    if let Some((a, b)) = extra {
        lo = lo.min(a - 1.0);
        hi = hi.max(b + 1.0);
    }
    (lo, hi)
}

fn curve<A: FnMut(f64) -> f64>(
    r: &mut RunReport,
    c: &CurveArgs,
    f: &TargetFunction,
    range: (f64, f64),
    approx: A,
) -> Result<(), CliError> {
    let Some(path) = &c.csv else { return Ok(()) };
    if c.samples < 2 {
        return Err(CliError::usage("--samples must be at least 2"));
    }
    r.param("range", vec![range.0, range.1]).param("samples", c.samples);
    formats::emit_curve_csv(|x| f.evaluate_real(x), approx, range, c.samples, path)?;
    Ok(())
}

fn coeff_file<F>(c: &CoeffsArg, body: F) -> Result<(), CliError>
where
    F: FnOnce(&mut std::io::BufWriter<std::fs::File>) -> std::io::Result<()>,
{
    if let Some(path) = &c.coeffs {
        formats::write_file(path, body)?;
    }
    Ok(())
}

fn translate_coeffs(c: &GaussianCombination) -> Vec<Coefficient> {
    c.weights()
        .iter()
        .zip(c.shifts())
        .enumerate()
        .map(|(index, (a, shift))| Coefficient::Translate {
            index,
            shift,
            value: a.to_f64(),
            sign: if a.is_zero() { 0 } else if a.is_negative() { -1 } else { 1 },
            log10_magnitude: a.log10_abs(),
        })
        .collect()
}

fn trig_coeffs(c: &TrigCombination) -> Vec<Coefficient> {
    c.coeffs_c64()
        .into_iter()
        .zip(c.frequencies())
        .enumerate()
        .map(|(index, (a, frequency))| Coefficient::Trig { index, frequency, re: a.re, im: a.im })
        .collect()
}

fn fit(a: FitArgs) -> CmdResult {
    let f = real_target(&a.target)?;
    let t = step(a.t)?;
    let m = a.m.map(|m| positive("--M", m)).transpose()?;
    let cfg = quad_config(&a.quad)?;
    let c = gaussfit::fit_truncated(&f, a.n, t, m, &cfg)?;
    let err = l2_fit_error(&f, &c, &cfg)?;

    let mut r = RunReport::new(Method::GaussThm3);
    echo_target(&mut r, &f);
    r.param("N", a.n).param("t", t);
    r.param("M", opt_number(c.hermite.as_ref().and_then(|h| h.truncation_m)));
    echo_quad(&mut r, &cfg);
    r.error_l2 = Some(err);
    r.diag("eval_digits", c.eval_digits());
    r.coefficients = translate_coeffs(&c);

    let range = a.curve.range.unwrap_or_else(|| default_range(&f, Some(c.centre_span())));
    let mut ev = c.evaluator();
    curve(&mut r, &a.curve, &f, range, |x| ev.eval(x))?;
    coeff_file(&a.coeffs, |w| formats::write_translate_coeffs(w, &c))?;
    Ok(Output::Report(r))
}

fn hermite(a: HermiteArgs) -> CmdResult {
    let f = real_target(&a.target)?;
    let m = a.m.map(|m| positive("--M", m)).transpose()?;
    let cfg = quad_config(&a.quad)?;
    let h = compute_bn_truncated(&f, a.n, m, &cfg)?;

    let mut r = RunReport::new(Method::Hermite);
    echo_target(&mut r, &f);
    r.param("N", a.n).param("M", opt_number(h.truncation_m));
    echo_quad(&mut r, &cfg);
    r.error_l2 = Some(expansion_l2_error(&f, &h, &cfg)?);
    r.error_weighted = Some(expansion_weighted_error(&f, &h, &cfg)?);
    r.coefficients = h.b.iter().zip(&h.c).enumerate().map(|(index, (&b, &c))| Coefficient::Hermite { index, b, c }).collect();

    let range = a.curve.range.unwrap_or_else(|| default_range(&f, None));
    curve(&mut r, &a.curve, &f, range, |x| eval_hermite_expansion(&h, x))?;
    coeff_file(&a.coeffs, |w| {
        w.write_all(b"index,b,c\n")?;
        for (n, (b, c)) in h.b.iter().zip(&h.c).enumerate() {
            writeln!(w, "{n},{},{}", formats::fmt17(*b), formats::fmt17(*c))?;
        }
        Ok(())
    })?;
    Ok(Output::Report(r))
}

/// Precision from the flag, else the environment, else the library default.
fn resolve_digits(flag: Option<u32>) -> Result<(u32, &'static str), CliError> {
    if let Some(d) = flag {
        return Ok((d, "flag"));
    }
    match std::env::var(DIGITS_ENV) {
        Ok(v) => {
            let d = v.trim().parse().map_err(|_| CliError::usage(format!("{DIGITS_ENV}: `{v}` is not a positive integer")))?;
            Ok((d, "env"))
        }
        Err(_) => Ok((DEFAULT_DIGITS, "default")),
    }
}

fn least_squares(a: LsqArgs) -> CmdResult {
    let f = real_target(&a.target)?;
    let t = step(a.t)?;
    let (digits, source) = resolve_digits(a.digits)?;
    if digits < 16 {
        return Err(CliError::usage("--digits must be at least 16"));
    }
    let cfg = quad_config(&a.quad)?;
    // At t <= 0.01 the normal matrix loses about three digits per extra
    // translate; past N = 5 the default precision is not enough.
    if a.n > 5 && t.abs() <= 0.01 && digits <= DEFAULT_DIGITS {
        let condition = condition_estimate(&lsq::normal_matrix(a.n, t, digits)?).unwrap_or(f64::INFINITY);
        return Err(Error::IllConditioned { condition, digits }.into());
    }
    let (sys, fit) = lsq::fit_least_squares(&f, a.n, t, digits, &cfg)?;

    let mut r = RunReport::new(Method::GaussLsq);
    echo_target(&mut r, &f);
    r.param("N", a.n).param("t", t).param("precision", digits).param("precision_source", source);
    echo_quad(&mut r, &cfg);
    r.error_l2 = Some(fit.e2.sqrt());
    r.condition_estimate = Some(fit.condition);
    r.diag("e2", fit.e2)
        .diag("residual_inf", fit.residual_inf)
        .diag("rhs_inf", fit.rhs_inf)
        .diag("residual_constant", fit.residual_constant)
        .diag("f_norm_sq", sys.f_norm_sq.to_f64());
    let c = fit.combination;
    r.coefficients = translate_coeffs(&c);

    let range = a.curve.range.unwrap_or_else(|| default_range(&f, Some(c.centre_span())));
    let mut ev = c.evaluator();
    curve(&mut r, &a.curve, &f, range, |x| ev.eval(x))?;
    coeff_file(&a.coeffs, |w| formats::write_translate_coeffs(w, &c))?;
    Ok(Output::Report(r))
}

fn lowfreq_config(m: Option<f64>, g: &GridArgs) -> Result<LowFreqConfig, CliError> {
    let mut lf = LowFreqConfig::default();
    if let Some(h) = g.spacing {
        lf.spacing = positive("--grid-spacing", h)?;
    }
    if let Some(l) = g.half_width {
        lf.half_width = positive("--grid-halfwidth", l)?;
    }
    lf.truncation_m = m.map(|m| positive("--M", m)).transpose()?;
    Ok(lf)
}

fn echo_lowfreq(r: &mut RunReport, lf: &LowFreqConfig, c: &TrigCombination) {
    r.param("grid_spacing", lf.spacing).param("grid_halfwidth", lf.half_width);
    r.param(
        "smoothing",
        match lf.method {
            SmoothingMethod::DampedTransform => "damped-transform",
            SmoothingMethod::Convolution => "convolution",
        },
    );
    r.param("M", opt_number(c.truncation_m));
    r.param("M_mode", if lf.truncation_m.is_some() { "fixed" } else { "auto" });
}

fn trig(a: TrigArgs) -> CmdResult {
    let f = target(&a.target)?;
    let t = step(a.t)?;
    let cfg = quad_config(&a.quad)?;
    let lf = lowfreq_config(a.m, &a.grid)?;
    let mut r = RunReport::new(Method::Trig);
    echo_target(&mut r, &f);
    r.param("N", a.n).param("t", t);

    let (c, range) = match a.omega {
        Some(omega) => {
            let (lo, hi) = a.curve.range.ok_or_else(|| CliError::usage("--omega needs --range LO:HI for the fit interval"))?;
            let fit = lowfreq::fit_sincos_with(&f, lo, hi, a.n, t, omega, &lf, &cfg)?;
            r.param("omega", omega).param("interval", vec![lo, hi]);
            r.error_l2 = Some(fit.error_l2);
            r.error_weighted = Some(fit.error_weighted);
            (fit.combination, (lo, hi))
        }
        None => {
            let c = lowfreq::fit_lowfreq_with(&f, a.n, t, &lf, &cfg)?;
            r.error_weighted = Some(lowfreq::weighted_fit_error(&f, &c, &cfg)?);
            let range = a.curve.range.unwrap_or((-5.0, 5.0));
            (c, range)
        }
    };
    echo_lowfreq(&mut r, &lf, &c);
    echo_quad(&mut r, &cfg);
    r.diag("max_frequency", c.max_frequency());
    r.coefficients = trig_coeffs(&c);

    let mut ev = c.evaluator();
    curve(&mut r, &a.curve, &f, range, |s| ev.eval(s).re)?;
    coeff_file(&a.coeffs, |w| formats::write_trig_coeffs(w, &c))?;
    Ok(Output::Report(r))
}

fn cosine(a: CosineArgs) -> CmdResult {
    let f = real_target(&a.target)?;
    let t = step(a.t)?;
    let cfg = quad_config(&a.quad)?;
    let lf = lowfreq_config(a.m, &a.grid)?;
    let (lo, b) = a.curve.range.ok_or_else(|| CliError::usage("cosine needs --range 0:B"))?;
    if lo != 0.0 {
        return Err(CliError::usage("cosine fits live on [0, B]; use --range 0:B"));
    }
    let fit = lowfreq::fit_cosine_even_with(&f, b, a.n, t, a.omega, &lf, &cfg)?;

    let mut r = RunReport::new(Method::Cosine);
    echo_target(&mut r, &f);
    r.param("N", a.n).param("t", t).param("omega", a.omega).param("interval", vec![0.0, b]);
    echo_lowfreq(&mut r, &lf, &fit.cosine);
    echo_quad(&mut r, &cfg);
    r.error_l2 = Some(fit.error_l2);
    r.error_weighted = Some(fit.sincos.error_weighted);
    r.diag("sincos_error_l2", fit.sincos.error_l2);
    r.coefficients = trig_coeffs(&fit.cosine);

    curve(&mut r, &a.curve, &f, (0.0, b), |x| fit.eval(x))?;
    coeff_file(&a.coeffs, |w| formats::write_trig_coeffs(w, &fit.cosine))?;
    Ok(Output::Report(r))
}

fn stencil(a: StencilArgs) -> CmdResult {
    let s = solve_stencil(a.order, &a.nodes.values)?;
    let mut r = RunReport::new(Method::Stencil);
    r.param("order", a.order).param("nodes", a.nodes.text.as_str());
    r.diag("order_of_accuracy", s.order_of_accuracy).diag("error_constant", s.error_constant());
    r.diag("max_moment_residual", s.moment_residuals().into_iter().fold(0.0, f64::max));
    r.coefficients = s
        .nodes
        .iter()
        .zip(&s.coeffs)
        .map(|(k, c)| Coefficient::Stencil { node_re: k.re, node_im: k.im, re: c.re, im: c.im })
        .collect();
    if let Some(path) = &a.csv {
        formats::write_file(path, |w| formats::write_stencil(w, &s))?;
    }
    Ok(Output::Report(r))
}

fn synth(a: SynthArgs) -> CmdResult {
    let f = real_target(&a.target)?;
    let tau = positive("--tau", a.tau)?;
    let cfg = quad_config(&a.quad)?;
    let (train, combo) = impulse_synthesis(&f, a.n, tau, &cfg)?;

    let mut r = RunReport::new(Method::Synth);
    echo_target(&mut r, &f);
    r.param("N", a.n).param("tau", tau).param("t", train.step);
    r.param("M", opt_number(combo.hermite.as_ref().and_then(|h| h.truncation_m)));
    echo_quad(&mut r, &cfg);
    r.error_l2 = Some(l2_fit_error(&f, &combo, &cfg)?);
    r.diag("last_impulse", train.times.last().copied().unwrap_or(0.0));
    r.coefficients = train
        .times
        .iter()
        .zip(train.weights_f64())
        .enumerate()
        .map(|(index, (&time, weight))| Coefficient::Impulse { index, time, weight })
        .collect();

    let range = a.curve.range.unwrap_or_else(|| default_range(&f, Some(combo.centre_span())));
    curve(&mut r, &a.curve, &f, range, |x| train.filter(x))?;
    coeff_file(&a.coeffs, |w| {
        w.write_all(b"index,time,weight\n")?;
        for (n, (time, weight)) in train.times.iter().zip(&train.weights).enumerate() {
            writeln!(w, "{n},{},{}", formats::fmt17(*time), formats::fmt17(weight.to_f64()))?;
        }
        Ok(())
    })?;
    Ok(Output::Report(r))
}

fn eval(a: EvalArgs) -> CmdResult {
    let f = target(&a.target)?;
    if a.samples < 2 {
        return Err(CliError::usage("--samples must be at least 2"));
    }
    let range = a.range.unwrap_or_else(|| default_range(&f, None));
    match &a.csv {
        Some(path) => {
            formats::write_file(path, |w| formats::write_samples_csv(w, |x| f.evaluate(x), range, a.samples))?;
            Ok(Output::Text(Vec::new()))
        }
        None => {
            let mut buf = Vec::new();
            formats::write_samples_csv(&mut buf, |x| f.evaluate(x), range, a.samples)?;
            Ok(Output::Text(buf))
        }
    }
}

fn compare_errors(a: FitArgs) -> CmdResult {
    let f = real_target(&a.target)?;
    let t = step(a.t)?;
    let m = a.m.map(|m| positive("--M", m)).transpose()?;
    let cfg = quad_config(&a.quad)?;
    let h = compute_bn_truncated(&f, a.n, m, &cfg)?;
    let herr = expansion_l2_error(&f, &h, &cfg)?;
    let mut c = bn_to_an(&h, t)?;
    c.hermite = Some(h.clone());
    let err = l2_fit_error(&f, &c, &cfg)?;
    let norm = l2_norm(|x| f.evaluate(x), &f.domain(), &cfg)?;

    let mut r = RunReport::new(Method::GaussThm3);
    echo_target(&mut r, &f);
    r.param("N", a.n).param("t", t).param("M", opt_number(h.truncation_m));
    echo_quad(&mut r, &cfg);
    r.error_l2 = Some(err);
    r.diag("hermite_error_l2", herr).diag("f_norm_l2", norm);
    if norm > 0.0 {
        r.diag("relative_error_l2", err / norm).diag("hermite_relative_error_l2", herr / norm);
    }
    r.coefficients = translate_coeffs(&c);

    let range = a.curve.range.unwrap_or_else(|| default_range(&f, Some(c.centre_span())));
    let mut ev = c.evaluator();
    curve(&mut r, &a.curve, &f, range, |x| ev.eval(x))?;
    coeff_file(&a.coeffs, |w| formats::write_translate_coeffs(w, &c))?;
    Ok(Output::Report(r))
}
