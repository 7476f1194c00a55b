//! Globally adaptive 21-point Gauss–Kronrod quadrature on finite panels.
//!
//! Whole-line integrals are truncated to `[-tail_cutoff, tail_cutoff]`; all
//! integrands used by this crate decay at least like a Gaussian or are
//! compactly supported. Domains carry their discontinuities as breakpoints so
//! that no panel ever straddles a jump.

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_complex::Complex64;

use super::sum::NeumaierSum;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    /// Absolute error target per integral.
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Maximum number of bisections applied to any initial panel.
    pub max_depth: u32,
    /// `|x|` beyond which Gaussian-decaying integrands are treated as zero.
    pub tail_cutoff: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig { abs_tol: 1e-10, rel_tol: 1e-10, max_depth: 60, tail_cutoff: 30.0 }
    }
}

impl QuadratureConfig {
    pub fn new(abs_tol: f64, rel_tol: f64, max_depth: u32, tail_cutoff: f64) -> Result<Self> {
        let cfg = QuadratureConfig { abs_tol, rel_tol, max_depth, tail_cutoff };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.abs_tol > 0.0
            && self.rel_tol > 0.0
            && self.max_depth >= 1
            && self.tail_cutoff > 0.0
            && self.abs_tol.is_finite()
            && self.tail_cutoff.is_finite();
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(alloc::format!(
                "quadrature config needs abs_tol > 0, rel_tol > 0, max_depth >= 1, tail_cutoff > 0 (got {self:?})"
            )))
        }
    }

    pub fn with_abs_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Span {
    Interval(f64, f64),
    WholeLine,
}

/// Integration domain plus the points where the integrand may jump or kink.
#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    pub span: Span,
    pub breakpoints: Vec<f64>,
}

impl Domain {
    pub fn interval(lo: f64, hi: f64) -> Self {
        Domain { span: Span::Interval(lo, hi), breakpoints: Vec::new() }
    }

    pub fn whole_line() -> Self {
        Domain { span: Span::WholeLine, breakpoints: Vec::new() }
    }

    pub fn with_breakpoints(mut self, pts: impl IntoIterator<Item = f64>) -> Self {
        self.breakpoints.extend(pts);
        self.breakpoints.sort_by(f64::total_cmp);
        self.breakpoints.dedup();
        self
    }

    /// Finite integration limits. Whole-line domains also stretch to cover
    /// every breakpoint.
    pub fn limits(&self, cfg: &QuadratureConfig) -> Result<(f64, f64)> {
        match self.span {
            Span::Interval(lo, hi) => {
                if !(lo.is_finite() && hi.is_finite()) || lo > hi {
                    return Err(Error::InvalidDomain { lo, hi });
                }
                Ok((lo, hi))
            }
            Span::WholeLine => {
                let mut lo = -cfg.tail_cutoff;
                let mut hi = cfg.tail_cutoff;
                for &b in &self.breakpoints {
                    lo = lo.min(b);
                    hi = hi.max(b);
                }
                Ok((lo, hi))
            }
        }
    }

    /// Panel edges: limits, interior breakpoints, then uniform refinement so
    /// no initial panel is wider than `max_width`.
    pub fn panel_edges(&self, cfg: &QuadratureConfig, max_width: f64) -> Result<Vec<f64>> {
        let (lo, hi) = self.limits(cfg)?;
        let mut cuts = vec![lo];
        cuts.extend(self.breakpoints.iter().copied().filter(|&b| b > lo && b < hi));
        cuts.push(hi);
        let mut edges = Vec::with_capacity(cuts.len());
        for w in cuts.windows(2) {
            let (a, b) = (w[0], w[1]);
            let pieces = libm::ceil((b - a) / max_width).max(1.0) as usize;
            for i in 0..pieces {
                edges.push(a + (b - a) * i as f64 / pieces as f64);
            }
        }
        edges.push(hi);
        edges.dedup();
        Ok(edges)
    }

    pub fn is_whole_line(&self) -> bool {
        matches!(self.span, Span::WholeLine)
    }
}

/// Values that can be integrated: scalars, complex numbers and fixed-length
/// vectors (several integrals sharing one set of integrand evaluations).
pub trait QuadValue: Clone {
    fn zero_like(&self) -> Self;
    /// `self += w * other`
    fn add_scaled(&mut self, other: &Self, w: f64);
    /// Max-norm of `self - other`.
    fn dist(&self, other: &Self) -> f64;
    /// Max-norm.
    fn magnitude(&self) -> f64;
}

impl QuadValue for f64 {
    fn zero_like(&self) -> Self {
        0.0
    }
    fn add_scaled(&mut self, other: &Self, w: f64) {
        *self += w * other;
    }
    fn dist(&self, other: &Self) -> f64 {
        libm::fabs(self - other)
    }
    fn magnitude(&self) -> f64 {
        libm::fabs(*self)
    }
}

impl QuadValue for Complex64 {
    fn zero_like(&self) -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn add_scaled(&mut self, other: &Self, w: f64) {
        *self += other * w;
    }
    fn dist(&self, other: &Self) -> f64 {
        (self - other).norm()
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

impl QuadValue for Vec<f64> {
    fn zero_like(&self) -> Self {
        vec![0.0; self.len()]
    }
    fn add_scaled(&mut self, other: &Self, w: f64) {
        for (a, b) in self.iter_mut().zip(other) {
            *a += w * b;
        }
    }
    fn dist(&self, other: &Self) -> f64 {
        self.iter().zip(other).map(|(a, b)| libm::fabs(a - b)).fold(0.0, f64::max)
    }
    fn magnitude(&self) -> f64 {
        self.iter().map(|a| libm::fabs(*a)).fold(0.0, f64::max)
    }
}

// QUADPACK qk21 abscissae and weights.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_600_525_478_282,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];
// Gauss weights for XGK[1], XGK[3], ..., XGK[9].
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

struct Panel<V> {
    a: f64,
    b: f64,
    depth: u32,
    value: V,
    error: f64,
}

struct Queued(f64, usize);

impl PartialEq for Queued {
    fn eq(&self, o: &Self) -> bool {
        self.0 == o.0 && self.1 == o.1
    }
}
impl Eq for Queued {}
impl PartialOrd for Queued {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Queued {
    fn cmp(&self, o: &Self) -> Ordering {
        // Ties broken by index so the refinement order is reproducible.
        self.0.total_cmp(&o.0).then_with(|| o.1.cmp(&self.1))
    }
}

fn kronrod21<V: QuadValue, F: FnMut(f64) -> V>(g: &mut F, a: f64, b: f64) -> (V, f64, bool) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = g(center);
    let mut kron = fc.zero_like();
    let mut gauss = fc.zero_like();
    let mut absk = 0.0;
    kron.add_scaled(&fc, WGK[10]);
    absk += WGK[10] * fc.magnitude();
    for (j, (&x, &w)) in XGK[..10].iter().zip(&WGK[..10]).enumerate() {
        let dx = half * x;
        let f1 = g(center - dx);
        let f2 = g(center + dx);
        kron.add_scaled(&f1, w);
        kron.add_scaled(&f2, w);
        absk += w * (f1.magnitude() + f2.magnitude());
        if j % 2 == 1 {
            let wg = WG[j / 2];
            gauss.add_scaled(&f1, wg);
            gauss.add_scaled(&f2, wg);
        }
    }
    let scale = libm::fabs(half);
    let mut value = kron.zero_like();
    value.add_scaled(&kron, half);
    let raw = kron.dist(&gauss) * scale;
    let floor = 50.0 * f64::EPSILON * absk * scale;
    if raw <= floor {
        (value, floor, true)
    } else {
        (value, raw, false)
    }
}

/// Integrate `g` over `domain`. Panels are never wider than `max_width`
/// initially; oscillatory integrands should pass a width below their period.
pub fn integrate_with_width<V, F>(
    mut g: F,
    domain: &Domain,
    cfg: &QuadratureConfig,
    max_width: f64,
) -> Result<V>
where
    V: QuadValue,
    F: FnMut(f64) -> V,
{
    cfg.validate()?;
    let edges = domain.panel_edges(cfg, max_width)?;
    let (lo, hi) = (edges[0], edges[edges.len() - 1]);
    if edges.len() < 2 || lo == hi {
        let probe = g(lo);
        return Ok(probe.zero_like());
    }

    let mut panels: Vec<Panel<V>> = Vec::with_capacity(edges.len() * 4);
    let mut heap = BinaryHeap::new();
    for w in edges.windows(2) {
        let (value, error, settled) = kronrod21(&mut g, w[0], w[1]);
        if !settled {
            heap.push(Queued(error, panels.len()));
        }
        panels.push(Panel { a: w[0], b: w[1], depth: 0, value, error });
    }

    // Gaussian-tail allowance beyond the truncation points.
    let tail = if domain.is_whole_line() {
        let t = cfg.tail_cutoff;
        (g(lo).magnitude() + g(hi).magnitude()) / (2.0 * t)
    } else {
        0.0
    };

    const MAX_PANELS: usize = 1 << 18;
    // Running totals steer the loop; the reported value is re-summed in a
    // fixed order once the running estimate says we are done.
    let mut run_err: f64 = panels.iter().map(|p| p.error).sum();
    let mut run_val = panels[0].value.zero_like();
    for p in &panels {
        run_val.add_scaled(&p.value, 1.0);
    }
    loop {
        let tol = cfg.abs_tol.max(cfg.rel_tol * run_val.magnitude());
        if run_err + tail <= tol || heap.is_empty() {
            let (total, err) = totals(&panels);
            let tol = cfg.abs_tol.max(cfg.rel_tol * total.magnitude());
            if err + tail <= tol {
                return Ok(total);
            }
            if heap.is_empty() {
                // Every panel sits at its rounding floor.
                if tail <= tol {
                    return Ok(total);
                }
                return Err(Error::NonConvergence { estimate: err + tail, tolerance: tol });
            }
            run_err = err;
        }
        let Some(Queued(_, idx)) = heap.pop() else { unreachable!() };
        let p = &panels[idx];
        if p.depth >= cfg.max_depth || panels.len() >= MAX_PANELS {
            let (total, err) = totals(&panels);
            let tol = cfg.abs_tol.max(cfg.rel_tol * total.magnitude());
            return Err(Error::NonConvergence { estimate: err + tail, tolerance: tol });
        }
        let (a, b, depth) = (p.a, p.b, p.depth + 1);
        run_err -= p.error;
        run_val.add_scaled(&p.value, -1.0);
        let m = 0.5 * (a + b);
        let (v1, e1, s1) = kronrod21(&mut g, a, m);
        let (v2, e2, s2) = kronrod21(&mut g, m, b);
        run_err += e1 + e2;
        run_val.add_scaled(&v1, 1.0);
        run_val.add_scaled(&v2, 1.0);
        panels[idx] = Panel { a, b: m, depth, value: v1, error: e1 };
        if !s1 {
            heap.push(Queued(e1, idx));
        }
        if !s2 {
            heap.push(Queued(e2, panels.len()));
        }
        panels.push(Panel { a: m, b, depth, value: v2, error: e2 });
    }
}

fn totals<V: QuadValue>(panels: &[Panel<V>]) -> (V, f64) {
    // Fixed order (by left edge) keeps results bit-reproducible.
    let mut order: Vec<usize> = (0..panels.len()).collect();
    order.sort_by(|&i, &j| panels[i].a.total_cmp(&panels[j].a));
    let mut total = panels[0].value.zero_like();
    let mut err = NeumaierSum::new();
    for i in order {
        total.add_scaled(&panels[i].value, 1.0);
        err.add(panels[i].error);
    }
    (total, err.sum())
}

/// Integrate with the default initial panel width of 1.
pub fn integrate<V, F>(g: F, domain: &Domain, cfg: &QuadratureConfig) -> Result<V>
where
    V: QuadValue,
    F: FnMut(f64) -> V,
{
    integrate_with_width(g, domain, cfg, 1.0)
}

/// `(∫ |g|²)^{1/2}`
pub fn l2_norm<F>(mut g: F, domain: &Domain, cfg: &QuadratureConfig) -> Result<f64>
where
    F: FnMut(f64) -> Complex64,
{
    let s: f64 = integrate(|x| g(x).norm_sqr(), domain, cfg)?;
    Ok(libm::sqrt(s.max(0.0)))
}

/// `(∫ |g(x)|² e^{-x²} dx)^{1/2}`
pub fn weighted_l2_norm<F>(mut g: F, domain: &Domain, cfg: &QuadratureConfig) -> Result<f64>
where
    F: FnMut(f64) -> Complex64,
{
    let s: f64 = integrate(|x| g(x).norm_sqr() * libm::exp(-x * x), domain, cfg)?;
    Ok(libm::sqrt(s.max(0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    fn erf_oracle_gaussian_integral() -> f64 {
        // ∫_{-30}^{30} e^{-x²} = √π · erf(30); erf(30) == 1 in f64.
        libm::sqrt(PI) * libm::erf(30.0)
    }

    #[test]
    fn gaussian_over_whole_line() {
        let v: f64 = integrate(|x| libm::exp(-x * x), &Domain::whole_line(), &cfg()).unwrap();
        assert!((v - erf_oracle_gaussian_integral()).abs() < 1e-10);
        assert!((v - 1.772_453_850_9).abs() < 1e-10);
    }

    #[test]
    fn zero_and_unit_rectangle() {
        let z: f64 = integrate(|_| 0.0, &Domain::interval(-3.0, 7.0), &cfg()).unwrap();
        assert_eq!(z, 0.0);
        let one: f64 = integrate(|_| 1.0, &Domain::interval(0.0, 1.0), &cfg()).unwrap();
        assert!((one - 1.0).abs() < 1e-14);
    }

    #[test]
    fn reversed_interval_is_rejected() {
        let r: Result<f64> = integrate(|x| x, &Domain::interval(1.0, 0.0), &cfg());
        assert!(matches!(r, Err(Error::InvalidDomain { .. })));
    }

    #[test]
    fn nonconvergence_is_reported() {
        let tight = QuadratureConfig { max_depth: 1, ..cfg() };
        // A jump that the domain does not know about.
        let r: Result<f64> =
            integrate(|x| if x < 0.123_456 { 0.0 } else { 1.0 }, &Domain::interval(0.0, 1.0), &tight);
        assert!(matches!(r, Err(Error::NonConvergence { .. })));
    }

    #[test]
    fn breakpoints_handle_jumps() {
        let d = Domain::interval(-2.0, 2.0).with_breakpoints([0.3]);
        let v: f64 = integrate(|x| if x >= 0.3 { 1.0 } else { 0.0 }, &d, &cfg()).unwrap();
        assert!((v - 1.7).abs() < 1e-12);
    }

    #[test]
    fn complex_and_vector_values() {
        let v: Complex64 =
            integrate(|x| Complex64::new(0.0, x).exp() * libm::exp(-x * x), &Domain::whole_line(), &cfg())
                .unwrap();
        // ∫ e^{ix} e^{-x²} = √π e^{-1/4}
        assert!((v.re - libm::sqrt(PI) * libm::exp(-0.25)).abs() < 1e-10);
        assert!(v.im.abs() < 1e-10);
        let w: Vec<f64> =
            integrate(|x| vec![x, x * x], &Domain::interval(0.0, 1.0), &cfg()).unwrap();
        assert!((w[0] - 0.5).abs() < 1e-14 && (w[1] - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn norms_match_closed_forms() {
        let c = cfg();
        let chi = Domain::interval(0.0, 1.0);
        assert!((l2_norm(|_| Complex64::new(1.0, 0.0), &chi, &c).unwrap() - 1.0).abs() < 1e-12);
        let g = l2_norm(|x| Complex64::new(libm::exp(-x * x), 0.0), &Domain::whole_line(), &c).unwrap();
        assert!((g - libm::pow(PI / 2.0, 0.25)).abs() < 1e-10);
        let w = weighted_l2_norm(|_| Complex64::new(1.0, 0.0), &Domain::whole_line(), &c).unwrap();
        assert!((w - libm::pow(PI, 0.25)).abs() < 1e-10);
        let e = weighted_l2_norm(|x| Complex64::new(0.0, x).exp(), &Domain::whole_line(), &c).unwrap();
        assert!((e - libm::pow(PI, 0.25)).abs() < 1e-10);
        assert_eq!(l2_norm(|_| Complex64::new(0.0, 0.0), &Domain::whole_line(), &c).unwrap(), 0.0);
    }
}
