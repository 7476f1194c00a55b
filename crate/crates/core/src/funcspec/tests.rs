use super::*;
use crate::numerics::{integrate, l2_norm, QuadratureConfig};
use proptest::prelude::*;

fn f(s: &str) -> TargetFunction {
    TargetFunction::parse(s).unwrap()
}

#[test]
fn far_indicator() {
    let g = f("chi(-11,-10)");
    assert_eq!(g.support(), Support::Interval(-11.0, -10.0));
    assert_eq!(g.breakpoints(), &[-11.0, -10.0]);
    assert_eq!(g.evaluate_real(-10.5), 1.0);
    assert_eq!(g.evaluate_real(0.0), 0.0);
    // Reversed endpoints describe the same interval.
    assert_eq!(f("chi(-10,-11)").support(), Support::Interval(-11.0, -10.0));
}

#[test]
fn parabola_example() {
    let g = f("(x-1)^2 * chi(-1,2)");
    assert_eq!(g.support(), Support::Interval(-1.0, 2.0));
    assert_eq!(g.evaluate_real(-1.0), 4.0);
    assert_eq!(g.evaluate_real(0.5), 0.25);
    assert_eq!(g.evaluate_real(2.5), 0.0);
}

#[test]
fn sine_example() {
    let g = f("sin(x) * chi(-pi,pi)");
    let pi = core::f64::consts::PI;
    assert_eq!(g.support(), Support::Interval(-pi, pi));
    assert_eq!(g.breakpoints(), &[-pi, pi]);
    assert!((g.evaluate_real(pi / 2.0) - 1.0).abs() < 1e-15);
    assert_eq!(g.evaluate_real(4.0), 0.0);
}

#[test]
fn indicator_is_closed() {
    let g = f("chi(-1,2)");
    assert_eq!(g.evaluate_real(0.0), 1.0);
    assert_eq!(g.evaluate_real(3.0), 0.0);
    assert_eq!(g.evaluate_real(-1.0), 1.0);
    assert_eq!(g.evaluate_real(2.0), 1.0);
}

#[test]
fn grammar_extensions() {
    assert_eq!(f("-x^2").evaluate_real(3.0), -9.0);
    assert_eq!(f("x/4").evaluate_real(2.0), 0.5);
    assert_eq!(f("2.5e-1").evaluate_real(0.0), 0.25);
    assert!((f("gauss(1)").evaluate_real(2.0) - (-1.0f64).exp()).abs() < 1e-16);
    assert_eq!(f("abs(x)").evaluate_real(-3.0), 3.0);
    let z = f("exp(i*x)");
    assert!(z.is_complex());
    let v = z.evaluate(1.0);
    assert!((v.re - 1f64.cos()).abs() < 1e-15 && (v.im - 1f64.sin()).abs() < 1e-15);
    assert_eq!(f("  ( x + 1 )*chi( 0 , 1 )").evaluate_real(1.0), 2.0);
}

#[test]
fn syntax_errors_carry_position() {
    assert!(matches!(TargetFunction::parse("x +"), Err(Error::Syntax { position: 3, .. })));
    assert!(matches!(TargetFunction::parse("(x"), Err(Error::Syntax { position: 2, .. })));
    assert!(matches!(TargetFunction::parse("x $ 1"), Err(Error::Syntax { position: 2, .. })));
    assert!(matches!(TargetFunction::parse("x^1.5"), Err(Error::Syntax { .. })));
    assert!(matches!(TargetFunction::parse("chi(x,1)"), Err(Error::Syntax { .. })));
    assert!(matches!(TargetFunction::parse("1/x"), Err(Error::Syntax { .. })));
    assert!(matches!(TargetFunction::parse("1/0"), Err(Error::Syntax { .. })));
    assert!(matches!(TargetFunction::parse("x x"), Err(Error::Syntax { position: 2, .. })));
    match TargetFunction::parse("2*tan(x)") {
        Err(Error::UnknownSymbol { symbol, position }) => {
            assert_eq!(symbol, "tan");
            assert_eq!(position, 2);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn support_rules() {
    assert_eq!(f("0").support(), Support::Empty);
    assert_eq!(f("x").support(), Support::WholeLine);
    assert_eq!(f("chi(0,1) + chi(3,4)").support(), Support::Interval(0.0, 4.0));
    assert_eq!(f("chi(0,2) * chi(1,3)").support(), Support::Interval(1.0, 2.0));
    assert_eq!(f("chi(0,1) * chi(2,3)").support(), Support::Empty);
    assert_eq!(f("cos(chi(0,1))").support(), Support::WholeLine);
    assert_eq!(f("chi(0,1) + x").support(), Support::WholeLine);
    // Breakpoints outside the support are dropped.
    assert_eq!(f("chi(0,2) * chi(1,3)").breakpoints(), &[1.0, 2.0]);
}

#[test]
fn clamp_examples() {
    let one = f("1");
    let g = one.clamp(1.0, 1).unwrap();
    for x in [-1.5f64, -1.0, -0.3, 0.0, 0.7, 1.0, 2.0] {
        let expect = if x.abs() <= 1.0 { x * x - 1.0 } else { 0.0 };
        assert!((g.evaluate_real(x) - expect).abs() < 1e-15, "x = {x}");
    }
    assert_eq!(g.support(), Support::Interval(-1.0, 1.0));
    let s = f("sin(x)").clamp(core::f64::consts::PI, 2).unwrap();
    assert_eq!(s.evaluate_real(0.0), 0.0);
    assert_eq!(s.evaluate_real(core::f64::consts::PI), 0.0);
    assert_eq!(s.evaluate_real(-core::f64::consts::PI), 0.0);
    assert!(matches!(one.clamp(0.0, 1), Err(Error::InvalidParameter(_))));
    assert!(matches!(one.clamp(1.0, 0), Err(Error::InvalidParameter(_))));
}

#[test]
fn clamp_is_smooth_at_the_edge() {
    // Finite-difference slopes from both sides vanish up to order n-1.
    let g = f("exp(x)").clamp(1.5, 3).unwrap();
    let h = 1e-4;
    let inside = (g.evaluate_real(1.5) - g.evaluate_real(1.5 - h)) / h;
    let outside = (g.evaluate_real(1.5 + h) - g.evaluate_real(1.5)) / h;
    assert!(inside.abs() < 1e-5 && outside == 0.0);
}

#[test]
fn shift_and_even_extension() {
    let g = f("(x-1)^2*chi(-1,2) + gauss(0.5)");
    let s = g.shifted(0.75);
    for k in -40..40 {
        let x = k as f64 * 0.1;
        assert!((s.evaluate_real(x) - g.evaluate_real(x + 0.75)).abs() < 1e-14);
    }
    let h = f("x*chi(0.5,2) + gauss(1)");
    let e = h.even_extension();
    for k in -30..30 {
        let x = k as f64 * 0.1 + 0.05;
        assert!((e.evaluate_real(x) - h.evaluate_real(x.abs())).abs() < 1e-14);
    }
    assert_eq!(f("chi(0,1)").even_extension().support(), Support::Interval(-1.0, 1.0));
}

#[test]
fn big_evaluation_matches() {
    let mut ctx = BigCtx::new(40);
    for (_, g) in catalog() {
        for k in -20..20 {
            let x = k as f64 * 0.37;
            let b = g.evaluate_big(&ctx.num(x), &mut ctx).unwrap().to_f64();
            let v = g.evaluate_real(x);
            assert!((b - v).abs() <= 1e-12 * (1.0 + v.abs()), "{g} at {x}: {b} vs {v}");
        }
    }
    assert!(f("i*x").evaluate_big(&ctx.num(1.0), &mut ctx).is_err());
    // Literals are read as decimals, not through f64.
    let tenth = f("0.1").evaluate_big(&ctx.num(0.0), &mut ctx).unwrap();
    let exact = ctx.ratio(1, 10);
    assert!((&tenth - &exact).log10_abs() < -38.0);
}

#[test]
fn catalog_round_trips() {
    for (name, g) in catalog() {
        let back = TargetFunction::parse(&g.render()).unwrap();
        assert_eq!(back.support(), g.support(), "{name}");
        assert_eq!(back.breakpoints(), g.breakpoints(), "{name}");
        for k in 0..1000 {
            let x = -15.0 + 30.0 * k as f64 / 999.0;
            assert_eq!(back.evaluate_real(x), g.evaluate_real(x), "{name} at {x}");
        }
    }
}

#[test]
fn vanishes_outside_support() {
    for (name, g) in catalog() {
        if let Support::Interval(a, b) = g.support() {
            for k in 1..=50 {
                let d = k as f64 * 0.173;
                assert_eq!(g.evaluate_real(a - d), 0.0, "{name}");
                assert_eq!(g.evaluate_real(b + d), 0.0, "{name}");
            }
        }
    }
}

#[test]
fn triangle_inequality_on_catalog() {
    let cfg = QuadratureConfig::default();
    let cat = catalog();
    for (_, g) in &cat {
        for (_, h) in &cat {
            let sum = TargetFunction::linear_combination(1.0, g, 1.0, h);
            let n = |t: &TargetFunction| l2_norm(|x| t.evaluate(x), &t.domain(), &cfg).unwrap();
            assert!(n(&sum) <= n(g) + n(h) + 10.0 * cfg.abs_tol);
        }
    }
}

#[test]
fn indicator_integrates_to_width() {
    let cfg = QuadratureConfig::default();
    let g = f("chi(-11,-10)");
    let v: f64 = integrate(|x| g.evaluate_real(x), &g.domain(), &cfg).unwrap();
    assert!((v - 1.0).abs() < 1e-12);
}

proptest! {
    #[test]
    fn render_parse_round_trip(a in -5.0f64..5.0, b in 0.1f64..4.0, c in -3.0f64..3.0, n in 1u32..4, x in -8.0f64..8.0) {
        let text = format!("({a})*x^{n}*chi({c},{}) + sin({b}*x) - exp(-x^2/{b})", c + b);
        let g = f(&text);
        let back = f(&g.render());
        prop_assert_eq!(back.evaluate_real(x), g.evaluate_real(x));
    }

    #[test]
    fn zero_outside_random_support(lo in -20.0f64..20.0, w in 0.0f64..5.0, d in 0.001f64..50.0) {
        let g = f(&format!("(x^2+1)*chi({lo},{})", lo + w));
        prop_assert_eq!(g.evaluate_real(lo - d), 0.0);
        prop_assert_eq!(g.evaluate_real(lo + w + d), 0.0);
    }
}
