use std::collections::BTreeSet;
use std::f64::consts::PI;

use proptest::prelude::*;
use setmotion_core::adjoint::*;
use setmotion_core::evolution::*;
use setmotion_core::geometry::*;
use setmotion_core::mintime::*;

// Y(0) = κ₁∫₀ᵀ e^{W(s)} ds + κ₂ e^{W(T)}, W(s) = ∫₀ˢ ω, with ω piecewise
// linear. W is integrated exactly; the outer integral by composite Simpson.
fn closed_form_y0(times: &[f64], omega: &[f64], k1: f64, k2: f64) -> f64 {
    let w_at = |s: f64| {
        let mut acc = 0.0;
        for k in 1..times.len() {
            let (t0, t1) = (times[k - 1], times[k]);
            if s <= t0 {
                break;
            }
            let e = s.min(t1);
            let slope = (omega[k] - omega[k - 1]) / (t1 - t0);
            acc += omega[k - 1] * (e - t0) + 0.5 * slope * (e - t0) * (e - t0);
        }
        acc
    };
    let mut integral = 0.0;
    for k in 1..times.len() {
        let (a, b) = (times[k - 1], times[k]);
        let n = 512;
        let h = (b - a) / n as f64;
        let mut s = w_at(a).exp() + w_at(b).exp();
        for j in 1..n {
            s += if j % 2 == 1 { 4.0 } else { 2.0 } * w_at(a + j as f64 * h).exp();
        }
        integral += s * h / 3.0;
    }
    k1 * integral + k2 * w_at(*times.last().unwrap()).exp()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn duality_on_random_curvatures(
        omega in prop::collection::vec(-3.0f64..3.0, 5..60),
        t_end in 0.1f64..3.0,
        k1 in 0.0f64..2.0,
        k2 in 0.01f64..2.0,
    ) {
        let n = omega.len();
        let times: Vec<f64> = (0..n).map(|i| t_end * i as f64 / (n - 1) as f64).collect();
        let tr = solve_adjoint(&times, &omega, k1, k2).unwrap();
        prop_assert!(tr.duality_residual < 1e-8);
        let exact = closed_form_y0(&times, &omega, k1, k2);
        prop_assert!((tr.y[0] - exact).abs() / exact < 1e-8, "{} vs {exact}", tr.y[0]);
    }

    #[test]
    fn adjoint_scales_linearly(omega in prop::collection::vec(-2.0f64..2.0, 5..30), c in 0.1f64..10.0) {
        let n = omega.len();
        let times: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
        let a = solve_adjoint(&times, &omega, 0.4, 1.3).unwrap();
        let b = solve_adjoint(&times, &omega, 0.4 * c, 1.3 * c).unwrap();
        for (ya, yb) in a.y.iter().zip(&b.y) {
            prop_assert!((yb - c * ya).abs() <= 1e-12 * c * ya.abs());
        }
    }
}

#[test]
fn max1_flags_are_scale_invariant() {
    let tri = triangle_strategy(1.0).unwrap();
    let d = Domain::unit_triangle();
    let w = Weights::new(0.3, 1.0);
    let a = check_max_principle(&tri.motion, &d, w, 1e-6).unwrap();
    let b = check_max_principle(&tri.motion, &d, w.scaled(7.5), 1e-6).unwrap();
    let fa: BTreeSet<_> = a.flagged.iter().collect();
    let fb: BTreeSet<_> = b.flagged.iter().collect();
    assert_eq!(fa, fb);
    assert!((a.worst_max1_gap - b.worst_max1_gap).abs() < 1e-12);
    assert_eq!(a.sameom_violations, 0);
}

#[test]
fn disc_flow_satisfies_the_maximum_principle() {
    let d = Domain::Disc { radius: 1.0 };
    let flow = dido_flow(&d, 3.0, PI).unwrap();
    let rep = check_max_principle(&flow, &d, Weights::min_time(), 1e-6).unwrap();
    assert!(rep.passed(), "{rep:?}");
    assert!(check_junctions(&flow, &d, 1e-6).passed());
}

// Ω = disc minus {x < −½} minus the part inside the circle of radius √(7/4)
// centred at (3/2, 0): two controlled pieces with curvatures 0 and −1/√(7/4).
fn two_cuts(d: &Domain, t: f64) -> MotionFrame {
    let h = 0.75f64.sqrt();
    let seg = CircArc::segment(Point::new(-0.5, h), Point::new(-0.5, -h));
    let c = Point::new(1.5, 0.0);
    let r = 1.75f64.sqrt();
    let a0 = (Point::new(0.5, -h) - c).angle();
    let arc = CircArc::from_center(c, r, a0, -2.0 * PI - a0);
    MotionFrame::new(d, t, Boundary::new(vec![seg, arc])).unwrap()
}

#[test]
fn unequal_curvatures_are_flagged() {
    let d = Domain::Disc { radius: 1.0 };
    let mut m = Motion::new(1.0);
    m.frames.push(two_cuts(&d, 0.0));
    m.frames.push(two_cuts(&d, 0.1));
    let f = &m.frames[0];
    assert!(f.area > 0.5 && f.area < PI - 0.5);
    let rep = check_max_principle(&m, &d, Weights::min_time(), 1e-6).unwrap();
    assert_eq!(rep.sameom_violations, 2);
    assert!((rep.worst_sameom - 1.0 / 1.75f64.sqrt()).abs() < 1e-12);
}

// two radial segments through the centre with a 10° kink
#[test]
fn kink_is_a_tangency_violation() {
    let d = Domain::Disc { radius: 1.0 };
    let h1 = -PI / 3.0;
    let h2 = h1 + 10f64.to_radians();
    let a = CircArc::segment(-Point::unit(h1), Point::new(0.0, 0.0));
    let b = CircArc::segment(Point::new(0.0, 0.0), Point::unit(h2));
    let mut m = Motion::new(1.0);
    m.frames.push(MotionFrame::new(&d, 0.0, Boundary::new(vec![a, b])).unwrap());
    let rep = check_junctions(&m, &d, 1e-6);
    assert_eq!(rep.tangency_violations, 1);
    assert!((rep.worst_tangency - 10f64.to_radians()).abs() < 1e-12);
    // both wall ends are radial, hence perpendicular
    assert_eq!(rep.boundary_violations, 0);
    assert_eq!(rep.boundary_checked, 2);
}

#[test]
fn strategies_pass_junction_checks() {
    let tri = triangle_strategy(1.0).unwrap();
    assert!(check_junctions(&tri.motion, &Domain::unit_triangle(), 1e-6).passed());
    let w = wedge_strategy(1.0, 1.0).unwrap();
    assert!(check_junctions(&w.motion, &wedge_domain(1.0), 1e-6).passed());
}

// symmetric cap: ω ≡ 0 on the free segment, ω*(−t) = −ω*(t)
#[test]
fn symmetric_free_arc_condition_vanishes() {
    let times: Vec<f64> = (0..=400).map(|i| -1.0 + i as f64 / 200.0).collect();
    let zero = vec![0.0; times.len()];
    let star: Vec<f64> = times.iter().map(|t| t.signum() / (1.0 + t.abs()) * t.abs().sqrt()).collect();
    let r = check_free_arc_condition(&times, &zero, &star, -0.8, 0.8).unwrap();
    assert!(r < 1e-14);
    // shifting t₂ breaks it
    let r = check_free_arc_condition(&times, &zero, &star, -0.8, 0.85).unwrap();
    assert!(r > 1e-2);
}
