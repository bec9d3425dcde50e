use std::f64::consts::PI;

use setmotion_core::evolution::*;
use setmotion_core::geometry::*;
use setmotion_core::mintime::*;
use setmotion_core::numeric::integrate;

// Shooting oracle built from quadratures of the two radius laws only:
// stage 1 lasts ∫₀^{r*} r/(a − r) dr (a = 3M/π), stage 2 lasts
// ∫₀^{r*} dr/(1 + M/(c r)) (c = √3 − π/3), and stage 2 must equal r* − ½.
fn triangle_oracle(m: f64) -> (f64, f64, f64) {
    let a = 3.0 * m / PI;
    let c = 3f64.sqrt() - PI / 3.0;
    let stage2 = |r: f64| integrate(|s| 1.0 / (1.0 + m / (c * s)), 0.0, r, 1e-15, 1e-14).value;
    let (mut lo, mut hi) = (0.5, a.min(10.0));
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if stage2(mid) - (mid - 0.5) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let r = 0.5 * (lo + hi);
    let t_star = integrate(|s| s / (a - s), 0.0, r, 1e-15, 1e-14).value;
    (r, t_star, 2.0 * (t_star + r - 0.5))
}

#[test]
fn triangle_matches_quadrature_oracle() {
    for m in [0.75, 1.0, 1.5] {
        let res = triangle_strategy(m).unwrap();
        let (r, ts, t) = triangle_oracle(m);
        assert!((res.r_star - r).abs() < 1e-9, "M {m}: r* {} vs {r}", res.r_star);
        assert!((res.t_star - ts).abs() < 1e-9);
        assert!((res.t_total - t).abs() < 1e-9);
    }
    let res = triangle_strategy(1.0).unwrap();
    assert!((res.r_star - 0.596275).abs() < 1e-6);
    assert!((res.t_total - 0.870284).abs() < 1e-6);
    assert!((res.t_star - 0.338867).abs() < 1e-6);
    assert!(res.r_star < 3.0 / PI);
}

#[test]
fn triangle_time_decreases_with_effort() {
    let ts: Vec<f64> = [0.7, 0.8, 0.9, 1.0, 1.5].iter().map(|&m| triangle_strategy(m).unwrap().t_total).collect();
    assert!(ts.windows(2).all(|w| w[1] < w[0]), "{ts:?}");
    let ms = triangle_threshold();
    let near: Vec<f64> = (1..=5).map(|k| triangle_strategy(ms * (1.0 + 10f64.powi(-k))).unwrap().t_total).collect();
    assert!(near.windows(2).all(|w| w[1] > w[0]), "{near:?}");
    assert!(matches!(triangle_strategy(0.68), Err(EvolutionError::BelowThreshold { .. })));
}

// Ω(t) and the reflected complement of Ω(T − t) coincide: areas add up to |V|
// and the boundaries are mirror images.
#[test]
fn triangle_symmetry_property() {
    let d = Domain::unit_triangle();
    let res = triangle_strategy(1.0).unwrap();
    let fr = &res.motion.frames;
    let n = fr.len();
    for i in (0..n).step_by(97) {
        let (a, b) = (&fr[i], &fr[n - 1 - i]);
        assert!((a.t + b.t - res.t_total).abs() < 1e-12);
        assert!((a.area + b.area - d.area()).abs() < 1e-9, "frame {i}");
        assert!((a.rel_perimeter - b.rel_perimeter).abs() < 1e-9);
    }
}

#[test]
fn strategies_satisfy_area_identity() {
    let tri = triangle_strategy(1.0).unwrap();
    assert!(tri.motion.area_identity_residual().0 <= 1e-4);
    let w = wedge_strategy(1.0, 1.0).unwrap();
    assert!(w.motion.area_identity_residual().0 <= 1e-4);
    let flow = dido_flow(&Domain::Disc { radius: 1.0 }, 3.0, PI).unwrap();
    assert!(flow.area_identity_residual().0 <= 1e-4);
}

#[test]
fn dido_flow_is_admissible() {
    let d = Domain::Disc { radius: 1.0 };
    let flow = dido_flow(&d, 3.0, PI).unwrap();
    let rep = admissibility_check(&flow, &d, 3.0, 1e-3);
    assert!(rep.admissible(), "{rep:?}");
    assert!(rep.worst_effort_ratio > 0.9);
}

fn rectangle() -> Domain {
    Domain::ConvexPolygon {
        vertices: vec![Point::new(0.0, 0.0), Point::new(2.0, 0.0), Point::new(2.0, 1.0), Point::new(0.0, 1.0)],
    }
}

// Ω(t) = {x > x(t)} ∩ V with a straight downward cut.
fn cut_frame(d: &Domain, t: f64, x: f64, free: bool) -> MotionFrame {
    let seg = CircArc::segment(Point::new(x, 1.0), Point::new(x, 0.0));
    let seg = if free { seg.free() } else { seg };
    MotionFrame::new(d, t, Boundary::new(vec![seg])).unwrap()
}

#[test]
fn jump_is_a_containment_violation() {
    let d = rectangle();
    let mut m = Motion::new(1.0);
    m.frames.push(cut_frame(&d, 0.0, 1.0, false));
    m.frames.push(cut_frame(&d, 0.01, 0.7, false));
    let rep = admissibility_check(&m, &d, 1.0, 1e-3);
    assert!(rep.containment_violations > 0);
    assert!(rep.worst_containment > 20.0);
}

// Ω(t) = B_t(Ω₀) ∩ V clears nothing.
#[test]
fn free_expansion_is_admissible() {
    let d = rectangle();
    let mut m = Motion::new(0.0);
    for k in 0..=50 {
        let t = 0.01 * k as f64;
        m.frames.push(cut_frame(&d, t, 1.5 - t, true));
    }
    let rep = admissibility_check(&m, &d, 0.5, 1e-3);
    assert!(rep.admissible(), "{rep:?}");
    assert!(rep.worst_effort_ratio < 1e-6);
    // dA/dt = P with no effort
    assert!(m.area_identity_residual().0 < 1e-12);
}

#[test]
fn generic_step_reproduces_triangle_rate() {
    let d = Domain::unit_triangle();
    let m = 1.0;
    let res = triangle_strategy(m).unwrap();
    let fr = &res.motion.frames;
    // a mid-phase frame with a free segment and one controlled arc
    let k = fr.iter().position(|f| f.t > 0.5 * (res.t_star + 0.5 * res.t_total)).unwrap();
    let f0 = &fr[k];
    assert!(f0.boundary.arcs.iter().any(|a| a.kind == ArcKind::Free));
    let dt = 1e-4;
    let next = generic_step(f0, &d, m, dt).unwrap();
    let arc_r = |f: &MotionFrame| {
        f.boundary.arcs.iter().find(|a| a.kind == ArcKind::Controlled && a.curvature != 0.0).unwrap().radius()
    };
    let (r0, r1) = (arc_r(f0), arc_r(&next));
    let c = 3f64.sqrt() - PI / 3.0;
    let rate = -1.0 - m / (c * r0);
    assert!(((r1 - r0) / dt - rate).abs() < 50.0 * dt * rate.abs(), "{} vs {rate}", (r1 - r0) / dt);
}
