use std::f64::consts::PI;

use setmotion_core::dido::*;
use setmotion_core::geometry::*;
use setmotion_core::mintime::*;

fn finite(r: TimeResult) -> f64 {
    match r.value {
        TimeValue::Finite(t) => t,
        TimeValue::Infinite => panic!("infinite time"),
    }
}

#[test]
fn disc_time_diverges_at_the_diameter() {
    let d = Domain::Disc { radius: 1.0 };
    let s = DidoSolver::new(&d).unwrap();
    assert_eq!(min_time_with(&s, 2.0, PI, 0.0).unwrap().value, TimeValue::Infinite);
    let ts: Vec<f64> =
        (1..=6).map(|k| finite(min_time_with(&s, 2.0 * (1.0 + 10f64.powi(-k)), PI, 0.0).unwrap())).collect();
    assert!(ts.windows(2).all(|w| w[1] > w[0]), "{ts:?}");
    // M − g ≈ ε + c(a − A/2)²: T·√ε tends to a constant
    let scaled: Vec<f64> = ts.iter().enumerate().map(|(k, t)| t * (2.0 * 10f64.powi(-(k as i32 + 1))).sqrt()).collect();
    assert!((scaled[5] / scaled[4] - 1.0).abs() < 0.01, "{scaled:?}");
    // intervals away from A/2 stay finite at M = diameter
    assert!(finite(min_time_with(&s, 2.0, 0.4 * PI, 0.0).unwrap()) > 0.0);
}

// g(a) = (π/3)√(6a/π) from a corner sector while that sector is the minimiser
#[test]
fn triangle_profile_near_a_vertex() {
    let d = Domain::unit_triangle();
    for a in [1e-4, 1e-3, 1e-2, 0.05] {
        let g = g_of_a(&d, a).unwrap();
        let sector = PI / 3.0 * (6.0 * a / PI).sqrt();
        assert!((g - sector).abs() < 1e-9 * sector, "a {a}: {g} vs {sector}");
    }
    // symmetric profile
    let total = d.area();
    for a in [0.02, 0.1, 0.2] {
        assert!((g_of_a(&d, a).unwrap() - g_of_a(&d, total - a).unwrap()).abs() < 1e-9);
    }
}

#[test]
fn time_is_additive_over_intervals() {
    let d = Domain::unit_triangle();
    let s = DidoSolver::new(&d).unwrap();
    let total = s.total_area();
    let whole = finite(min_time_with(&s, 1.2, total, 0.0).unwrap());
    let a = finite(min_time_with(&s, 1.2, total, 0.3 * total).unwrap());
    let b = finite(min_time_with(&s, 1.2, 0.3 * total, 0.0).unwrap());
    assert!((whole - a - b).abs() < 1e-9 * whole);
    assert!(matches!(min_time_with(&s, 1.2, 0.1, 0.2), Err(MintimeError::InvalidInterval { .. })));
}

#[test]
fn flow_time_matches_min_time() {
    let d = Domain::Disc { radius: 1.0 };
    let flow = dido_flow(&d, 2.5, PI).unwrap();
    let t = finite(min_time(&d, 2.5, PI, 0.0).unwrap());
    assert!((flow.final_time() - t).abs() < 1e-6 * t);
    assert!(flow.frames.windows(2).all(|w| w[1].area < w[0].area));
}
