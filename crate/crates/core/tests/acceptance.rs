//! Acceptance runner: one PASS/FAIL line per criterion.
//!
//! Criteria 1 and 2 contain constants that disagree with their own defining
//! formulas (see README). Those two lines are printed as FAIL with the
//! measured values and do not abort the run; any other failure exits with
//! status 1.

use std::f64::consts::{FRAC_PI_4, PI};
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use setmotion_core::adjoint::*;
use setmotion_core::corner::*;
use setmotion_core::dido::*;
use setmotion_core::evolution::*;
use setmotion_core::freearc::*;
use setmotion_core::geometry::*;
use setmotion_core::mintime::*;
use setmotion_core::numeric::integrate;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)*) => {{
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($msg)*));
        }
    }};
}

fn c1() -> Outcome {
    let start = Instant::now();
    let d = Domain::unit_triangle();
    let k = k_upper(&d).map_err(|e| e.to_string())?;
    let kap = kappa(&d, 512).map_err(|e| e.to_string())?;
    ensure!((k - 0.8660).abs() <= 1e-4, "K_upper {k}");
    let eps = 1e-9;
    let v = |m: f64| verdict_from(kap, k, m).verdict;
    ensure!(v(kap - eps) == Verdict::NotEradicable, "below kappa");
    ensure!(v(kap + eps) == Verdict::Unknown && v(k - eps) == Verdict::Unknown, "between thresholds");
    ensure!(v(k + eps) == Verdict::Eradicable, "above K");
    ensure!(eradication_verdict(&d, 0.6).map_err(|e| e.to_string())?.verdict == Verdict::NotEradicable, "M = 0.6");
    // half-area vertex sector of the unit triangle: radius sqrt(6a/pi), cut (pi/3) r
    let r_half = (6.0 * (3f64.sqrt() / 8.0) / PI).sqrt();
    ensure!((r_half - 0.6430).abs() < 1e-4, "sector radius {r_half}");
    ensure!((kap - PI / 3.0 * r_half).abs() < 1e-6, "kappa {kap} vs sector cut {}", PI / 3.0 * r_half);
    let secs = start.elapsed().as_secs_f64();
    ensure!(secs < 5.0, "runtime {secs:.2} s");
    ensure!(
        (kap - 0.6430).abs() <= 1e-3,
        "kappa = {kap:.6} vs stated 0.6430 (0.6430 is the sector radius; the cut length is (pi/3)*0.6430); \
         K_upper = {k:.6} ok, verdict flips ok, {secs:.2} s"
    );
    Ok(format!("K_upper {k:.6}, kappa {kap:.6}, {secs:.2} s"))
}

fn c2() -> Outcome {
    let ms = triangle_threshold();
    ensure!(matches!(triangle_strategy(0.68), Err(EvolutionError::BelowThreshold { .. })), "M = 0.68 not rejected");
    ensure!(triangle_strategy(0.69).is_ok(), "M = 0.69 failed");
    // the formula evaluated independently of the crate
    let s3 = 3f64.sqrt();
    let formula = (3.0 * s3 - PI) / 6.0 / (3.0 * s3 / PI).ln();
    ensure!((ms - formula).abs() < 1e-15, "threshold {ms} vs formula {formula}");
    ensure!(
        (ms - 0.680569).abs() <= 1e-6,
        "M# = {ms:.9} (the stated formula) vs stated 0.680569; BelowThreshold at 0.68 and success at 0.69 ok"
    );
    Ok(format!("M# {ms:.9}"))
}

fn triangle_oracle(m: f64) -> (f64, f64) {
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
    (r, 2.0 * (t_star + r - 0.5))
}

fn c3() -> Outcome {
    let start = Instant::now();
    let res = triangle_strategy(1.0).map_err(|e| e.to_string())?;
    ensure!(res.r_star < 3.0 / PI, "r* {}", res.r_star);
    let sym = (res.t_total / 2.0 - res.t_star - (res.r_star - 0.5)).abs();
    ensure!(sym <= 1e-8, "T/2 - t* - (r* - 1/2) = {sym:e}");
    let st = (res.stage2_rk4 - res.stage2_closed).abs();
    ensure!(st <= 1e-8, "stage 2: {} vs {}", res.stage2_rk4, res.stage2_closed);
    let (r, t) = triangle_oracle(1.0);
    ensure!((res.r_star - r).abs() <= 1e-6 && (res.t_total - t).abs() <= 1e-6, "oracle r* {r}, T {t}");
    let secs = start.elapsed().as_secs_f64();
    ensure!(secs < 10.0, "runtime {secs:.2} s");
    Ok(format!("r* {:.6}, T {:.6}, stage-2 gap {st:.1e}, {secs:.2} s", res.r_star, res.t_total))
}

fn c4() -> Outcome {
    let d = Domain::Disc { radius: 1.0 };
    let solver = DidoSolver::new(&d).map_err(|e| e.to_string())?;
    let a = solver.total_area();
    let time = |m: f64| min_time_with(&solver, m, a, 0.0).map(|r| r.value).map_err(|e| e.to_string());
    ensure!(time(2.0)? == TimeValue::Infinite, "M = diameter is finite");
    ensure!(matches!(time(2.02)?, TimeValue::Finite(_)), "M = 1.01 diameter not finite");
    let mut ts = Vec::new();
    for k in 1..=6 {
        match time(2.0 * (1.0 + 10f64.powi(-k)))? {
            TimeValue::Finite(t) => ts.push(t),
            TimeValue::Infinite => return Err(format!("k = {k} infinite")),
        }
    }
    ensure!(ts.windows(2).all(|w| w[1] > w[0]), "not increasing: {ts:?}");
    // M − g ≈ c(a − A/2)² near the maximum, so T grows like ε^{−1/2}
    let ratio = ts[5] / ts[4];
    ensure!((ratio / 10f64.sqrt() - 1.0).abs() < 0.1, "growth ratio {ratio}");
    Ok(format!("T(k=1..6) = {:.3} .. {:.1}, last ratio {ratio:.3}", ts[0], ts[5]))
}

fn c5() -> Outcome {
    let disc = Domain::Disc { radius: 1.0 };
    let flow = dido_flow(&disc, 3.0, PI).map_err(|e| e.to_string())?;
    let tri = triangle_strategy(1.0).map_err(|e| e.to_string())?;
    let wedge = wedge_strategy(1.0, 1.0).map_err(|e| e.to_string())?;
    let cases: [(&str, &Motion, Domain, f64); 3] = [
        ("dido_flow", &flow, disc.clone(), 3.0),
        ("triangle", &tri.motion, Domain::unit_triangle(), 1.0),
        ("wedge", &wedge.motion, wedge_domain(1.0), 1.0),
    ];
    let mut msg = Vec::new();
    for (name, motion, dom, m) in cases {
        let (res, _) = motion.area_identity_residual();
        ensure!(res <= 1e-4, "{name}: area identity {res:e}");
        let rep = admissibility_check(motion, &dom, m, 1e-3);
        ensure!(rep.admissible(), "{name}: {rep:?}");
        msg.push(format!("{name} {res:.1e}/{:.4}", rep.worst_effort_ratio));
    }
    Ok(msg.join(", "))
}

// Y(0) = κ₁∫₀ᵀ e^{W} + κ₂ e^{W(T)} with W exact for piecewise-linear ω.
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

fn c6() -> Outcome {
    let mut rng = rand::rngs::StdRng::seed_from_u64(6);
    let (mut worst_dual, mut worst_oracle) = (0.0f64, 0.0f64);
    for _ in 0..100 {
        let n = rng.gen_range(5..60);
        let omega: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let t_end = rng.gen_range(0.1..3.0);
        let times: Vec<f64> = (0..n).map(|i| t_end * i as f64 / (n - 1) as f64).collect();
        let (k1, k2) = (rng.gen_range(0.0..2.0), rng.gen_range(0.01..2.0));
        let tr = solve_adjoint(&times, &omega, k1, k2).map_err(|e| e.to_string())?;
        worst_dual = worst_dual.max(tr.duality_residual);
        let exact = closed_form_y0(&times, &omega, k1, k2);
        worst_oracle = worst_oracle.max((tr.y[0] - exact).abs() / exact);
    }
    ensure!(worst_dual < 1e-8, "duality residual {worst_dual:e}");
    ensure!(worst_oracle < 1e-8, "closed-form mismatch {worst_oracle:e}");
    let tri = triangle_strategy(1.0).map_err(|e| e.to_string())?;
    let d = Domain::unit_triangle();
    let w = Weights::new(0.3, 1.0);
    let mut flagged = None;
    for c in [1.0, 0.01, 7.5, 1e3] {
        let rep = check_max_principle(&tri.motion, &d, w.scaled(c), 1e-6).map_err(|e| e.to_string())?;
        match &flagged {
            None => flagged = Some(rep.flagged),
            Some(f) => ensure!(*f == rep.flagged, "argmax set changes at scale {c}"),
        }
    }
    Ok(format!("duality {worst_dual:.1e}, closed form {worst_oracle:.1e}, argmax set scale-invariant"))
}

fn c7() -> Outcome {
    let mut rng = rand::rngs::StdRng::seed_from_u64(7);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let rho = 10f64.powf(rng.gen_range(-3.0..1.0));
        let m = 4.0 * rho * (1.0 + 10f64.powf(rng.gen_range(-6.0..2.0)));
        let s = symmetric_free_arc(m, rho).map_err(|e| e.to_string())?;
        // residuals recomputed here, relative to the equation scale
        let meq = (s.ell * (1.0 + s.h) / 2.0 - m).abs() / m;
        let eleq = (s.h * s.ell - 2.0 * rho * (1.0 + s.h)).abs() / (rho * (1.0 + s.h));
        worst = worst.max(meq).max(eleq);
    }
    ensure!(worst <= 1e-12, "residual {worst:e}");
    let mut lim = 0.0f64;
    for rho in [1e-4, 1e-6, 1e-8] {
        let s = symmetric_free_arc(1.0, rho).map_err(|e| e.to_string())?;
        lim = lim.max((s.ell / (2.0 * rho) - 1.0).abs());
    }
    ensure!(lim <= 1e-3, "limit {lim:e}");
    Ok(format!("worst residual {worst:.1e}, limit {lim:.1e}"))
}

fn c8() -> Outcome {
    let s0 = sigma_of_beta(1e-7);
    ensure!((s0 - 1.0).abs() <= 1e-6, "sigma(1e-7) = {s0}");
    let mut prev = 1.0;
    for i in 0..100 {
        let b = 1e-4 + (FRAC_PI_4 * 2.0 - 2e-4) * i as f64 / 99.0;
        let s = sigma_of_beta(b);
        ensure!(s > 1.0 && s > prev, "beta {b}: sigma {s}");
        prev = s;
    }
    Ok(format!("sigma(1e-7) - 1 = {:.1e}, sigma increasing on 100 points", s0 - 1.0))
}

fn c9() -> Outcome {
    let start = Instant::now();
    let ci = corner_interface(FRAC_PI_4, 0.1, 1.0).map_err(|e| e.to_string())?;
    let (s, p, d) = (&ci.state, &ci.params, &ci.diagnostics);
    ensure!(d.iterations <= 100, "{} iterations", d.iterations);
    let (ratio, _, _) = s.domain_ratio(p);
    ensure!(ratio <= 1.0, "leaves D: {ratio}");
    let lead = s.phi[0] / s.grid[0].powf(p.sigma + 1.0);
    ensure!((lead - 0.1).abs() <= 1e-3, "phi/x^(sigma+1) = {lead}");
    ensure!(d.contraction <= 0.5, "contraction {}", d.contraction);
    let upto = 100.0 * s.grid[0];
    let (a, b) = (loglog_slope(&s.grid, &s.t1, upto), loglog_slope(&s.grid, &s.t2, upto));
    ensure!((a - 2.0).abs() <= 0.05 && (b - 2.0).abs() <= 0.05, "slopes {a}, {b}");
    let secs = start.elapsed().as_secs_f64();
    ensure!(secs < 60.0, "runtime {secs:.2} s");
    Ok(format!(
        "{} iterations, x† {}, contraction {:.3}, D-ratio {ratio:.3}, slopes {a:.4}/{b:.4}, {secs:.2} s",
        d.iterations, d.x_dagger, d.contraction
    ))
}

fn c10() -> Outcome {
    let tri = triangle_strategy(1.0).map_err(|e| e.to_string())?;
    let w = wedge_strategy(1.0, 1.0).map_err(|e| e.to_string())?;
    for (name, motion, dom) in
        [("triangle", &tri.motion, Domain::unit_triangle()), ("wedge", &w.motion, wedge_domain(1.0))]
    {
        let rep = check_junctions(motion, &dom, 1e-6);
        ensure!(rep.passed(), "{name}: {rep:?}");
    }
    let mut worst = 0.0f64;
    for (b, c, m) in [(FRAC_PI_4, 0.1, 1.0), (1.0, -0.4, 2.0), (0.5, 0.3, 0.7)] {
        let ci = corner_interface(b, c, m).map_err(|e| e.to_string())?;
        let res = ode1_residuals(&ci.state, &ci.params).map_err(|e| e.to_string())?;
        worst = res.iter().fold(worst, |a, r| a.max(*r));
    }
    ensure!(worst < 1e-6, "ode1 residual {worst:e}");
    Ok(format!("junctions ok, ode1 residual {worst:.1e}"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("triangle invariants", c1),
        ("threshold constant", c2),
        ("triangle self-consistency", c3),
        ("divergence", c4),
        ("area identity and admissibility", c5),
        ("adjoint duality", c6),
        ("symmetric free arc", c7),
        ("sigma(beta)", c8),
        ("corner Picard", c9),
        ("optimality residuals", c10),
    ];
    // stated constants that contradict their defining formulas
    let known = [1usize, 2];
    let mut failed = false;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let n = i + 1;
        match f() {
            Ok(msg) => println!("criterion {n:>2} PASS  {name}: {msg}"),
            Err(msg) if known.contains(&n) => println!("criterion {n:>2} FAIL  {name}: {msg} [known, see README]"),
            Err(msg) => {
                println!("criterion {n:>2} FAIL  {name}: {msg}");
                failed = true;
            }
        }
    }
    if failed {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
