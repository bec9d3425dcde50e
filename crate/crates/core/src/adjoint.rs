//! Shadow prices along perpendicular trajectories and validators for the
//! necessary conditions of optimality.
//!
//! The adjoint `Y` solves `∂t Y = −ω Y − κ₁`, `Y(T) = κ₂` backward in time,
//! where `ω` is the boundary curvature seen along a trajectory crossing the
//! moving boundaries perpendicularly. The perturbation area `A` solves
//! `∂t A = ω A` forward and the two are tied by
//! `Y(τ) = ∫ κ₁ A dt + κ₂ A(T)` when `A(τ) = 1`.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use crate::evolution::Motion;
use crate::geometry::*;
use crate::math::*;

#[derive(Clone, Debug, PartialEq)]
pub enum AdjointError {
    /// A boundary sample had no counterpart on the next frame.
    TrajectoryReconstructionFailed { frame: usize, distance: f64 },
    /// `t₁ < t₂` must lie inside the sampled range.
    TimesNotBracketed { t1: f64, t2: f64 },
    /// Mismatched or too short sample arrays.
    InvalidSamples,
}

impl fmt::Display for AdjointError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AdjointError::TrajectoryReconstructionFailed { frame, distance } => {
                write!(f, "trajectory lost at frame {frame} (off by {distance:e})")
            }
            AdjointError::TimesNotBracketed { t1, t2 } => write!(f, "times [{t1}, {t2}] not inside the samples"),
            AdjointError::InvalidSamples => write!(f, "invalid curvature samples"),
        }
    }
}

/// Cost weights `(κ₁, κ₂)`: running cost on area and terminal cost.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Weights {
    pub kappa1: f64,
    pub kappa2: f64,
}

impl Weights {
    pub fn new(kappa1: f64, kappa2: f64) -> Weights {
        Weights { kappa1, kappa2 }
    }

    /// The minimum-time adjoint: `∂t Y = −ω Y`, `Y(T) = 1`.
    pub fn min_time() -> Weights {
        Weights { kappa1: 0.0, kappa2: 1.0 }
    }

    pub fn scaled(self, c: f64) -> Weights {
        Weights { kappa1: c * self.kappa1, kappa2: c * self.kappa2 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdjointTrajectory {
    /// Trajectory label.
    pub xi: usize,
    pub times: Vec<f64>,
    /// Curvature samples (one per time).
    pub omega: Vec<f64>,
    pub y: Vec<f64>,
    /// Perturbation area started at `A(times[0]) = 1`.
    pub a: Vec<f64>,
    pub kappa1: f64,
    pub kappa2: f64,
    /// `|Y(τ) − (κ₁∫A + κ₂A(T))| / |Y(τ)|` at `τ = times[0]`.
    pub duality_residual: f64,
}

// ω between samples is linear; RK4 substeps keep |ω|·h ≤ 0.002.
fn substeps(w0: f64, w1: f64, h: f64) -> usize {
    let n = ceil_pos(max(abs(w0), abs(w1)) * abs(h) / 0.002);
    n.clamp(1, 100_000)
}

fn ceil_pos(x: f64) -> usize {
    let f = floor(x);
    if x > f {
        f as usize + 1
    } else {
        f as usize
    }
}

fn check_samples(times: &[f64], omega: &[f64]) -> Result<(), AdjointError> {
    if times.len() < 2 || times.len() != omega.len() || times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(AdjointError::InvalidSamples);
    }
    if omega.iter().any(|w| !w.is_finite()) {
        return Err(AdjointError::InvalidSamples);
    }
    Ok(())
}

/// Backward RK4 for `∂t Y = −ω Y − κ₁` from `Y(T) = y_end`, with `T` the
/// last sample time.
pub fn adjoint_backward(times: &[f64], omega: &[f64], kappa1: f64, y_end: f64) -> Result<Vec<f64>, AdjointError> {
    check_samples(times, omega)?;
    let n = times.len();
    let mut y = vec![0.0; n];
    y[n - 1] = y_end;
    for i in (0..n - 1).rev() {
        let (t0, t1) = (times[i], times[i + 1]);
        let (w0, w1) = (omega[i], omega[i + 1]);
        let w = |t: f64| w0 + (w1 - w0) * (t - t0) / (t1 - t0);
        let m = substeps(w0, w1, t1 - t0);
        let h = -(t1 - t0) / m as f64;
        let mut yy = [y[i + 1]];
        let mut t = t1;
        for _ in 0..m {
            yy = crate::numeric::rk4_step(&mut |s: f64, v: &[f64; 1]| [-w(s) * v[0] - kappa1], t, &yy, h);
            t += h;
        }
        y[i] = yy[0];
    }
    Ok(y)
}

// forward RK4 for (A, ∫A)
fn area_forward(times: &[f64], omega: &[f64]) -> (Vec<f64>, f64) {
    let n = times.len();
    let mut a = vec![0.0; n];
    a[0] = 1.0;
    let mut state = [1.0, 0.0];
    for i in 0..n - 1 {
        let (t0, t1) = (times[i], times[i + 1]);
        let (w0, w1) = (omega[i], omega[i + 1]);
        let w = |t: f64| w0 + (w1 - w0) * (t - t0) / (t1 - t0);
        let m = substeps(w0, w1, t1 - t0);
        let h = (t1 - t0) / m as f64;
        let mut t = t0;
        for _ in 0..m {
            state = crate::numeric::rk4_step(&mut |s: f64, v: &[f64; 2]| [w(s) * v[0], v[0]], t, &state, h);
            t += h;
        }
        a[i + 1] = state[0];
    }
    (a, state[1])
}

/// Solves the adjoint on sampled curvature, `T = times.last()`, and audits
/// the duality with the forward perturbation area.
pub fn solve_adjoint(
    times: &[f64],
    omega: &[f64],
    kappa1: f64,
    kappa2: f64,
) -> Result<AdjointTrajectory, AdjointError> {
    solve_adjoint_to(times, omega, kappa1, kappa2)
}

/// As [`solve_adjoint`] with a terminal value `y_end` in place of `κ₂`
/// (used when a trajectory hands over to a later window).
pub fn solve_adjoint_to(
    times: &[f64],
    omega: &[f64],
    kappa1: f64,
    y_end: f64,
) -> Result<AdjointTrajectory, AdjointError> {
    let kappa2 = y_end;
    let y = adjoint_backward(times, omega, kappa1, kappa2)?;
    let (a, int_a) = area_forward(times, omega);
    let dual = kappa1 * int_a + kappa2 * a[a.len() - 1];
    let duality_residual = abs(y[0] - dual) / max(abs(y[0]), f64::MIN_POSITIVE);
    Ok(AdjointTrajectory {
        xi: 0,
        times: times.to_vec(),
        omega: omega.to_vec(),
        y,
        a,
        kappa1,
        kappa2,
        duality_residual,
    })
}

// ---------------------------------------------------------------------------
// trajectories through a motion

/// One perpendicular trajectory inside a topology-constant window.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub xi: usize,
    /// Indices into the motion's frames.
    pub frames: Vec<usize>,
    pub points: Vec<Point>,
    pub omega: Vec<f64>,
    pub beta: Vec<f64>,
    /// Index of the arc carrying each sample.
    pub arc: Vec<usize>,
}

/// A run of frames with the same arc count and kinds.
#[derive(Clone, Debug, PartialEq)]
pub struct Window {
    pub frames: Vec<usize>,
    pub trajectories: Vec<Trajectory>,
}

fn signature(b: &Boundary) -> Vec<ArcKind> {
    b.arcs.iter().map(|a| a.kind).collect()
}

// speed at arclength s, linear between the endpoint speeds
fn beta_at(a: &CircArc, s: f64) -> f64 {
    if a.length <= 0.0 {
        return a.beta;
    }
    let u = (s / a.length).clamp(0.0, 1.0);
    a.beta_start + (a.beta_end - a.beta_start) * u
}

fn nearest_on(b: &Boundary, p: Point) -> Option<(usize, f64, f64)> {
    let mut best: Option<(usize, f64, f64)> = None;
    for (k, a) in b.arcs.iter().enumerate() {
        let (s, d) = a.nearest(p);
        if best.is_none_or(|(_, _, bd)| d < bd) {
            best = Some((k, s, d));
        }
    }
    best
}

/// Frames used for validation: at most `max_slices`, evenly strided, always
/// keeping the last one.
pub fn slice_frames(motion: &Motion, max_slices: usize) -> Vec<usize> {
    let n = motion.frames.len();
    if n == 0 {
        return Vec::new();
    }
    let stride = ceil_pos(n as f64 / max(max_slices as f64, 2.0)).max(1);
    let mut idx: Vec<usize> = (0..n).step_by(stride).collect();
    if *idx.last().unwrap() != n - 1 {
        idx.push(n - 1);
    }
    idx
}

/// Reconstructs perpendicular trajectories: `n_per_arc` seeds per arc at the
/// start of each window, advanced by `x += β n h` and projected on the next
/// frame. A projection farther than `1e−6·diam(V)` plus twice the largest
/// normal displacement of the frame counts as lost.
pub fn trajectories(
    motion: &Motion,
    domain: &Domain,
    n_per_arc: usize,
    max_slices: usize,
) -> Result<Vec<Window>, AdjointError> {
    let slices = slice_frames(motion, max_slices);
    let diam = domain.diameter();
    let mut windows: Vec<Window> = Vec::new();
    let mut k = 0;
    let mut label = 0;
    while k < slices.len() {
        let b0 = &motion.frames[slices[k]].boundary;
        let sig = signature(b0);
        let mut end = k + 1;
        while end < slices.len() {
            let b = &motion.frames[slices[end]].boundary;
            if signature(b) != sig || b.void != b0.void {
                break;
            }
            end += 1;
        }
        let frames: Vec<usize> = slices[k..end].to_vec();
        let mut trajs = Vec::new();
        if !b0.arcs.is_empty() {
            for (ai, a) in b0.arcs.iter().enumerate() {
                for j in 0..n_per_arc {
                    let s = a.length * (j as f64 + 0.5) / n_per_arc as f64;
                    let mut tr = Trajectory {
                        xi: label,
                        frames: vec![frames[0]],
                        points: vec![a.point_at(s)],
                        omega: vec![a.curvature],
                        beta: vec![beta_at(a, s)],
                        arc: vec![ai],
                    };
                    label += 1;
                    for w in frames.windows(2) {
                        let (f0, f1) = (&motion.frames[w[0]], &motion.frames[w[1]]);
                        let h = f1.t - f0.t;
                        let p = *tr.points.last().unwrap();
                        let arc0 = &f0.boundary.arcs[*tr.arc.last().unwrap()];
                        let (s0, _) = arc0.nearest(p);
                        let beta = *tr.beta.last().unwrap();
                        let pred = p + arc0.normal_at(s0) * (beta * h);
                        let (ni, ns, nd) =
                            nearest_on(&f1.boundary, pred).ok_or(AdjointError::TrajectoryReconstructionFailed {
                                frame: w[1],
                                distance: f64::INFINITY,
                            })?;
                        let bmax = f0
                            .boundary
                            .arcs
                            .iter()
                            .map(|a| max(abs(a.beta_start), abs(a.beta_end)).max(abs(a.beta)))
                            .fold(1.0, max);
                        let allow = 1e-6 * diam + 2.0 * bmax * h;
                        if nd > allow {
                            return Err(AdjointError::TrajectoryReconstructionFailed { frame: w[1], distance: nd });
                        }
                        let na = &f1.boundary.arcs[ni];
                        tr.frames.push(w[1]);
                        tr.points.push(na.point_at(ns));
                        tr.omega.push(na.curvature);
                        tr.beta.push(beta_at(na, ns));
                        tr.arc.push(ni);
                    }
                    trajs.push(tr);
                }
            }
        }
        windows.push(Window { frames, trajectories: trajs });
        k = end;
    }
    Ok(windows)
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct MaxPrincipleReport {
    pub windows: usize,
    pub trajectories: usize,
    pub points_checked: usize,
    /// Controlled samples whose `Y` falls below the time-slice maximum.
    pub max1_violations: usize,
    /// Largest relative gap `(max Y − Y)/|max Y|` over controlled samples.
    pub worst_max1_gap: f64,
    /// Flagged `(frame, trajectory label)` pairs.
    pub flagged: Vec<(usize, usize)>,
    /// Frames where two controlled arcs have different curvatures.
    pub sameom_violations: usize,
    pub worst_sameom: f64,
    pub worst_duality: f64,
    pub notes: Vec<String>,
}

impl MaxPrincipleReport {
    pub fn passed(&self) -> bool {
        self.max1_violations == 0 && self.sameom_violations == 0
    }
}

/// Checks the maximum principle (controlled points carry the largest shadow
/// price) and the equal-curvature rule for controlled arcs. Trajectories
/// live in topology-constant windows; at a window change the terminal value
/// is inherited from the nearest trajectory of the next window.
pub fn check_max_principle(
    motion: &Motion,
    domain: &Domain,
    weights: Weights,
    tol: f64,
) -> Result<MaxPrincipleReport, AdjointError> {
    let windows = trajectories(motion, domain, 8, 400)?;
    let mut rep = MaxPrincipleReport {
        windows: windows.len(),
        notes: vec![
            String::from("trajectories restricted to topology-constant windows"),
            String::from("uniform-effort hypothesis recorded, not enforced"),
        ],
        ..Default::default()
    };
    let beta_free_tol = 1e-9;

    // adjoint per trajectory, last window first
    let mut ys: Vec<Vec<Vec<f64>>> = vec![Vec::new(); windows.len()];
    for wi in (0..windows.len()).rev() {
        let w = &windows[wi];
        let next = windows.get(wi + 1).filter(|nw| !nw.trajectories.is_empty());
        for tr in &w.trajectories {
            let times: Vec<f64> = tr.frames.iter().map(|&f| motion.frames[f].t).collect();
            let y_end = match next {
                Some(nw) => {
                    let p = *tr.points.last().unwrap();
                    let mut best = (f64::INFINITY, weights.kappa2);
                    for (ti, ntr) in nw.trajectories.iter().enumerate() {
                        let d = ntr.points[0].dist(p);
                        if d < best.0 {
                            best = (d, ys[wi + 1][ti][0]);
                        }
                    }
                    best.1
                }
                None => weights.kappa2,
            };
            let y = if times.len() >= 2 {
                let sol = solve_adjoint_to(&times, &tr.omega, weights.kappa1, y_end)?;
                rep.worst_duality = max(rep.worst_duality, sol.duality_residual);
                sol.y
            } else {
                vec![y_end]
            };
            ys[wi].push(y);
        }
        rep.trajectories += w.trajectories.len();
    }

    for (wi, w) in windows.iter().enumerate() {
        for (slot, &f) in w.frames.iter().enumerate() {
            let mut ymax = f64::NEG_INFINITY;
            for (ti, _) in w.trajectories.iter().enumerate() {
                ymax = max(ymax, ys[wi][ti][slot]);
            }
            for (ti, tr) in w.trajectories.iter().enumerate() {
                rep.points_checked += 1;
                if tr.beta[slot] <= -1.0 + beta_free_tol {
                    continue;
                }
                let gap = (ymax - ys[wi][ti][slot]) / max(abs(ymax), f64::MIN_POSITIVE);
                if gap > tol {
                    rep.max1_violations += 1;
                    rep.flagged.push((f, tr.xi));
                }
                rep.worst_max1_gap = max(rep.worst_max1_gap, gap);
            }
        }
    }

    for fr in &motion.frames {
        let ks: Vec<f64> =
            fr.boundary.arcs.iter().filter(|a| a.kind == ArcKind::Controlled).map(|a| a.curvature).collect();
        if ks.len() < 2 {
            continue;
        }
        let lo = ks.iter().cloned().fold(f64::INFINITY, min);
        let hi = ks.iter().cloned().fold(f64::NEG_INFINITY, max);
        let spread = hi - lo;
        rep.worst_sameom = max(rep.worst_sameom, spread);
        if spread > tol {
            rep.sameom_violations += 1;
        }
    }
    Ok(rep)
}

// ---------------------------------------------------------------------------
// junctions

#[derive(Clone, Debug, Default, PartialEq)]
pub struct JunctionReport {
    pub frames: usize,
    pub interior_checked: usize,
    pub boundary_checked: usize,
    pub tangency_violations: usize,
    pub boundary_violations: usize,
    /// Largest kink angle at an interior junction next to a controlled arc.
    pub worst_tangency: f64,
    /// Largest `min(|angle − π/2|, |β + 1|)` at a `∂V` endpoint of a
    /// controlled arc.
    pub worst_boundary: f64,
    pub worst_tangency_frame: Option<usize>,
    pub worst_boundary_frame: Option<usize>,
}

impl JunctionReport {
    pub fn passed(&self) -> bool {
        self.tangency_violations == 0 && self.boundary_violations == 0
    }
}

fn is_corner(domain: &Domain, p: Point) -> bool {
    let tol = domain.tol();
    match domain {
        Domain::Disc { .. } | Domain::SymmetricCap { .. } => false,
        _ => domain.polygon().unwrap_or_default().iter().any(|q| q.dist(p) <= tol),
    }
}

/// Tangency at interior junctions touching a controlled arc, and
/// perpendicular-or-zero-effort at `∂V` endpoints of controlled arcs.
pub fn check_junctions(motion: &Motion, domain: &Domain, tol_ang: f64) -> JunctionReport {
    let mut rep = JunctionReport::default();
    let tol = domain.tol();
    for (fi, fr) in motion.frames.iter().enumerate() {
        let arcs = &fr.boundary.arcs;
        if arcs.is_empty() {
            continue;
        }
        rep.frames += 1;
        let n = arcs.len();
        for i in 0..n {
            let a = &arcs[i];
            // interior junction with the successor (closed chains wrap)
            let j = (i + 1) % n;
            let b = &arcs[j];
            if (j != i || n == 1)
                && a.end().dist(b.start) <= 1e3 * tol
                && domain.boundary_distance(a.end()) > tol
                && (a.kind == ArcKind::Controlled || b.kind == ArcKind::Controlled)
            {
                rep.interior_checked += 1;
                let kink = abs(wrap_pi(b.heading - a.end_heading()));
                if kink > rep.worst_tangency {
                    rep.worst_tangency = kink;
                    rep.worst_tangency_frame = Some(fi);
                }
                if kink > tol_ang {
                    rep.tangency_violations += 1;
                }
            }
            if a.kind != ArcKind::Controlled {
                continue;
            }
            for (p, heading, beta) in [(a.start, a.heading, a.beta_start), (a.end(), a.end_heading(), a.beta_end)] {
                if domain.boundary_distance(p) > tol {
                    continue;
                }
                rep.boundary_checked += 1;
                let zero_effort = abs(beta + 1.0);
                let angle_dev = if is_corner(domain, p) {
                    // a corner admits any angle between its two sides
                    0.0
                } else {
                    let c = Point::unit(heading).dot(domain.boundary_tangent(p));
                    abs(acos(abs(c).min(1.0)) - PI / 2.0)
                };
                let dev = min(angle_dev, zero_effort);
                if dev > rep.worst_boundary {
                    rep.worst_boundary = dev;
                    rep.worst_boundary_frame = Some(fi);
                }
                if dev > tol_ang {
                    rep.boundary_violations += 1;
                }
            }
        }
    }
    rep
}

// ---------------------------------------------------------------------------
// free arcs

fn interp(times: &[f64], vals: &[f64], t: f64) -> f64 {
    let k = times.partition_point(|&s| s <= t).clamp(1, times.len() - 1);
    let (t0, t1) = (times[k - 1], times[k]);
    vals[k - 1] + (vals[k] - vals[k - 1]) * (t - t0) / (t1 - t0)
}

// trapezoid integral of piecewise-linear samples over [t1, t2]
fn integral_between(times: &[f64], vals: &[f64], t1: f64, t2: f64) -> f64 {
    let mut acc = 0.0;
    let mut prev = (t1, interp(times, vals, t1));
    for (k, &t) in times.iter().enumerate() {
        if t <= t1 || t >= t2 {
            continue;
        }
        acc += 0.5 * (t - prev.0) * (vals[k] + prev.1);
        prev = (t, vals[k]);
    }
    let end = interp(times, vals, t2);
    acc + 0.5 * (t2 - prev.0) * (end + prev.1)
}

/// `|∫ω dt − ∫ω* dt|` over `[t₁, t₂]`, both curvatures sampled on `times`
/// and taken piecewise linear.
pub fn check_free_arc_condition(
    times: &[f64],
    omega: &[f64],
    omega_star: &[f64],
    t1: f64,
    t2: f64,
) -> Result<f64, AdjointError> {
    check_samples(times, omega)?;
    if omega_star.len() != times.len() {
        return Err(AdjointError::InvalidSamples);
    }
    let (lo, hi) = (times[0], times[times.len() - 1]);
    if !(t1 < t2 && t1 >= lo && t2 <= hi) {
        return Err(AdjointError::TimesNotBracketed { t1, t2 });
    }
    Ok(abs(integral_between(times, omega, t1, t2) - integral_between(times, omega_star, t1, t2)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize, t: f64) -> Vec<f64> {
        (0..n).map(|i| t * i as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn zero_curvature_gives_linear_adjoint() {
        let ts = grid(11, 2.0);
        let w = vec![0.0; 11];
        let tr = solve_adjoint(&ts, &w, 1.0, 0.0).unwrap();
        for (t, y) in ts.iter().zip(&tr.y) {
            assert!(abs(y - (2.0 - t)) < 1e-13);
        }
    }

    #[test]
    fn constant_curvature_gives_exponential() {
        let ts = grid(41, 1.5);
        let c = 0.7;
        let w = vec![c; 41];
        let tr = solve_adjoint(&ts, &w, 0.0, 1.0).unwrap();
        for (t, y) in ts.iter().zip(&tr.y) {
            assert!(abs(y / exp(c * (1.5 - t)) - 1.0) < 1e-11);
        }
        assert!(tr.duality_residual < 1e-12);
    }

    #[test]
    fn free_arc_residual_shift_is_linear() {
        let ts = grid(201, 1.0);
        let w: Vec<f64> = ts.iter().map(|t| 1.0 + t).collect();
        let ws = vec![0.0; 201];
        let r1 = check_free_arc_condition(&ts, &w, &ws, 0.2, 0.5).unwrap();
        assert!(abs(r1 - (0.3 + 0.5 * (0.25 - 0.04))) < 1e-12);
        assert!(matches!(
            check_free_arc_condition(&ts, &w, &ws, 0.5, 0.2),
            Err(AdjointError::TimesNotBracketed { .. })
        ));
    }
}
