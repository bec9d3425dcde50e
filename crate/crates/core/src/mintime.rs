//! Minimum eradication and transfer times `T = ∫ da / (M − g(a))`, the
//! optimal Dido flow realising them, and the constant-rate slicing strategy.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use crate::dido::{DidoError, DidoSolver};
use crate::evolution::{Motion, MotionFrame};
use crate::geometry::*;
use crate::math::*;
use crate::numeric;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TimeValue {
    Finite(f64),
    Infinite,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TimeResult {
    pub value: TimeValue,
    /// `(a, 1/(M − g(a)))` on a coarse diagnostic grid; the reciprocal is
    /// infinite where the rate vanishes.
    pub samples: Vec<(f64, f64)>,
    /// Largest `g` on the interval and where it is attained.
    pub g_max: f64,
    pub a_at_g_max: f64,
    pub quadrature_error: f64,
}

#[derive(Clone, Debug)]
pub enum MintimeError {
    Dido(DidoError),
    InvalidInterval {
        a_from: f64,
        a_to: f64,
    },
    InvalidEffort(f64),
    /// The flow reached an area where `M − g` vanishes; the motion up to there
    /// is returned.
    Stalled {
        area: f64,
        motion: Motion,
    },
    SlicingTooLong {
        max_length: f64,
        bound: f64,
    },
    Unsupported,
}

impl fmt::Display for MintimeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MintimeError::Dido(e) => write!(f, "dido: {e}"),
            MintimeError::InvalidInterval { a_from, a_to } => {
                write!(f, "need 0 <= a_to <= a_from <= area(V), got a_from={a_from}, a_to={a_to}")
            }
            MintimeError::InvalidEffort(m) => write!(f, "effort rate must be positive, got {m}"),
            MintimeError::Stalled { area, .. } => write!(f, "flow stalled at area {area}: effort cannot exceed g(a)"),
            MintimeError::SlicingTooLong { max_length, bound } => {
                write!(f, "longest slice {max_length} is not below M/(1+b1) = {bound}")
            }
            MintimeError::Unsupported => write!(f, "slicing not implemented for this domain"),
        }
    }
}

impl From<DidoError> for MintimeError {
    fn from(e: DidoError) -> Self {
        MintimeError::Dido(e)
    }
}

impl From<GeometryError> for MintimeError {
    fn from(e: GeometryError) -> Self {
        MintimeError::Dido(DidoError::Geometry(e))
    }
}

/// Divergence threshold relative to `M`.
pub const EPS_DIV: f64 = 1e-9;

fn g_max_on(solver: &DidoSolver, lo: f64, hi: f64) -> (f64, f64) {
    let g = |a: f64| solver.g(a).unwrap_or(0.0);
    let n = 256;
    let mut best = (lo, g(lo));
    for k in 1..=n {
        let a = lo + (hi - lo) * k as f64 / n as f64;
        let v = g(a);
        if v > best.1 {
            best = (a, v);
        }
    }
    let h = (hi - lo) / n as f64;
    let (a, v) = numeric::golden_max(g, max(lo, best.0 - h), min(hi, best.0 + h), 1e-14 * max(1.0, hi));
    if v > best.1 {
        (a, v)
    } else {
        best
    }
}

pub fn min_time(domain: &Domain, m: f64, a_from: f64, a_to: f64) -> Result<TimeResult, MintimeError> {
    let solver = DidoSolver::new(domain)?;
    min_time_with(&solver, m, a_from, a_to)
}

pub fn min_time_with(solver: &DidoSolver, m: f64, a_from: f64, a_to: f64) -> Result<TimeResult, MintimeError> {
    if !(m > 0.0 && m.is_finite()) {
        return Err(MintimeError::InvalidEffort(m));
    }
    let total = solver.total_area();
    let slack = 1e-12 * total;
    if !(a_to >= 0.0 && a_to <= a_from + slack && a_from <= total + slack) {
        return Err(MintimeError::InvalidInterval { a_from, a_to });
    }
    let a_from = min(a_from, total);
    if a_from - a_to <= 0.0 {
        return Ok(TimeResult {
            value: TimeValue::Finite(0.0),
            samples: Vec::new(),
            g_max: 0.0,
            a_at_g_max: a_from,
            quadrature_error: 0.0,
        });
    }
    let g = |a: f64| solver.g(a).unwrap_or(0.0);
    let (a_star, gmax) = g_max_on(solver, a_to, a_from);
    let samples: Vec<(f64, f64)> = (0..=32)
        .map(|k| {
            let a = a_to + (a_from - a_to) * k as f64 / 32.0;
            let d = m - g(a);
            (a, if d > 0.0 { 1.0 / d } else { f64::INFINITY })
        })
        .collect();
    if m - gmax <= EPS_DIV * m {
        return Ok(TimeResult {
            value: TimeValue::Infinite,
            samples,
            g_max: gmax,
            a_at_g_max: a_star,
            quadrature_error: 0.0,
        });
    }
    let f = |a: f64| 1.0 / (m - g(a));
    let mut value = 0.0;
    let mut err = 0.0;
    for (lo, hi) in [(a_to, a_star), (a_star, a_from)] {
        if hi > lo {
            let q = numeric::integrate(f, lo, hi, 1e-14 * total / m, 1e-11);
            value += q.value;
            err += q.error;
        }
    }
    Ok(TimeResult { value: TimeValue::Finite(value), samples, g_max: gmax, a_at_g_max: a_star, quadrature_error: err })
}

fn cut_frame(solver: &DidoSolver, m: f64, t: f64, a: f64) -> Result<MotionFrame, MintimeError> {
    let total = solver.total_area();
    let boundary = if a >= total {
        Boundary::full()
    } else if a <= 0.0 {
        Boundary::empty_set()
    } else {
        let cut = solver.cut(a)?;
        let g = cut.length;
        let beta = m / g - 1.0;
        Boundary::new(cut.cut.arcs.iter().map(|x| x.with_speed(ArcKind::Controlled, beta)).collect())
    };
    Ok(MotionFrame::with_area(t, boundary, a))
}

/// Optimal flow: area decreases by `ȧ = g(a) − M`, the set being the Dido
/// minimiser of its area at every time. Time is integrated in the area
/// variable (`dt/da = 1/(M − g)`) with RK4 so frames are evenly spaced in area.
pub fn dido_flow(domain: &Domain, m: f64, a0: f64) -> Result<Motion, MintimeError> {
    let solver = DidoSolver::new(domain)?;
    dido_flow_with(&solver, m, a0)
}

pub fn dido_flow_with(solver: &DidoSolver, m: f64, a0: f64) -> Result<Motion, MintimeError> {
    if !(m > 0.0 && m.is_finite()) {
        return Err(MintimeError::InvalidEffort(m));
    }
    let total = solver.total_area();
    if !(a0 > 0.0 && a0 <= total * (1.0 + 1e-12)) {
        return Err(MintimeError::InvalidInterval { a_from: a0, a_to: 0.0 });
    }
    let a0 = min(a0, total);
    let g = |a: f64| solver.g(a).unwrap_or(0.0);
    let eps = EPS_DIV * m;

    // largest area below a0 where the rate vanishes
    let mut a_stop = 0.0;
    let (_, gmax) = g_max_on(solver, 0.0, a0);
    if m - gmax <= eps {
        if m - g(a0) <= eps {
            let mut motion = Motion::new(m);
            motion.frames.push(cut_frame(solver, m, 0.0, a0)?);
            return Err(MintimeError::Stalled { area: a0, motion });
        }
        let n = 1024;
        let mut prev = a0;
        for k in 1..=n {
            let a = a0 * (1.0 - k as f64 / n as f64);
            if m - g(a) <= eps {
                a_stop = numeric::bisect(|x| m - g(x) - eps, a, prev, 1e-14 * total, 200).unwrap_or(a);
                break;
            }
            prev = a;
        }
    }

    let mut motion = Motion::new(m);
    motion.notes.push(String::from("controlled cut carries the mean normal speed M/g - 1"));
    let mut a = a0;
    let mut t = 0.0;
    motion.frames.push(cut_frame(solver, m, t, a)?);
    let floor_a = 1e-8 * total;
    loop {
        // geometric grading at both ends, where g has square-root behaviour
        let da = min(min(4e-4 * total, 0.005 * a), max(0.02 * (total - a), 1e-9 * total));
        let mut a_new = a - da;
        if a_stop > 0.0 && a_new <= a_stop * (1.0 + 1e-9) + 1e-9 * total {
            let mut stalled = motion;
            stalled.notes.push(String::from("stalled"));
            return Err(MintimeError::Stalled { area: a_stop, motion: stalled });
        }
        if a_new < floor_a {
            a_new = 0.0;
        }
        // time as a function of area: dt/da = 1/(M − g(a)); the variable of
        // integration is the area, stepping downward
        let h = a_new - a;
        let f = |x: f64| 1.0 / (m - g(x));
        let dt = if a_new == 0.0 {
            numeric::integrate(f, 0.0, a, 1e-15 * total / m, 1e-12).value
        } else {
            // RK4 on dt/da = f(a) (no t dependence) is Simpson's rule
            -h / 6.0 * (f(a) + 4.0 * f(a + 0.5 * h) + f(a_new))
        };
        t += dt;
        a = a_new;
        motion.frames.push(cut_frame(solver, m, t, a)?);
        if a == 0.0 {
            break;
        }
    }
    Ok(motion)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Slicing {
    /// Level sets are lines orthogonal to the direction `angle`; the set keeps
    /// the far side.
    Directional { angle: f64 },
    /// Level sets are circles around `center`; the set keeps the outside.
    Radial { center: Point },
}

fn slice_level_range(domain: &Domain, slicing: Slicing) -> Result<(f64, f64), MintimeError> {
    match (domain, slicing) {
        (Domain::Disc { radius }, Slicing::Directional { .. }) => Ok((-radius, *radius)),
        (Domain::Disc { radius }, Slicing::Radial { center }) => Ok((0.0, center.norm() + radius)),
        (Domain::SymmetricCap { .. }, _) => Err(MintimeError::Unsupported),
        (_, Slicing::Directional { angle }) => {
            let d = Point::unit(angle);
            let v = domain.polygon().unwrap_or_default();
            let lo = v.iter().map(|p| p.dot(d)).fold(f64::INFINITY, min);
            let hi = v.iter().map(|p| p.dot(d)).fold(f64::NEG_INFINITY, max);
            Ok((lo, hi))
        }
        (_, Slicing::Radial { center }) => {
            let v = domain.polygon().unwrap_or_default();
            Ok((0.0, v.iter().map(|p| p.dist(center)).fold(0.0, max)))
        }
    }
}

// area of the part kept at level s, and the level-set pieces (Ω on the left)
fn slice_at(domain: &Domain, slicing: Slicing, s: f64) -> Result<(f64, Vec<CircArc>), MintimeError> {
    match (domain, slicing) {
        (Domain::SymmetricCap { .. }, _) => Err(MintimeError::Unsupported),
        (Domain::Disc { radius }, Slicing::Directional { angle }) => {
            let r = *radius;
            let s = s.clamp(-r, r);
            let area = r * r * acos(s / r) - s * sqrt(max(0.0, r * r - s * s));
            let d = Point::unit(angle);
            let half = sqrt(max(0.0, r * r - s * s));
            let dir = -d.perp();
            let mid = d * s;
            let arcs = if half > 0.0 { vec![CircArc::segment(mid - dir * half, mid + dir * half)] } else { Vec::new() };
            Ok((area, arcs))
        }
        (Domain::Disc { radius }, Slicing::Radial { center }) => {
            // disc ∩ disc: kept part is outside the disc around `center`
            let r = *radius;
            let d = center.norm();
            let rho = s;
            let lens = two_disc_area(r, rho, d);
            let area = PI * r * r - lens;
            let mut arcs = Vec::new();
            if rho > 0.0 && d + rho > r && abs(d - rho) < r {
                let cos_a = (rho * rho + d * d - r * r) / (2.0 * rho * d);
                let half = acos(cos_a.clamp(-1.0, 1.0));
                let base = if d > 0.0 { (Point::new(0.0, 0.0) - center).angle() } else { 0.0 };
                arcs.push(CircArc::from_center(center, rho, base + half, base - half));
            } else if rho > 0.0 && d + rho <= r {
                arcs.push(CircArc::from_center(center, rho, 2.0 * PI, 0.0));
            }
            Ok((area, arcs))
        }
        (_, Slicing::Directional { angle }) => {
            let v = domain.polygon().unwrap_or_default();
            let d = Point::unit(angle);
            let kept = clip_halfplane(&v, d, s);
            let area = polygon_area(&kept);
            let dir = -d.perp();
            let arcs = match line_chord(&v, d * s, dir) {
                Some((t0, t1)) if t1 - t0 > 0.0 => vec![CircArc::segment(d * s + dir * t0, d * s + dir * t1)],
                _ => Vec::new(),
            };
            Ok((area, arcs))
        }
        (_, Slicing::Radial { center }) => {
            let v = domain.polygon().unwrap_or_default();
            let area = polygon_area(&v) - circle_polygon_area(&v, center, s);
            let arcs = circle_polygon_arcs(&v, center, s)
                .into_iter()
                .filter(|(a0, a1)| a1 - a0 < 2.0 * PI - 1e-12 || s > 0.0)
                .map(|(a0, a1)| CircArc::from_center(center, s, a1, a0))
                .collect();
            Ok((area, arcs))
        }
    }
}

fn two_disc_area(r: f64, rho: f64, d: f64) -> f64 {
    if rho <= 0.0 {
        return 0.0;
    }
    if d + rho <= r {
        return PI * rho * rho;
    }
    if d + r <= rho {
        return PI * r * r;
    }
    if d >= r + rho {
        return 0.0;
    }
    let a = acos(((d * d + rho * rho - r * r) / (2.0 * d * rho)).clamp(-1.0, 1.0));
    let b = acos(((d * d + r * r - rho * rho) / (2.0 * d * r)).clamp(-1.0, 1.0));
    rho * rho * a + r * r * b - 0.5 * sqrt(max(0.0, (-d + rho + r) * (d + rho - r) * (d - rho + r) * (d + rho + r)))
}

/// Longest level set of the slicing (sampled, refined by golden section).
pub fn max_slice_length(domain: &Domain, slicing: Slicing) -> Result<f64, MintimeError> {
    let (lo, hi) = slice_level_range(domain, slicing)?;
    let len = |s: f64| slice_at(domain, slicing, s).map(|(_, arcs)| arcs.iter().map(|a| a.length).sum()).unwrap_or(0.0);
    let n = 512;
    let mut best = (lo, 0.0);
    for k in 0..=n {
        let s = lo + (hi - lo) * k as f64 / n as f64;
        let l = len(s);
        if l > best.1 {
            best = (s, l);
        }
    }
    let h = (hi - lo) / n as f64;
    let (_, l) = numeric::golden_max(len, max(lo, best.0 - h), min(hi, best.0 + h), 1e-14 * max(1.0, hi - lo));
    Ok(max(l, best.1))
}

/// Constant-rate eradication by sweeping a slicing: the area decreases at
/// `b₁M/(1+b₁)` until it vanishes at `T = (1+b₁)·area(V)/(b₁M)`.
pub fn levelset_eradication(
    domain: &Domain,
    slicing: Slicing,
    m: f64,
    b1: f64,
    n_frames: usize,
) -> Result<Motion, MintimeError> {
    domain.validate()?;
    if !(m > 0.0 && b1 > 0.0) {
        return Err(MintimeError::InvalidEffort(m));
    }
    let bound = m / (1.0 + b1);
    let lmax = max_slice_length(domain, slicing)?;
    if lmax >= bound {
        return Err(MintimeError::SlicingTooLong { max_length: lmax, bound });
    }
    let (lo, hi) = slice_level_range(domain, slicing)?;
    let total = domain.area();
    let rate = b1 * m / (1.0 + b1);
    let t_end = total / rate;
    let n = n_frames.max(2);
    let mut motion = Motion::new(m);
    motion.notes.push(String::from("level-set slicing at constant clearing rate"));
    for k in 0..=n {
        let t = t_end * k as f64 / n as f64;
        let target = total - rate * t;
        let boundary = if k == 0 {
            Boundary::full()
        } else if k == n {
            Boundary::empty_set()
        } else {
            let s = numeric::bisect(
                |s| slice_at(domain, slicing, s).map(|x| x.0).unwrap_or(0.0) - target,
                lo,
                hi,
                1e-15 * max(1.0, hi - lo),
                200,
            )
            .unwrap_or(lo);
            let (_, arcs) = slice_at(domain, slicing, s)?;
            let p: f64 = arcs.iter().map(|a| a.length).sum();
            let beta = if p > 0.0 { rate / p } else { 0.0 };
            Boundary::new(arcs.into_iter().map(|a| a.with_speed(ArcKind::Controlled, beta)).collect())
        };
        let area = if k == n { 0.0 } else { region_area(domain, &boundary)? };
        motion.frames.push(MotionFrame::with_area(t, boundary, area));
    }
    Ok(motion)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disc_diameter_effort_diverges() {
        let d = Domain::Disc { radius: 1.0 };
        let r = min_time(&d, 2.0, PI, 0.0).unwrap();
        assert_eq!(r.value, TimeValue::Infinite);
    }

    #[test]
    fn empty_interval_is_zero() {
        let d = Domain::Disc { radius: 1.0 };
        assert_eq!(min_time(&d, 3.0, 1.0, 1.0).unwrap().value, TimeValue::Finite(0.0));
    }

    // trapezoid in the angle u of the orthogonal family, da/du in closed form
    fn disc_oracle(r: f64, m: f64, n: usize) -> f64 {
        let f = |u: f64| {
            let dadu = if u < 1e-4 {
                4.0 / 3.0 * r * r
            } else {
                let c = 1.0 / tan(u);
                let s2 = 1.0 / (sin(u) * sin(u));
                -2.0 * r * r * c * s2 * (sin(u) * cos(u) - u)
            };
            let g = if u < 1e-8 { 2.0 * r } else { 2.0 * r * u / tan(u) };
            dadu / (m - g)
        };
        let h = (PI / 2.0) / n as f64;
        let mut acc = 0.5 * (f(0.0) + f(PI / 2.0));
        for k in 1..n {
            acc += f(k as f64 * h);
        }
        2.0 * acc * h
    }

    #[test]
    fn disc_time_matches_oracle() {
        let d = Domain::Disc { radius: 1.0 };
        let TimeValue::Finite(t) = min_time(&d, 3.0, PI, 0.0).unwrap().value else { panic!() };
        let o = disc_oracle(1.0, 3.0, 200_000);
        assert!(abs(t - o) / o < 1e-6, "{t} vs {o}");
    }

    #[test]
    fn flow_ends_at_min_time() {
        let d = Domain::Disc { radius: 1.0 };
        let motion = dido_flow(&d, 3.0, PI).unwrap();
        let TimeValue::Finite(t) = min_time(&d, 3.0, PI, 0.0).unwrap().value else { panic!() };
        assert!(abs(motion.final_time() - t) < 1e-5);
    }

    #[test]
    fn flow_stalls_when_effort_too_small() {
        let d = Domain::Disc { radius: 1.0 };
        assert!(matches!(dido_flow(&d, 1.0, PI / 2.0), Err(MintimeError::Stalled { .. })));
    }

    #[test]
    fn slicing_time() {
        let d = Domain::unit_triangle();
        let c = Point::new(0.0, sqrt(3.0) / 2.0);
        let m = levelset_eradication(&d, Slicing::Radial { center: c }, 1.0, 0.1, 200).unwrap();
        let expect = 1.1 * (sqrt(3.0) / 4.0) / 0.1;
        assert!(abs(m.final_time() - expect) < 1e-12);
        for w in m.frames.windows(2) {
            assert!(w[1].area <= w[0].area + 1e-12);
        }
    }
}
