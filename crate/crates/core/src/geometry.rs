//! Domains, circular-arc boundaries, exact areas, and the perpendicular arc
//! families used to cut corners and curvature maxima.
//!
//! An arc is stored as a start point, a start heading, a signed curvature and
//! a length. That form is numerically stable for very large radii (nearly
//! straight pieces), where a center/radius form would cancel catastrophically.
//! Curvature is positive when the arc bends toward the contaminated set, which
//! by convention lies to the left of the direction of travel.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use crate::math::*;
use crate::numeric;

/// Endpoint chaining tolerance (scaled by the domain size where one is known).
pub const TOL_GEO: f64 = 1e-9;
/// Angular tolerance for perpendicularity and tangency checks.
pub const TOL_ANG: f64 = 1e-9;
/// Iteration cap for the geometric Newton solves.
pub const MAX_ITER: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }
    pub fn dot(self, o: Point) -> f64 {
        self.x * o.x + self.y * o.y
    }
    pub fn cross(self, o: Point) -> f64 {
        self.x * o.y - self.y * o.x
    }
    pub fn norm(self) -> f64 {
        hypot(self.x, self.y)
    }
    pub fn dist(self, o: Point) -> f64 {
        (self - o).norm()
    }
    pub fn unit(angle: f64) -> Point {
        Point::new(cos(angle), sin(angle))
    }
    pub fn angle(self) -> f64 {
        atan2(self.y, self.x)
    }
    /// Rotation by +90 degrees.
    pub fn perp(self) -> Point {
        Point::new(-self.y, self.x)
    }
    pub fn normalized(self) -> Point {
        let n = self.norm();
        Point::new(self.x / n, self.y / n)
    }
    pub fn reflect_x(self) -> Point {
        Point::new(-self.x, self.y)
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}
impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}
impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }
}
impl Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum GeometryError {
    InvalidDomain(&'static str),
    InvalidBoundary(&'static str),
    NoConvergence { residual: f64 },
    OutOfRange,
    NotAMaximum { omega2: f64 },
}

impl fmt::Display for GeometryError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeometryError::InvalidDomain(m) => write!(f, "invalid domain: {m}"),
            GeometryError::InvalidBoundary(m) => write!(f, "invalid boundary: {m}"),
            GeometryError::NoConvergence { residual } => {
                write!(f, "no convergence (residual {residual:e})")
            }
            GeometryError::OutOfRange => write!(f, "abscissa outside the validity window"),
            GeometryError::NotAMaximum { omega2 } => {
                write!(f, "curvature is not a strict maximum (omega''(0) = {omega2})")
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArcKind {
    /// Uncontrolled piece, moving outward at unit speed (beta = -1).
    Free,
    /// Piece where effort is spent (beta > -1).
    Controlled,
}

/// Which side of the supporting circle the contaminated set lies on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    Inward,
    Outward,
    Straight,
}

/// A circular arc or straight segment of the relative boundary.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CircArc {
    pub start: Point,
    /// Direction of travel at `start`, radians.
    pub heading: f64,
    /// Signed curvature; zero for segments.
    pub curvature: f64,
    pub length: f64,
    pub kind: ArcKind,
    /// Mean normal speed over the piece.
    pub beta: f64,
    /// Normal speed at the start point.
    pub beta_start: f64,
    /// Normal speed at the end point.
    pub beta_end: f64,
}

impl CircArc {
    /// Straight segment from `p0` to `p1`, controlled with zero speed.
    pub fn segment(p0: Point, p1: Point) -> CircArc {
        let d = p1 - p0;
        CircArc {
            start: p0,
            heading: d.angle(),
            curvature: 0.0,
            length: d.norm(),
            kind: ArcKind::Controlled,
            beta: 0.0,
            beta_start: 0.0,
            beta_end: 0.0,
        }
    }

    /// Arc of the circle `(c, r)` traversed from polar angle `a0` to `a1`;
    /// counterclockwise when `a1 > a0` (set inside), clockwise otherwise.
    pub fn from_center(c: Point, r: f64, a0: f64, a1: f64) -> CircArc {
        let ccw = a1 > a0;
        let start = c + Point::unit(a0) * r;
        let heading = if ccw { a0 + PI / 2.0 } else { a0 - PI / 2.0 };
        CircArc {
            start,
            heading,
            curvature: if ccw { 1.0 / r } else { -1.0 / r },
            length: r * abs(a1 - a0),
            kind: ArcKind::Controlled,
            beta: 0.0,
            beta_start: 0.0,
            beta_end: 0.0,
        }
    }

    /// Sets the kind and a uniform normal speed.
    pub fn with_speed(mut self, kind: ArcKind, beta: f64) -> CircArc {
        self.kind = kind;
        self.beta = beta;
        self.beta_start = beta;
        self.beta_end = beta;
        self
    }

    pub fn free(self) -> CircArc {
        self.with_speed(ArcKind::Free, -1.0)
    }

    /// Sets distinct endpoint speeds, keeping `beta` as the mean.
    pub fn with_endpoint_speeds(mut self, b0: f64, b1: f64) -> CircArc {
        self.beta_start = b0;
        self.beta_end = b1;
        self
    }

    pub fn is_segment(&self) -> bool {
        self.curvature == 0.0
    }

    /// Turning angle (signed).
    pub fn span(&self) -> f64 {
        self.curvature * self.length
    }

    pub fn radius(&self) -> f64 {
        if self.is_segment() {
            f64::INFINITY
        } else {
            1.0 / abs(self.curvature)
        }
    }

    pub fn orientation(&self) -> Orientation {
        if self.curvature > 0.0 {
            Orientation::Inward
        } else if self.curvature < 0.0 {
            Orientation::Outward
        } else {
            Orientation::Straight
        }
    }

    pub fn center(&self) -> Option<Point> {
        if self.is_segment() {
            None
        } else {
            Some(self.start + Point::unit(self.heading).perp() * (1.0 / self.curvature))
        }
    }

    /// Point at arclength `s` from the start.
    pub fn point_at(&self, s: f64) -> Point {
        let k = self.curvature;
        let ks = k * s;
        let along = s * sinc(ks);
        let half = 0.5 * ks;
        let side = s * half * sinc(half) * sinc(half);
        let (sh, ch) = (sin(self.heading), cos(self.heading));
        Point::new(self.start.x + along * ch - side * sh, self.start.y + along * sh + side * ch)
    }

    pub fn heading_at(&self, s: f64) -> f64 {
        self.heading + self.curvature * s
    }

    pub fn tangent_at(&self, s: f64) -> Point {
        Point::unit(self.heading_at(s))
    }

    /// Unit normal pointing into the contaminated set.
    pub fn normal_at(&self, s: f64) -> Point {
        self.tangent_at(s).perp()
    }

    pub fn end(&self) -> Point {
        self.point_at(self.length)
    }

    pub fn end_heading(&self) -> f64 {
        self.heading_at(self.length)
    }

    pub fn midpoint(&self) -> Point {
        self.point_at(0.5 * self.length)
    }

    /// `½∮(x dy − y dx)` along the piece.
    pub fn green(&self) -> f64 {
        let chord = self.end() - self.start;
        let l = self.length;
        let lens = self.curvature * l * l * l * x_minus_sin_over_cube(self.curvature * l);
        0.5 * (self.start.cross(chord) + lens)
    }

    /// Same piece traversed backwards (the complementary set on the left).
    pub fn reversed(&self) -> CircArc {
        CircArc {
            start: self.end(),
            heading: self.end_heading() + PI,
            curvature: -self.curvature,
            length: self.length,
            kind: self.kind,
            beta: self.beta,
            beta_start: self.beta_end,
            beta_end: self.beta_start,
        }
    }

    /// Mirror image in the vertical axis, same parameter direction.
    pub fn reflected_x(&self) -> CircArc {
        CircArc { start: self.start.reflect_x(), heading: PI - self.heading, curvature: -self.curvature, ..*self }
    }

    /// Nearest point: (arclength parameter, distance).
    pub fn nearest(&self, p: Point) -> (f64, f64) {
        let l = self.length;
        if l == 0.0 {
            return (0.0, p.dist(self.start));
        }
        if abs(self.curvature) * l > 0.5 {
            let c = self.center().unwrap_or(self.start);
            let r = self.radius();
            let a0 = (self.start - c).angle();
            let ap = (p - c).angle();
            let sgn = if self.curvature > 0.0 { 1.0 } else { -1.0 };
            let rel = wrap_2pi(sgn * (ap - a0));
            let span = abs(self.span());
            let mut best = (0.0, p.dist(self.start));
            let de = p.dist(self.end());
            if de < best.1 {
                best = (l, de);
            }
            if rel <= span {
                let d = abs(p.dist(c) - r);
                if d < best.1 {
                    best = (rel * r, d);
                }
            }
            return best;
        }
        // nearly straight: Newton on <p(s) - p, t(s)> = 0 from the chord projection
        let chord = self.end() - self.start;
        let mut s = ((p - self.start).dot(chord) / chord.dot(chord) * l).clamp(0.0, l);
        for _ in 0..20 {
            let q = self.point_at(s);
            let t = self.tangent_at(s);
            let g = (q - p).dot(t);
            let dg = 1.0 + (q - p).dot(t.perp()) * self.curvature;
            let step = if dg > 0.1 { g / dg } else { g };
            let ns = (s - step).clamp(0.0, l);
            if abs(ns - s) < 1e-15 * l {
                s = ns;
                break;
            }
            s = ns;
        }
        let mut best = (s, p.dist(self.point_at(s)));
        for cand in [0.0, l] {
            let d = p.dist(self.point_at(cand));
            if d < best.1 {
                best = (cand, d);
            }
        }
        best
    }

    /// `n + 1` equally spaced points including both ends.
    pub fn sample(&self, n: usize) -> Vec<Point> {
        (0..=n).map(|i| self.point_at(self.length * i as f64 / n as f64)).collect()
    }

    /// Center form `(cx, cy, r, a0, a1)`; `None` for segments.
    pub fn center_form(&self) -> Option<(f64, f64, f64, f64, f64)> {
        let c = self.center()?;
        let a0 = (self.start - c).angle();
        Some((c.x, c.y, self.radius(), a0, a0 + self.span()))
    }
}

/// Whether an endpoint sits inside `V` or on its boundary.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JunctionTag {
    Interior,
    OnBoundary,
}

/// Ordered relative boundary `∂Ω ∩ V`. No pieces means `Ω = V`, unless
/// `void` is set, in which case `Ω` is empty.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Boundary {
    pub arcs: Vec<CircArc>,
    pub void: bool,
}

impl Boundary {
    pub fn new(arcs: Vec<CircArc>) -> Self {
        Boundary { arcs, void: false }
    }
    pub fn full() -> Self {
        Boundary { arcs: Vec::new(), void: false }
    }
    pub fn empty_set() -> Self {
        Boundary { arcs: Vec::new(), void: true }
    }
    /// Start/end tags of every piece.
    pub fn endpoint_tags(&self, domain: &Domain) -> Vec<(JunctionTag, JunctionTag)> {
        let tol = domain.tol();
        let tag = |p: Point| {
            if domain.boundary_distance(p) <= tol {
                JunctionTag::OnBoundary
            } else {
                JunctionTag::Interior
            }
        };
        self.arcs.iter().map(|a| (tag(a.start), tag(a.end()))).collect()
    }
    pub fn reflected_x(&self) -> Boundary {
        Boundary { arcs: self.arcs.iter().map(|a| a.reflected_x()).collect(), void: self.void }
    }
}

/// Total length of the relative boundary.
pub fn relative_perimeter(boundary: &Boundary) -> f64 {
    // an empty f64 sum is −0
    boundary.arcs.iter().map(|a| a.length).sum::<f64>() + 0.0
}

/// The constraining region `V`.
#[derive(Clone, Debug, PartialEq)]
pub enum Domain {
    Disc {
        radius: f64,
    },
    /// `{|y| <= x tan α, 0 <= x <= length}`: a wedge truncated at `x = length`.
    Wedge {
        half_angle: f64,
        length: f64,
    },
    /// Counterclockwise convex polygon.
    ConvexPolygon {
        vertices: Vec<Point>,
    },
    /// `{0 < y < g(x)}` with `g(x) = Σ coeffs[k] x^{2k}` even and concave.
    SymmetricCap {
        coeffs: Vec<f64>,
    },
}

impl Domain {
    /// Unit-side equilateral triangle with vertices (−½,0), (½,0), (0,√3/2).
    pub fn unit_triangle() -> Domain {
        Domain::ConvexPolygon {
            vertices: vec![Point::new(-0.5, 0.0), Point::new(0.5, 0.0), Point::new(0.0, sqrt(3.0) / 2.0)],
        }
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        match self {
            Domain::Disc { radius } => {
                if !(radius.is_finite() && *radius > 0.0) {
                    return Err(GeometryError::InvalidDomain("disc radius must be positive"));
                }
            }
            Domain::Wedge { half_angle, length } => {
                if !(*half_angle > 0.0 && *half_angle < PI / 2.0) {
                    return Err(GeometryError::InvalidDomain("wedge half-angle must lie in (0, π/2)"));
                }
                if !(length.is_finite() && *length > 0.0) {
                    return Err(GeometryError::InvalidDomain("wedge length must be positive"));
                }
            }
            Domain::ConvexPolygon { vertices } => {
                let n = vertices.len();
                if n < 3 {
                    return Err(GeometryError::InvalidDomain("polygon needs at least 3 vertices"));
                }
                for i in 0..n {
                    let a = vertices[i];
                    let b = vertices[(i + 1) % n];
                    let c = vertices[(i + 2) % n];
                    if !(a.x.is_finite() && a.y.is_finite()) {
                        return Err(GeometryError::InvalidDomain("non-finite vertex"));
                    }
                    if (b - a).cross(c - b) <= 0.0 {
                        return Err(GeometryError::InvalidDomain("polygon must be convex and counterclockwise"));
                    }
                }
            }
            Domain::SymmetricCap { coeffs } => {
                if coeffs.is_empty() || coeffs[0] <= 0.0 {
                    return Err(GeometryError::InvalidDomain("cap needs g(0) > 0"));
                }
                let xr = self.cap_root().ok_or(GeometryError::InvalidDomain("cap height has no positive root"))?;
                for i in 0..=64 {
                    let x = xr * i as f64 / 64.0;
                    if self.cap_ddg(x) >= 0.0 {
                        return Err(GeometryError::InvalidDomain("cap height must be strictly concave"));
                    }
                }
            }
        }
        Ok(())
    }

    /// Vertex list for polygonal domains (wedges included).
    pub fn polygon(&self) -> Option<Vec<Point>> {
        match self {
            Domain::ConvexPolygon { vertices } => Some(vertices.clone()),
            Domain::Wedge { half_angle, length } => {
                let h = length * tan(*half_angle);
                Some(vec![Point::new(0.0, 0.0), Point::new(*length, -h), Point::new(*length, h)])
            }
            _ => None,
        }
    }

    pub fn cap_g(&self, x: f64) -> f64 {
        self.cap_poly(x, 0)
    }
    pub fn cap_dg(&self, x: f64) -> f64 {
        self.cap_poly(x, 1)
    }
    pub fn cap_ddg(&self, x: f64) -> f64 {
        self.cap_poly(x, 2)
    }

    fn cap_poly(&self, x: f64, deriv: u32) -> f64 {
        let Domain::SymmetricCap { coeffs } = self else { return 0.0 };
        let mut acc = 0.0;
        for (k, c) in coeffs.iter().enumerate() {
            let p = 2 * k as i32;
            let mut f = *c;
            let mut e = p;
            for _ in 0..deriv {
                f *= e as f64;
                e -= 1;
            }
            if f == 0.0 {
                continue;
            }
            acc += f * powi(x, e.max(0));
        }
        acc
    }

    /// Positive root of the cap height.
    pub fn cap_root(&self) -> Option<f64> {
        let g0 = self.cap_g(0.0);
        if g0 <= 0.0 {
            return None;
        }
        let mut hi = 1.0;
        let mut n = 0;
        while self.cap_g(hi) > 0.0 {
            hi *= 2.0;
            n += 1;
            if n > 60 {
                return None;
            }
        }
        numeric::bisect(|x| self.cap_g(x), 0.0, hi, 1e-15 * hi, 200)
    }

    pub fn area(&self) -> f64 {
        match self {
            Domain::Disc { radius } => PI * radius * radius,
            Domain::SymmetricCap { .. } => {
                let xr = self.cap_root().unwrap_or(0.0);
                2.0 * numeric::integrate(|x| self.cap_g(x), 0.0, xr, 1e-15, 1e-14).value
            }
            _ => polygon_area(&self.polygon().unwrap_or_default()),
        }
    }

    pub fn perimeter(&self) -> f64 {
        match self {
            Domain::Disc { radius } => 2.0 * PI * radius,
            Domain::SymmetricCap { .. } => {
                let xr = self.cap_root().unwrap_or(0.0);
                let top = numeric::integrate(|x| sqrt(1.0 + self.cap_dg(x) * self.cap_dg(x)), 0.0, xr, 1e-14, 1e-13);
                2.0 * xr + 2.0 * top.value
            }
            _ => {
                let v = self.polygon().unwrap_or_default();
                (0..v.len()).map(|i| v[i].dist(v[(i + 1) % v.len()])).sum()
            }
        }
    }

    pub fn diameter(&self) -> f64 {
        match self {
            Domain::Disc { radius } => 2.0 * radius,
            Domain::SymmetricCap { .. } => {
                let xr = self.cap_root().unwrap_or(0.0);
                max(2.0 * xr, self.cap_g(0.0))
            }
            _ => {
                let v = self.polygon().unwrap_or_default();
                let mut d: f64 = 0.0;
                for a in &v {
                    for b in &v {
                        d = max(d, a.dist(*b));
                    }
                }
                d
            }
        }
    }

    /// Scale-aware geometric tolerance.
    pub fn tol(&self) -> f64 {
        TOL_GEO * max(1.0, self.diameter())
    }

    /// A point strictly inside `V` from which `V` is star-shaped.
    pub fn interior_point(&self) -> Point {
        match self {
            Domain::Disc { .. } => Point::new(0.0, 0.0),
            Domain::SymmetricCap { .. } => Point::new(0.0, 0.5 * self.cap_g(0.0)),
            _ => {
                let v = self.polygon().unwrap_or_default();
                let n = v.len().max(1) as f64;
                v.iter().fold(Point::new(0.0, 0.0), |acc, p| acc + *p) * (1.0 / n)
            }
        }
    }

    /// Axis-aligned bounding box `(min, max)`.
    pub fn bbox(&self) -> (Point, Point) {
        match self {
            Domain::Disc { radius } => (Point::new(-radius, -radius), Point::new(*radius, *radius)),
            Domain::SymmetricCap { .. } => {
                let xr = self.cap_root().unwrap_or(0.0);
                (Point::new(-xr, 0.0), Point::new(xr, self.cap_g(0.0)))
            }
            _ => {
                let v = self.polygon().unwrap_or_default();
                let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
                let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
                for p in v {
                    lo = Point::new(min(lo.x, p.x), min(lo.y, p.y));
                    hi = Point::new(max(hi.x, p.x), max(hi.y, p.y));
                }
                (lo, hi)
            }
        }
    }

    /// Closed-set membership with slack `tol`.
    pub fn contains(&self, p: Point, tol: f64) -> bool {
        match self {
            Domain::Disc { radius } => p.norm() <= radius + tol,
            Domain::SymmetricCap { .. } => {
                let xr = self.cap_root().unwrap_or(0.0);
                if abs(p.x) > xr + tol || p.y < -tol {
                    return false;
                }
                p.y <= self.cap_g(p.x.clamp(-xr, xr)) + tol || self.boundary_distance(p) <= tol
            }
            _ => {
                let v = self.polygon().unwrap_or_default();
                let n = v.len();
                (0..n).all(|i| {
                    let a = v[i];
                    let b = v[(i + 1) % n];
                    (b - a).cross(p - a) / a.dist(b) >= -tol
                })
            }
        }
    }

    /// Unsigned distance from `p` to `∂V`.
    pub fn boundary_distance(&self, p: Point) -> f64 {
        match self {
            Domain::Disc { radius } => abs(p.norm() - radius),
            Domain::SymmetricCap { .. } => {
                let xr = self.cap_root().unwrap_or(0.0);
                let bottom = segment_distance(p, Point::new(-xr, 0.0), Point::new(xr, 0.0));
                let top = self.cap_top_nearest(p).1;
                min(bottom, top)
            }
            _ => {
                let v = self.polygon().unwrap_or_default();
                let n = v.len();
                (0..n).map(|i| segment_distance(p, v[i], v[(i + 1) % n])).fold(f64::INFINITY, min)
            }
        }
    }

    fn cap_top_nearest(&self, p: Point) -> (f64, f64) {
        let xr = self.cap_root().unwrap_or(0.0);
        let d = |x: f64| hypot(p.x - x, p.y - self.cap_g(x));
        let n = 256;
        let mut best = (0.0, f64::INFINITY);
        for i in 0..=n {
            let x = -xr + 2.0 * xr * i as f64 / n as f64;
            let v = d(x);
            if v < best.1 {
                best = (x, v);
            }
        }
        let h = 2.0 * xr / n as f64;
        let (x, negd) = numeric::golden_max(|x| -d(x), max(-xr, best.0 - h), min(xr, best.0 + h), 1e-13 * max(1.0, xr));
        (x, -negd)
    }

    /// Length of the boundary parameter interval (one full turn of `∂V`).
    pub fn param_period(&self) -> f64 {
        match self {
            Domain::SymmetricCap { .. } => 4.0 * self.cap_root().unwrap_or(0.0),
            Domain::Disc { radius } => 2.0 * PI * radius,
            _ => self.perimeter(),
        }
    }

    /// Monotone counterclockwise parameter of the boundary point nearest to `p`.
    /// Arclength for discs and polygons; for caps the bottom edge is followed by
    /// the graph, parametrized by `x`.
    pub fn boundary_param(&self, p: Point) -> f64 {
        match self {
            Domain::Disc { radius } => radius * wrap_2pi(p.angle()),
            Domain::SymmetricCap { .. } => {
                let xr = self.cap_root().unwrap_or(0.0);
                let db = segment_distance(p, Point::new(-xr, 0.0), Point::new(xr, 0.0));
                let (xt, dt) = self.cap_top_nearest(p);
                if db <= dt {
                    (p.x.clamp(-xr, xr) + xr).min(2.0 * xr)
                } else {
                    let s = 2.0 * xr + (xr - xt);
                    if s >= 4.0 * xr {
                        0.0
                    } else {
                        s
                    }
                }
            }
            _ => {
                let v = self.polygon().unwrap_or_default();
                let n = v.len();
                let mut best = (f64::INFINITY, 0.0);
                let mut acc = 0.0;
                for i in 0..n {
                    let a = v[i];
                    let b = v[(i + 1) % n];
                    let len = a.dist(b);
                    let t = ((p - a).dot(b - a) / (len * len)).clamp(0.0, 1.0);
                    let d = p.dist(a + (b - a) * t);
                    if d < best.0 - 1e-15 {
                        best = (d, acc + t * len);
                    }
                    acc += len;
                }
                if best.1 >= acc {
                    0.0
                } else {
                    best.1
                }
            }
        }
    }

    /// Boundary point at parameter `s`.
    pub fn boundary_point(&self, s: f64) -> Point {
        let per = self.param_period();
        let s = s - per * floor(s / per);
        match self {
            Domain::Disc { radius } => Point::unit(s / radius) * *radius,
            Domain::SymmetricCap { .. } => {
                let xr = self.cap_root().unwrap_or(0.0);
                if s <= 2.0 * xr {
                    Point::new(-xr + s, 0.0)
                } else {
                    let x = xr - (s - 2.0 * xr);
                    Point::new(x, self.cap_g(x))
                }
            }
            _ => {
                let v = self.polygon().unwrap_or_default();
                let n = v.len();
                let mut acc = 0.0;
                for i in 0..n {
                    let a = v[i];
                    let b = v[(i + 1) % n];
                    let len = a.dist(b);
                    if s <= acc + len {
                        return a + (b - a) * ((s - acc) / len);
                    }
                    acc += len;
                }
                v[0]
            }
        }
    }

    /// Unit counterclockwise tangent of `∂V` at the boundary point nearest `p`.
    pub fn boundary_tangent(&self, p: Point) -> Point {
        match self {
            Domain::Disc { .. } => p.normalized().perp(),
            Domain::SymmetricCap { .. } => {
                let xr = self.cap_root().unwrap_or(0.0);
                let db = segment_distance(p, Point::new(-xr, 0.0), Point::new(xr, 0.0));
                let (xt, dt) = self.cap_top_nearest(p);
                if db <= dt {
                    Point::new(1.0, 0.0)
                } else {
                    Point::new(-1.0, -self.cap_dg(xt)).normalized()
                }
            }
            _ => {
                let v = self.polygon().unwrap_or_default();
                let n = v.len();
                let mut best = (f64::INFINITY, Point::new(1.0, 0.0));
                for i in 0..n {
                    let a = v[i];
                    let b = v[(i + 1) % n];
                    let d = segment_distance(p, a, b);
                    if d < best.0 - 1e-15 {
                        best = (d, (b - a).normalized());
                    }
                }
                best.1
            }
        }
    }

    /// `½∫(x dy − y dx)` along `∂V` counterclockwise from parameter `s0` to `s1`.
    pub fn boundary_green(&self, s0: f64, s1: f64) -> f64 {
        let per = self.param_period();
        let s0 = s0 - per * floor(s0 / per);
        let mut s1 = s1 - per * floor(s1 / per);
        if s1 < s0 {
            s1 += per;
        }
        match self {
            Domain::Disc { radius } => 0.5 * radius * (s1 - s0),
            Domain::SymmetricCap { .. } => {
                let xr = self.cap_root().unwrap_or(0.0);
                // pieces: bottom [0,2xr] contributes nothing, top (2xr,4xr)
                let mut acc = 0.0;
                let mut lo = s0;
                while lo < s1 - 1e-300 {
                    let cycle = floor(lo / per);
                    let local = lo - cycle * per;
                    let (piece_end, top) = if local < 2.0 * xr { (2.0 * xr, false) } else { (4.0 * xr, true) };
                    let hi = min(s1, cycle * per + piece_end);
                    if top {
                        let xa = xr - (local - 2.0 * xr);
                        let xb = xr - (hi - cycle * per - 2.0 * xr);
                        let q = numeric::integrate(|x| x * self.cap_dg(x) - self.cap_g(x), xa, xb, 1e-15, 1e-13);
                        acc += 0.5 * q.value;
                    }
                    if hi <= lo {
                        break;
                    }
                    lo = hi;
                }
                acc
            }
            _ => {
                let v = self.polygon().unwrap_or_default();
                let n = v.len();
                let mut cum = vec![0.0; n + 1];
                for i in 0..n {
                    cum[i + 1] = cum[i] + v[i].dist(v[(i + 1) % n]);
                }
                let mut pts = vec![self.boundary_point(s0)];
                for turn in 0..2 {
                    for (i, c) in cum.iter().enumerate().take(n) {
                        let sv = c + turn as f64 * per;
                        if sv > s0 && sv < s1 {
                            pts.push(v[i]);
                        }
                    }
                }
                pts.push(self.boundary_point(s1));
                let mut acc = 0.0;
                for w in pts.windows(2) {
                    acc += 0.5 * w[0].cross(w[1]);
                }
                acc
            }
        }
    }
}

fn powi(x: f64, e: i32) -> f64 {
    let mut r = 1.0;
    for _ in 0..e {
        r *= x;
    }
    r
}

/// Shoelace area of a polygon (positive when counterclockwise).
pub fn polygon_area(v: &[Point]) -> f64 {
    let n = v.len();
    (0..n).map(|i| 0.5 * v[i].cross(v[(i + 1) % n])).sum()
}

/// Distance from `p` to the segment `[a, b]`.
pub fn segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let d = b - a;
    let l2 = d.dot(d);
    if l2 == 0.0 {
        return p.dist(a);
    }
    let t = ((p - a).dot(d) / l2).clamp(0.0, 1.0);
    p.dist(a + d * t)
}

/// Intersection of the lines `p + s·u` and `q + t·v`.
pub fn line_intersection(p: Point, u: Point, q: Point, v: Point) -> Option<Point> {
    let den = u.cross(v);
    if abs(den) < 1e-300 {
        return None;
    }
    let s = (q - p).cross(v) / den;
    Some(p + u * s)
}

/// Part of a convex polygon with `<p, n> >= c`.
pub fn clip_halfplane(v: &[Point], n: Point, c: f64) -> Vec<Point> {
    let mut out = Vec::new();
    let m = v.len();
    for i in 0..m {
        let a = v[i];
        let b = v[(i + 1) % m];
        let fa = a.dot(n) - c;
        let fb = b.dot(n) - c;
        if fa >= 0.0 {
            out.push(a);
        }
        if (fa >= 0.0) != (fb >= 0.0) {
            let t = fa / (fa - fb);
            out.push(a + (b - a) * t);
        }
    }
    out
}

/// Parameters `(t0, t1)` where the line `p + t·d` enters and leaves a convex polygon.
pub fn line_chord(v: &[Point], p: Point, d: Point) -> Option<(f64, f64)> {
    let mut t0 = f64::NEG_INFINITY;
    let mut t1 = f64::INFINITY;
    let m = v.len();
    for i in 0..m {
        let a = v[i];
        let b = v[(i + 1) % m];
        let e = b - a;
        // inside: e × (x − a) >= 0
        let num = e.cross(p - a);
        let den = e.cross(d);
        if abs(den) < 1e-300 {
            if num < 0.0 {
                return None;
            }
            continue;
        }
        let t = -num / den;
        if den > 0.0 {
            t0 = max(t0, t);
        } else {
            t1 = min(t1, t);
        }
    }
    if t1 >= t0 {
        Some((t0, t1))
    } else {
        None
    }
}

/// Area of `polygon ∩ disc(c, r)`.
pub fn circle_polygon_area(v: &[Point], c: Point, r: f64) -> f64 {
    let m = v.len();
    let mut acc = 0.0;
    for i in 0..m {
        acc += tri_disc_area(v[i] - c, v[(i + 1) % m] - c, r);
    }
    acc
}

// signed area of triangle (0, a, b) ∩ disc(0, r)
fn tri_disc_area(a: Point, b: Point, r: f64) -> f64 {
    let d = b - a;
    let qa = d.dot(d);
    if qa == 0.0 {
        return 0.0;
    }
    let qb = 2.0 * a.dot(d);
    let qc = a.dot(a) - r * r;
    let disc = qb * qb - 4.0 * qa * qc;
    let mut ts = vec![0.0];
    if disc > 0.0 {
        let sq = sqrt(disc);
        for t in [(-qb - sq) / (2.0 * qa), (-qb + sq) / (2.0 * qa)] {
            if t > 0.0 && t < 1.0 {
                ts.push(t);
            }
        }
    }
    ts.push(1.0);
    let mut acc = 0.0;
    for w in ts.windows(2) {
        let p = a + d * w[0];
        let q = a + d * w[1];
        let mid = (p + q) * 0.5;
        if mid.norm() <= r {
            acc += 0.5 * p.cross(q);
        } else {
            acc += 0.5 * r * r * atan2(p.cross(q), p.dot(q));
        }
    }
    acc
}

/// Angular intervals `(a0, a1)` (counterclockwise, `a1 > a0`) of the circle
/// `(c, r)` lying inside the convex polygon.
pub fn circle_polygon_arcs(v: &[Point], c: Point, r: f64) -> Vec<(f64, f64)> {
    let m = v.len();
    let mut angles: Vec<f64> = Vec::new();
    for i in 0..m {
        let a = v[i] - c;
        let d = v[(i + 1) % m] - v[i];
        let qa = d.dot(d);
        let qb = 2.0 * a.dot(d);
        let qc = a.dot(a) - r * r;
        let disc = qb * qb - 4.0 * qa * qc;
        if disc <= 0.0 {
            continue;
        }
        let sq = sqrt(disc);
        for t in [(-qb - sq) / (2.0 * qa), (-qb + sq) / (2.0 * qa)] {
            if (-1e-14..=1.0 + 1e-14).contains(&t) {
                angles.push(wrap_2pi((a + d * t).angle()));
            }
        }
    }
    angles.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
    angles.dedup_by(|a, b| abs(*a - *b) < 1e-13);
    let poly_contains = |p: Point| (0..m).all(|i| (v[(i + 1) % m] - v[i]).cross(p - v[i]) >= 0.0);
    if angles.len() < 2 {
        return if poly_contains(c + Point::new(r, 0.0)) { vec![(0.0, 2.0 * PI)] } else { Vec::new() };
    }
    let mut out = Vec::new();
    let k = angles.len();
    for i in 0..k {
        let a0 = angles[i];
        let mut a1 = angles[(i + 1) % k];
        if a1 <= a0 {
            a1 += 2.0 * PI;
        }
        let mid = 0.5 * (a0 + a1);
        if poly_contains(c + Point::unit(mid) * r) {
            out.push((a0, a1));
        }
    }
    // merge pieces split only by a tangency
    let mut merged: Vec<(f64, f64)> = Vec::new();
    for (a0, a1) in out {
        if let Some(last) = merged.last_mut() {
            if abs(last.1 - a0) < 1e-12 {
                last.1 = a1;
                continue;
            }
        }
        merged.push((a0, a1));
    }
    if merged.len() > 1 {
        let first = merged[0];
        let last = *merged.last().unwrap();
        if abs(last.1 - (first.0 + 2.0 * PI)) < 1e-12 {
            merged[0] = (last.0 - 2.0 * PI, first.1);
            merged.pop();
        }
    }
    merged
}

struct Chain {
    start: usize,
    end: usize,
    closed: bool,
}

fn chains(domain: &Domain, b: &Boundary) -> Result<Vec<Chain>, GeometryError> {
    let tol = domain.tol();
    let arcs = &b.arcs;
    let mut out = Vec::new();
    let mut i = 0;
    while i < arcs.len() {
        let s = i;
        while i + 1 < arcs.len() && arcs[i].end().dist(arcs[i + 1].start) <= tol {
            i += 1;
        }
        let closed = arcs[i].end().dist(arcs[s].start) <= tol && domain.boundary_distance(arcs[s].start) > tol;
        if !closed && (domain.boundary_distance(arcs[s].start) > tol || domain.boundary_distance(arcs[i].end()) > tol) {
            return Err(GeometryError::InvalidBoundary("open chain must start and end on ∂V"));
        }
        out.push(Chain { start: s, end: i, closed });
        i += 1;
    }
    Ok(out)
}

/// Checks that the pieces chain properly and stay in `V`.
pub fn validate_boundary(domain: &Domain, b: &Boundary) -> Result<(), GeometryError> {
    let tol = domain.tol() * 10.0;
    for a in &b.arcs {
        if !(a.length.is_finite() && a.length >= 0.0 && a.curvature.is_finite()) {
            return Err(GeometryError::InvalidBoundary("non-finite piece"));
        }
        if abs(a.span()) > 2.0 * PI + 1e-9 {
            return Err(GeometryError::InvalidBoundary("angular span exceeds 2π"));
        }
        for p in a.sample(8) {
            if !domain.contains(p, tol) {
                return Err(GeometryError::InvalidBoundary("piece leaves V"));
            }
        }
    }
    chains(domain, b).map(|_| ())
}

/// Area of the contaminated set bounded by the relative boundary and `∂V`.
pub fn region_area(domain: &Domain, b: &Boundary) -> Result<f64, GeometryError> {
    if b.arcs.is_empty() {
        return Ok(if b.void { 0.0 } else { domain.area() });
    }
    validate_boundary(domain, b)?;
    let ch = chains(domain, b)?;
    let arcs = &b.arcs;
    let mut total = 0.0;
    let mut loop_sum = 0.0;
    let mut starts = Vec::new();
    let mut ends = Vec::new();
    for c in &ch {
        let g: f64 = arcs[c.start..=c.end].iter().map(|a| a.green()).sum();
        if c.closed {
            loop_sum += g;
        } else {
            total += g;
            starts.push(domain.boundary_param(arcs[c.start].start));
            ends.push(domain.boundary_param(arcs[c.end].end()));
        }
    }
    if starts.is_empty() {
        let mut area = loop_sum;
        if loop_sum <= 0.0 {
            area += domain.area();
        }
        return Ok(area);
    }
    let per = domain.param_period();
    for &e in &ends {
        let mut best = f64::INFINITY;
        let mut target = e;
        for &s in &starts {
            let mut d = s - e;
            d -= per * floor(d / per);
            if d < best {
                best = d;
                target = s;
            }
        }
        if best > 0.0 && best < per {
            total += domain.boundary_green(e, target);
        }
    }
    Ok(total + loop_sum)
}

/// Points of `∂V` walked counterclockwise from parameter `s0` to `s1`
/// (endpoints included; polygon vertices in between, `n` samples on curves).
pub fn boundary_walk(domain: &Domain, s0: f64, s1: f64, n: usize) -> Vec<Point> {
    let per = domain.param_period();
    let s0w = s0 - per * floor(s0 / per);
    let mut s1w = s1 - per * floor(s1 / per);
    if s1w < s0w {
        s1w += per;
    }
    let mut out = vec![domain.boundary_point(s0w)];
    match domain {
        Domain::Disc { .. } | Domain::SymmetricCap { .. } => {
            let m = max(2.0, floor(n as f64 * (s1w - s0w) / per) + 2.0) as usize;
            for k in 1..m {
                out.push(domain.boundary_point(s0w + (s1w - s0w) * k as f64 / m as f64));
            }
        }
        _ => {
            let v = domain.polygon().unwrap_or_default();
            let nv = v.len();
            let mut cum = 0.0;
            let mut params = Vec::new();
            for i in 0..nv {
                params.push((cum, v[i]));
                cum += v[i].dist(v[(i + 1) % nv]);
            }
            for turn in 0..2 {
                for (c, p) in &params {
                    let sv = c + turn as f64 * per;
                    if sv > s0w && sv < s1w {
                        out.push(*p);
                    }
                }
            }
        }
    }
    out.push(domain.boundary_point(s1w));
    out
}

fn walk_pieces(domain: &Domain, s0: f64, s1: f64) -> Vec<CircArc> {
    match domain {
        Domain::Disc { radius } => {
            let per = domain.param_period();
            let s0w = s0 - per * floor(s0 / per);
            let mut s1w = s1 - per * floor(s1 / per);
            if s1w < s0w {
                s1w += per;
            }
            if s1w - s0w <= 0.0 {
                return Vec::new();
            }
            vec![CircArc::from_center(Point::new(0.0, 0.0), *radius, s0w / radius, s1w / radius)]
        }
        _ => {
            let pts = boundary_walk(domain, s0, s1, 256);
            pts.windows(2).filter(|w| w[0] != w[1]).map(|w| CircArc::segment(w[0], w[1])).collect()
        }
    }
}

/// Closed curves (relative pieces plus walks along `∂V`) bounding the
/// contaminated set; their total winding number is nonzero exactly inside it.
pub fn region_pieces(domain: &Domain, b: &Boundary) -> Result<Vec<Vec<CircArc>>, GeometryError> {
    let per = domain.param_period();
    let full_loop = || {
        walk_pieces(domain, 0.0, per * (1.0 - 1e-12)).into_iter().chain(
            // close the last gap exactly
            core::iter::once(CircArc::segment(domain.boundary_point(per * (1.0 - 1e-12)), domain.boundary_point(0.0))),
        )
    };
    if b.arcs.is_empty() {
        return Ok(if b.void { Vec::new() } else { vec![full_loop().collect()] });
    }
    let ch = chains(domain, b)?;
    let arcs = &b.arcs;
    let mut loops = Vec::new();
    let mut loop_sum = 0.0;
    let open: Vec<&Chain> = ch.iter().filter(|c| !c.closed).collect();
    for c in ch.iter().filter(|c| c.closed) {
        loop_sum += arcs[c.start..=c.end].iter().map(|a| a.green()).sum::<f64>();
        loops.push(arcs[c.start..=c.end].to_vec());
    }
    if open.is_empty() {
        if loop_sum <= 0.0 {
            loops.push(full_loop().collect());
        }
        return Ok(loops);
    }
    let starts: Vec<f64> = open.iter().map(|c| domain.boundary_param(arcs[c.start].start)).collect();
    let mut used = vec![false; open.len()];
    for first in 0..open.len() {
        if used[first] {
            continue;
        }
        let mut pieces = Vec::new();
        let mut cur = first;
        for _ in 0..=open.len() {
            used[cur] = true;
            pieces.extend_from_slice(&arcs[open[cur].start..=open[cur].end]);
            let e = domain.boundary_param(arcs[open[cur].end].end());
            let mut best = (f64::INFINITY, cur);
            for (k, &s) in starts.iter().enumerate() {
                let mut d = s - e;
                d -= per * floor(d / per);
                if d < best.0 {
                    best = (d, k);
                }
            }
            pieces.extend(walk_pieces(domain, e, e + best.0));
            cur = best.1;
            if cur == first {
                break;
            }
        }
        loops.push(pieces);
    }
    Ok(loops)
}

/// Sampled version of [`region_pieces`].
pub fn region_outline(domain: &Domain, b: &Boundary, per_arc: usize) -> Result<Vec<Vec<Point>>, GeometryError> {
    Ok(region_pieces(domain, b)?
        .iter()
        .map(|l| {
            let mut pts = Vec::new();
            for a in l {
                let n = if a.is_segment() { 1 } else { per_arc };
                let s = a.sample(n);
                pts.extend_from_slice(&s[..s.len() - 1]);
            }
            pts
        })
        .collect())
}

/// Winding number of closed piece loops around `p`, by signed crossings of
/// the ray from `p` toward `+x` (half-open in each piece's parameter).
pub fn winding_number(loops: &[Vec<CircArc>], p: Point) -> i32 {
    let mut w = 0;
    for l in loops {
        for a in l {
            if a.length <= 0.0 {
                continue;
            }
            if a.is_segment() {
                let q0 = a.start;
                let q1 = a.end();
                if (q0.y <= p.y) != (q1.y <= p.y) {
                    let t = (p.y - q0.y) / (q1.y - q0.y);
                    let x = q0.x + t * (q1.x - q0.x);
                    if x > p.x {
                        w += if q1.y > q0.y { 1 } else { -1 };
                    }
                }
                continue;
            }
            let c = a.center().unwrap_or(a.start);
            let rho = a.radius();
            let dy = p.y - c.y;
            if abs(dy) >= rho {
                continue;
            }
            let dx = sqrt(rho * rho - dy * dy);
            let a0 = (a.start - c).angle();
            let sgn = if a.curvature > 0.0 { 1.0 } else { -1.0 };
            for x in [c.x + dx, c.x - dx] {
                if x <= p.x {
                    continue;
                }
                let phi = atan2(dy, x - c.x);
                let rel = wrap_2pi(sgn * (phi - a0));
                if rel * rho < a.length {
                    // upward when the tangent has positive y
                    let ty = sgn * cos(phi);
                    if ty > 0.0 {
                        w += 1;
                    } else if ty < 0.0 {
                        w -= 1;
                    }
                }
            }
        }
    }
    w
}

/// Area of the cleared part `V \ Ω`.
pub fn complement_area(domain: &Domain, b: &Boundary) -> Result<f64, GeometryError> {
    Ok(domain.area() - region_area(domain, b)?)
}

/// A graph `y = φ(x)` with derivatives up to fourth order.
pub trait Graph {
    fn value(&self, x: f64) -> f64;
    fn d1(&self, x: f64) -> f64;
    fn d2(&self, x: f64) -> f64;
    fn d4(&self, x: f64) -> f64 {
        let h = 1e-3;
        (self.d2(x + h) - 2.0 * self.d2(x) + self.d2(x - h)) / (h * h)
    }
}

/// Polynomial `Σ coeffs[k] x^k`.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly {
    pub coeffs: Vec<f64>,
}

impl Poly {
    pub fn new(coeffs: Vec<f64>) -> Self {
        Poly { coeffs }
    }
    fn deriv(&self, x: f64, k: usize) -> f64 {
        let mut acc = 0.0;
        for (i, c) in self.coeffs.iter().enumerate().skip(k) {
            let mut f = *c;
            for j in 0..k {
                f *= (i - j) as f64;
            }
            acc += f * powi(x, (i - k) as i32);
        }
        acc
    }
}

impl Graph for Poly {
    fn value(&self, x: f64) -> f64 {
        self.deriv(x, 0)
    }
    fn d1(&self, x: f64) -> f64 {
        self.deriv(x, 1)
    }
    fn d2(&self, x: f64) -> f64 {
        self.deriv(x, 2)
    }
    fn d4(&self, x: f64) -> f64 {
        self.deriv(x, 4)
    }
}

/// Result of the perpendicular-arc constructions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PerpArc {
    pub sigma: f64,
    /// Perpendicular arc (center at the intersection of the two tangent lines),
    /// enclosing the region between the contact points and the corner.
    pub arc: CircArc,
    /// Circle tangent to both graphs (center at the intersection of the normals).
    pub tangent_center: Point,
    pub tangent_radius: f64,
}

/// Compatibility function for a circle tangent to `φ₁` at `x` and `φ₂` at `σ`.
pub fn corner_f(phi1: &dyn Graph, phi2: &dyn Graph, x: f64, sigma: f64) -> f64 {
    let p1 = phi1.d1(x);
    let p2 = phi2.d1(sigma);
    (p1 + p2) * (x - sigma)
        + (phi1.value(x) - phi2.value(sigma)) * (p1 * p2 - 1.0 - sqrt(1.0 + p2 * p2) * sqrt(1.0 + p1 * p1))
}

fn corner_f_dsigma(phi1: &dyn Graph, phi2: &dyn Graph, x: f64, sigma: f64) -> f64 {
    let p1 = phi1.d1(x);
    let p2 = phi2.d1(sigma);
    let q2 = phi2.d2(sigma);
    let s1 = sqrt(1.0 + p1 * p1);
    let s2 = sqrt(1.0 + p2 * p2);
    let b = p1 * p2 - 1.0 - s1 * s2;
    let db = p1 * q2 - s1 * p2 * q2 / s2;
    q2 * (x - sigma) - (p1 + p2) - p2 * b + (phi1.value(x) - phi2.value(sigma)) * db
}

fn build_perp(p1: Point, t1: Point, p2: Point, t2: Point, sigma: f64) -> Result<PerpArc, GeometryError> {
    let z = line_intersection(p1, t1, p2, t2).ok_or(GeometryError::OutOfRange)?;
    let tc = line_intersection(p1, t1.perp(), p2, t2.perp()).ok_or(GeometryError::OutOfRange)?;
    let r = 0.5 * (z.dist(p1) + z.dist(p2));
    let (a, b) = if (p1 - z).cross(p2 - z) > 0.0 { (p1, p2) } else { (p2, p1) };
    let a0 = (a - z).angle();
    let mut a1 = (b - z).angle();
    while a1 <= a0 {
        a1 += 2.0 * PI;
    }
    let mut arc = CircArc::from_center(z, r, a0, a1);
    arc.start = a;
    Ok(PerpArc { sigma, arc, tangent_center: tc, tangent_radius: 0.5 * (tc.dist(p1) + tc.dist(p2)) })
}

/// Circle tangent to two graphs meeting at a corner, recentred into the arc
/// crossing both perpendicularly.
pub fn perp_arc_corner(phi1: &dyn Graph, phi2: &dyn Graph, x: f64) -> Result<PerpArc, GeometryError> {
    if !(x > 0.0) {
        return Err(GeometryError::OutOfRange);
    }
    let f = |s: f64| corner_f(phi1, phi2, x, s);
    // sign scan over [-2x, -x/2]
    let n = 64;
    let mut bracket = None;
    let mut prev = (-2.0 * x, f(-2.0 * x));
    for i in 1..=n {
        let s = -2.0 * x + 1.5 * x * i as f64 / n as f64;
        let v = f(s);
        if v == 0.0 || (v > 0.0) != (prev.1 > 0.0) {
            bracket = Some((prev.0, s));
            break;
        }
        prev = (s, v);
    }
    let (lo, hi) = bracket.ok_or(GeometryError::OutOfRange)?;
    let (sigma, res, _) = numeric::safe_newton(
        |s| (corner_f(phi1, phi2, x, s), corner_f_dsigma(phi1, phi2, x, s)),
        lo,
        hi,
        1e-16 * x,
        MAX_ITER,
    )
    .ok_or(GeometryError::OutOfRange)?;
    if abs(res) > 1e-10 * x {
        return Err(GeometryError::NoConvergence { residual: res });
    }
    let p1 = Point::new(x, phi1.value(x));
    let p2 = Point::new(sigma, phi2.value(sigma));
    let t1 = Point::new(1.0, phi1.d1(x));
    let t2 = Point::new(1.0, phi2.d1(sigma));
    build_perp(p1, t1, p2, t2, sigma)
}

/// Doubly tangent circle near a strict curvature maximum of a single graph,
/// recentred into the perpendicular arc whose radius vanishes as `x → 0`.
pub fn perp_arc_smooth(phi: &dyn Graph, x: f64) -> Result<PerpArc, GeometryError> {
    if !(x > 0.0) {
        return Err(GeometryError::OutOfRange);
    }
    let c2 = phi.d2(0.0);
    let w2 = phi.d4(0.0) - 3.0 * c2 * c2 * c2;
    if w2 >= -1e-12 {
        return Err(GeometryError::NotAMaximum { omega2: w2 });
    }
    let g = |s: f64| {
        let d = x - s;
        let r = corner_f(phi, phi, x, s) - w2 / 12.0 * d * d * d * (x + s);
        -x + 12.0 * r / (w2 * d * d * d)
    };
    let mut sigma = -x;
    let mut converged = false;
    for _ in 0..MAX_ITER {
        let next = g(sigma);
        if !next.is_finite() {
            break;
        }
        let step = abs(next - sigma);
        sigma = next;
        if step <= 1e-15 * x {
            converged = true;
            break;
        }
    }
    if !converged {
        // fall back to a bracketed solve of σ − G(σ) = 0
        let h = |s: f64| s - g(s);
        sigma = numeric::bisect(h, -2.0 * x, -0.5 * x, 1e-16 * x, 200)
            .ok_or(GeometryError::NoConvergence { residual: abs(sigma - g(sigma)) })?;
    }
    let p1 = Point::new(x, phi.value(x));
    let p2 = Point::new(sigma, phi.value(sigma));
    let t1 = Point::new(1.0, phi.d1(x));
    let t2 = Point::new(1.0, phi.d1(sigma));
    build_perp(p1, t1, p2, t2, sigma)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arc_endpoints_match_center_form() {
        let a = CircArc::from_center(Point::new(1.0, 2.0), 0.5, 0.3, 1.9);
        let e = Point::new(1.0, 2.0) + Point::unit(1.9) * 0.5;
        assert!(a.end().dist(e) < 1e-14);
        let b = CircArc::from_center(Point::new(1.0, 2.0), 0.5, 1.9, 0.3);
        assert!(b.end().dist(Point::new(1.0, 2.0) + Point::unit(0.3) * 0.5) < 1e-14);
        assert_eq!(b.orientation(), Orientation::Outward);
    }

    #[test]
    fn green_of_full_circle_is_area() {
        let a = CircArc::from_center(Point::new(0.3, -0.2), 2.0, 0.0, 2.0 * PI);
        assert!(abs(a.green() - 4.0 * PI) < 1e-12);
    }

    #[test]
    fn reversed_twice_is_identity() {
        let a = CircArc::from_center(Point::new(0.0, 0.0), 1.0, 0.1, 1.0);
        let b = a.reversed().reversed();
        assert!(a.start.dist(b.start) < 1e-14 && abs(a.curvature - b.curvature) < 1e-14);
    }
}
