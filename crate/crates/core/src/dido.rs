//! Constrained isoperimetric cuts `g(a)` and the feasibility invariants
//! `κ(V)` (largest unavoidable cut) and an upper bound for the 1-width `K(V)`.
//!
//! Cuts are searched over one-parameter families of arcs meeting `∂V`
//! perpendicularly: orthogonal circles for discs; for polygons, circles
//! centred where two edge lines meet (vertex sectors are the adjacent case)
//! and straight chords across parallel edges. Each family also yields the
//! complementary set with the same cut length.

use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use crate::geometry::*;
use crate::math::*;
use crate::numeric;

#[derive(Clone, Debug, PartialEq)]
pub enum DidoError {
    Unsupported,
    NoBracket { area: f64 },
    InvalidArea { area: f64 },
    Geometry(GeometryError),
}

impl fmt::Display for DidoError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DidoError::Unsupported => write!(f, "no cut family implemented for this domain"),
            DidoError::NoBracket { area } => write!(f, "area {area} is outside every cut family"),
            DidoError::InvalidArea { area } => write!(f, "area {area} must lie strictly between 0 and area(V)"),
            DidoError::Geometry(e) => write!(f, "{e}"),
        }
    }
}

impl From<GeometryError> for DidoError {
    fn from(e: GeometryError) -> Self {
        DidoError::Geometry(e)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CutFamily {
    /// Arc orthogonal to the disc boundary (a diameter at half area).
    DiscOrthogonal,
    /// Circle centred at the intersection of two edge lines; `i == j - 1`
    /// (cyclically) is a vertex sector.
    EdgePair { i: usize, j: usize },
    /// Chord perpendicular to two parallel edges.
    Strip { i: usize, j: usize },
}

impl fmt::Display for CutFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CutFamily::DiscOrthogonal => write!(f, "disc-orthogonal"),
            CutFamily::EdgePair { i, j } => write!(f, "edge-pair({i},{j})"),
            CutFamily::Strip { i, j } => write!(f, "strip({i},{j})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DidoCut {
    pub area: f64,
    pub cut: Boundary,
    pub length: f64,
    pub family: CutFamily,
    /// The cut encloses the complement of the family member.
    pub complement: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Eradicable,
    NotEradicable,
    Unknown,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Verdict::Eradicable => "Eradicable",
            Verdict::NotEradicable => "NotEradicable",
            Verdict::Unknown => "Unknown",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FeasibilityReport {
    pub kappa: f64,
    pub k_upper: f64,
    pub verdict: Verdict,
    /// Distance to the threshold that decided the verdict (to the nearer one
    /// when undecided).
    pub margin: f64,
}

const AREA_TOL: f64 = 1e-12;
const KAPPA_SAMPLES: usize = 512;

#[derive(Clone, Debug)]
enum Family {
    Circle { z: Point, i: usize, j: usize, r_lo: f64, r_hi: f64, a_lo: f64, a_hi: f64 },
    Strip { e: Point, i: usize, j: usize, p_lo: f64, p_hi: f64, a_lo: f64, a_hi: f64, width: f64 },
}

/// Precomputed cut families of a domain.
#[derive(Clone, Debug)]
pub struct DidoSolver {
    domain: Domain,
    area: f64,
    families: Vec<Family>,
}

impl DidoSolver {
    pub fn new(domain: &Domain) -> Result<Self, DidoError> {
        domain.validate()?;
        let area = domain.area();
        let families = match domain {
            Domain::Disc { .. } => Vec::new(),
            Domain::SymmetricCap { .. } => return Err(DidoError::Unsupported),
            _ => polygon_families(&domain.polygon().unwrap_or_default()),
        };
        Ok(DidoSolver { domain: domain.clone(), area, families })
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn total_area(&self) -> f64 {
        self.area
    }

    pub fn cut(&self, a: f64) -> Result<DidoCut, DidoError> {
        if !(a > 0.0 && a < self.area) {
            return Err(DidoError::InvalidArea { area: a });
        }
        if let Domain::Disc { radius } = self.domain {
            return Ok(disc_cut(radius, a));
        }
        let v = self.domain.polygon().unwrap_or_default();
        let mut best: Option<DidoCut> = None;
        for fam in &self.families {
            for complement in [false, true] {
                let target = if complement { self.area - a } else { a };
                if let Some(c) = family_cut(&v, fam, target, self.area) {
                    let c = if complement { complement_cut(c, a) } else { c };
                    if best.as_ref().is_none_or(|b| c.length < b.length) {
                        best = Some(c);
                    }
                }
            }
        }
        best.ok_or(DidoError::NoBracket { area: a })
    }

    pub fn g(&self, a: f64) -> Result<f64, DidoError> {
        if a <= 0.0 || a >= self.area {
            return Ok(0.0);
        }
        Ok(self.cut(a)?.length)
    }

    /// `sup_a g(a)` over a grid of `n` area fractions, refined by golden section.
    pub fn kappa(&self, n: usize) -> Result<f64, DidoError> {
        let n = n.max(4);
        let a_tot = self.area;
        let gl = |lam: f64| self.g(lam * a_tot).unwrap_or(0.0);
        let mut best = (0.5, gl(0.5));
        for k in 1..n {
            let lam = k as f64 / n as f64;
            let v = gl(lam);
            if v > best.1 {
                best = (lam, v);
            }
        }
        let h = 1.0 / n as f64;
        let (_, v) = numeric::golden_max(gl, max(h * 1e-3, best.0 - h), min(1.0 - h * 1e-3, best.0 + h), 1e-12);
        Ok(max(v, best.1))
    }

    pub fn k_upper(&self) -> Result<f64, DidoError> {
        k_upper(&self.domain)
    }
}

fn complement_cut(c: DidoCut, a: f64) -> DidoCut {
    let arcs = c.cut.arcs.iter().rev().map(|x| x.reversed()).collect();
    DidoCut { area: a, cut: Boundary::new(arcs), length: c.length, family: c.family, complement: true }
}

// lens area bounded by the orthogonal arc with half-angle parameter u
fn disc_lens_area(r: f64, u: f64) -> f64 {
    let fm1 = if u < 0.1 {
        let u2 = u * u;
        -u2 * (1.0 / 3.0 + u2 * (1.0 / 45.0 + u2 * (2.0 / 945.0 + u2 / 4725.0)))
    } else {
        u / tan(u) - 1.0
    };
    if u == 0.0 {
        return r * r * PI / 2.0;
    }
    let f = 1.0 + fm1;
    r * r * (PI / 2.0 - u + f * fm1 / u)
}

fn disc_cut(r: f64, a: f64) -> DidoCut {
    let total = PI * r * r;
    let (target, complement) = if a <= total / 2.0 { (a, false) } else { (total - a, true) };
    let u = if target >= total / 2.0 {
        0.0
    } else {
        numeric::bisect(|u| disc_lens_area(r, u) - target, 0.0, PI / 2.0, 1e-16, 200).unwrap_or(0.0)
    };
    let g = if u == 0.0 { 2.0 * r } else { 2.0 * r * u / tan(u) };
    let start = Point::new(r * sin(u), r * cos(u));
    let arc = CircArc {
        start,
        heading: -PI / 2.0 - u,
        curvature: tan(u) / r,
        length: g,
        kind: ArcKind::Controlled,
        beta: 0.0,
        beta_start: 0.0,
        beta_end: 0.0,
    };
    // the complement uses the mirrored lens so that the family is continuous
    // through the diameter
    let arc = if complement {
        let c = arc.reversed();
        CircArc { start: Point::new(-c.start.x, -c.start.y), heading: c.heading + PI, ..c }
    } else {
        arc
    };
    DidoCut { area: a, cut: Boundary::new(alloc::vec![arc]), length: g, family: CutFamily::DiscOrthogonal, complement }
}

fn on_edge(v: &[Point], k: usize, p: Point, tol: f64) -> bool {
    segment_distance(p, v[k], v[(k + 1) % v.len()]) <= tol
}

fn circle_valid(v: &[Point], z: Point, r: f64, i: usize, j: usize, tol: f64) -> Option<(f64, f64)> {
    let arcs = circle_polygon_arcs(v, z, r);
    if arcs.len() != 1 {
        return None;
    }
    let (a0, a1) = arcs[0];
    if a1 - a0 >= 2.0 * PI - 1e-12 {
        return None;
    }
    let p0 = z + Point::unit(a0) * r;
    let p1 = z + Point::unit(a1) * r;
    let ok = (on_edge(v, i, p0, tol) && on_edge(v, j, p1, tol)) || (on_edge(v, j, p0, tol) && on_edge(v, i, p1, tol));
    if ok {
        Some((a0, a1))
    } else {
        None
    }
}

fn longest_run(valid: &[bool]) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    let mut k = 0;
    while k < valid.len() {
        if valid[k] {
            let s = k;
            while k + 1 < valid.len() && valid[k + 1] {
                k += 1;
            }
            if best.is_none_or(|(a, b)| k - s > b - a) {
                best = Some((s, k));
            }
        }
        k += 1;
    }
    best
}

fn refine_edge(mut good: f64, mut bad: f64, pred: impl Fn(f64) -> bool) -> f64 {
    for _ in 0..80 {
        let m = 0.5 * (good + bad);
        if pred(m) {
            good = m;
        } else {
            bad = m;
        }
    }
    good
}

fn polygon_families(v: &[Point]) -> Vec<Family> {
    let n = v.len();
    let diam = {
        let mut d: f64 = 0.0;
        for a in v {
            for b in v {
                d = max(d, a.dist(*b));
            }
        }
        d
    };
    let tol = 1e-9 * max(1.0, diam);
    let mut out = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let ei = v[(i + 1) % n] - v[i];
            let ej = v[(j + 1) % n] - v[j];
            if abs(ei.cross(ej)) > 1e-12 * ei.norm() * ej.norm() {
                let Some(z) = line_intersection(v[i], ei, v[j], ej) else { continue };
                let rmax = v.iter().map(|p| p.dist(z)).fold(0.0, max);
                let samples = 400;
                let rs: Vec<f64> = (0..=samples).map(|k| rmax * (k as f64 + 0.5) / (samples as f64 + 1.0)).collect();
                let valid: Vec<bool> = rs.iter().map(|&r| circle_valid(v, z, r, i, j, tol).is_some()).collect();
                let Some((s, e)) = longest_run(&valid) else { continue };
                let pred = |r: f64| circle_valid(v, z, r, i, j, tol).is_some();
                let r_lo = if s == 0 { refine_edge(rs[0], 0.0, pred) } else { refine_edge(rs[s], rs[s - 1], pred) };
                let r_hi =
                    if e == samples { refine_edge(rs[e], rmax, pred) } else { refine_edge(rs[e], rs[e + 1], pred) };
                out.push(Family::Circle {
                    z,
                    i,
                    j,
                    r_lo,
                    r_hi,
                    a_lo: circle_polygon_area(v, z, r_lo),
                    a_hi: circle_polygon_area(v, z, r_hi),
                });
            } else if ei.dot(ej) < 0.0 {
                // parallel, opposite edges: chords along the common normal
                let e = ei.normalized();
                let width = abs((v[j] - v[i]).cross(e));
                let pi0 = v[i].dot(e);
                let pi1 = v[(i + 1) % n].dot(e);
                let pj0 = v[j].dot(e);
                let pj1 = v[(j + 1) % n].dot(e);
                let lo = max(min(pi0, pi1), min(pj0, pj1));
                let hi = min(max(pi0, pi1), max(pj0, pj1));
                if hi - lo <= tol {
                    continue;
                }
                let area_at = |p: f64| polygon_area(&clip_halfplane(v, -e, -p));
                out.push(Family::Strip { e, i, j, p_lo: lo, p_hi: hi, a_lo: area_at(lo), a_hi: area_at(hi), width });
            }
        }
    }
    out
}

fn family_cut(v: &[Point], fam: &Family, a: f64, total: f64) -> Option<DidoCut> {
    match *fam {
        Family::Circle { z, i, j, r_lo, r_hi, a_lo, a_hi } => {
            if a < a_lo - AREA_TOL * total || a > a_hi + AREA_TOL * total {
                return None;
            }
            let r = numeric::bisect(|r| circle_polygon_area(v, z, r) - a, r_lo, r_hi, 1e-15 * max(1.0, r_hi), 200)?;
            let diam_tol = 1e-7 * max(1.0, r_hi);
            let (a0, a1) = circle_valid(v, z, r, i, j, diam_tol)?;
            let arc = CircArc::from_center(z, r, a0, a1);
            Some(DidoCut {
                area: a,
                length: arc.length,
                cut: Boundary::new(alloc::vec![arc]),
                family: CutFamily::EdgePair { i, j },
                complement: false,
            })
        }
        Family::Strip { e, i, j, p_lo, p_hi, a_lo, a_hi, width } => {
            if a < a_lo - AREA_TOL * total || a > a_hi + AREA_TOL * total {
                return None;
            }
            let p = numeric::bisect(
                |p| polygon_area(&clip_halfplane(v, -e, -p)) - a,
                p_lo,
                p_hi,
                1e-15 * max(1.0, abs(p_hi)),
                200,
            )?;
            let d = e.perp();
            let base = e * p;
            let (t0, t1) = line_chord(v, base, d)?;
            let seg = CircArc::segment(base + d * t0, base + d * t1);
            Some(DidoCut {
                area: a,
                length: width,
                cut: Boundary::new(alloc::vec![seg]),
                family: CutFamily::Strip { i, j },
                complement: false,
            })
        }
    }
}

pub fn dido_cut(domain: &Domain, a: f64) -> Result<DidoCut, DidoError> {
    DidoSolver::new(domain)?.cut(a)
}

pub fn g_of_a(domain: &Domain, a: f64) -> Result<f64, DidoError> {
    DidoSolver::new(domain)?.g(a)
}

pub fn kappa(domain: &Domain, n_samples: usize) -> Result<f64, DidoError> {
    DidoSolver::new(domain)?.kappa(n_samples)
}

// longest chord of a convex polygon in direction d (attained through a vertex)
fn max_chord(v: &[Point], d: Point) -> f64 {
    let mut best: f64 = 0.0;
    for p in v {
        if let Some((t0, t1)) = line_chord(v, *p, d) {
            best = max(best, t1 - t0);
        }
    }
    best
}

// longest arc of the circles centred at `c` inside the polygon
fn max_radial_level(v: &[Point], c: Point) -> f64 {
    let rmax = v.iter().map(|p| p.dist(c)).fold(0.0, max);
    let len = |r: f64| -> f64 { circle_polygon_arcs(v, c, r).iter().map(|(a0, a1)| r * (a1 - a0)).sum() };
    let n = 400;
    let mut best = (0.0, 0.0);
    for k in 1..n {
        let r = rmax * k as f64 / n as f64;
        let l = len(r);
        if l > best.1 {
            best = (r, l);
        }
    }
    let h = rmax / n as f64;
    let (_, l) = numeric::golden_max(len, max(0.0, best.0 - h), min(rmax, best.0 + h), 1e-14 * max(1.0, rmax));
    max(l, best.1)
}

/// Upper bound for the 1-width: the best of directional and vertex-radial slicings.
pub fn k_upper(domain: &Domain) -> Result<f64, DidoError> {
    domain.validate()?;
    match domain {
        Domain::Disc { radius } => Ok(2.0 * radius),
        Domain::SymmetricCap { .. } => {
            let xr = domain.cap_root().unwrap_or(0.0);
            Ok(min(domain.cap_g(0.0), 2.0 * xr))
        }
        _ => {
            let v = domain.polygon().unwrap_or_default();
            let n = v.len();
            let f = |th: f64| max_chord(&v, Point::unit(th));
            let samples = 3600;
            let mut best = (0.0, f64::INFINITY);
            for k in 0..samples {
                let th = PI * k as f64 / samples as f64;
                let l = f(th);
                if l < best.1 {
                    best = (th, l);
                }
            }
            for i in 0..n {
                let th = (v[(i + 1) % n] - v[i]).angle();
                for cand in [th, th + PI / 2.0] {
                    let l = f(cand);
                    if l < best.1 {
                        best = (cand, l);
                    }
                }
            }
            let h = PI / samples as f64;
            let (_, negl) = numeric::golden_max(|t| -f(t), best.0 - h, best.0 + h, 1e-14);
            let mut k = min(best.1, -negl);
            for p in &v {
                k = min(k, max_radial_level(&v, *p));
            }
            Ok(k)
        }
    }
}

pub fn eradication_verdict(domain: &Domain, m: f64) -> Result<FeasibilityReport, DidoError> {
    let solver = DidoSolver::new(domain)?;
    let kappa = solver.kappa(KAPPA_SAMPLES)?;
    let k_up = solver.k_upper()?;
    Ok(verdict_from(kappa, k_up, m))
}

/// Classifies an effort rate against precomputed invariants.
pub fn verdict_from(kappa: f64, k_upper: f64, m: f64) -> FeasibilityReport {
    let (verdict, margin) = if m > k_upper {
        (Verdict::Eradicable, m - k_upper)
    } else if m < kappa {
        (Verdict::NotEradicable, kappa - m)
    } else {
        (Verdict::Unknown, min(m - kappa, k_upper - m))
    };
    FeasibilityReport { kappa, k_upper, verdict, margin }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tri() -> Domain {
        Domain::unit_triangle()
    }

    #[test]
    fn disc_half_area_is_diameter() {
        let d = Domain::Disc { radius: 1.0 };
        let c = dido_cut(&d, PI / 2.0).unwrap();
        assert!(abs(c.length - 2.0) < 1e-12);
    }

    #[test]
    fn disc_cut_encloses_requested_area() {
        let d = Domain::Disc { radius: 1.3 };
        let total = d.area();
        for lam in [0.01, 0.2, 0.45, 0.5, 0.7, 0.97] {
            let c = dido_cut(&d, lam * total).unwrap();
            let a = region_area(&d, &c.cut).unwrap();
            assert!(abs(a - lam * total) < 1e-10 * total, "lam {lam}: {a}");
        }
    }

    // brute force over the orthogonal family in centre-distance form
    #[test]
    fn disc_cut_beats_brute_force_family() {
        let r = 1.0;
        let target = 0.8;
        let mut best = f64::INFINITY;
        for k in 1..20000 {
            let rho = 20.0 * k as f64 / 20000.0;
            let dist = sqrt(r * r + rho * rho);
            let half = atan(r / rho);
            let lens = rho * rho * half + r * r * atan(rho / r) - r * rho;
            if abs(lens - target) < 2e-3 {
                best = min(best, 2.0 * rho * half);
            }
            let _ = dist;
        }
        let g = g_of_a(&Domain::Disc { radius: r }, target).unwrap();
        assert!(abs(g - best) < 5e-3, "{g} vs {best}");
    }

    #[test]
    fn triangle_half_area_sector() {
        let d = tri();
        let a = d.area() / 2.0;
        let c = dido_cut(&d, a).unwrap();
        let s = sqrt(3.0 * sqrt(3.0) / (4.0 * PI));
        assert!(abs(c.length - PI / 3.0 * s) < 1e-10);
        assert!(abs(region_area(&d, &c.cut).unwrap() - a) < 1e-10);
    }

    #[test]
    fn wedge_sector_length() {
        let d = Domain::Wedge { half_angle: PI / 4.0, length: 3.0 };
        let c = dido_cut(&d, PI / 4.0).unwrap();
        // the apex sector (length 2αs = π/2) loses to the π/4 sectors at the far corners
        assert!(abs(c.length - PI / 4.0 * sqrt(2.0)) < 1e-10);
        let v = d.polygon().unwrap();
        let apex = polygon_families(&v)
            .iter()
            .filter_map(|f| family_cut(&v, f, PI / 4.0, d.area()))
            .find(|c| c.family == CutFamily::EdgePair { i: 0, j: 2 })
            .unwrap();
        assert!(abs(apex.length - PI / 2.0) < 1e-10);
    }

    #[test]
    fn cuts_are_perpendicular() {
        let d = Domain::ConvexPolygon {
            vertices: alloc::vec![
                Point::new(0.0, 0.0),
                Point::new(2.0, 0.0),
                Point::new(2.5, 1.0),
                Point::new(0.3, 1.4)
            ],
        };
        let solver = DidoSolver::new(&d).unwrap();
        for lam in [0.1, 0.3, 0.5, 0.8] {
            let c = solver.cut(lam * d.area()).unwrap();
            for arc in &c.cut.arcs {
                for (p, t) in [(arc.start, arc.tangent_at(0.0)), (arc.end(), arc.tangent_at(arc.length))] {
                    assert!(abs(d.boundary_tangent(p).dot(t)) < 1e-8);
                }
            }
            assert!(abs(region_area(&d, &c.cut).unwrap() - lam * d.area()) < 1e-10 * d.area());
        }
    }

    #[test]
    fn kappa_and_width() {
        let d = tri();
        let k = kappa(&d, 256).unwrap();
        assert!(abs(k - 0.673386) < 1e-5, "{k}");
        assert!(abs(k_upper(&d).unwrap() - sqrt(3.0) / 2.0) < 1e-9);
        assert!(abs(kappa(&Domain::Disc { radius: 2.0 }, 64).unwrap() - 4.0) < 1e-9);
    }

    #[test]
    fn rectangle_strip() {
        let d = Domain::ConvexPolygon {
            vertices: alloc::vec![
                Point::new(0.0, 0.0),
                Point::new(3.0, 0.0),
                Point::new(3.0, 1.0),
                Point::new(0.0, 1.0)
            ],
        };
        let c = dido_cut(&d, 1.5).unwrap();
        assert!(abs(c.length - 1.0) < 1e-12);
    }

    #[test]
    fn verdicts() {
        let r = verdict_from(0.67, 0.866, 0.9);
        assert_eq!(r.verdict, Verdict::Eradicable);
        assert_eq!(verdict_from(0.67, 0.866, 0.6).verdict, Verdict::NotEradicable);
        assert_eq!(verdict_from(0.67, 0.866, 0.7).verdict, Verdict::Unknown);
    }
}
