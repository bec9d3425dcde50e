//! JSON interchange for domains, boundaries and motions.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use setmotion_core::corner::{CornerInterface, FreeInterfaceState};
use setmotion_core::evolution::{Motion, MotionFrame};
use setmotion_core::geometry::*;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "type", content = "params", rename_all = "snake_case", deny_unknown_fields)]
pub enum DomainSpec {
    Disc {
        radius: f64,
    },
    Wedge {
        half_angle: f64,
        length: f64,
    },
    Polygon {
        vertices: Vec<[f64; 2]>,
    },
    Cap {
        coeffs: Vec<f64>,
    },
    /// Unit-side equilateral triangle.
    Triangle {},
    /// Right-angled wedge `{0 < y < x < leg}`.
    RightWedge {
        leg: f64,
    },
}

impl DomainSpec {
    pub fn to_domain(&self) -> Result<Domain, String> {
        let d = match self {
            DomainSpec::Disc { radius } => Domain::Disc { radius: *radius },
            DomainSpec::Wedge { half_angle, length } => Domain::Wedge { half_angle: *half_angle, length: *length },
            DomainSpec::Polygon { vertices } => {
                Domain::ConvexPolygon { vertices: vertices.iter().map(|v| Point::new(v[0], v[1])).collect() }
            }
            DomainSpec::Cap { coeffs } => Domain::SymmetricCap { coeffs: coeffs.clone() },
            DomainSpec::Triangle {} => Domain::unit_triangle(),
            DomainSpec::RightWedge { leg } => {
                if !(leg.is_finite() && *leg > 0.0) {
                    return Err("right_wedge leg must be positive".into());
                }
                setmotion_core::evolution::wedge_domain(*leg)
            }
        };
        d.validate().map_err(|e| format!("invalid domain: {e}"))?;
        Ok(d)
    }

    pub fn from_domain(d: &Domain) -> DomainSpec {
        match d {
            Domain::Disc { radius } => DomainSpec::Disc { radius: *radius },
            Domain::Wedge { half_angle, length } => DomainSpec::Wedge { half_angle: *half_angle, length: *length },
            Domain::ConvexPolygon { vertices } => {
                DomainSpec::Polygon { vertices: vertices.iter().map(|p| [p.x, p.y]).collect() }
            }
            Domain::SymmetricCap { coeffs } => DomainSpec::Cap { coeffs: coeffs.clone() },
        }
    }
}

/// Accepts inline JSON or a path to a JSON/TOML file.
pub fn parse_domain(arg: &str) -> Result<Domain, String> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        std::fs::read_to_string(arg).map_err(|e| format!("{arg}: {e}"))?
    };
    let spec: DomainSpec = if arg.ends_with(".toml") {
        toml::from_str(&text).map_err(|e| format!("domain: {e}"))?
    } else {
        serde_json::from_str(&text).map_err(|e| format!("domain: {e}"))?
    };
    spec.to_domain()
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum KindDto {
    Free,
    Controlled,
}

/// One piece of a relative boundary. Arcs carry the centre form
/// `(cx, cy, r, a0, a1)`; segments carry their endpoints.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ArcDto {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cx: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cy: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p0: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p1: Option<[f64; 2]>,
    pub kind: KindDto,
    pub beta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta_start: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta_end: Option<f64>,
}

impl ArcDto {
    pub fn from_arc(a: &CircArc) -> ArcDto {
        let kind = match a.kind {
            ArcKind::Free => KindDto::Free,
            ArcKind::Controlled => KindDto::Controlled,
        };
        let uneven = a.beta_start != a.beta || a.beta_end != a.beta;
        let mut dto = ArcDto {
            cx: None,
            cy: None,
            r: None,
            a0: None,
            a1: None,
            p0: None,
            p1: None,
            kind,
            beta: a.beta,
            beta_start: uneven.then_some(a.beta_start),
            beta_end: uneven.then_some(a.beta_end),
        };
        match a.center_form() {
            Some((cx, cy, r, a0, a1)) => {
                dto.cx = Some(cx);
                dto.cy = Some(cy);
                dto.r = Some(r);
                dto.a0 = Some(a0);
                dto.a1 = Some(a1);
            }
            None => {
                let e = a.end();
                dto.p0 = Some([a.start.x, a.start.y]);
                dto.p1 = Some([e.x, e.y]);
            }
        }
        dto
    }

    pub fn to_arc(&self) -> Result<CircArc, String> {
        let base = match (self.cx, self.cy, self.r, self.a0, self.a1, self.p0, self.p1) {
            (Some(cx), Some(cy), Some(r), Some(a0), Some(a1), None, None) => {
                if !(r.is_finite() && r > 0.0 && a0.is_finite() && a1.is_finite() && a0 != a1) {
                    return Err(format!("arc needs r > 0 and a0 != a1, got r={r}, a0={a0}, a1={a1}"));
                }
                CircArc::from_center(Point::new(cx, cy), r, a0, a1)
            }
            (None, None, None, None, None, Some(p0), Some(p1)) => {
                if p0 == p1 || p0.iter().chain(&p1).any(|v| !v.is_finite()) {
                    return Err("segment endpoints must be finite and distinct".into());
                }
                CircArc::segment(Point::new(p0[0], p0[1]), Point::new(p1[0], p1[1]))
            }
            _ => return Err("piece needs either cx, cy, r, a0, a1 or p0, p1".into()),
        };
        let kind = match self.kind {
            KindDto::Free => ArcKind::Free,
            KindDto::Controlled => ArcKind::Controlled,
        };
        let arc = base.with_speed(kind, self.beta);
        Ok(match (self.beta_start, self.beta_end) {
            (None, None) => arc,
            (b0, b1) => {
                let mut arc = arc;
                arc.beta_start = b0.unwrap_or(self.beta);
                arc.beta_end = b1.unwrap_or(self.beta);
                arc
            }
        })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct FrameDto {
    pub t: f64,
    pub area: f64,
    pub rel_perimeter: f64,
    /// `Ω` is empty (only meaningful without arcs).
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub void: bool,
    pub arcs: Vec<ArcDto>,
}

impl FrameDto {
    pub fn from_frame(f: &MotionFrame) -> FrameDto {
        FrameDto {
            t: f.t,
            area: f.area,
            rel_perimeter: f.rel_perimeter,
            void: f.boundary.void,
            arcs: f.boundary.arcs.iter().map(ArcDto::from_arc).collect(),
        }
    }

    pub fn to_frame(&self) -> Result<MotionFrame, String> {
        let arcs = self.arcs.iter().map(ArcDto::to_arc).collect::<Result<Vec<_>, _>>()?;
        let boundary = Boundary { arcs, void: self.void };
        Ok(MotionFrame::with_area(self.t, boundary, self.area))
    }
}

pub fn boundary_json(b: &Boundary) -> serde_json::Value {
    serde_json::json!({
        "void": b.void,
        "arcs": b.arcs.iter().map(ArcDto::from_arc).collect::<Vec<_>>(),
    })
}

/// One JSON object per frame, one per line.
pub fn motion_jsonl(m: &Motion) -> String {
    let mut out = String::new();
    for f in &m.frames {
        out.push_str(&serde_json::to_string(&FrameDto::from_frame(f)).expect("frame serializes"));
        out.push('\n');
    }
    out
}

/// Reads JSON-lines frames; errors carry the line number.
pub fn read_motion_jsonl(text: &str, effort: f64) -> Result<Motion, String> {
    let mut m = Motion::new(effort);
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        // JSON numbers are finite, so plain comparisons below are safe
        let dto: FrameDto = serde_json::from_str(line).map_err(|e| format!("line {}: {e}", i + 1))?;
        m.frames.push(dto.to_frame().map_err(|e| format!("line {}: {e}", i + 1))?);
    }
    if m.frames.len() < 2 {
        return Err("motion needs at least two frames".into());
    }
    if m.frames.windows(2).any(|w| w[1].t <= w[0].t) {
        return Err("frame times must increase".into());
    }
    Ok(m)
}

pub fn corner_csv(s: &FreeInterfaceState) -> String {
    let mut out = String::from("x,phi,dphi,upsilon,t1,t2,r1,r2\n");
    for k in 0..s.len() {
        let _ = writeln!(
            out,
            "{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e}",
            s.grid[k], s.phi[k], s.dphi[k], s.upsilon[k], s.t1[k], s.t2[k], s.r1[k], s.r2[k]
        );
    }
    out
}

pub fn corner_diagnostics(ci: &CornerInterface, ode1_worst: f64) -> serde_json::Value {
    let (ratio, at, component) = ci.state.domain_ratio(&ci.params);
    let p = &ci.params;
    let d = &ci.diagnostics;
    serde_json::json!({
        "beta": p.beta,
        "c": p.c,
        "effort": p.m,
        "sigma": p.sigma,
        "c0": p.c0,
        "x_dagger": d.x_dagger,
        "iterations": d.iterations,
        "residual": d.residual,
        "contraction": d.contraction,
        "attempts": d.attempts,
        "domain_ratio": ratio,
        "domain_ratio_at": ci.state.grid[at],
        "domain_ratio_component": component,
        "ode1_residual": ode1_worst,
    })
}
