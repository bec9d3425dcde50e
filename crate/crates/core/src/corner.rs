//! The maximal free interface leaving a corner of `V = {|y| ≤ x tan α}` and
//! the Picard solver for its singular implicit Cauchy problem.
//!
//! The interface is the graph `y = φ(x)` with `φ(x) ~ c·x^{σ+1}`; `t₁ < 0 < t₂`
//! are the times at which the active circle is centred on the lower and upper
//! walls, and `r₁, r₂` the corresponding radii.

use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;
use core::fmt;

use crate::freearc::{free_arc_curvature_rhs, CurvatureState};
use crate::math::*;
use crate::numeric;

#[derive(Clone, Debug, PartialEq)]
pub enum CornerError {
    /// `β ± θ` is too close to zero.
    AngleDegeneracy {
        x: f64,
        angle: f64,
    },
    /// A radius or a `1 + tᵢω` factor is not positive.
    Degenerate {
        x: f64,
        value: f64,
    },
    NoConvergence {
        x: f64,
        residual: f64,
    },
    /// A Picard image violates a bound of the domain `𝒟`.
    LeftDomain {
        x: f64,
        component: &'static str,
        ratio: f64,
    },
    /// `x†` fell below `1e−8` without a contracting iteration.
    NoContraction {
        x_dagger: f64,
    },
    InvalidParams,
}

impl fmt::Display for CornerError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CornerError::AngleDegeneracy { x, angle } => write!(f, "angle degeneracy at x = {x:e}: {angle:e}"),
            CornerError::Degenerate { x, value } => {
                write!(f, "degenerate radius or time factor at x = {x:e}: {value:e}")
            }
            CornerError::NoConvergence { x, residual } => {
                write!(f, "curvature solve did not converge at x = {x:e} (residual {residual:e})")
            }
            CornerError::LeftDomain { x, component, ratio } => {
                write!(f, "Picard image leaves the domain at x = {x:e}: {component} ratio {ratio}")
            }
            CornerError::NoContraction { x_dagger } => write!(f, "no contraction down to x† = {x_dagger:e}"),
            CornerError::InvalidParams => write!(f, "invalid corner parameters"),
        }
    }
}

const TOL_ANGLE: f64 = 1e-10;

/// `σ(β) = (β − sin β cos β)/(2 cos β (sin β − β cos β))`.
///
/// Returns `+∞` for `β ≥ π/2`. Below `β = 1e−3` the series `1 + 2β²/5` is used.
pub fn sigma_of_beta(beta: f64) -> f64 {
    if beta >= FRAC_PI_2 {
        return f64::INFINITY;
    }
    if beta < 1e-3 {
        return 1.0 + 0.4 * beta * beta;
    }
    // β − sin β cos β = (2β − sin 2β)/2, and sin β − β cos β = β³·S(β)
    let num = 4.0 * beta * beta * beta * x_minus_sin_over_cube(2.0 * beta);
    let den = if beta < 0.3 {
        let b2 = beta * beta;
        beta * b2 * (1.0 / 3.0 - b2 / 30.0 + b2 * b2 / 840.0 - b2 * b2 * b2 / 45360.0 + b2 * b2 * b2 * b2 / 3991680.0)
    } else {
        sin(beta) - beta * cos(beta)
    };
    num / (2.0 * cos(beta) * den)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CornerParams {
    pub beta: f64,
    pub m: f64,
    pub c: f64,
    pub sigma: f64,
    pub c0: f64,
    pub x_dagger: f64,
}

impl CornerParams {
    /// `C₀ = 2·max{(σ+1)|c|, cot β (1 − β cot β)/(2M)}`: twice the leading
    /// coefficients of `φ′/x^σ` and `|tᵢ|/x²`.
    pub fn new(beta: f64, c: f64, m: f64, x_dagger: f64) -> Result<Self, CornerError> {
        if !(beta > 0.0 && beta < FRAC_PI_2 && m > 0.0 && c.is_finite() && m.is_finite() && x_dagger > 0.0) {
            return Err(CornerError::InvalidParams);
        }
        let sigma = sigma_of_beta(beta);
        let cot = 1.0 / tan(beta);
        let c0 = 2.0 * max((sigma + 1.0) * abs(c), cot * (1.0 - beta * cot) / (2.0 * m));
        Ok(CornerParams { beta, m, c, sigma, c0, x_dagger })
    }

    /// `ε = min{1, σ}`.
    pub fn epsilon(&self) -> f64 {
        min(1.0, self.sigma)
    }
}

/// Verbatim values of `F`, `G`, `𝒯₁`, `𝒯₂` and the radii.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CornerRhs {
    pub f: f64,
    pub g: f64,
    pub t1: f64,
    pub t2: f64,
    pub r1: f64,
    pub r2: f64,
}

/// The state at one abscissa.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointState {
    pub x: f64,
    pub t1: f64,
    pub t2: f64,
    pub phi: f64,
    pub dphi: f64,
}

fn angles(s: &PointState, beta: f64) -> Result<(f64, f64, f64), CornerError> {
    let theta = atan(s.dphi);
    let (u1, u2) = (beta - theta, beta + theta);
    for u in [u1, u2] {
        if u < TOL_ANGLE || abs(sin(u)) < TOL_ANGLE {
            return Err(CornerError::AngleDegeneracy { x: s.x, angle: u });
        }
    }
    Ok((theta, u1, u2))
}

/// `r₁ = (x cos β + φ sin β)/sin(β − θ) − t₁`, `r₂ = (x cos β − φ sin β)/sin(β + θ) + t₂`.
pub fn radii(s: &PointState, beta: f64) -> Result<(f64, f64), CornerError> {
    let (_, u1, u2) = angles(s, beta)?;
    let (sb, cb) = (sin(beta), cos(beta));
    let r1 = (s.x * cb + s.phi * sb) / sin(u1) - s.t1;
    let r2 = (s.x * cb - s.phi * sb) / sin(u2) + s.t2;
    Ok((r1, r2))
}

/// Evaluates `F`, `G`, `𝒯₁`, `𝒯₂`, `r₁`, `r₂` as written, with `φ″ = ddphi`.
pub fn corner_rhs(s: &PointState, ddphi: f64, beta: f64, m: f64) -> Result<CornerRhs, CornerError> {
    let (_, u1, u2) = angles(s, beta)?;
    let (r1, r2) = radii(s, beta)?;
    if r1 <= 0.0 || r2 <= 0.0 {
        return Err(CornerError::Degenerate { x: s.x, value: min(r1, r2) });
    }
    let (x, phi, p) = (s.x, s.phi, s.dphi);
    let (sb, cb) = (sin(beta), cos(beta));
    let one_p2 = 1.0 + p * p;
    let q = ddphi / one_p2;
    let omega = ddphi / powf(one_p2, 1.5);
    let root = sqrt(one_p2);

    let t2 = r2 / m
        * ((root - q * r2) - u2 * ((cb - p * sb) / sin(u2) - (x * cb - phi * sb) / (sin(u2) * sin(u2)) * cos(u2) * q));
    let t1 = -r1 / m
        * ((root + q * r1) - u1 * ((cb + p * sb) / sin(u1) + (x * cb + phi * sb) / (sin(u1) * sin(u1)) * cos(u1) * q));

    let f = -q * (r1 + r2) - u2 / sin(u2) * ((cb - p * sb) - (x * cb - phi * sb) / tan(u2) * q)
        + u1 / sin(u1) * ((cb + p * sb) + (x * cb + phi * sb) / tan(u1) * q);

    let (e1, e2) = (1.0 + s.t1 * omega, 1.0 + s.t2 * omega);
    if e1 <= 0.0 || e2 <= 0.0 {
        return Err(CornerError::Degenerate { x, value: min(e1, e2) });
    }
    let g =
        m * omega * (s.t1 * omega / e1 * t1 - s.t2 * omega / e2 * t2) + q * (r1 + r2) + q * omega * (r1 * r1 - r2 * r2)
            - u2 / sin(u2) * (cb - p * sb - (x * cb - phi * sb) / tan(u2) * q) * omega * r2
            - u1 / sin(u1) * (cb + p * sb + (x * cb + phi * sb) / tan(u1) * q) * omega * r1;

    Ok(CornerRhs { f, g, t1, t2, r1, r2 })
}

/// `H = G − F` as a function of `Υ = φ″` at a fixed point state, assembled
/// without the cancellation between the two braces of `F`.
struct Balance {
    w: f64,
    w32: f64,
    r1: f64,
    r2: f64,
    d1: f64,
    d2: f64,
    b1: f64,
    b2: f64,
    db: f64,
    t1: f64,
    t2: f64,
    x: f64,
}

impl Balance {
    fn new(s: &PointState, beta: f64) -> Result<Self, CornerError> {
        let (theta, u1, u2) = angles(s, beta)?;
        let (r1, r2) = radii(s, beta)?;
        if r1 <= 0.0 || r2 <= 0.0 {
            return Err(CornerError::Degenerate { x: s.x, value: min(r1, r2) });
        }
        let (sb, cb) = (sin(beta), cos(beta));
        let (s1, s2) = (sin(u1), sin(u2));
        let n1 = s.x * cb + s.phi * sb;
        let n2 = s.x * cb - s.phi * sb;
        let w = 1.0 / (1.0 + s.dphi * s.dphi);
        let cth = sqrt(w);
        // 1 − u cot u, divided by cos θ
        let b1 = (1.0 - u1 * cos(u1) / s1) / cth;
        let b2 = (1.0 - u2 * cos(u2) / s2) / cth;
        // b2 − b1 = (u₁ cot u₁ − u₂ cot u₂)/cos θ
        let db = (-2.0 * theta * cos(u1) / s1 + u2 * sin(2.0 * theta) / (s1 * s2)) / cth;
        Ok(Balance {
            w,
            w32: w * cth,
            r1,
            r2,
            d1: u1 * n1 * cos(u1) / (s1 * s1),
            d2: u2 * n2 * cos(u2) / (s2 * s2),
            b1,
            b2,
            db,
            t1: s.t1,
            t2: s.t2,
            x: s.x,
        })
    }

    /// Braces of `𝒯₁`, `𝒯₂`: `𝒯₁ = −r₁·br1/M`, `𝒯₂ = r₂·br2/M`.
    fn braces(&self, ups: f64) -> (f64, f64) {
        let q = ups * self.w;
        (self.b1 + q * (self.r1 - self.d1), self.b2 + q * (self.d2 - self.r2))
    }

    /// `(H, ∂H/∂Υ, scale)`.
    fn eval(&self, ups: f64) -> Result<(f64, f64, f64), CornerError> {
        let q = ups * self.w;
        let om = ups * self.w32;
        let (br1, br2) = self.braces(ups);
        let (e1, e2) = (1.0 + self.t1 * om, 1.0 + self.t2 * om);
        if e1 <= 0.0 || e2 <= 0.0 {
            return Err(CornerError::Degenerate { x: self.x, value: min(e1, e2) });
        }
        let gsum = self.r2 * br2 / e2 + self.r1 * br1 / e1;
        let g = om * gsum;
        let fq = -(self.r1 + self.r2) + self.d1 + self.d2;
        let f = self.db + q * fq;
        let dg = self.w32 * gsum
            + om * (self.r2 * self.w * (self.d2 - self.r2) / e2 - self.r2 * br2 * self.t2 * self.w32 / (e2 * e2)
                + self.r1 * self.w * (self.r1 - self.d1) / e1
                - self.r1 * br1 * self.t1 * self.w32 / (e1 * e1));
        let df = self.w * fq;
        let scale = abs(om) * (abs(self.r2 * br2 / e2) + abs(self.r1 * br1 / e1))
            + abs(self.db)
            + abs(q) * (self.r1 + self.r2 + abs(self.d1) + abs(self.d2));
        Ok((g - f, dg - df, scale))
    }
}

/// `H(x, t₁, t₂, φ, φ′, Υ)` from the rearranged form used by [`solve_upsilon`],
/// with the sum of the magnitudes of its terms.
pub fn balance_residual(s: &PointState, ups: f64, beta: f64) -> Result<(f64, f64), CornerError> {
    Balance::new(s, beta)?.eval(ups).map(|r| (r.0, r.2))
}

const NEWTON_TOL: f64 = 1e-12;

/// Root `Υ` of `H(x, t₁, t₂, φ, φ′, Υ) = 0`. Newton from `σφ′/x`, then a
/// bracketed search on `[Υ₀/10, 10Υ₀]` widened by a sign scan.
pub fn solve_upsilon(s: &PointState, beta: f64, sigma: f64) -> Result<f64, CornerError> {
    if !(s.x > 0.0) {
        return Err(CornerError::InvalidParams);
    }
    let bal = Balance::new(s, beta)?;
    let guess = sigma * s.dphi / s.x;
    let mut u = guess;
    let mut last = f64::INFINITY;
    for _ in 0..100 {
        let (h, dh, scale) = match bal.eval(u) {
            Ok(v) => v,
            Err(_) => break,
        };
        last = abs(h);
        if abs(h) <= NEWTON_TOL * scale {
            return Ok(u);
        }
        if !(dh != 0.0 && dh.is_finite()) {
            break;
        }
        u -= h / dh;
        if !u.is_finite() {
            break;
        }
    }
    // fallback: bracket around the guess
    let width = if guess != 0.0 { abs(guess) } else { 1.0 / s.x };
    let (mut lo, mut hi) = if guess != 0.0 {
        let (a, b) = (guess / 10.0, guess * 10.0);
        (min(a, b), max(a, b))
    } else {
        (-width, width)
    };
    let sign = |v: f64| bal.eval(v).map(|r| r.0);
    for _ in 0..60 {
        if let (Ok(a), Ok(b)) = (sign(lo), sign(hi)) {
            if (a > 0.0) != (b > 0.0) {
                let f = |v: f64| match bal.eval(v) {
                    Ok((h, dh, _)) => (h, dh),
                    Err(_) => (f64::NAN, f64::NAN),
                };
                if let Some((root, _, _)) = numeric::safe_newton(f, lo, hi, 1e-16 * max(abs(lo), abs(hi)), 400) {
                    if let Ok((h, _, scale)) = bal.eval(root) {
                        if abs(h) <= NEWTON_TOL * scale {
                            return Ok(root);
                        }
                        last = abs(h);
                    }
                }
                break;
            }
        }
        let span = hi - lo;
        lo -= span;
        hi += span;
    }
    Err(CornerError::NoConvergence { x: s.x, residual: last })
}

#[derive(Clone, Debug, PartialEq)]
pub struct FreeInterfaceState {
    /// Increasing, geometrically graded abscissas in `(0, x†]`.
    pub grid: Vec<f64>,
    pub phi: Vec<f64>,
    pub dphi: Vec<f64>,
    pub t1: Vec<f64>,
    pub t2: Vec<f64>,
    pub r1: Vec<f64>,
    pub r2: Vec<f64>,
    pub theta1: Vec<f64>,
    pub theta2: Vec<f64>,
    pub upsilon: Vec<f64>,
}

impl FreeInterfaceState {
    /// `φ = φ′ = t₁ = t₂ = 0` on the grid.
    pub fn zero(grid: Vec<f64>, beta: f64) -> Self {
        let n = grid.len();
        let z = alloc::vec![0.0; n];
        let r: Vec<f64> = grid.iter().map(|x| x * cos(beta) / sin(beta)).collect();
        FreeInterfaceState {
            phi: z.clone(),
            dphi: z.clone(),
            t1: z.clone(),
            t2: z.clone(),
            r1: r.clone(),
            r2: r,
            theta1: alloc::vec![beta; n],
            theta2: alloc::vec![beta; n],
            upsilon: z,
            grid,
        }
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn point(&self, k: usize) -> PointState {
        PointState { x: self.grid[k], t1: self.t1[k], t2: self.t2[k], phi: self.phi[k], dphi: self.dphi[k] }
    }

    /// Largest of `|φ|/(C₀x^{σ+1})`, `|φ′|/(C₀x^σ)`, `|tᵢ|/(C₀x²)`; at most 1 inside `𝒟`.
    pub fn domain_ratio(&self, p: &CornerParams) -> (f64, usize, &'static str) {
        let mut worst = (0.0, 0, "phi");
        for k in 0..self.len() {
            let x = self.grid[k];
            let checks = [
                ("phi", abs(self.phi[k]) / (p.c0 * powf(x, p.sigma + 1.0))),
                ("dphi", abs(self.dphi[k]) / (p.c0 * powf(x, p.sigma))),
                ("t1", abs(self.t1[k]) / (p.c0 * x * x)),
                ("t2", abs(self.t2[k]) / (p.c0 * x * x)),
            ];
            for (name, v) in checks {
                let v = if v.is_nan() { f64::INFINITY } else { v };
                if v > worst.0 {
                    worst = (v, k, name);
                }
            }
        }
        worst
    }
}

/// Geometric grid of `n` nodes from `span·x†` up to `x†`.
pub fn graded_grid(x_dagger: f64, n: usize, span: f64) -> Vec<f64> {
    let ratio = powf(span, 1.0 / (n - 1) as f64);
    let mut g: Vec<f64> = (0..n).map(|k| x_dagger * powf(ratio, (n - 1 - k) as f64)).collect();
    g[n - 1] = x_dagger;
    g
}

/// The weighted sup-distance `sup max{|Δφ|/x^{σ+1}, |Δφ′|/x^σ, |Δt₁|/x², |Δt₂|/x²}`.
pub fn norm_distance(a: &FreeInterfaceState, b: &FreeInterfaceState, sigma: f64) -> f64 {
    let mut d: f64 = 0.0;
    for k in 0..a.len() {
        let x = a.grid[k];
        d = max(d, abs(a.phi[k] - b.phi[k]) / powf(x, sigma + 1.0));
        d = max(d, abs(a.dphi[k] - b.dphi[k]) / powf(x, sigma));
        d = max(d, abs(a.t1[k] - b.t1[k]) / (x * x));
        d = max(d, abs(a.t2[k] - b.t2[k]) / (x * x));
    }
    d
}

// ∫ over [y₀, y₁] of a function with end values f₀, f₁: exact for a power law
// when both values share a sign, trapezoid otherwise.
fn interval(y0: f64, y1: f64, f0: f64, f1: f64) -> f64 {
    if f0 != 0.0 && f1 != 0.0 && (f0 > 0.0) == (f1 > 0.0) {
        let l = ln(y1 / y0);
        let e = ln(f1 / f0) / l + 1.0;
        let el = e * l;
        if abs(el) < 1e-8 {
            return f0 * y0 * l * (1.0 + 0.5 * el);
        }
        f0 * y0 * expm1(el) / e
    } else {
        0.5 * (f0 + f1) * (y1 - y0)
    }
}

fn cumulative(grid: &[f64], f: &[f64], tail: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(grid.len());
    let mut acc = tail;
    out.push(acc);
    for k in 1..grid.len() {
        acc += interval(grid[k - 1], grid[k], f[k - 1], f[k]);
        out.push(acc);
    }
    out
}

/// Values of `Υ`, `𝒯₁`, `𝒯₂` along a state.
type Columns = (Vec<f64>, Vec<f64>, Vec<f64>);

fn curvatures(state: &FreeInterfaceState, p: &CornerParams) -> Result<Columns, CornerError> {
    let n = state.len();
    let (mut ups, mut tt1, mut tt2) = (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
    for k in 0..n {
        let s = state.point(k);
        let u = solve_upsilon(&s, p.beta, p.sigma)?;
        let bal = Balance::new(&s, p.beta)?;
        let (br1, br2) = bal.braces(u);
        ups.push(u);
        tt1.push(-bal.r1 * br1 / p.m);
        tt2.push(bal.r2 * br2 / p.m);
    }
    Ok((ups, tt1, tt2))
}

/// One application of the Picard operator:
/// `t̃ᵢ = ∫₀ˣ Tᵢ`, `φ̃′ = x^σ((σ+1)c + ∫₀ˣ y^{−σ−1}K)`, `φ̃ = ∫₀ˣ φ̃′`, with `K = xΥ − σφ′`.
///
/// Below the first node the integrands follow their leading power laws
/// (`K ≈ k₀y^{σ+ε}`, `Tᵢ ≈ τᵢy`), fitted on the three smallest nodes.
pub fn picard_step(state: &FreeInterfaceState, p: &CornerParams) -> Result<FreeInterfaceState, CornerError> {
    let n = state.len();
    if n < 3 {
        return Err(CornerError::InvalidParams);
    }
    let (sigma, eps) = (p.sigma, p.epsilon());
    let grid = &state.grid;
    let (ups, tt1, tt2) = curvatures(state, p)?;

    let g: Vec<f64> = (0..n).map(|k| (grid[k] * ups[k] - sigma * state.dphi[k]) / powf(grid[k], sigma + 1.0)).collect();
    let k0 = (0..3).map(|j| g[j] * powf(grid[j], 1.0 - eps)).sum::<f64>() / 3.0;
    let x0 = grid[0];
    let int_g = cumulative(grid, &g, k0 * powf(x0, eps) / eps);
    let dphi: Vec<f64> = (0..n).map(|k| powf(grid[k], sigma) * ((sigma + 1.0) * p.c + int_g[k])).collect();
    let tail_phi = p.c * powf(x0, sigma + 1.0) + k0 * powf(x0, sigma + 1.0 + eps) / (eps * (sigma + 1.0 + eps));
    let phi = cumulative(grid, &dphi, tail_phi);

    let tau = |tt: &[f64]| (0..3).map(|j| tt[j] / grid[j]).sum::<f64>() / 3.0;
    let t1 = cumulative(grid, &tt1, 0.5 * tau(&tt1) * x0 * x0);
    let t2 = cumulative(grid, &tt2, 0.5 * tau(&tt2) * x0 * x0);

    let mut out = FreeInterfaceState {
        grid: grid.clone(),
        phi,
        dphi,
        t1,
        t2,
        r1: Vec::with_capacity(n),
        r2: Vec::with_capacity(n),
        theta1: Vec::with_capacity(n),
        theta2: Vec::with_capacity(n),
        upsilon: ups,
    };
    let (ratio, k, component) = out.domain_ratio(p);
    if ratio > 1.0 {
        return Err(CornerError::LeftDomain { x: grid[k], component, ratio });
    }
    for k in 0..n {
        let s = out.point(k);
        let (r1, r2) = radii(&s, p.beta)?;
        let th = atan(s.dphi);
        out.r1.push(r1);
        out.r2.push(r2);
        out.theta1.push(p.beta - th);
        out.theta2.push(p.beta + th);
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CornerOptions {
    pub x_dagger: f64,
    pub nodes: usize,
    /// `x_min / x†`.
    pub span: f64,
    pub tol: f64,
    pub max_iter: usize,
    /// Largest accepted ratio of successive Picard increments.
    pub max_contraction: f64,
}

impl Default for CornerOptions {
    fn default() -> Self {
        CornerOptions { x_dagger: 0.1, nodes: 200, span: 1e-7, tol: 1e-10, max_iter: 100, max_contraction: 0.5 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CornerDiagnostics {
    pub iterations: usize,
    /// Norm distance between the last two iterates.
    pub residual: f64,
    pub x_dagger: f64,
    /// Largest ratio of successive increments.
    pub contraction: f64,
    /// Number of `x†` values tried.
    pub attempts: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CornerInterface {
    pub params: CornerParams,
    pub state: FreeInterfaceState,
    pub diagnostics: CornerDiagnostics,
}

/// Iterates [`picard_step`] from the zero state to a fixed point, halving `x†`
/// whenever an iterate leaves `𝒟`, a solve fails or the increments do not
/// contract by the required factor.
pub fn corner_interface(beta: f64, c: f64, m: f64) -> Result<CornerInterface, CornerError> {
    corner_interface_with(beta, c, m, &CornerOptions::default())
}

pub fn corner_interface_with(beta: f64, c: f64, m: f64, opts: &CornerOptions) -> Result<CornerInterface, CornerError> {
    if opts.nodes < 3 || !(opts.span > 0.0 && opts.span < 1.0) {
        return Err(CornerError::InvalidParams);
    }
    let mut x_dagger = opts.x_dagger;
    let mut attempts = 0;
    while x_dagger >= 1e-8 {
        attempts += 1;
        let params = CornerParams::new(beta, c, m, x_dagger)?;
        if let Some((state, iterations, residual, contraction)) = iterate(&params, opts) {
            return Ok(CornerInterface {
                params,
                state,
                diagnostics: CornerDiagnostics { iterations, residual, x_dagger, contraction, attempts },
            });
        }
        x_dagger *= 0.5;
    }
    Err(CornerError::NoContraction { x_dagger })
}

fn iterate(p: &CornerParams, opts: &CornerOptions) -> Option<(FreeInterfaceState, usize, f64, f64)> {
    let mut state = FreeInterfaceState::zero(graded_grid(p.x_dagger, opts.nodes, opts.span), p.beta);
    let mut prev_d = f64::INFINITY;
    let mut worst: f64 = 0.0;
    for it in 1..=opts.max_iter {
        let next = picard_step(&state, p).ok()?;
        let d = norm_distance(&next, &state, p.sigma);
        if prev_d.is_finite() && prev_d > opts.tol {
            worst = max(worst, d / prev_d);
            if worst > opts.max_contraction {
                return None;
            }
        }
        state = next;
        if d < opts.tol {
            return Some((state, it, d, worst));
        }
        prev_d = d;
    }
    None
}

/// Relative residual of the differentiated optimality identity
/// `t₂′/r₂ + t₁′/r₁ = ω/(1+t₂ω)·t₂′ − ω/(1+t₁ω)·t₁′` at each node, with
/// `tᵢ′ = 𝒯ᵢ` and `ω` the interface curvature.
pub fn ode1_residuals(state: &FreeInterfaceState, p: &CornerParams) -> Result<Vec<f64>, CornerError> {
    let mut out = Vec::with_capacity(state.len());
    for k in 0..state.len() {
        let s = state.point(k);
        let ups = solve_upsilon(&s, p.beta, p.sigma)?;
        let rhs = corner_rhs(&s, ups, p.beta, p.m)?;
        let omega = ups / powf(1.0 + s.dphi * s.dphi, 1.5);
        let cs = CurvatureState {
            t1: s.t1,
            t2: s.t2,
            dt1: rhs.t1,
            dt2: rhs.t2,
            omega_t1: -1.0 / rhs.r1,
            omega_t2: 1.0 / rhs.r2,
        };
        let res = free_arc_curvature_rhs(&cs, omega).map_err(|_| CornerError::Degenerate { x: s.x, value: omega })?;
        let scale = abs(rhs.t2 / rhs.r2) + abs(rhs.t1 / rhs.r1);
        out.push(abs(res) / scale);
    }
    Ok(out)
}

/// Least-squares slope of `ln|v|` against `ln x` over nodes with `x ≤ upto`.
pub fn loglog_slope(grid: &[f64], v: &[f64], upto: f64) -> f64 {
    let pts: Vec<(f64, f64)> =
        grid.iter().zip(v).filter(|(x, y)| **x <= upto && **y != 0.0).map(|(x, y)| (ln(*x), ln(abs(*y)))).collect();
    let n = pts.len() as f64;
    let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / n, pts.iter().map(|p| p.1).sum::<f64>() / n);
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}
