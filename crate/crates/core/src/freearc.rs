//! Maximally extended free arcs: the symmetric closed form and the rates of
//! the non-symmetric construction.
//!
//! Curvatures are positive when the curve bends toward the interior of `Ω`.

use core::fmt;

use crate::math::*;
use crate::numeric;

#[derive(Clone, Debug, PartialEq)]
pub enum FreeArcError {
    /// `M < 4ρ`: no real solution.
    Subcritical {
        m: f64,
        rho: f64,
    },
    /// A denominator of the rate formulas vanishes.
    DegenerateDenominator {
        value: f64,
    },
    InvalidInput,
    NoRoot,
}

impl fmt::Display for FreeArcError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FreeArcError::Subcritical { m, rho } => write!(f, "effort {m} below 4ρ = {}", 4.0 * rho),
            FreeArcError::DegenerateDenominator { value } => write!(f, "degenerate denominator {value:e}"),
            FreeArcError::InvalidInput => write!(f, "invalid input"),
            FreeArcError::NoRoot => write!(f, "no curvature root in the bracket"),
        }
    }
}

const TOL_DEN: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymmetricArcSolution {
    pub m: f64,
    /// Radius of curvature of `∂V` at the contact point.
    pub rho: f64,
    /// Length of the controlled piece at the maximal time.
    pub ell: f64,
    /// Speed coefficient of the contact point, `x_ε = hε + o(ε)`.
    pub h: f64,
    /// `|ℓ(1+h)/2 − M|`.
    pub meq_residual: f64,
    /// `|hℓ − 2ρ(1+h)|`.
    pub eleq_residual: f64,
}

/// `ℓ = M − √(M² − 4ρM)`, `h = 2M/ℓ − 1`. The root is evaluated as
/// `4ρM/(M + √(M² − 4ρM))` to avoid cancellation for small `ρ`.
pub fn symmetric_free_arc(m: f64, rho: f64) -> Result<SymmetricArcSolution, FreeArcError> {
    if !(m > 0.0 && rho > 0.0 && m.is_finite() && rho.is_finite()) {
        return Err(FreeArcError::InvalidInput);
    }
    let disc = m * m - 4.0 * rho * m;
    if disc < 0.0 {
        return Err(FreeArcError::Subcritical { m, rho });
    }
    let ell = 4.0 * rho * m / (m + sqrt(disc));
    let h = 2.0 * m / ell - 1.0;
    Ok(SymmetricArcSolution {
        m,
        rho,
        ell,
        h,
        meq_residual: abs(0.5 * ell * (1.0 + h) - m),
        eleq_residual: abs(h * ell - 2.0 * rho * (1.0 + h)),
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FreeArcRates {
    /// Angular span of the controlled arc.
    pub theta_star: f64,
    pub r_star: f64,
    /// Curvature of `∂V` at `Q`.
    pub omega: f64,
    /// Curvature of the free arc at `P`.
    pub omega_sharp: f64,
    pub m: f64,
    /// `|Q̇| = 2M/(θ*r*) − 1`, also `dζ/dt`.
    pub qdot_mag: f64,
    /// `∂r/∂ζ = −r*ω cot θ* − 1`.
    pub dr_dzeta: f64,
    /// `∂δ/∂ζ = −r*ω / sin θ*`.
    pub ddelta_dzeta: f64,
    /// `∂δ/∂ξ = (1 − ω♯r*)/tan θ*`.
    pub ddelta_dxi: f64,
    /// `∂r/∂ξ = (1 − ω♯r*)/sin θ*`.
    pub dr_dxi: f64,
    /// Rate of the junction parameter along the free arc.
    pub dxi_dt: f64,
}

/// Rates of the controlled-arc endpoints. `dξ/dt` is evaluated exactly as
/// `[(1 − ω♯r*)(1 − cos θ*)/sin θ*]⁻¹ · [1 + (−r*ω/sin θ* + r*ω cot θ* + 1)(2M/(θ*r*) − 1)]`.
pub fn free_arc_rates(
    theta_star: f64,
    r_star: f64,
    omega: f64,
    omega_sharp: f64,
    m: f64,
) -> Result<FreeArcRates, FreeArcError> {
    if !(theta_star > 0.0 && theta_star < core::f64::consts::PI && r_star > 0.0) {
        return Err(FreeArcError::InvalidInput);
    }
    if !(omega.is_finite() && omega_sharp.is_finite() && m.is_finite()) {
        return Err(FreeArcError::InvalidInput);
    }
    let (s, c) = (sin(theta_star), cos(theta_star));
    let qdot_mag = 2.0 * m / (theta_star * r_star) - 1.0;
    let dr_dzeta = -r_star * omega * c / s - 1.0;
    let ddelta_dzeta = -r_star * omega / s;
    let ddelta_dxi = (1.0 - omega_sharp * r_star) / tan(theta_star);
    let dr_dxi = (1.0 - omega_sharp * r_star) / s;
    // 1 − cos θ = 2 sin²(θ/2) avoids cancellation for small spans
    let half = sin(0.5 * theta_star);
    let den = (1.0 - omega_sharp * r_star) * (2.0 * half * half) / s;
    if abs(den) <= TOL_DEN {
        return Err(FreeArcError::DegenerateDenominator { value: den });
    }
    let num = 1.0 + (-r_star * omega / s + r_star * omega * c / s + 1.0) * qdot_mag;
    Ok(FreeArcRates {
        theta_star,
        r_star,
        omega,
        omega_sharp,
        m,
        qdot_mag,
        dr_dzeta,
        ddelta_dzeta,
        ddelta_dxi,
        dr_dxi,
        dxi_dt: num / den,
    })
}

/// Data at a point `ξ` of the free arc: entry and exit times with their
/// derivatives, and the controlled-arc curvature at those times.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurvatureState {
    pub t1: f64,
    pub t2: f64,
    pub dt1: f64,
    pub dt2: f64,
    pub omega_t1: f64,
    pub omega_t2: f64,
}

/// Residual of the differentiated free-arc condition
/// `ω♯/(1+t₂ω♯)·t₂' − ω♯/(1+t₁ω♯)·t₁' − (ω(t₂)t₂' − ω(t₁)t₁')`.
pub fn free_arc_curvature_rhs(s: &CurvatureState, omega_sharp: f64) -> Result<f64, FreeArcError> {
    let d1 = 1.0 + s.t1 * omega_sharp;
    let d2 = 1.0 + s.t2 * omega_sharp;
    if abs(d1) <= TOL_DEN || abs(d2) <= TOL_DEN {
        return Err(FreeArcError::DegenerateDenominator { value: min(abs(d1), abs(d2)) });
    }
    Ok(omega_sharp / d2 * s.dt2 - omega_sharp / d1 * s.dt1 - (s.omega_t2 * s.dt2 - s.omega_t1 * s.dt1))
}

/// Derivative of [`free_arc_curvature_rhs`] in `ω♯`.
pub fn free_arc_curvature_slope(s: &CurvatureState, omega_sharp: f64) -> Result<f64, FreeArcError> {
    let d1 = 1.0 + s.t1 * omega_sharp;
    let d2 = 1.0 + s.t2 * omega_sharp;
    if abs(d1) <= TOL_DEN || abs(d2) <= TOL_DEN {
        return Err(FreeArcError::DegenerateDenominator { value: min(abs(d1), abs(d2)) });
    }
    Ok(s.dt2 / (d2 * d2) - s.dt1 / (d1 * d1))
}

/// Experimental: the free-arc curvature in `[lo, hi]` zeroing the residual.
pub fn solve_free_arc_curvature(s: &CurvatureState, lo: f64, hi: f64) -> Result<f64, FreeArcError> {
    for w in [lo, hi] {
        free_arc_curvature_rhs(s, w)?;
    }
    let f = |w: f64| {
        let r = free_arc_curvature_rhs(s, w).unwrap_or(f64::NAN);
        let d = free_arc_curvature_slope(s, w).unwrap_or(f64::NAN);
        (r, d)
    };
    numeric::safe_newton(f, lo, hi, 1e-15, 200).map(|(x, _, _)| x).ok_or(FreeArcError::NoRoot)
}
