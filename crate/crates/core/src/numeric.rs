//! Small numerical kernels shared by the solvers: RK4, bracketing root
//! finders, golden-section search and adaptive Gauss-Kronrod quadrature.

use alloc::collections::BinaryHeap;
use core::cmp::Ordering;

use crate::math::{abs, max, sqrt};

/// One classical Runge-Kutta step for an autonomous-or-not system of size `N`.
pub fn rk4_step<const N: usize, F>(f: &mut F, t: f64, y: &[f64; N], h: f64) -> [f64; N]
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    let k1 = f(t, y);
    let mut tmp = [0.0; N];
    for i in 0..N {
        tmp[i] = y[i] + 0.5 * h * k1[i];
    }
    let k2 = f(t + 0.5 * h, &tmp);
    for i in 0..N {
        tmp[i] = y[i] + 0.5 * h * k2[i];
    }
    let k3 = f(t + 0.5 * h, &tmp);
    for i in 0..N {
        tmp[i] = y[i] + h * k3[i];
    }
    let k4 = f(t + h, &tmp);
    let mut out = [0.0; N];
    for i in 0..N {
        out[i] = y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

/// Integrates `y' = f(t, y)` from `t0` to `t1` with `n` equal RK4 steps.
pub fn rk4_fixed<const N: usize, F>(mut f: F, t0: f64, y0: [f64; N], t1: f64, n: usize) -> [f64; N]
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    let h = (t1 - t0) / n as f64;
    let mut y = y0;
    for i in 0..n {
        y = rk4_step(&mut f, t0 + i as f64 * h, &y, h);
    }
    y
}

/// Bisection on a sign change. Returns `None` when `f(lo)` and `f(hi)` agree in sign.
pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, tol: f64, max_iter: usize) -> Option<f64> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Some(lo);
    }
    if fhi == 0.0 {
        return Some(hi);
    }
    if (flo > 0.0) == (fhi > 0.0) {
        return None;
    }
    for _ in 0..max_iter {
        let mid = 0.5 * (lo + hi);
        if abs(hi - lo) <= tol {
            return Some(mid);
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Some(mid);
        }
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Newton iteration kept inside a sign-change bracket; falls back to
/// bisection whenever the Newton step leaves the bracket or stalls.
pub fn safe_newton<F: FnMut(f64) -> (f64, f64)>(
    mut f: F,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
    max_iter: usize,
) -> Option<(f64, f64, usize)> {
    let (flo, _) = f(lo);
    let (fhi, _) = f(hi);
    if flo == 0.0 {
        return Some((lo, 0.0, 0));
    }
    if fhi == 0.0 {
        return Some((hi, 0.0, 0));
    }
    if (flo > 0.0) == (fhi > 0.0) {
        return None;
    }
    if flo > 0.0 {
        core::mem::swap(&mut lo, &mut hi);
    }
    // now f(lo) < 0 < f(hi)
    let mut x = 0.5 * (lo + hi);
    let mut dx_old = abs(hi - lo);
    let mut dx = dx_old;
    let (mut fx, mut dfx) = f(x);
    for it in 0..max_iter {
        let out_of_bracket = ((x - hi) * dfx - fx) * ((x - lo) * dfx - fx) > 0.0;
        if out_of_bracket || abs(2.0 * fx) > abs(dx_old * dfx) || dfx == 0.0 {
            dx_old = dx;
            dx = 0.5 * (hi - lo);
            x = lo + dx;
        } else {
            dx_old = dx;
            dx = fx / dfx;
            x -= dx;
        }
        if abs(dx) < tol {
            let (fv, _) = f(x);
            return Some((x, fv, it + 1));
        }
        let r = f(x);
        fx = r.0;
        dfx = r.1;
        if fx == 0.0 {
            return Some((x, 0.0, it + 1));
        }
        if fx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
    }
    Some((x, fx, max_iter))
}

/// Golden-section search for a maximum of a unimodal function on `[lo, hi]`.
pub fn golden_max<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let r = 0.5 * (sqrt(5.0) - 1.0);
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut n = 0;
    while hi - lo > tol && n < 200 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1);
        }
        n += 1;
    }
    if f1 > f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

// Kronrod nodes and weights, quoted to more digits than f64 holds
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// One 7/15-point Gauss-Kronrod panel: (estimate, error estimate).
pub fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut rk = fc * WGK[7];
    let mut rg = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        rk += WGK[j] * s;
        if j % 2 == 1 {
            rg += WG[j / 2] * s;
        }
    }
    (rk * h, abs((rk - rg) * h))
}

/// Outcome of [`integrate`].
#[derive(Clone, Copy, Debug)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
    pub panels: usize,
    pub converged: bool,
}

/// Panel budget of [`integrate`].
pub const MAX_PANELS: usize = 4000;

#[derive(PartialEq)]
struct Panel {
    a: f64,
    b: f64,
    est: f64,
    err: f64,
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for Panel {
    fn cmp(&self, o: &Self) -> Ordering {
        self.err.total_cmp(&o.err)
    }
}

/// Globally adaptive Gauss-Kronrod quadrature: the panel with the largest
/// error estimate is bisected until the total error meets
/// `max(abs_tol, rel_tol·|value|)` or [`MAX_PANELS`] is reached. The budget
/// keeps integrands with a roundoff floor above the tolerance from running
/// away; `converged` reports whether the tolerance was met.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Quadrature {
    let (est, err) = gk15(&mut f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Panel { a, b, est, err });
    let (mut value, mut error) = (est, err);
    while error > max(abs_tol, rel_tol * abs(value)) && heap.len() < MAX_PANELS {
        let p = heap.pop().expect("heap is never empty");
        let m = 0.5 * (p.a + p.b);
        if !(m > p.a && m < p.b) {
            heap.push(Panel { err: 0.0, ..p });
            error -= p.err;
            continue;
        }
        let (l, el) = gk15(&mut f, p.a, m);
        let (r, er) = gk15(&mut f, m, p.b);
        value += l + r - p.est;
        error += el + er - p.err;
        heap.push(Panel { a: p.a, b: m, est: l, err: el });
        heap.push(Panel { a: m, b: p.b, est: r, err: er });
    }
    // re-sum to shed the drift of the running updates
    let value = heap.iter().map(|p| p.est).sum::<f64>();
    let error = heap.iter().map(|p| p.err).sum::<f64>();
    Quadrature { value, error, panels: heap.len(), converged: error <= max(abs_tol, rel_tol * abs(value)) }
}
