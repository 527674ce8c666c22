//! Split fluxes as half-range moments of a 2D Maxwellian, evaluated by
//! adaptive Gauss–Kronrod quadrature.
#![allow(clippy::excessive_precision)]

use std::f64::consts::PI;

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
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// 15-point Kronrod estimate and its difference from the embedded 7-point
/// Gauss rule.
fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Adaptive bisection until the local error estimate is below
/// `tol · (|I| + scale)`.
pub fn integrate(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn rec(f: &impl Fn(f64) -> f64, a: f64, b: f64, whole: (f64, f64), tol: f64, depth: u32) -> f64 {
        let (v, err) = whole;
        if err <= tol || depth > 40 {
            return v;
        }
        let m = 0.5 * (a + b);
        let l = gk15(f, a, m);
        let r = gk15(f, m, b);
        rec(f, a, m, l, 0.5 * tol, depth + 1) + rec(f, m, b, r, 0.5 * tol, depth + 1)
    }
    let whole = gk15(f, a, b);
    let scale = whole.0.abs().max(1e-300);
    rec(f, a, b, whole, tol * scale, 0)
}

/// Split flux from moments. The Maxwellian factorises, so the normal-velocity
/// half-range moments and the tangential full-range moments are integrated
/// separately (both numerically) and recombined.
pub fn split_flux(w: [f64; 4], gamma: f64, axis: usize, plus: bool) -> [f64; 4] {
    let [rho, u1, u2, p] = w;
    let beta = rho / (2.0 * p);
    let (un, ut) = if axis == 0 { (u1, u2) } else { (u2, u1) };
    let width = 14.0 / beta.sqrt();
    let norm = (beta / PI).sqrt();
    let tol = 1e-11;

    let gauss_n = |v: f64| norm * (-beta * (v - un) * (v - un)).exp();
    let (lo, hi) = if plus {
        (0.0f64.max(un - width), (un + width).max(0.0))
    } else {
        ((un - width).min(0.0), 0.0f64.min(un + width))
    };
    let m = |k: i32| {
        if hi <= lo {
            0.0
        } else {
            integrate(&|v: f64| v.powi(k) * gauss_n(v), lo, hi, tol)
        }
    };
    let (m1, m2, m3) = (m(1), m(2), m(3));

    let gauss_t = |v: f64| norm * (-beta * (v - ut) * (v - ut)).exp();
    let t = |k: i32| integrate(&|v: f64| v.powi(k) * gauss_t(v), ut - width, ut + width, tol);
    let (t0, t1, t2) = (t(0), t(1), t(2));

    // Mean non-translational energy per unit mass.
    let internal = p / rho * (1.0 / (gamma - 1.0) - 1.0);
    let mass = rho * m1 * t0;
    let mom_n = rho * m2 * t0;
    let mom_t = rho * m1 * t1;
    let energy = rho * (0.5 * (m3 * t0 + m1 * t2) + internal * m1 * t0);
    if axis == 0 {
        [mass, mom_n, mom_t, energy]
    } else {
        [mass, mom_t, mom_n, energy]
    }
}
