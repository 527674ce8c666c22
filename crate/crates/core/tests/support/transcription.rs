//! Straight transcription of the point formulas on plain arrays.
//!
//! Nothing here calls into the library's kernels; state transforms, split
//! fluxes, stencil filtering and the 2×2 solves are written out again from
//! the formulas so the library can be compared against them.

use std::f64::consts::PI;

pub const GAMMA: f64 = 1.4;

/// Neighbour gradients `(qx, qy)` for the defect correction.
pub type Grad<'a> = Option<(&'a [[f64; 4]], &'a [[f64; 4]])>;

/// `(ρ, u1, u2, p)` → q.
pub fn q_of(w: [f64; 4]) -> [f64; 4] {
    let [rho, u1, u2, p] = w;
    let beta = rho / (2.0 * p);
    [
        rho.ln() + beta.ln() / (GAMMA - 1.0) - beta * (u1 * u1 + u2 * u2),
        2.0 * beta * u1,
        2.0 * beta * u2,
        -2.0 * beta,
    ]
}

/// q → `(ρ, u1, u2, p)`.
pub fn prim_of(q: [f64; 4]) -> [f64; 4] {
    let beta = -0.5 * q[3];
    let u1 = q[1] / (2.0 * beta);
    let u2 = q[2] / (2.0 * beta);
    let rho = (q[0] - beta.ln() / (GAMMA - 1.0) + beta * (u1 * u1 + u2 * u2)).exp();
    [rho, u1, u2, rho / (2.0 * beta)]
}

fn erf(x: f64) -> f64 {
    libm::erf(x)
}

/// Split flux along x (`axis = 0`) or y (`axis = 1`); `plus` picks the sign.
pub fn split_flux(w: [f64; 4], axis: usize, plus: bool) -> [f64; 4] {
    let [rho, u1, u2, p] = w;
    let (un, ut) = if axis == 0 { (u1, u2) } else { (u2, u1) };
    let beta = rho / (2.0 * p);
    let s = un * beta.sqrt();
    let sg = if plus { 1.0 } else { -1.0 };
    let a = 0.5 * (1.0 + sg * erf(s));
    let b = sg * 0.5 * (-s * s).exp() / (PI * beta).sqrt();
    let re = p / (GAMMA - 1.0) + 0.5 * rho * (u1 * u1 + u2 * u2);
    let mass = rho * (un * a + b);
    let mom_n = (p + rho * un * un) * a + rho * un * b;
    let mom_t = rho * ut * (un * a + b);
    let energy = (re + p) * un * a + (re + 0.5 * p) * b;
    if axis == 0 {
        [mass, mom_n, mom_t, energy]
    } else {
        [mass, mom_t, mom_n, energy]
    }
}

pub fn full_flux(w: [f64; 4], axis: usize) -> [f64; 4] {
    let [rho, u1, u2, p] = w;
    let un = if axis == 0 { u1 } else { u2 };
    let re = p / (GAMMA - 1.0) + 0.5 * rho * (u1 * u1 + u2 * u2);
    let mut f = [rho * un, rho * un * u1, rho * un * u2, (re + p) * un];
    if axis == 0 {
        f[1] += p;
    } else {
        f[2] += p;
    }
    f
}

/// Weighted 2×2 normal-equation solve by Cramer's rule, per component.
pub fn lsq(pairs: &[(f64, f64, [f64; 4])]) -> ([f64; 4], [f64; 4]) {
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    let (mut sxf, mut syf) = ([0.0; 4], [0.0; 4]);
    for &(dx, dy, df) in pairs {
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
        for c in 0..4 {
            sxf[c] += dx * df[c];
            syf[c] += dy * df[c];
        }
    }
    let det = sxx * syy - sxy * sxy;
    let mut fx = [0.0; 4];
    let mut fy = [0.0; 4];
    for c in 0..4 {
        fx[c] = (syy * sxf[c] - sxy * syf[c]) / det;
        fy[c] = (sxx * syf[c] - sxy * sxf[c]) / det;
    }
    (fx, fy)
}

/// Cloud geometry on plain arrays.
pub struct Plain {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub nbhs: Vec<Vec<usize>>,
}

impl Plain {
    fn d(&self, p: usize, i: usize) -> (f64, f64) {
        (self.x[i] - self.x[p], self.y[i] - self.y[p])
    }

    /// Upwind subset for a flux: G+ reads the side with Δ ≤ 0, G− the side
    /// with Δ ≥ 0 (zero offsets land in both).
    fn upwind(&self, p: usize, axis: usize, plus: bool) -> Vec<usize> {
        self.nbhs[p]
            .iter()
            .copied()
            .filter(|&i| {
                let (dx, dy) = self.d(p, i);
                let t = if axis == 0 { dx } else { dy };
                if plus {
                    t <= 0.0
                } else {
                    t >= 0.0
                }
            })
            .collect()
    }

    /// One derivative sweep; `grad = None` is the raw-difference estimate.
    pub fn q_sweep(&self, q: &[[f64; 4]], grad: Grad<'_>) -> (Vec<[f64; 4]>, Vec<[f64; 4]>) {
        let n = q.len();
        let mut qx = vec![[0.0; 4]; n];
        let mut qy = vec![[0.0; 4]; n];
        for p in 0..n {
            let pairs: Vec<_> = self.nbhs[p]
                .iter()
                .map(|&i| {
                    let (dx, dy) = self.d(p, i);
                    let df = match grad {
                        None => std::array::from_fn(|c| q[i][c] - q[p][c]),
                        Some((gx, gy)) => std::array::from_fn(|c| {
                            let ti = q[i][c] - 0.5 * (dx * gx[i][c] + dy * gy[i][c]);
                            let t0 = q[p][c] - 0.5 * (dx * gx[p][c] + dy * gy[p][c]);
                            ti - t0
                        }),
                    };
                    (dx, dy, df)
                })
                .collect();
            (qx[p], qy[p]) = lsq(&pairs);
        }
        (qx, qy)
    }

    /// Derivatives after the initial estimate and `n_inner` Jacobi sweeps.
    pub fn q_derivatives(&self, q: &[[f64; 4]], n_inner: usize) -> (Vec<[f64; 4]>, Vec<[f64; 4]>) {
        let (mut gx, mut gy) = self.q_sweep(q, None);
        for _ in 0..n_inner {
            (gx, gy) = self.q_sweep(q, Some((&gx, &gy)));
        }
        (gx, gy)
    }

    /// Residual at `p`: Σ of the four upwind split-flux derivatives.
    /// `grad = None` gives the first-order scheme.
    pub fn residual(&self, q: &[[f64; 4]], grad: Grad<'_>, p: usize) -> [f64; 4] {
        let mut r = [0.0; 4];
        for (axis, plus) in [(0, true), (0, false), (1, true), (1, false)] {
            let pairs: Vec<_> = self
                .upwind(p, axis, plus)
                .into_iter()
                .map(|i| {
                    let (dx, dy) = self.d(p, i);
                    let (qi, q0) = match grad {
                        None => (q[i], q[p]),
                        Some((gx, gy)) => (
                            std::array::from_fn(|c| q[i][c] - 0.5 * (dx * gx[i][c] + dy * gy[i][c])),
                            std::array::from_fn(|c| q[p][c] - 0.5 * (dx * gx[p][c] + dy * gy[p][c])),
                        ),
                    };
                    let gi = split_flux(prim_of(qi), axis, plus);
                    let g0 = split_flux(prim_of(q0), axis, plus);
                    (dx, dy, std::array::from_fn(|c| gi[c] - g0[c]))
                })
                .collect();
            let (fx, fy) = lsq(&pairs);
            let d = if axis == 0 { fx } else { fy };
            for c in 0..4 {
                r[c] += d[c];
            }
        }
        r
    }
}
