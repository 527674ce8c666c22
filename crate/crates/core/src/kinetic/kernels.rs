//! Point kernels of the fixed-point iteration.
//!
//! Every kernel reads geometry from a [`Mesh`] and flow fields from a
//! [`FieldStore`] in the same index space and returns its result; the caller
//! decides where results are written. Point indices in errors are in the
//! mesh's index space.

use super::flux::{kfvs_split_flux, Axis, Sign};
use super::lsq::LeastSquares;
use super::state::{
    conserved_from_primitives, primitives_from_conserved, primitives_from_q, ConservedState, FluxVector, GasModel,
    PrimitiveState, QState,
};
use crate::cloud::{Mesh, PointKind, StencilSide};
use crate::error::{Error, Result};
use crate::layout::{Field, FieldStore};
use crate::runtime::{deterministic_reduce, ReduceOp};

/// One of the four split-flux derivatives making up the residual.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    GxPlus,
    GxMinus,
    GyPlus,
    GyMinus,
}

impl Direction {
    /// Summation order of the residual.
    pub const ALL: [Direction; 4] = [
        Direction::GxPlus,
        Direction::GxMinus,
        Direction::GyPlus,
        Direction::GyMinus,
    ];

    pub fn axis(self) -> Axis {
        match self {
            Direction::GxPlus | Direction::GxMinus => Axis::X,
            Direction::GyPlus | Direction::GyMinus => Axis::Y,
        }
    }

    pub fn sign(self) -> Sign {
        match self {
            Direction::GxPlus | Direction::GyPlus => Sign::Plus,
            Direction::GxMinus | Direction::GyMinus => Sign::Minus,
        }
    }

    /// Upwind stencil: `G+` carries information from the negative side.
    pub fn stencil(self) -> StencilSide {
        match self {
            Direction::GxPlus => StencilSide::XNeg,
            Direction::GxMinus => StencilSide::XPos,
            Direction::GyPlus => StencilSide::YNeg,
            Direction::GyMinus => StencilSide::YPos,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Direction::GxPlus => "gx_plus",
            Direction::GxMinus => "gx_minus",
            Direction::GyPlus => "gy_plus",
            Direction::GyMinus => "gy_minus",
        }
    }
}

/// Free-stream state imposed on outer points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreeStream(pub PrimitiveState);

#[inline]
fn sub4(a: [f64; 4], b: [f64; 4]) -> [f64; 4] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]]
}

/// `q − ½(Δx q_x + Δy q_y)`.
#[inline]
fn corrected(q: [f64; 4], qx: [f64; 4], qy: [f64; 4], dx: f64, dy: f64) -> [f64; 4] {
    std::array::from_fn(|c| q[c] - 0.5 * (dx * qx[c] + dy * qy[c]))
}

fn singular(p: usize, stencil: &'static str, det: f64) -> Error {
    Error::SingularStencil { point: p, stencil, det }
}

/// One least-squares sweep for `(q_x, q_y)` at `p` over its full stencil.
///
/// With `previous = None` the raw differences `Δq_i` are used (first-order
/// initial iterate). With `Some(buf)` the differences of the modified
/// variables `q̃_i − q̃_0` are used, each point corrected with its own
/// derivatives from buffer `buf`.
pub fn q_derivatives<S: FieldStore>(
    mesh: &Mesh,
    store: &S,
    p: usize,
    previous: Option<u8>,
) -> Result<([f64; 4], [f64; 4])> {
    let q0 = store.get4(p, Field::Q);
    let mut acc = LeastSquares::<4>::default();
    match previous {
        None => {
            for &i in mesh.neighbors(p) {
                let i = i as usize;
                let (dx, dy) = mesh.delta(p, i);
                acc.add(dx, dy, sub4(store.get4(i, Field::Q), q0));
            }
        }
        Some(buf) => {
            let qx0 = store.get4(p, Field::Qx(buf));
            let qy0 = store.get4(p, Field::Qy(buf));
            for &i in mesh.neighbors(p) {
                let i = i as usize;
                let (dx, dy) = mesh.delta(p, i);
                let qi = corrected(
                    store.get4(i, Field::Q),
                    store.get4(i, Field::Qx(buf)),
                    store.get4(i, Field::Qy(buf)),
                    dx,
                    dy,
                );
                let q0t = corrected(q0, qx0, qy0, dx, dy);
                acc.add(dx, dy, sub4(qi, q0t));
            }
        }
    }
    acc.solve(mesh.det_tol()).map_err(|s| singular(p, "full", s.det))
}

#[inline]
fn reconstruct(q: [f64; 4], gas: GasModel, p: usize, neighbor: usize) -> Result<PrimitiveState> {
    primitives_from_q(QState(q), gas).map_err(|_| Error::Reconstruction { point: p, neighbor })
}

/// `∂G±/∂x` or `∂G±/∂y` at `p` over the direction's upwind split stencil.
///
/// `q_gradient = Some(buf)` selects the second-order scheme with modified
/// q-variables built from derivative buffer `buf`; `None` gives the
/// first-order scheme on raw q.
pub fn directional_flux_derivative<S: FieldStore>(
    mesh: &Mesh,
    store: &S,
    p: usize,
    dir: Direction,
    gas: GasModel,
    q_gradient: Option<u8>,
) -> Result<FluxVector> {
    let (axis, sign) = (dir.axis(), dir.sign());
    let side = dir.stencil();
    let q0 = store.get4(p, Field::Q);
    let mut acc = LeastSquares::<4>::default();
    match q_gradient {
        None => {
            let g0 = kfvs_split_flux(reconstruct(q0, gas, p, p)?, axis, sign, gas);
            for &i in mesh.split(p, side) {
                let i = i as usize;
                let (dx, dy) = mesh.delta(p, i);
                let gi = kfvs_split_flux(reconstruct(store.get4(i, Field::Q), gas, p, i)?, axis, sign, gas);
                acc.add(dx, dy, (gi - g0).0);
            }
        }
        Some(buf) => {
            let qx0 = store.get4(p, Field::Qx(buf));
            let qy0 = store.get4(p, Field::Qy(buf));
            for &i in mesh.split(p, side) {
                let i = i as usize;
                let (dx, dy) = mesh.delta(p, i);
                let qi = corrected(
                    store.get4(i, Field::Q),
                    store.get4(i, Field::Qx(buf)),
                    store.get4(i, Field::Qy(buf)),
                    dx,
                    dy,
                );
                let q0t = corrected(q0, qx0, qy0, dx, dy);
                let gi = kfvs_split_flux(reconstruct(qi, gas, p, i)?, axis, sign, gas);
                let g0 = kfvs_split_flux(reconstruct(q0t, gas, p, i)?, axis, sign, gas);
                acc.add(dx, dy, (gi - g0).0);
            }
        }
    }
    let (fx, fy) = acc.solve(mesh.det_tol()).map_err(|s| singular(p, side.name(), s.det))?;
    Ok(FluxVector(match axis {
        Axis::X => fx,
        Axis::Y => fy,
    }))
}

/// `∂Gx⁺/∂x + ∂Gx⁻/∂x + ∂Gy⁺/∂y + ∂Gy⁻/∂y` at `p`, summed in that order.
///
/// Outer points are held at free stream and get a zero residual.
pub fn flux_residual<S: FieldStore>(
    mesh: &Mesh,
    store: &S,
    p: usize,
    gas: GasModel,
    q_gradient: Option<u8>,
) -> Result<FluxVector> {
    if !mesh.kind(p).uses_split_stencils() {
        return Ok(FluxVector::ZERO);
    }
    let mut sum = directional_flux_derivative(mesh, store, p, Direction::GxPlus, gas, q_gradient)?;
    for dir in &Direction::ALL[1..] {
        sum += directional_flux_derivative(mesh, store, p, *dir, gas, q_gradient)?;
    }
    Ok(sum)
}

/// `Δt = cfl · d_min / (|u| + a)` with `d_min` the closest stencil distance.
pub fn local_timestep<S: FieldStore>(mesh: &Mesh, store: &S, p: usize, cfl: f64, gas: GasModel) -> f64 {
    let s = PrimitiveState::from_array(store.get4(p, Field::Prim));
    let d_min = mesh
        .neighbors(p)
        .iter()
        .map(|&i| {
            let (dx, dy) = mesh.delta(p, i as usize);
            (dx * dx + dy * dy).sqrt()
        })
        .fold(f64::INFINITY, f64::min);
    cfl * d_min / (s.speed() + s.sound_speed(gas))
}

/// Forward-Euler update `U ← U − Δt·R` followed by the point-kind boundary
/// treatment. Returns the new primitives and `ΔU = U_new − U_old`.
///
/// A zero residual leaves interior states untouched. Wall points are always
/// projected to the tangent, so a start with normal velocity is corrected on
/// the first iteration.
pub fn state_update<S: FieldStore>(
    mesh: &Mesh,
    store: &S,
    p: usize,
    dt: f64,
    residual: FluxVector,
    gas: GasModel,
    free_stream: FreeStream,
) -> Result<(PrimitiveState, FluxVector)> {
    let old = PrimitiveState::from_array(store.get4(p, Field::Prim));
    let kind = mesh.kind(p);
    if kind == PointKind::Outer {
        let new = free_stream.0;
        let du = conserved_from_primitives(new, gas).0;
        let du_old = conserved_from_primitives(old, gas).0;
        return Ok((new, FluxVector(sub4(du, du_old))));
    }
    let u_old = conserved_from_primitives(old, gas).0;
    let mut new = if residual.0.iter().all(|&r| r == 0.0) {
        old
    } else {
        let u_new: [f64; 4] = std::array::from_fn(|c| u_old[c] - dt * residual.0[c]);
        primitives_from_conserved(ConservedState(u_new), gas).map_err(|_| Error::Positivity {
            point: p,
            rho: u_new[0],
            p: (gas.gamma - 1.0) * (u_new[3] - 0.5 * (u_new[1] * u_new[1] + u_new[2] * u_new[2]) / u_new[0]),
        })?
    };
    if kind == PointKind::Wall {
        let [nx, ny] = mesh.normal(p);
        let un = new.u1 * nx + new.u2 * ny;
        new.u1 -= un * nx;
        new.u2 -= un * ny;
    }
    if new == old {
        return Ok((old, FluxVector::ZERO));
    }
    let du = sub4(conserved_from_primitives(new, gas).0, u_old);
    Ok((new, FluxVector(du)))
}

/// `sqrt(Σ ΔU₀²) / n_points`, reduced in ascending point order.
pub fn residue_norm(mass_changes: &[f64], n_points: usize) -> f64 {
    if n_points == 0 {
        return 0.0;
    }
    let squares: Vec<f64> = mass_changes.iter().map(|d| d * d).collect();
    deterministic_reduce(&squares, ReduceOp::Sum).sqrt() / n_points as f64
}
