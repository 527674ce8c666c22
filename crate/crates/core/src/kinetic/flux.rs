//! Euler fluxes and their kinetic (half-range Maxwellian) splits.

use std::f64::consts::PI;

use super::state::{FluxVector, GasModel, PrimitiveState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    #[inline]
    fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// Full inviscid flux along `axis`.
pub fn full_flux(s: PrimitiveState, axis: Axis, gas: GasModel) -> FluxVector {
    let (un, ut) = normal_tangential(s, axis);
    let energy = s.total_energy(gas);
    let mass = s.rho * un;
    let normal_momentum = s.p + s.rho * un * un;
    let tangential_momentum = mass * ut;
    orient(axis, [mass, normal_momentum, tangential_momentum, (energy + s.p) * un])
}

/// Kinetic split flux `G±` along `axis`: the `v_n ≷ 0` half-range moments of
/// the Maxwellian.
///
/// With `s = u_n √β`, `A± = (1 ± erf s)/2` and `B = exp(−s²) / (2√(πβ))`:
///
/// ```text
/// G±[mass]       = ρ (u_n A± ± B)
/// G±[normal]     = (p + ρ u_n²) A± ± ρ u_n B
/// G±[tangential] = ρ u_t (u_n A± ± B)
/// G±[energy]     = (ρE + p) u_n A± ± (ρE + p/2) B
/// ```
#[inline]
pub fn kfvs_split_flux(s: PrimitiveState, axis: Axis, sign: Sign, gas: GasModel) -> FluxVector {
    let (un, ut) = normal_tangential(s, axis);
    let beta = s.beta();
    let sqrt_beta = beta.sqrt();
    let sn = un * sqrt_beta;
    let sg = sign.value();
    // erfc keeps A± accurate in the far tails where 1 ± erf(s) cancels.
    let a = 0.5 * libm::erfc(-sg * sn);
    let b = sg * (-sn * sn).exp() / (2.0 * (PI * beta).sqrt());
    let energy = s.total_energy(gas);
    let mass = s.rho * (un * a + b);
    let normal_momentum = (s.p + s.rho * un * un) * a + s.rho * un * b;
    let tangential_momentum = s.rho * ut * (un * a + b);
    let energy_flux = (energy + s.p) * un * a + (energy + 0.5 * s.p) * b;
    orient(axis, [mass, normal_momentum, tangential_momentum, energy_flux])
}

#[inline]
fn normal_tangential(s: PrimitiveState, axis: Axis) -> (f64, f64) {
    match axis {
        Axis::X => (s.u1, s.u2),
        Axis::Y => (s.u2, s.u1),
    }
}

#[inline]
fn orient(axis: Axis, [m, n, t, e]: [f64; 4]) -> FluxVector {
    match axis {
        Axis::X => FluxVector([m, n, t, e]),
        Axis::Y => FluxVector([m, t, n, e]),
    }
}
