use std::ops::{Add, AddAssign, Mul, Sub};

use crate::error::{Error, Result};

/// Ratio of specific heats of a calorically perfect gas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GasModel {
    pub gamma: f64,
}

impl GasModel {
    pub fn new(gamma: f64) -> Result<Self> {
        if !(gamma > 1.0) || !gamma.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "gamma must be finite and > 1, got {gamma}"
            )));
        }
        Ok(GasModel { gamma })
    }
}

impl Default for GasModel {
    fn default() -> Self {
        GasModel { gamma: 1.4 }
    }
}

/// Density, velocity components and pressure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrimitiveState {
    pub rho: f64,
    pub u1: f64,
    pub u2: f64,
    pub p: f64,
}

impl PrimitiveState {
    pub const fn new(rho: f64, u1: f64, u2: f64, p: f64) -> Self {
        PrimitiveState { rho, u1, u2, p }
    }

    pub const fn from_array(a: [f64; 4]) -> Self {
        PrimitiveState::new(a[0], a[1], a[2], a[3])
    }

    pub const fn to_array(self) -> [f64; 4] {
        [self.rho, self.u1, self.u2, self.p]
    }

    pub fn is_physical(&self) -> bool {
        self.rho > 0.0 && self.p > 0.0 && self.u1.is_finite() && self.u2.is_finite()
    }

    pub fn check(self) -> Result<Self> {
        if self.is_physical() {
            Ok(self)
        } else {
            Err(Error::Domain(format!(
                "non-physical state rho = {}, p = {}",
                self.rho, self.p
            )))
        }
    }

    /// β = ρ / 2p.
    #[inline]
    pub fn beta(&self) -> f64 {
        0.5 * self.rho / self.p
    }

    #[inline]
    pub fn sound_speed(&self, gas: GasModel) -> f64 {
        (gas.gamma * self.p / self.rho).sqrt()
    }

    #[inline]
    pub fn speed(&self) -> f64 {
        (self.u1 * self.u1 + self.u2 * self.u2).sqrt()
    }

    /// Total energy per unit volume.
    #[inline]
    pub fn total_energy(&self, gas: GasModel) -> f64 {
        self.p / (gas.gamma - 1.0) + 0.5 * self.rho * (self.u1 * self.u1 + self.u2 * self.u2)
    }
}

/// The q-variables `(ln ρ + ln β/(γ−1) − β|u|², 2βu1, 2βu2, −2β)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QState(pub [f64; 4]);

/// Conserved variables `(ρ, ρu1, ρu2, ρE)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConservedState(pub [f64; 4]);

/// A four-component flux (or flux derivative) vector in conserved ordering.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FluxVector(pub [f64; 4]);

impl FluxVector {
    pub const ZERO: FluxVector = FluxVector([0.0; 4]);

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

impl Add for FluxVector {
    type Output = FluxVector;

    #[inline]
    fn add(self, rhs: FluxVector) -> FluxVector {
        FluxVector(std::array::from_fn(|i| self.0[i] + rhs.0[i]))
    }
}

impl AddAssign for FluxVector {
    #[inline]
    fn add_assign(&mut self, rhs: FluxVector) {
        for (a, b) in self.0.iter_mut().zip(rhs.0) {
            *a += b;
        }
    }
}

impl Sub for FluxVector {
    type Output = FluxVector;

    #[inline]
    fn sub(self, rhs: FluxVector) -> FluxVector {
        FluxVector(std::array::from_fn(|i| self.0[i] - rhs.0[i]))
    }
}

impl Mul<FluxVector> for f64 {
    type Output = FluxVector;

    #[inline]
    fn mul(self, rhs: FluxVector) -> FluxVector {
        FluxVector(rhs.0.map(|v| self * v))
    }
}

pub fn q_from_primitives(s: PrimitiveState, gas: GasModel) -> Result<QState> {
    let s = s.check()?;
    let beta = s.beta();
    let q0 = s.rho.ln() + beta.ln() / (gas.gamma - 1.0) - beta * (s.u1 * s.u1 + s.u2 * s.u2);
    Ok(QState([q0, 2.0 * beta * s.u1, 2.0 * beta * s.u2, -2.0 * beta]))
}

pub fn primitives_from_q(q: QState, gas: GasModel) -> Result<PrimitiveState> {
    let [q0, q1, q2, q3] = q.0;
    if !(q3 < 0.0) {
        return Err(Error::Domain(format!("q3 must be negative, got {q3}")));
    }
    let beta = -0.5 * q3;
    let u1 = q1 / (2.0 * beta);
    let u2 = q2 / (2.0 * beta);
    let rho = (q0 - beta.ln() / (gas.gamma - 1.0) + beta * (u1 * u1 + u2 * u2)).exp();
    let p = rho / (2.0 * beta);
    PrimitiveState::new(rho, u1, u2, p).check()
}

pub fn conserved_from_primitives(s: PrimitiveState, gas: GasModel) -> ConservedState {
    ConservedState([s.rho, s.rho * s.u1, s.rho * s.u2, s.total_energy(gas)])
}

pub fn primitives_from_conserved(u: ConservedState, gas: GasModel) -> Result<PrimitiveState> {
    let [rho, m1, m2, e] = u.0;
    if !(rho > 0.0) {
        return Err(Error::Domain(format!("non-positive density {rho}")));
    }
    let u1 = m1 / rho;
    let u2 = m2 / rho;
    let p = (gas.gamma - 1.0) * (e - 0.5 * rho * (u1 * u1 + u2 * u2));
    PrimitiveState::new(rho, u1, u2, p).check()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const G: GasModel = GasModel { gamma: 1.4 };

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn q_of_unit_stagnant_state() {
        let q = q_from_primitives(PrimitiveState::new(1.0, 0.0, 0.0, 1.0), G).unwrap();
        assert!((q.0[0] - 2.5 * 0.5_f64.ln()).abs() < 1e-15);
        assert!((q.0[0] - (-1.7328679514)).abs() < 1e-10);
        assert_eq!(q.0[1], 0.0);
        assert_eq!(q.0[2], 0.0);
        assert_eq!(q.0[3], -1.0);
    }

    #[test]
    fn q_of_moving_state() {
        let q = q_from_primitives(PrimitiveState::new(1.0, 1.0, 0.0, 1.0), G).unwrap();
        assert!((q.0[1] - 1.0).abs() < 1e-15);
        assert!((q.0[0] - (-1.7328679514 - 0.5)).abs() < 1e-10);
    }

    #[test]
    fn primitives_of_reference_q() {
        let s = primitives_from_q(QState([2.5 * 0.5_f64.ln(), 0.0, 0.0, -1.0]), G).unwrap();
        assert!(rel(s.rho, 1.0) < 1e-14);
        assert!(rel(s.p, 1.0) < 1e-14);
        assert_eq!(s.u1, 0.0);
        assert_eq!(s.u2, 0.0);
    }

    #[test]
    fn q3_must_be_negative() {
        assert!(matches!(
            primitives_from_q(QState([0.0, 0.0, 0.0, 0.0]), G),
            Err(Error::Domain(_))
        ));
        assert!(primitives_from_q(QState([0.0, 0.0, 0.0, 0.5]), G).is_err());
    }

    #[test]
    fn non_positive_states_rejected() {
        assert!(q_from_primitives(PrimitiveState::new(0.0, 0.0, 0.0, 1.0), G).is_err());
        assert!(q_from_primitives(PrimitiveState::new(1.0, 0.0, 0.0, -1.0), G).is_err());
        assert!(primitives_from_conserved(ConservedState([1.0, 0.0, 0.0, 0.0]), G).is_err());
        assert!(primitives_from_conserved(ConservedState([-1.0, 0.0, 0.0, 1.0]), G).is_err());
    }

    #[test]
    fn conserved_examples() {
        let u = conserved_from_primitives(PrimitiveState::new(1.0, 0.0, 0.0, 1.0), G);
        assert_eq!(&u.0[..3], &[1.0, 0.0, 0.0]);
        assert!((u.0[3] - 2.5).abs() < 1e-15);
        let s = primitives_from_conserved(ConservedState([1.0, 1.0, 0.0, 3.0]), G).unwrap();
        assert_eq!(s.rho, 1.0);
        assert_eq!(s.u1, 1.0);
        assert_eq!(s.u2, 0.0);
        assert!((s.p - 1.0).abs() < 1e-15);
    }

    #[test]
    fn gas_model_rejects_gamma_at_most_one() {
        assert!(GasModel::new(1.0).is_err());
        assert!(GasModel::new(f64::NAN).is_err());
        assert_eq!(GasModel::new(1.4).unwrap(), GasModel::default());
    }

    fn state() -> impl Strategy<Value = PrimitiveState> {
        (0.05f64..20.0, -5.0f64..5.0, -5.0f64..5.0, 0.05f64..20.0)
            .prop_map(|(rho, u1, u2, p)| PrimitiveState::new(rho, u1, u2, p))
    }

    proptest! {
        #[test]
        fn q_round_trip(s in state()) {
            let back = primitives_from_q(q_from_primitives(s, G).unwrap(), G).unwrap();
            prop_assert!(rel(back.rho, s.rho) < 1e-12);
            prop_assert!(rel(back.p, s.p) < 1e-12);
            prop_assert!((back.u1 - s.u1).abs() <= 1e-12 * s.u1.abs().max(s.speed()).max(1e-300));
            prop_assert!((back.u2 - s.u2).abs() <= 1e-12 * s.u2.abs().max(s.speed()).max(1e-300));
        }

        #[test]
        fn conserved_round_trip(s in state()) {
            let back = primitives_from_conserved(conserved_from_primitives(s, G), G).unwrap();
            prop_assert!(rel(back.rho, s.rho) < 1e-13);
            // p is recovered from ρE − ρ|u|²/2, so its error scales with the kinetic part.
            let e_scale = s.total_energy(G) * (G.gamma - 1.0);
            prop_assert!((back.p - s.p).abs() < 1e-13 * e_scale.max(s.p));
            prop_assert!((back.u1 - s.u1).abs() < 1e-13 * s.speed().max(1e-300));
        }

        #[test]
        fn q3_negative(s in state()) {
            prop_assert!(q_from_primitives(s, G).unwrap().0[3] < 0.0);
        }
    }
}
