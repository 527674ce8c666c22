//! Per-point LSKUM mathematics.

mod flux;
mod kernels;
mod lsq;
mod state;

pub use flux::{full_flux, kfvs_split_flux, Axis, Sign};
pub use kernels::{
    directional_flux_derivative, flux_residual, local_timestep, q_derivatives, residue_norm, state_update, Direction,
    FreeStream,
};
pub use lsq::{ls_derivatives, LeastSquares, SingularSystem};
pub use state::{
    conserved_from_primitives, primitives_from_conserved, primitives_from_q, q_from_primitives, ConservedState,
    FluxVector, GasModel, PrimitiveState, QState,
};
