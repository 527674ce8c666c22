//! Parallel execution of the fixed-point iteration.
//!
//! The cloud is split into partitions of owned ("local") points; each
//! partition also sees the off-partition stencil members it reads ("ghosts").
//! Work is a sequence of phases per outer iteration, executed per partition
//! by a pool of workers as soon as the phase's inputs are complete.

mod driver;
mod exchange;
mod partition;
mod reduce;

pub use driver::{
    phase_plan, run_fixed_point, run_recorded, ConvergenceHistory, IterationRecord, Phase, RunOptions, SchedulePolicy,
};
pub use exchange::{exchange_ghosts, LocalView};
pub use partition::{partition_cloud, Partitioning};
pub use reduce::{deterministic_reduce, ReduceOp};
