//! Meshfree least-squares kinetic upwind solver (q-LSKUM) for the
//! two-dimensional Euler equations.
//!
//! The crate is organised around the solver's data flow:
//!
//! - [`cloud`]: point clouds, connectivity, file I/O and desk-scale generators.
//! - [`kinetic`]: per-point mathematics (q-variables, kinetic split fluxes,
//!   least-squares derivatives with defect correction, time step, update).
//! - [`layout`]: interchangeable array-of-structures / structure-of-arrays
//!   storage for per-point fields.
//! - [`runtime`]: partitioning, ghost exchange, the dependency-driven phase
//!   scheduler and deterministic reductions.
//! - [`bench`]: the layout benchmark harness.
//! - [`metrics`]: RDP and relative-performance arithmetic, benchmark reports.

// Range guards are written as `!(x > 0.0)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod cloud;
pub mod config;
pub mod error;
pub mod init;
pub mod kinetic;
pub mod layout;
pub mod metrics;
pub mod runtime;

pub use bench::{bench_layouts, layouts_agree, LayoutRun};
pub use cloud::{
    build_stencils, generate_annular_cloud, generate_rect_cloud, read_point_cloud, split_stencils, validate_cloud,
    write_point_cloud, Bounds, Mesh, PointCloud, PointKind, PointRecord, SplitStencils, ValidationReport,
};
pub use config::{parse_config_text, GridSource, Order, ResidualMode, SolverConfig};
pub use error::{Error, Result};
pub use init::{apply_bump, freestream_init, freestream_state};
pub use kinetic::{Axis, ConservedState, FluxVector, GasModel, PrimitiveState, QState, Sign};
pub use layout::{store_create, store_equivalence_check, AosStore, Field, FieldStore, Layout, SoaStore, Store};
pub use metrics::{rdp, relative_performance, BenchReport, Kernel, KernelTimes};
pub use runtime::{
    deterministic_reduce, partition_cloud, run_fixed_point, run_recorded, ConvergenceHistory, IterationRecord,
    Partitioning, ReduceOp, RunOptions, SchedulePolicy,
};
