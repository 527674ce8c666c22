//! Throughput metrics and per-kernel timing.

use std::fmt;

use crate::error::{Error, Result};

/// Wall seconds per iteration per point.
pub fn rdp(wall_seconds: f64, iterations: usize, n_points: usize) -> Result<f64> {
    if iterations == 0 || n_points == 0 {
        return Err(Error::Domain(format!(
            "rdp needs iterations and points > 0 (got {iterations}, {n_points})"
        )));
    }
    Ok(wall_seconds / iterations as f64 / n_points as f64)
}

/// Ratio of a test RDP to a reference RDP; above 1 means slower.
pub fn relative_performance(rdp_test: f64, rdp_reference: f64) -> Result<f64> {
    if rdp_reference == 0.0 {
        return Err(Error::Domain("reference rdp is zero".into()));
    }
    Ok(rdp_test / rdp_reference)
}

/// Timed units of work in one outer iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kernel {
    QVariables,
    QDerivatives,
    FluxResidual,
    FluxGxPlus,
    FluxGxMinus,
    FluxGyPlus,
    FluxGyMinus,
    Timestep,
    StateUpdate,
    Residue,
}

impl Kernel {
    pub const ALL: [Kernel; 10] = [
        Kernel::QVariables,
        Kernel::QDerivatives,
        Kernel::FluxResidual,
        Kernel::FluxGxPlus,
        Kernel::FluxGxMinus,
        Kernel::FluxGyPlus,
        Kernel::FluxGyMinus,
        Kernel::Timestep,
        Kernel::StateUpdate,
        Kernel::Residue,
    ];

    /// Kernels that partition the iteration (split passes roll up into
    /// `FluxResidual`).
    pub const TOP_LEVEL: [Kernel; 6] = [
        Kernel::QVariables,
        Kernel::QDerivatives,
        Kernel::FluxResidual,
        Kernel::Timestep,
        Kernel::StateUpdate,
        Kernel::Residue,
    ];

    pub const SPLIT: [Kernel; 4] = [
        Kernel::FluxGxPlus,
        Kernel::FluxGxMinus,
        Kernel::FluxGyPlus,
        Kernel::FluxGyMinus,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Kernel::QVariables => "q_variables",
            Kernel::QDerivatives => "q_derivatives",
            Kernel::FluxResidual => "flux_residual",
            Kernel::FluxGxPlus => "flux_gx_plus",
            Kernel::FluxGxMinus => "flux_gx_minus",
            Kernel::FluxGyPlus => "flux_gy_plus",
            Kernel::FluxGyMinus => "flux_gy_minus",
            Kernel::Timestep => "timestep",
            Kernel::StateUpdate => "state_update",
            Kernel::Residue => "residue",
        }
    }

    pub fn is_split_pass(self) -> bool {
        Kernel::SPLIT.contains(&self)
    }
}

impl fmt::Display for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Accumulated seconds per kernel.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct KernelTimes {
    seconds: [f64; 10],
}

impl KernelTimes {
    pub fn add(&mut self, kernel: Kernel, seconds: f64) {
        self.seconds[kernel as usize] += seconds;
    }

    pub fn get(&self, kernel: Kernel) -> f64 {
        self.seconds[kernel as usize]
    }

    pub fn merge(&mut self, other: &KernelTimes) {
        for (a, b) in self.seconds.iter_mut().zip(other.seconds) {
            *a += b;
        }
    }

    pub fn scale(&mut self, factor: f64) {
        for s in &mut self.seconds {
            *s *= factor;
        }
    }

    /// Sum over the top-level kernels.
    pub fn total(&self) -> f64 {
        Kernel::TOP_LEVEL.iter().map(|&k| self.get(k)).sum()
    }
}

/// Timing summary of one solver run.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub total_seconds: f64,
    pub iterations: usize,
    pub n_points: usize,
    /// Whether the residual ran as four separate passes.
    pub split: bool,
    pub kernels: KernelTimes,
}

impl BenchReport {
    /// Whole-run RDP; `None` when nothing ran.
    pub fn rdp(&self) -> Option<f64> {
        rdp(self.total_seconds, self.iterations, self.n_points).ok()
    }

    pub fn kernel_rdp(&self, kernel: Kernel) -> Option<f64> {
        rdp(self.kernels.get(kernel), self.iterations, self.n_points).ok()
    }

    /// Rows reported for this run: the top-level kernels, plus the four
    /// split passes when the residual was split.
    pub fn rows(&self) -> Vec<(Kernel, f64, Option<f64>)> {
        let mut kernels: Vec<Kernel> = Kernel::TOP_LEVEL.to_vec();
        if self.split {
            kernels.splice(3..3, Kernel::SPLIT);
        }
        kernels
            .into_iter()
            .map(|k| (k, self.kernels.get(k), self.kernel_rdp(k)))
            .collect()
    }

    /// Top-level kernels sorted by decreasing time.
    pub fn ranked(&self) -> Vec<(Kernel, f64)> {
        let mut v: Vec<_> = Kernel::TOP_LEVEL.iter().map(|&k| (k, self.kernels.get(k))).collect();
        v.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        v
    }
}
