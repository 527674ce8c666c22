//! Fixtures for the criterion benchmarks.

use lskum_core::{partition_cloud, Layout, Partitioning, PointCloud, ResidualMode, RunOptions, SolverConfig};

/// A prepared solver run: initialised cloud, partitioning and options.
pub struct Fixture {
    pub cloud: PointCloud,
    pub part: Partitioning,
    pub opts: RunOptions,
}

/// Bump problem on an `n`×`n` jittered lattice at a stable CFL.
pub fn bump_fixture(n: usize, iters: usize, layout: Layout, mode: ResidualMode, parts: usize) -> Fixture {
    let dims = format!("{n}x{n}");
    let iters = iters.to_string();
    let mut cfg = SolverConfig::from_pairs([
        ("generate", dims.as_str()),
        ("jitter", "0.1"),
        ("bump", "0.05"),
        ("bump-radius", "0.2"),
        ("cfl", "0.3"),
        ("iters", iters.as_str()),
    ])
    .expect("valid fixture configuration");
    cfg.layout = layout;
    cfg.residual_mode = mode;
    cfg.n_parts = parts;
    let mut cloud = cfg.build_cloud().expect("fixture cloud");
    cfg.initialize(&mut cloud).expect("fixture state");
    let part = partition_cloud(&cloud, parts).expect("fixture partition");
    let opts = cfg.run_options().expect("fixture options");
    Fixture { cloud, part, opts }
}
