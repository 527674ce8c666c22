//! Layout benchmark harness shared by the CLI and the tests.

use crate::cloud::PointCloud;
use crate::error::Result;
use crate::layout::{store_equivalence_check, Layout, Store};
use crate::runtime::{run_fixed_point, ConvergenceHistory, Partitioning, RunOptions};

/// One timed run of the configured problem in a given layout.
#[derive(Debug, Clone)]
pub struct LayoutRun {
    pub layout: Layout,
    pub history: ConvergenceHistory,
    pub store: Store,
}

/// Runs an initialised cloud once per layout from the same starting state.
pub fn bench_layouts(
    base: &PointCloud,
    part: &Partitioning,
    opts: &RunOptions,
    layouts: &[Layout],
) -> Result<Vec<LayoutRun>> {
    layouts
        .iter()
        .map(|&layout| {
            let mut cloud = base.clone().with_layout(layout);
            let history = run_fixed_point(&mut cloud, part, opts)?;
            Ok(LayoutRun {
                layout,
                history,
                store: cloud.store,
            })
        })
        .collect()
}

/// True when every run produced the same residues and final fields bitwise.
pub fn layouts_agree(runs: &[LayoutRun]) -> Result<bool> {
    let Some(first) = runs.first() else {
        return Ok(true);
    };
    let bits = |h: &ConvergenceHistory| h.residues().iter().map(|r| r.to_bits()).collect::<Vec<_>>();
    for run in &runs[1..] {
        if bits(&run.history) != bits(&first.history) || !store_equivalence_check(&first.store, &run.store)? {
            return Ok(false);
        }
    }
    Ok(true)
}
