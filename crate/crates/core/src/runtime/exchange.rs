use super::partition::Partitioning;

/// Ghost values one partition takes from one owner.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GhostBlock {
    pub owner: usize,
    /// Slots in this partition's local index space.
    pub local: Vec<usize>,
    /// Matching slots in the owner's local index space.
    pub remote: Vec<usize>,
}

/// Local index space of one partition: owned points first, then ghosts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalView {
    pub part: usize,
    /// Global id of every local slot.
    pub global: Vec<usize>,
    pub n_owned: usize,
    /// Ghost sources grouped by owning partition, ascending.
    pub blocks: Vec<GhostBlock>,
}

impl LocalView {
    /// Builds the local views of every partition.
    pub fn build_all(part: &Partitioning) -> Vec<LocalView> {
        // Owned points sit at their rank within the owner's locals.
        let mut slot = vec![0usize; part.color.len()];
        for locals in &part.locals {
            for (l, &g) in locals.iter().enumerate() {
                slot[g] = l;
            }
        }
        (0..part.n_parts)
            .map(|p| {
                let locals = &part.locals[p];
                let ghosts = &part.ghosts[p];
                let mut global = Vec::with_capacity(locals.len() + ghosts.len());
                global.extend_from_slice(locals);
                global.extend_from_slice(ghosts);
                let mut blocks: Vec<GhostBlock> = Vec::new();
                let mut by_owner: Vec<(usize, usize, usize)> = ghosts
                    .iter()
                    .enumerate()
                    .map(|(j, &g)| (part.color[g], locals.len() + j, slot[g]))
                    .collect();
                by_owner.sort_unstable();
                for (owner, local, remote) in by_owner {
                    match blocks.last_mut() {
                        Some(b) if b.owner == owner => {
                            b.local.push(local);
                            b.remote.push(remote);
                        }
                        _ => blocks.push(GhostBlock {
                            owner,
                            local: vec![local],
                            remote: vec![remote],
                        }),
                    }
                }
                LocalView {
                    part: p,
                    global,
                    n_owned: locals.len(),
                    blocks,
                }
            })
            .collect()
    }

    pub fn n_ghosts(&self) -> usize {
        self.global.len() - self.n_owned
    }
}

/// Per-partition snapshots of a globally indexed field, in each partition's
/// local order (owned values, then ghost values).
///
/// This is the copy realisation of ghost visibility; the solver itself
/// gathers straight from the owners' stores once their phase is complete.
pub fn exchange_ghosts<T: Copy>(field: &[T], part: &Partitioning) -> Vec<Vec<T>> {
    (0..part.n_parts)
        .map(|p| {
            part.locals[p]
                .iter()
                .chain(part.ghosts[p].iter())
                .map(|&g| field[g])
                .collect()
        })
        .collect()
}
