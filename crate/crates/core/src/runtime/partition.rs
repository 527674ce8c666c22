use std::collections::BTreeSet;

use crate::cloud::PointCloud;
use crate::error::{Error, Result};

/// Point-to-partition colouring with local and ghost index sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partitioning {
    pub n_parts: usize,
    /// Partition owning each point.
    pub color: Vec<usize>,
    /// Owned point ids per partition, ascending.
    pub locals: Vec<Vec<usize>>,
    /// Non-owned ids read by owned stencils, ascending.
    pub ghosts: Vec<Vec<usize>>,
}

impl Partitioning {
    /// Derives local and ghost sets from a colouring.
    pub fn from_colors(cloud: &PointCloud, n_parts: usize, color: Vec<usize>) -> Result<Self> {
        if color.len() != cloud.n_points() {
            return Err(Error::InvalidArgument(format!(
                "colouring covers {} of {} points",
                color.len(),
                cloud.n_points()
            )));
        }
        let mut locals = vec![Vec::new(); n_parts];
        for (id, &c) in color.iter().enumerate() {
            if c >= n_parts {
                return Err(Error::InvalidArgument(format!(
                    "point {id} has colour {c} >= {n_parts}"
                )));
            }
            locals[c].push(id);
        }
        let ghosts = locals
            .iter()
            .enumerate()
            .map(|(part, owned)| {
                owned
                    .iter()
                    .flat_map(|&p| cloud.points[p].nbhs.iter().copied())
                    .filter(|&i| color[i] != part)
                    .collect::<BTreeSet<_>>()
                    .into_iter()
                    .collect()
            })
            .collect();
        Ok(Partitioning {
            n_parts,
            color,
            locals,
            ghosts,
        })
    }

    /// Partitions that exchange ghosts with each partition (symmetric).
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![BTreeSet::new(); self.n_parts];
        for (part, ghosts) in self.ghosts.iter().enumerate() {
            for &g in ghosts {
                let owner = self.color[g];
                adj[part].insert(owner);
                adj[owner].insert(part);
            }
        }
        adj.into_iter().map(|s| s.into_iter().collect()).collect()
    }
}

/// Recursive coordinate bisection into `n_parts` parts.
///
/// Each step cuts the current set across the longer side of its bounding box
/// at the (weighted) median, ordering points by coordinate and then id.
pub fn partition_cloud(cloud: &PointCloud, n_parts: usize) -> Result<Partitioning> {
    let n = cloud.n_points();
    if n_parts == 0 || n_parts > n {
        return Err(Error::InvalidArgument(format!(
            "n_parts must lie in 1..={n}, got {n_parts}"
        )));
    }
    let mut color = vec![0usize; n];
    let mut ids: Vec<usize> = (0..n).collect();
    let mut next_color = 0;
    bisect(cloud, &mut ids, n_parts, &mut next_color, &mut color);
    Partitioning::from_colors(cloud, n_parts, color)
}

fn bisect(cloud: &PointCloud, ids: &mut [usize], parts: usize, next: &mut usize, color: &mut [usize]) {
    if parts == 1 {
        for &i in ids.iter() {
            color[i] = *next;
        }
        *next += 1;
        return;
    }
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for &i in ids.iter() {
        let p = &cloud.points[i];
        x0 = x0.min(p.x);
        x1 = x1.max(p.x);
        y0 = y0.min(p.y);
        y1 = y1.max(p.y);
    }
    let along_x = x1 - x0 >= y1 - y0;
    ids.sort_by(|&a, &b| {
        let (pa, pb) = (&cloud.points[a], &cloud.points[b]);
        let (ka, kb) = if along_x { (pa.x, pb.x) } else { (pa.y, pb.y) };
        ka.total_cmp(&kb).then(a.cmp(&b))
    });
    let left_parts = parts / 2;
    let cut = ids.len() * left_parts / parts;
    let (left, right) = ids.split_at_mut(cut);
    bisect(cloud, left, left_parts, next, color);
    bisect(cloud, right, parts - left_parts, next, color);
}
