//! Connectivity construction, split stencils and stencil validation.

use super::mesh::DET_TOL_FACTOR;
use super::PointCloud;
use crate::error::{Error, Result};
use crate::kinetic::LeastSquares;

/// Neighbours of a point filtered by the sign of their offset.
///
/// A neighbour with `Δx = 0` belongs to both `xpos` and `xneg` (likewise for y).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SplitStencils {
    pub xpos: Vec<usize>,
    pub xneg: Vec<usize>,
    pub ypos: Vec<usize>,
    pub yneg: Vec<usize>,
}

impl SplitStencils {
    pub fn sides(&self) -> [&[usize]; 4] {
        [&self.xpos, &self.xneg, &self.ypos, &self.yneg]
    }
}

/// Rebuilds every point's connectivity as its `k` nearest distinct points.
///
/// Distance ties are broken by the smaller id. Connectivity is not symmetrised.
pub fn build_stencils(mut cloud: PointCloud, k: usize) -> Result<PointCloud> {
    let n = cloud.n_points();
    if k < 3 {
        return Err(Error::InvalidArgument(format!("k must be at least 3, got {k}")));
    }
    if k >= n {
        return Err(Error::InvalidArgument(format!(
            "k = {k} must be smaller than the number of points ({n})"
        )));
    }
    let xy: Vec<(f64, f64)> = cloud.points.iter().map(|p| (p.x, p.y)).collect();
    let grid = BucketGrid::new(&xy);
    let mut scratch = Vec::new();
    for p in 0..n {
        let nbhs = grid.nearest(&xy, p, k, &mut scratch);
        cloud.points[p].nbhs = nbhs;
    }
    Ok(cloud)
}

/// Uniform bucket grid for k-nearest-neighbour queries.
struct BucketGrid {
    x0: f64,
    y0: f64,
    cell: f64,
    nx: usize,
    ny: usize,
    start: Vec<usize>,
    ids: Vec<usize>,
}

impl BucketGrid {
    fn new(xy: &[(f64, f64)]) -> Self {
        let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
        for &(x, y) in xy {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        let n = xy.len().max(1) as f64;
        let w = (x1 - x0).max(f64::MIN_POSITIVE);
        let h = (y1 - y0).max(f64::MIN_POSITIVE);
        // About two points per cell; thin clouds fall back to a 1D spacing.
        let mut cell = (2.0 * w * h / n).sqrt().max(2.0 * w.max(h) / n);
        if !(cell > 0.0) || !cell.is_finite() {
            cell = 1.0;
        }
        let nx = ((w / cell).floor() as usize + 1).min(1 << 16);
        let ny = ((h / cell).floor() as usize + 1).min(1 << 16);
        let cell_of = |x: f64, y: f64| {
            let i = (((x - x0) / cell) as usize).min(nx - 1);
            let j = (((y - y0) / cell) as usize).min(ny - 1);
            j * nx + i
        };
        let mut counts = vec![0usize; nx * ny + 1];
        for &(x, y) in xy {
            counts[cell_of(x, y) + 1] += 1;
        }
        for c in 1..counts.len() {
            counts[c] += counts[c - 1];
        }
        let mut fill = counts.clone();
        let mut ids = vec![0usize; xy.len()];
        for (id, &(x, y)) in xy.iter().enumerate() {
            let c = cell_of(x, y);
            ids[fill[c]] = id;
            fill[c] += 1;
        }
        BucketGrid {
            x0,
            y0,
            cell,
            nx,
            ny,
            start: counts,
            ids,
        }
    }

    fn nearest(&self, xy: &[(f64, f64)], p: usize, k: usize, found: &mut Vec<(f64, usize)>) -> Vec<usize> {
        let (px, py) = xy[p];
        let ci = (((px - self.x0) / self.cell) as usize).min(self.nx - 1) as isize;
        let cj = (((py - self.y0) / self.cell) as usize).min(self.ny - 1) as isize;
        found.clear();
        let max_ring = self.nx.max(self.ny) as isize;
        for ring in 0..=max_ring {
            for j in (cj - ring)..=(cj + ring) {
                if j < 0 || j >= self.ny as isize {
                    continue;
                }
                let on_edge_row = j == cj - ring || j == cj + ring;
                let step = if on_edge_row { 1 } else { (2 * ring).max(1) };
                let mut i = ci - ring;
                while i <= ci + ring {
                    if i >= 0 && i < self.nx as isize {
                        let c = j as usize * self.nx + i as usize;
                        for &id in &self.ids[self.start[c]..self.start[c + 1]] {
                            if id != p {
                                let dx = xy[id].0 - px;
                                let dy = xy[id].1 - py;
                                found.push((dx * dx + dy * dy, id));
                            }
                        }
                    }
                    i += step;
                }
            }
            if found.len() >= k {
                found.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
                // Anything in a later ring is at least `ring · cell` away.
                let reach = ring as f64 * self.cell;
                if found[k - 1].0 < reach * reach {
                    break;
                }
            }
        }
        found.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        found.iter().take(k).map(|&(_, id)| id).collect()
    }
}

/// Sign-filtered subsets of `p`'s neighbours, preserving neighbour order.
pub fn split_stencils(cloud: &PointCloud, p: usize) -> SplitStencils {
    let mut s = SplitStencils::default();
    for &i in &cloud.points[p].nbhs {
        let (dx, dy) = cloud.delta(p, i);
        if dx >= 0.0 {
            s.xpos.push(i);
        }
        if dx <= 0.0 {
            s.xneg.push(i);
        }
        if dy >= 0.0 {
            s.ypos.push(i);
        }
        if dy <= 0.0 {
            s.yneg.push(i);
        }
    }
    s
}

/// Median over points of the distance to the closest stencil member.
pub fn reference_spacing(cloud: &PointCloud) -> f64 {
    let mut d: Vec<f64> = (0..cloud.n_points())
        .filter_map(|p| {
            cloud.points[p]
                .nbhs
                .iter()
                .map(|&i| {
                    let (dx, dy) = cloud.delta(p, i);
                    dx.hypot(dy)
                })
                .filter(|d| *d > 0.0)
                .min_by(|a, b| a.total_cmp(b))
        })
        .collect();
    if d.is_empty() {
        return 0.0;
    }
    d.sort_by(|a, b| a.total_cmp(b));
    let m = d.len() / 2;
    if d.len() % 2 == 1 {
        d[m]
    } else {
        0.5 * (d[m - 1] + d[m])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointDiagnostics {
    pub full_size: usize,
    /// Sizes of the x+, x−, y+, y− stencils.
    pub split_sizes: [usize; 4],
    pub full_det: f64,
    pub split_dets: [f64; 4],
    pub coincident_neighbor: bool,
    pub defective: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub h_ref: f64,
    pub det_tol: f64,
    pub points: Vec<PointDiagnostics>,
}

impl ValidationReport {
    pub fn defective_points(&self) -> Vec<usize> {
        self.points
            .iter()
            .enumerate()
            .filter(|(_, d)| d.defective)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn n_defective(&self) -> usize {
        self.points.iter().filter(|d| d.defective).count()
    }

    pub fn is_ok(&self) -> bool {
        self.n_defective() == 0
    }
}

fn stencil_det(cloud: &PointCloud, p: usize, members: &[usize]) -> f64 {
    let mut acc = LeastSquares::<0>::default();
    for &i in members {
        let (dx, dy) = cloud.delta(p, i);
        acc.add(dx, dy, []);
    }
    acc.determinant()
}

/// Reports stencil sizes and least-squares determinants for every point.
pub fn validate_cloud(cloud: &PointCloud) -> ValidationReport {
    let h_ref = reference_spacing(cloud);
    let det_tol = DET_TOL_FACTOR * h_ref.powi(4);
    let points = (0..cloud.n_points())
        .map(|p| {
            let rec = &cloud.points[p];
            let split = split_stencils(cloud, p);
            let sides = split.sides();
            let full_det = stencil_det(cloud, p, &rec.nbhs);
            let split_dets = sides.map(|s| stencil_det(cloud, p, s));
            let split_sizes = sides.map(|s| s.len());
            let coincident_neighbor = rec.nbhs.iter().any(|&i| cloud.delta(p, i) == (0.0, 0.0));
            let mut defective = coincident_neighbor || rec.nbhs.len() < 3 || !(full_det >= det_tol);
            if rec.kind.uses_split_stencils() {
                defective |= split_sizes.contains(&0);
                defective |= split_dets.iter().any(|&d| !(d >= det_tol));
            }
            PointDiagnostics {
                full_size: rec.nbhs.len(),
                split_sizes,
                full_det,
                split_dets,
                coincident_neighbor,
                defective,
            }
        })
        .collect();
    ValidationReport { h_ref, det_tol, points }
}
