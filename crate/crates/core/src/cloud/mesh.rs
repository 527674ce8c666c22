use super::stencil::{reference_spacing, split_stencils};
use super::{PointCloud, PointKind};

/// One of the four sign-filtered neighbour subsets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StencilSide {
    XPos = 0,
    XNeg = 1,
    YPos = 2,
    YNeg = 3,
}

impl StencilSide {
    pub const ALL: [StencilSide; 4] = [
        StencilSide::XPos,
        StencilSide::XNeg,
        StencilSide::YPos,
        StencilSide::YNeg,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StencilSide::XPos => "x+",
            StencilSide::XNeg => "x-",
            StencilSide::YPos => "y+",
            StencilSide::YNeg => "y-",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
struct Csr {
    start: Vec<u32>,
    items: Vec<u32>,
}

impl Csr {
    fn from_lists<'a>(lists: impl Iterator<Item = &'a [usize]>) -> Csr {
        let mut start = vec![0u32];
        let mut items = Vec::new();
        for list in lists {
            items.extend(list.iter().map(|&i| i as u32));
            start.push(items.len() as u32);
        }
        Csr { start, items }
    }

    #[inline]
    fn row(&self, p: usize) -> &[u32] {
        &self.items[self.start[p] as usize..self.start[p + 1] as usize]
    }
}

/// Flat geometry and connectivity in some index space.
///
/// For a whole cloud the index space is the point id. Partition-local meshes
/// order owned points first, followed by ghosts; ghost rows carry no stencils
/// and are never computed on.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    x: Vec<f64>,
    y: Vec<f64>,
    kind: Vec<PointKind>,
    normal: Vec<[f64; 2]>,
    nbhs: Csr,
    split: [Csr; 4],
    n_owned: usize,
    det_tol: f64,
}

/// Scale of the rank-deficiency guard relative to `h_ref⁴`.
pub const DET_TOL_FACTOR: f64 = 1e-12;

impl Mesh {
    pub fn from_cloud(cloud: &PointCloud) -> Mesh {
        let n = cloud.n_points();
        let splits: Vec<_> = (0..n).map(|p| split_stencils(cloud, p)).collect();
        let h = reference_spacing(cloud);
        Mesh {
            x: cloud.points.iter().map(|p| p.x).collect(),
            y: cloud.points.iter().map(|p| p.y).collect(),
            kind: cloud.points.iter().map(|p| p.kind).collect(),
            normal: cloud.points.iter().map(|p| [p.nx, p.ny]).collect(),
            nbhs: Csr::from_lists(cloud.points.iter().map(|p| p.nbhs.as_slice())),
            split: [
                Csr::from_lists(splits.iter().map(|s| s.xpos.as_slice())),
                Csr::from_lists(splits.iter().map(|s| s.xneg.as_slice())),
                Csr::from_lists(splits.iter().map(|s| s.ypos.as_slice())),
                Csr::from_lists(splits.iter().map(|s| s.yneg.as_slice())),
            ],
            n_owned: n,
            det_tol: DET_TOL_FACTOR * h.powi(4),
        }
    }

    /// Re-indexes `order` (global ids) into a local mesh whose first `n_owned`
    /// entries keep their stencils. Every stencil member of an owned point must
    /// appear in `order`.
    pub fn subset(&self, order: &[usize], n_owned: usize) -> Mesh {
        let mut local = vec![u32::MAX; self.len()];
        for (l, &g) in order.iter().enumerate() {
            local[g] = l as u32;
        }
        let remap = |csr: &Csr| {
            let mut start = vec![0u32];
            let mut items = Vec::new();
            for (l, &g) in order.iter().enumerate() {
                if l < n_owned {
                    for &i in csr.row(g) {
                        let li = local[i as usize];
                        assert!(li != u32::MAX, "stencil of {g} reads {i} outside the local set");
                        items.push(li);
                    }
                }
                start.push(items.len() as u32);
            }
            Csr { start, items }
        };
        Mesh {
            x: order.iter().map(|&g| self.x[g]).collect(),
            y: order.iter().map(|&g| self.y[g]).collect(),
            kind: order.iter().map(|&g| self.kind[g]).collect(),
            normal: order.iter().map(|&g| self.normal[g]).collect(),
            nbhs: remap(&self.nbhs),
            split: [
                remap(&self.split[0]),
                remap(&self.split[1]),
                remap(&self.split[2]),
                remap(&self.split[3]),
            ],
            n_owned,
            det_tol: self.det_tol,
        }
    }

    /// Number of indexed points (owned plus ghosts).
    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn n_owned(&self) -> usize {
        self.n_owned
    }

    pub fn det_tol(&self) -> f64 {
        self.det_tol
    }

    #[inline]
    pub fn position(&self, p: usize) -> (f64, f64) {
        (self.x[p], self.y[p])
    }

    #[inline]
    pub fn delta(&self, p: usize, i: usize) -> (f64, f64) {
        (self.x[i] - self.x[p], self.y[i] - self.y[p])
    }

    #[inline]
    pub fn kind(&self, p: usize) -> PointKind {
        self.kind[p]
    }

    #[inline]
    pub fn normal(&self, p: usize) -> [f64; 2] {
        self.normal[p]
    }

    #[inline]
    pub fn neighbors(&self, p: usize) -> &[u32] {
        self.nbhs.row(p)
    }

    #[inline]
    pub fn split(&self, p: usize, side: StencilSide) -> &[u32] {
        self.split[side as usize].row(p)
    }
}
