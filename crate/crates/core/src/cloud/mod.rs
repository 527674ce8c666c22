//! Point clouds: geometry, connectivity, and per-point field storage.

mod generate;
mod io;
mod mesh;
mod stencil;

pub use generate::{generate_annular_cloud, generate_rect_cloud, Bounds, DEFAULT_K};
pub use io::{read_point_cloud, write_point_cloud};
pub use mesh::{Mesh, StencilSide};
pub use stencil::{
    build_stencils, reference_spacing, split_stencils, validate_cloud, PointDiagnostics, SplitStencils,
    ValidationReport,
};

use crate::layout::{store_create, FieldStore, Layout, Store};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PointKind {
    Interior,
    Wall,
    Outer,
}

impl PointKind {
    pub fn code(self) -> u8 {
        match self {
            PointKind::Interior => 0,
            PointKind::Wall => 1,
            PointKind::Outer => 2,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(PointKind::Interior),
            1 => Some(PointKind::Wall),
            2 => Some(PointKind::Outer),
            _ => None,
        }
    }

    /// Whether the flux residual (and hence the split stencils) is evaluated
    /// at points of this kind. Outer points are held at free stream.
    pub fn uses_split_stencils(self) -> bool {
        !matches!(self, PointKind::Outer)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointRecord {
    pub id: usize,
    pub x: f64,
    pub y: f64,
    pub kind: PointKind,
    /// Unit normal pointing out of the fluid domain; `(0, 0)` for interior points.
    pub nx: f64,
    pub ny: f64,
    pub nbhs: Vec<usize>,
}

impl PointRecord {
    pub fn new(id: usize, x: f64, y: f64, kind: PointKind, normal: (f64, f64)) -> Self {
        PointRecord {
            id,
            x,
            y,
            kind,
            nx: normal.0,
            ny: normal.1,
            nbhs: Vec::new(),
        }
    }
}

/// The whole computational domain.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    pub points: Vec<PointRecord>,
    pub store: Store,
}

impl PointCloud {
    /// Wraps point records with a zeroed store of the default layout.
    pub fn new(points: Vec<PointRecord>) -> Self {
        let n = points.len();
        PointCloud {
            points,
            store: store_create(Layout::default(), n),
        }
    }

    pub fn n_points(&self) -> usize {
        self.points.len()
    }

    pub fn layout(&self) -> Layout {
        self.store.layout()
    }

    /// Switches the field store to `layout`, preserving its contents.
    pub fn set_layout(&mut self, layout: Layout) {
        if layout != self.store.layout() {
            self.store = self.store.to_layout(layout);
        }
    }

    pub fn with_layout(mut self, layout: Layout) -> Self {
        self.set_layout(layout);
        self
    }

    pub fn has_wall(&self) -> bool {
        self.points.iter().any(|p| p.kind == PointKind::Wall)
    }

    /// Compact kernel-facing view of geometry and connectivity.
    pub fn mesh(&self) -> Mesh {
        Mesh::from_cloud(self)
    }

    /// `(Δx, Δy)` from point `p` to point `i`.
    pub fn delta(&self, p: usize, i: usize) -> (f64, f64) {
        let a = &self.points[p];
        let b = &self.points[i];
        (b.x - a.x, b.y - a.y)
    }
}
