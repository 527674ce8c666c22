//! Per-point field storage in two interchangeable layouts.
//!
//! [`AosStore`] keeps one record of every field component per point
//! (interleaved), [`SoaStore`] keeps one array per component. Kernels touch
//! fields only through [`FieldStore`], so the layout is a run-time choice.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Logical per-point fields.
///
/// `Qx`/`Qy` carry two buffers each so inner iterations can read the previous
/// iterate while writing the next one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Field {
    Prim,
    Q,
    Qx(u8),
    Qy(u8),
    FluxRes,
    DeltaT,
}

/// Number of `f64` components stored per point.
pub const COMPONENTS: usize = 29;

impl Field {
    pub const ALL: [Field; 8] = [
        Field::Prim,
        Field::Q,
        Field::Qx(0),
        Field::Qy(0),
        Field::Qx(1),
        Field::Qy(1),
        Field::FluxRes,
        Field::DeltaT,
    ];

    pub const fn width(self) -> usize {
        match self {
            Field::DeltaT => 1,
            _ => 4,
        }
    }

    /// Offset of the first component inside a point record.
    pub const fn offset(self) -> usize {
        match self {
            Field::Prim => 0,
            Field::Q => 4,
            Field::Qx(0) => 8,
            Field::Qy(0) => 12,
            Field::Qx(_) => 16,
            Field::Qy(_) => 20,
            Field::FluxRes => 24,
            Field::DeltaT => 28,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Layout {
    Aos,
    #[default]
    Soa,
}

impl fmt::Display for Layout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Layout::Aos => "aos",
            Layout::Soa => "soa",
        })
    }
}

impl FromStr for Layout {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "aos" => Ok(Layout::Aos),
            "soa" => Ok(Layout::Soa),
            other => Err(Error::InvalidArgument(format!("unknown layout '{other}'"))),
        }
    }
}

/// Storage for the per-point solver fields.
///
/// Reads return the last value written for `(point, field, component)`.
pub trait FieldStore: Send + Sync + Sized {
    fn layout(&self) -> Layout;

    fn zeroed(n_points: usize) -> Self;

    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn get(&self, point: usize, field: Field, comp: usize) -> f64;

    fn set(&mut self, point: usize, field: Field, comp: usize, value: f64);

    fn get4(&self, point: usize, field: Field) -> [f64; 4] {
        debug_assert_eq!(field.width(), 4);
        [
            self.get(point, field, 0),
            self.get(point, field, 1),
            self.get(point, field, 2),
            self.get(point, field, 3),
        ]
    }

    fn set4(&mut self, point: usize, field: Field, value: [f64; 4]) {
        debug_assert_eq!(field.width(), 4);
        for (comp, v) in value.into_iter().enumerate() {
            self.set(point, field, comp, v);
        }
    }

    /// Raw component access by flat component index `0..COMPONENTS`.
    fn get_raw(&self, point: usize, component: usize) -> f64;

    fn set_raw(&mut self, point: usize, component: usize, value: f64);
}

/// Array of structures: one interleaved record per point.
#[derive(Debug, Clone, PartialEq)]
pub struct AosStore {
    records: Vec<[f64; COMPONENTS]>,
}

impl FieldStore for AosStore {
    fn layout(&self) -> Layout {
        Layout::Aos
    }

    fn zeroed(n_points: usize) -> Self {
        AosStore {
            records: vec![[0.0; COMPONENTS]; n_points],
        }
    }

    fn len(&self) -> usize {
        self.records.len()
    }

    #[inline]
    fn get(&self, point: usize, field: Field, comp: usize) -> f64 {
        debug_assert!(comp < field.width());
        self.records[point][field.offset() + comp]
    }

    #[inline]
    fn set(&mut self, point: usize, field: Field, comp: usize, value: f64) {
        debug_assert!(comp < field.width());
        self.records[point][field.offset() + comp] = value;
    }

    #[inline]
    fn get4(&self, point: usize, field: Field) -> [f64; 4] {
        let o = field.offset();
        let r = &self.records[point];
        [r[o], r[o + 1], r[o + 2], r[o + 3]]
    }

    #[inline]
    fn set4(&mut self, point: usize, field: Field, value: [f64; 4]) {
        let o = field.offset();
        self.records[point][o..o + 4].copy_from_slice(&value);
    }

    fn get_raw(&self, point: usize, component: usize) -> f64 {
        self.records[point][component]
    }

    fn set_raw(&mut self, point: usize, component: usize, value: f64) {
        self.records[point][component] = value;
    }
}

/// Structure of arrays: one contiguous array per field component.
#[derive(Debug, Clone, PartialEq)]
pub struct SoaStore {
    n_points: usize,
    columns: Vec<Vec<f64>>,
}

impl FieldStore for SoaStore {
    fn layout(&self) -> Layout {
        Layout::Soa
    }

    fn zeroed(n_points: usize) -> Self {
        SoaStore {
            n_points,
            columns: vec![vec![0.0; n_points]; COMPONENTS],
        }
    }

    fn len(&self) -> usize {
        self.n_points
    }

    #[inline]
    fn get(&self, point: usize, field: Field, comp: usize) -> f64 {
        debug_assert!(comp < field.width());
        self.columns[field.offset() + comp][point]
    }

    #[inline]
    fn set(&mut self, point: usize, field: Field, comp: usize, value: f64) {
        debug_assert!(comp < field.width());
        self.columns[field.offset() + comp][point] = value;
    }

    fn get_raw(&self, point: usize, component: usize) -> f64 {
        self.columns[component][point]
    }

    fn set_raw(&mut self, point: usize, component: usize, value: f64) {
        self.columns[component][point] = value;
    }
}

/// A field store whose layout is chosen at run time.
#[derive(Debug, Clone, PartialEq)]
pub enum Store {
    Aos(AosStore),
    Soa(SoaStore),
}

impl FieldStore for Store {
    fn layout(&self) -> Layout {
        match self {
            Store::Aos(_) => Layout::Aos,
            Store::Soa(_) => Layout::Soa,
        }
    }

    /// Zeroed store in the default layout.
    fn zeroed(n_points: usize) -> Self {
        store_create(Layout::default(), n_points)
    }

    fn len(&self) -> usize {
        match self {
            Store::Aos(s) => s.len(),
            Store::Soa(s) => s.len(),
        }
    }

    fn get(&self, point: usize, field: Field, comp: usize) -> f64 {
        match self {
            Store::Aos(s) => s.get(point, field, comp),
            Store::Soa(s) => s.get(point, field, comp),
        }
    }

    fn set(&mut self, point: usize, field: Field, comp: usize, value: f64) {
        match self {
            Store::Aos(s) => s.set(point, field, comp, value),
            Store::Soa(s) => s.set(point, field, comp, value),
        }
    }

    #[inline]
    fn get4(&self, point: usize, field: Field) -> [f64; 4] {
        match self {
            Store::Aos(s) => s.get4(point, field),
            Store::Soa(s) => s.get4(point, field),
        }
    }

    #[inline]
    fn set4(&mut self, point: usize, field: Field, value: [f64; 4]) {
        match self {
            Store::Aos(s) => s.set4(point, field, value),
            Store::Soa(s) => s.set4(point, field, value),
        }
    }

    fn get_raw(&self, point: usize, component: usize) -> f64 {
        match self {
            Store::Aos(s) => s.get_raw(point, component),
            Store::Soa(s) => s.get_raw(point, component),
        }
    }

    fn set_raw(&mut self, point: usize, component: usize, value: f64) {
        match self {
            Store::Aos(s) => s.set_raw(point, component, value),
            Store::Soa(s) => s.set_raw(point, component, value),
        }
    }
}

impl Store {
    /// Copies every component into a store of the requested layout.
    pub fn to_layout(&self, layout: Layout) -> Store {
        if layout == self.layout() {
            return self.clone();
        }
        let mut out = store_create(layout, self.len());
        for p in 0..self.len() {
            for c in 0..COMPONENTS {
                out.set_raw(p, c, self.get_raw(p, c));
            }
        }
        out
    }
}

/// Creates a zero-initialised store.
pub fn store_create(layout: Layout, n_points: usize) -> Store {
    match layout {
        Layout::Aos => Store::Aos(AosStore::zeroed(n_points)),
        Layout::Soa => Store::Soa(SoaStore::zeroed(n_points)),
    }
}

/// True iff every `(point, field, component)` matches bitwise.
pub fn store_equivalence_check(a: &Store, b: &Store) -> Result<bool> {
    if a.len() != b.len() {
        return Err(Error::CapacityMismatch(a.len(), b.len()));
    }
    for p in 0..a.len() {
        for c in 0..COMPONENTS {
            if a.get_raw(p, c).to_bits() != b.get_raw(p, c).to_bits() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
