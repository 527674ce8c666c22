//! Initial conditions.

use crate::cloud::{PointCloud, PointKind};
use crate::kinetic::{GasModel, PrimitiveState};
use crate::layout::{store_create, Field, FieldStore};

/// Non-dimensional free stream: `ρ = 1`, `p = 1/γ` (so `a = 1`), speed `M`
/// at angle `aoa_deg` to the x axis.
pub fn freestream_state(mach: f64, aoa_deg: f64, gas: GasModel) -> PrimitiveState {
    let a = aoa_deg.to_radians();
    PrimitiveState::new(1.0, mach * a.cos(), mach * a.sin(), 1.0 / gas.gamma)
}

/// Resets all fields and sets every point to the free stream.
pub fn freestream_init(cloud: &mut PointCloud, mach: f64, aoa_deg: f64, gas: GasModel) {
    let s = freestream_state(mach, aoa_deg, gas).to_array();
    let mut store = store_create(cloud.layout(), cloud.n_points());
    for p in 0..cloud.n_points() {
        store.set4(p, Field::Prim, s);
    }
    cloud.store = store;
}

/// Scales density and pressure of non-outer points by
/// `1 + amplitude · cos²(π r / 2R)` inside radius `R` of `center`.
pub fn apply_bump(cloud: &mut PointCloud, center: (f64, f64), radius: f64, amplitude: f64) {
    for p in 0..cloud.n_points() {
        let pt = &cloud.points[p];
        if pt.kind == PointKind::Outer {
            continue;
        }
        let r = (pt.x - center.0).hypot(pt.y - center.1);
        if r >= radius {
            continue;
        }
        let c = (std::f64::consts::FRAC_PI_2 * r / radius).cos();
        let f = 1.0 + amplitude * c * c;
        let mut s = cloud.store.get4(p, Field::Prim);
        s[0] *= f;
        s[3] *= f;
        cloud.store.set4(p, Field::Prim, s);
    }
}

/// Centre of the cloud's bounding box.
pub fn bounding_center(cloud: &PointCloud) -> (f64, f64) {
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for p in &cloud.points {
        x0 = x0.min(p.x);
        x1 = x1.max(p.x);
        y0 = y0.min(p.y);
        y1 = y1.max(p.y);
    }
    (0.5 * (x0 + x1), 0.5 * (y0 + y1))
}
