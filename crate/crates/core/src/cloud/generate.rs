//! Desk-scale point cloud generators.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::stencil::build_stencils;
use super::{PointCloud, PointKind, PointRecord};
use crate::error::{Error, Result};

/// Default stencil size for generated clouds.
pub const DEFAULT_K: usize = 8;

/// Largest allowed jitter as a fraction of the local spacing.
pub const MAX_JITTER: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub xmin: f64,
    pub xmax: f64,
    pub ymin: f64,
    pub ymax: f64,
}

impl Bounds {
    pub const fn new(xmin: f64, xmax: f64, ymin: f64, ymax: f64) -> Self {
        Bounds { xmin, xmax, ymin, ymax }
    }

    pub const fn unit() -> Self {
        Bounds::new(0.0, 1.0, 0.0, 1.0)
    }
}

fn check_jitter(jitter: f64) -> Result<()> {
    if !(0.0..=MAX_JITTER).contains(&jitter) {
        return Err(Error::InvalidArgument(format!(
            "jitter must lie in [0, {MAX_JITTER}], got {jitter}"
        )));
    }
    Ok(())
}

/// Jittered `nx × ny` lattice over `bounds`; the lattice edge is the outer
/// (far-field) boundary. Points are numbered row by row with x fastest.
pub fn generate_rect_cloud(nx: usize, ny: usize, bounds: Bounds, jitter: f64, seed: u64) -> Result<PointCloud> {
    if nx < 4 || ny < 4 {
        return Err(Error::InvalidArgument(format!(
            "lattice must be at least 4x4, got {nx}x{ny}"
        )));
    }
    check_jitter(jitter)?;
    if !(bounds.xmax > bounds.xmin) || !(bounds.ymax > bounds.ymin) {
        return Err(Error::InvalidArgument(format!("empty bounds {bounds:?}")));
    }
    let dx = (bounds.xmax - bounds.xmin) / (nx - 1) as f64;
    let dy = (bounds.ymax - bounds.ymin) / (ny - 1) as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let mut x = bounds.xmin + i as f64 * dx;
            let mut y = bounds.ymin + j as f64 * dy;
            let ex = if i == 0 {
                -1.0
            } else if i == nx - 1 {
                1.0
            } else {
                0.0
            };
            let ey = if j == 0 {
                -1.0
            } else if j == ny - 1 {
                1.0
            } else {
                0.0
            };
            let (kind, normal) = if ex == 0.0 && ey == 0.0 {
                if jitter > 0.0 {
                    x += jitter * dx * rng.random_range(-1.0..1.0);
                    y += jitter * dy * rng.random_range(-1.0..1.0);
                }
                (PointKind::Interior, (0.0, 0.0))
            } else {
                let len = f64::hypot(ex, ey);
                (PointKind::Outer, (ex / len, ey / len))
            };
            points.push(PointRecord::new(points.len(), x, y, kind, normal));
        }
    }
    build_stencils(PointCloud::new(points), DEFAULT_K)
}

/// Annulus between a circular wall of radius `r_inner` (centred at the
/// origin) and a circular far field of radius `r_outer`.
///
/// Ring radii grow geometrically. Cells are close to square when
/// `(r_outer / r_inner)^(1 / (n_r - 1)) ≈ 1 + 2π / n_theta`; much coarser
/// radial spacing leaves nearest-neighbour stencils one-sided. Wall normals
/// point into the body, far-field normals point away from it.
pub fn generate_annular_cloud(
    n_theta: usize,
    n_r: usize,
    r_inner: f64,
    r_outer: f64,
    jitter: f64,
    seed: u64,
) -> Result<PointCloud> {
    if n_theta < 8 || n_r < 3 {
        return Err(Error::InvalidArgument(format!(
            "annulus needs n_theta >= 8 and n_r >= 3, got {n_theta}x{n_r}"
        )));
    }
    check_jitter(jitter)?;
    if !(r_inner > 0.0) || !(r_outer > r_inner) {
        return Err(Error::InvalidArgument(format!(
            "radii must satisfy 0 < r_inner < r_outer, got {r_inner}, {r_outer}"
        )));
    }
    let ratio = (r_outer / r_inner).powf(1.0 / (n_r - 1) as f64);
    let dtheta = 2.0 * PI / n_theta as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(n_theta * n_r);
    for ring in 0..n_r {
        let r = r_inner * ratio.powi(ring as i32);
        for j in 0..n_theta {
            let mut theta = j as f64 * dtheta;
            let mut rr = r;
            let kind = match ring {
                0 => PointKind::Wall,
                _ if ring == n_r - 1 => PointKind::Outer,
                _ => PointKind::Interior,
            };
            if kind == PointKind::Interior && jitter > 0.0 {
                theta += jitter * dtheta * rng.random_range(-1.0..1.0);
                rr += jitter * r * (ratio - 1.0) * rng.random_range(-1.0..1.0);
            }
            let (s, c) = theta.sin_cos();
            let normal = match kind {
                PointKind::Wall => (-c, -s),
                PointKind::Outer => (c, s),
                PointKind::Interior => (0.0, 0.0),
            };
            points.push(PointRecord::new(points.len(), rr * c, rr * s, kind, normal));
        }
    }
    build_stencils(PointCloud::new(points), DEFAULT_K)
}
