//! Run configuration.

use std::fmt;
use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;
use std::str::FromStr;

use crate::cloud::{generate_annular_cloud, generate_rect_cloud, read_point_cloud, Bounds, PointCloud};
use crate::error::{Error, Result};
use crate::init::{apply_bump, bounding_center, freestream_init, freestream_state};
use crate::kinetic::GasModel;
use crate::layout::Layout;
use crate::runtime::{RunOptions, SchedulePolicy};

/// Spatial order of the scheme.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Order {
    First,
    #[default]
    Second,
}

impl FromStr for Order {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "1" => Ok(Order::First),
            "2" => Ok(Order::Second),
            _ => Err(Error::InvalidArgument(format!("order must be 1 or 2, got {s:?}"))),
        }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Order::First => "1",
            Order::Second => "2",
        })
    }
}

/// How the four split-flux derivatives are evaluated.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum ResidualMode {
    /// One pass per point summing all four.
    #[default]
    Fused,
    /// Four passes over all points, one per split flux.
    Split4,
}

impl FromStr for ResidualMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fused" => Ok(ResidualMode::Fused),
            "split4" => Ok(ResidualMode::Split4),
            _ => Err(Error::InvalidArgument(format!(
                "residual mode must be fused or split4, got {s:?}"
            ))),
        }
    }
}

impl fmt::Display for ResidualMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ResidualMode::Fused => "fused",
            ResidualMode::Split4 => "split4",
        })
    }
}

/// Where the point cloud comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum GridSource {
    File(PathBuf),
    /// Jittered lattice on the unit square.
    Rect {
        nx: usize,
        ny: usize,
    },
    /// Rings around a circular wall.
    Annular {
        n_theta: usize,
        n_r: usize,
    },
}

/// Density/pressure perturbation added after the free-stream start.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bump {
    pub amplitude: f64,
    pub radius: f64,
    /// Defaults to the bounding-box centre.
    pub center: Option<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub grid: Option<GridSource>,
    pub jitter: f64,
    pub seed: u64,
    /// Wall and outer radius of generated annular clouds.
    pub radii: (f64, f64),
    pub mach: f64,
    pub aoa_deg: f64,
    pub gamma: f64,
    pub n_iterations: usize,
    pub n_inner: usize,
    pub cfl: f64,
    pub order: Order,
    pub layout: Layout,
    pub residual_mode: ResidualMode,
    pub n_parts: usize,
    pub n_workers: usize,
    pub bump: Option<Bump>,
    pub out_prefix: PathBuf,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            grid: None,
            jitter: 0.0,
            seed: 0,
            radii: (1.0, 10.0),
            mach: 0.63,
            aoa_deg: 2.0,
            gamma: 1.4,
            n_iterations: 1000,
            n_inner: 3,
            cfl: 0.5,
            order: Order::Second,
            layout: Layout::Soa,
            residual_mode: ResidualMode::Fused,
            n_parts: 1,
            n_workers: 1,
            bump: None,
            out_prefix: PathBuf::from("lskum"),
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::InvalidArgument(format!("{key}: cannot parse {value:?}")))
}

/// Parses `AxB` into two sizes.
pub fn parse_dims(key: &str, value: &str) -> Result<(usize, usize)> {
    let (a, b) = value
        .split_once(['x', 'X'])
        .ok_or_else(|| Error::InvalidArgument(format!("{key}: expected NxM, got {value:?}")))?;
    Ok((parse(key, a)?, parse(key, b)?))
}

fn parse_pair(key: &str, value: &str) -> Result<(f64, f64)> {
    let (a, b) = value
        .split_once(',')
        .ok_or_else(|| Error::InvalidArgument(format!("{key}: expected A,B, got {value:?}")))?;
    Ok((parse(key, a)?, parse(key, b)?))
}

/// Parses flat `key = value` text. Blank lines and `#` comments are skipped.
pub fn parse_config_text(text: &str) -> Result<Vec<(String, String)>> {
    let mut pairs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::parse(i + 1, format!("expected key = value, got {line:?}")))?;
        let key = key.trim();
        if !SolverConfig::KEYS.contains(&key) {
            return Err(Error::parse(i + 1, format!("unknown key {key:?}")));
        }
        pairs.push((key.to_string(), value.trim().to_string()));
    }
    Ok(pairs)
}

impl SolverConfig {
    /// Known keys, in the spelling used by config files and flags.
    pub const KEYS: [&'static str; 21] = [
        "grid",
        "generate",
        "annular",
        "radii",
        "jitter",
        "seed",
        "mach",
        "aoa",
        "gamma",
        "iters",
        "inner",
        "cfl",
        "order",
        "layout",
        "residual-mode",
        "parts",
        "workers",
        "bump",
        "bump-radius",
        "bump-center",
        "out-prefix",
    ];

    /// Sets one key. Later calls override earlier ones.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key {
            "grid" => self.grid = Some(GridSource::File(PathBuf::from(value))),
            "generate" => {
                let (nx, ny) = parse_dims(key, value)?;
                self.grid = Some(GridSource::Rect { nx, ny });
            }
            "annular" => {
                let (n_theta, n_r) = parse_dims(key, value)?;
                self.grid = Some(GridSource::Annular { n_theta, n_r });
            }
            "radii" => self.radii = parse_pair(key, value)?,
            "jitter" => self.jitter = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "mach" => self.mach = parse(key, value)?,
            "aoa" => self.aoa_deg = parse(key, value)?,
            "gamma" => self.gamma = parse(key, value)?,
            "iters" => self.n_iterations = parse(key, value)?,
            "inner" => self.n_inner = parse(key, value)?,
            "cfl" => self.cfl = parse(key, value)?,
            "order" => self.order = value.parse()?,
            "layout" => self.layout = value.parse()?,
            "residual-mode" => self.residual_mode = value.parse()?,
            "parts" => self.n_parts = parse(key, value)?,
            "workers" => self.n_workers = parse(key, value)?,
            "bump" => self.bump_mut().amplitude = parse(key, value)?,
            "bump-radius" => self.bump_mut().radius = parse(key, value)?,
            "bump-center" => self.bump_mut().center = Some(parse_pair(key, value)?),
            "out-prefix" => self.out_prefix = PathBuf::from(value),
            _ => return Err(Error::InvalidArgument(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    fn bump_mut(&mut self) -> &mut Bump {
        self.bump.get_or_insert(Bump {
            amplitude: 0.0,
            radius: 0.2,
            center: None,
        })
    }

    /// Applies `key=value` pairs in order.
    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, &'a str)>) -> Result<Self> {
        let mut cfg = SolverConfig::default();
        for (k, v) in pairs {
            cfg.set(k, v)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if self.grid.is_none() {
            return bad("no grid: set grid, generate or annular".into());
        }
        if !(self.mach >= 0.0) || !self.mach.is_finite() {
            return bad(format!("mach must be >= 0, got {}", self.mach));
        }
        if !self.aoa_deg.is_finite() {
            return bad("aoa must be finite".into());
        }
        GasModel::new(self.gamma)?;
        if self.n_inner == 0 || self.n_inner > 250 {
            return bad(format!("inner must lie in 1..=250, got {}", self.n_inner));
        }
        if !(self.cfl > 0.0) || !self.cfl.is_finite() {
            return bad(format!("cfl must be > 0, got {}", self.cfl));
        }
        if self.n_parts == 0 || self.n_workers == 0 {
            return bad("parts and workers must be at least 1".into());
        }
        if let Some(b) = &self.bump {
            if !(b.radius > 0.0) || !(b.amplitude > -1.0) {
                return bad("bump radius must be > 0 and amplitude > -1".into());
            }
        }
        Ok(())
    }

    pub fn gas(&self) -> Result<GasModel> {
        GasModel::new(self.gamma)
    }

    /// Loads or generates the cloud in the configured layout (fields zeroed).
    pub fn build_cloud(&self) -> Result<PointCloud> {
        let cloud = match &self.grid {
            None => return Err(Error::InvalidArgument("no grid configured".into())),
            Some(GridSource::File(path)) => read_point_cloud(BufReader::new(File::open(path)?))?,
            Some(GridSource::Rect { nx, ny }) => generate_rect_cloud(*nx, *ny, Bounds::unit(), self.jitter, self.seed)?,
            Some(GridSource::Annular { n_theta, n_r }) => {
                generate_annular_cloud(*n_theta, *n_r, self.radii.0, self.radii.1, self.jitter, self.seed)?
            }
        };
        Ok(cloud.with_layout(self.layout))
    }

    /// Free-stream start plus the optional bump.
    pub fn initialize(&self, cloud: &mut PointCloud) -> Result<()> {
        freestream_init(cloud, self.mach, self.aoa_deg, self.gas()?);
        if let Some(b) = self.bump {
            let center = b.center.unwrap_or_else(|| bounding_center(cloud));
            apply_bump(cloud, center, b.radius, b.amplitude);
        }
        Ok(())
    }

    pub fn run_options(&self) -> Result<RunOptions> {
        let gas = self.gas()?;
        Ok(RunOptions {
            gas,
            n_iterations: self.n_iterations,
            n_inner: self.n_inner,
            cfl: self.cfl,
            order: self.order,
            residual_mode: self.residual_mode,
            n_workers: self.n_workers,
            free_stream: freestream_state(self.mach, self.aoa_deg, gas),
            schedule: SchedulePolicy::InOrder,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_text_pairs() {
        let text = "# run\ngenerate = 10x10\n\n  mach=0.5 # subsonic\ncfl = 0.3\n";
        let pairs = parse_config_text(text).unwrap();
        assert_eq!(
            pairs,
            [("generate", "10x10"), ("mach", "0.5"), ("cfl", "0.3")].map(|(k, v)| (k.to_string(), v.to_string()))
        );
        assert!(matches!(
            parse_config_text("mach 0.5"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_config_text("\nspeed = 2"),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn later_pairs_win() {
        let cfg = SolverConfig::from_pairs([
            ("grid", "a.dat"),
            ("iters", "5"),
            ("generate", "40x30"),
            ("layout", "aos"),
            ("residual-mode", "split4"),
            ("order", "1"),
        ])
        .unwrap();
        assert_eq!(cfg.grid, Some(GridSource::Rect { nx: 40, ny: 30 }));
        assert_eq!(cfg.n_iterations, 5);
        assert_eq!(cfg.layout, Layout::Aos);
        assert_eq!(cfg.residual_mode, ResidualMode::Split4);
        assert_eq!(cfg.order, Order::First);
    }

    #[test]
    fn rejects_bad_values() {
        for (k, v) in [
            ("inner", "0"),
            ("cfl", "0"),
            ("mach", "-1"),
            ("order", "3"),
            ("layout", "aosoa"),
            ("iters", "-2"),
            ("generate", "40"),
            ("colour", "red"),
        ] {
            assert!(
                SolverConfig::from_pairs([("generate", "4x4"), (k, v)]).is_err(),
                "{k}={v}"
            );
        }
        assert!(SolverConfig::from_pairs([("iters", "3")]).is_err());
    }

    #[test]
    fn keys_are_all_settable() {
        let mut cfg = SolverConfig::default();
        for k in SolverConfig::KEYS {
            let v = match k {
                "generate" | "annular" => "8x8",
                "radii" | "bump-center" => "1,2",
                "order" => "2",
                "layout" => "soa",
                "residual-mode" => "fused",
                "grid" | "out-prefix" => "x",
                _ => "1",
            };
            cfg.set(k, v).unwrap_or_else(|e| panic!("{k}: {e}"));
        }
    }
}
