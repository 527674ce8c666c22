//! Output files.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use lskum_core::{ConvergenceHistory, Field, FieldStore, LayoutRun, PointCloud, PointKind, PrimitiveState};

/// `<prefix><suffix>`, e.g. `run` + `.residue.csv`.
pub fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn create(path: &Path) -> std::io::Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

pub fn write_residue(out: &mut impl Write, history: &ConvergenceHistory) -> std::io::Result<()> {
    writeln!(out, "iter,residue,log10rel,wall_ms")?;
    for r in &history.records {
        writeln!(
            out,
            "{},{:.16e},{:.16e},{:.3}",
            r.iteration,
            r.residue,
            r.log10_rel,
            1e3 * r.wall_seconds
        )?;
    }
    Ok(())
}

pub fn write_solution(out: &mut impl Write, cloud: &PointCloud) -> std::io::Result<()> {
    writeln!(out, "# id x y rho u1 u2 p")?;
    for (i, p) in cloud.points.iter().enumerate() {
        let [rho, u1, u2, pr] = cloud.store.get4(i, Field::Prim);
        writeln!(
            out,
            "{} {:.16e} {:.16e} {:.16e} {:.16e} {:.16e} {:.16e}",
            p.id, p.x, p.y, rho, u1, u2, pr
        )?;
    }
    Ok(())
}

pub fn write_bench(out: &mut impl Write, runs: &[LayoutRun]) -> std::io::Result<()> {
    writeln!(out, "layout,kernel,seconds,rdp")?;
    for run in runs {
        let report = run.history.report();
        let fmt = |v: Option<f64>| v.map_or("nan".to_string(), |v| format!("{v:.16e}"));
        for (kernel, seconds, rdp) in report.rows() {
            writeln!(out, "{},{},{:.16e},{}", run.layout, kernel.name(), seconds, fmt(rdp))?;
        }
        writeln!(
            out,
            "{},total,{:.16e},{}",
            run.layout,
            report.total_seconds,
            fmt(report.rdp())
        )?;
    }
    Ok(())
}

/// Wall points ordered by angle about their centroid, with arc position and
/// pressure coefficient `(p - p_inf) / (0.5 rho_inf M^2 a_inf^2)`.
pub fn surface(cloud: &PointCloud, free_stream: PrimitiveState, mach: f64, gamma: f64) -> Vec<(usize, f64, f64)> {
    let wall: Vec<usize> = (0..cloud.n_points())
        .filter(|&i| cloud.points[i].kind == PointKind::Wall)
        .collect();
    if wall.is_empty() {
        return Vec::new();
    }
    let n = wall.len() as f64;
    let cx = wall.iter().map(|&i| cloud.points[i].x).sum::<f64>() / n;
    let cy = wall.iter().map(|&i| cloud.points[i].y).sum::<f64>() / n;
    let angle = |i: usize| (cloud.points[i].y - cy).atan2(cloud.points[i].x - cx);
    let mut order = wall;
    order.sort_by(|&a, &b| angle(a).total_cmp(&angle(b)).then(a.cmp(&b)));

    let a_inf = (gamma * free_stream.p / free_stream.rho).sqrt();
    let dyn_p = 0.5 * free_stream.rho * mach * mach * a_inf * a_inf;
    let mut arc = 0.0;
    let mut prev: Option<usize> = None;
    order
        .into_iter()
        .map(|i| {
            if let Some(j) = prev {
                arc += (cloud.points[i].x - cloud.points[j].x).hypot(cloud.points[i].y - cloud.points[j].y);
            }
            prev = Some(i);
            let p = cloud.store.get(i, Field::Prim, 3);
            (cloud.points[i].id, arc, (p - free_stream.p) / dyn_p)
        })
        .collect()
}

pub fn write_surface(out: &mut impl Write, rows: &[(usize, f64, f64)]) -> std::io::Result<()> {
    writeln!(out, "id,arc,cp")?;
    for (id, arc, cp) in rows {
        writeln!(out, "{id},{arc:.16e},{cp:.16e}")?;
    }
    Ok(())
}

/// Writes through `f` into `path`, flushing before returning.
pub fn to_file(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> std::io::Result<()> {
    let mut out = create(path)?;
    f(&mut out)?;
    out.flush()
}
