//! Line-oriented text format for point clouds.
//!
//! ```text
//! n_points
//! id x y kind nx ny n_nbhs nbh_1 ... nbh_k
//! ```
//!
//! `kind` is 0 (interior), 1 (wall) or 2 (outer). Ids are 0-based and appear
//! in ascending order. Reals are written with 17 significant digits.

use std::io::{BufRead, Write};

use super::{PointCloud, PointKind, PointRecord};
use crate::error::{Error, Result};

const NORMAL_TOL: f64 = 1e-12;

pub fn read_point_cloud<R: BufRead>(source: R) -> Result<PointCloud> {
    let mut lines = source
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !matches!(l, Ok(s) if s.trim().is_empty()));

    let (header_line, header) = match lines.next() {
        Some((n, l)) => (n, l?),
        None => return Err(Error::parse(1, "missing header")),
    };
    let n_points: usize = header
        .trim()
        .parse()
        .map_err(|_| Error::parse(header_line, format!("malformed header '{}'", header.trim())))?;

    let mut points = Vec::with_capacity(n_points);
    let mut record_lines = Vec::with_capacity(n_points);
    for (line_no, line) in lines {
        let line = line?;
        if points.len() == n_points {
            return Err(Error::parse(
                line_no,
                format!("record count mismatch: header declares {n_points} points"),
            ));
        }
        points.push(parse_record(line_no, &line, points.len())?);
        record_lines.push(line_no);
    }
    if points.len() != n_points {
        return Err(Error::parse(
            header_line,
            format!(
                "record count mismatch: header declares {n_points} points, found {}",
                points.len()
            ),
        ));
    }
    for (rec, &line_no) in points.iter().zip(&record_lines) {
        if let Some(&bad) = rec.nbhs.iter().find(|&&i| i >= n_points) {
            return Err(Error::parse(
                line_no,
                format!("neighbor id {bad} out of range (n_points = {n_points})"),
            ));
        }
    }
    Ok(PointCloud::new(points))
}

fn parse_record(line_no: usize, line: &str, expected_id: usize) -> Result<PointRecord> {
    let err = |m: String| Error::parse(line_no, m);
    let mut tok = line.split_whitespace();
    let mut next = |what: &str| tok.next().ok_or_else(|| err(format!("missing field '{what}'")));

    let id: usize = next("id")?.parse().map_err(|_| err("malformed id".into()))?;
    if id != expected_id {
        return Err(err(format!("expected id {expected_id}, found {id}")));
    }
    let real = |s: &str, what: &str| -> Result<f64> {
        let v: f64 = s.parse().map_err(|_| err(format!("malformed {what} '{s}'")))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(err(format!("non-finite {what}")))
        }
    };
    let x = real(next("x")?, "x")?;
    let y = real(next("y")?, "y")?;
    let kind_code: u8 = next("kind")?.parse().map_err(|_| err("malformed kind".into()))?;
    let kind = PointKind::from_code(kind_code).ok_or_else(|| err(format!("unknown kind {kind_code}")))?;
    let nx = real(next("nx")?, "nx")?;
    let ny = real(next("ny")?, "ny")?;
    if kind != PointKind::Interior && ((nx * nx + ny * ny) - 1.0).abs() > NORMAL_TOL {
        return Err(err(format!("boundary normal ({nx}, {ny}) is not unit length")));
    }
    let n_nbhs: usize = next("n_nbhs")?
        .parse()
        .map_err(|_| err("malformed neighbor count".into()))?;
    let nbhs = tok
        .map(|t| {
            t.parse::<usize>()
                .map_err(|_| err(format!("malformed neighbor id '{t}'")))
        })
        .collect::<Result<Vec<_>>>()?;
    if nbhs.len() != n_nbhs {
        return Err(err(format!(
            "neighbor count mismatch: declared {n_nbhs}, listed {}",
            nbhs.len()
        )));
    }
    if nbhs.len() < 3 {
        return Err(err(format!(
            "stencil too small (n ≥ 3 required), point {id} has {}",
            nbhs.len()
        )));
    }
    if nbhs.contains(&id) {
        return Err(err(format!("point {id} lists itself as a neighbor")));
    }
    Ok(PointRecord {
        id,
        x,
        y,
        kind,
        nx,
        ny,
        nbhs,
    })
}

pub fn write_point_cloud<W: Write>(cloud: &PointCloud, mut out: W) -> Result<()> {
    writeln!(out, "{}", cloud.n_points())?;
    for p in &cloud.points {
        write!(
            out,
            "{} {:.16e} {:.16e} {} {:.16e} {:.16e} {}",
            p.id,
            p.x,
            p.y,
            p.kind.code(),
            p.nx,
            p.ny,
            p.nbhs.len()
        )?;
        for n in &p.nbhs {
            write!(out, " {n}")?;
        }
        writeln!(out)?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cloud::{generate_annular_cloud, generate_rect_cloud, Bounds};

    const FOUR: &str = "4
0 0 0 0 0 0 3 1 2 3
1 1 0 2 1 0 3 0 2 3
2 0 1 2 0 1 3 0 1 3
3 1 1 0 0 0 3 0 1 2
";

    fn parse_err(src: &str) -> (usize, String) {
        match read_point_cloud(src.as_bytes()) {
            Err(Error::Parse { line, message }) => (line, message),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn reads_four_point_file() {
        let cloud = read_point_cloud(FOUR.as_bytes()).unwrap();
        assert_eq!(cloud.n_points(), 4);
        assert_eq!(cloud.points[0].nbhs, vec![1, 2, 3]);
        assert_eq!(cloud.points[1].kind, PointKind::Outer);
        assert_eq!((cloud.points[2].nx, cloud.points[2].ny), (0.0, 1.0));
    }

    #[test]
    fn record_count_mismatch() {
        let src = "2
0 0 0 0 0 0 3 1 2 1
1 1 0 0 0 0 3 0 2 0
2 0 1 0 0 0 3 0 1 0
";
        let (line, msg) = parse_err(src);
        assert_eq!(line, 4);
        assert!(msg.contains("record count mismatch"), "{msg}");
        let (_, msg) = parse_err("5\n0 0 0 0 0 0 3 1 2 3\n");
        assert!(msg.contains("record count mismatch"), "{msg}");
    }

    #[test]
    fn stencil_too_small() {
        let src = FOUR.replace("1 1 0 2 1 0 3 0 2 3", "1 1 0 2 1 0 2 0 2");
        let (line, msg) = parse_err(&src);
        assert_eq!(line, 3);
        assert!(msg.contains("stencil too small (n ≥ 3 required)"), "{msg}");
    }

    #[test]
    fn neighbor_out_of_range() {
        let src = FOUR.replace("3 1 1 0 0 0 3 0 1 2", "3 1 1 0 0 0 3 0 1 9");
        let (line, msg) = parse_err(&src);
        assert_eq!(line, 5);
        assert!(msg.contains("out of range"), "{msg}");
    }

    #[test]
    fn malformed_inputs() {
        assert!(parse_err("four\n").1.contains("malformed header"));
        assert!(parse_err(&FOUR.replace("2 0 1 2 0 1", "2 0 1 7 0 1"))
            .1
            .contains("unknown kind"));
        assert!(parse_err(&FOUR.replace("2 0 1 2 0 1", "2 0 1 2 0 0.5"))
            .1
            .contains("unit"));
        assert!(parse_err(&FOUR.replace("\n1 1 0", "\n5 1 0"))
            .1
            .contains("expected id 1"));
        assert!(parse_err(&FOUR.replace("0 0 0 0 0 0 3 1 2 3", "0 0 0 0 0 0 3 0 2 3"))
            .1
            .contains("itself"));
        assert!(parse_err(&FOUR.replace("0 0 0 0 0 0 3 1 2 3", "0 0 0 0 0 0 4 1 2 3"))
            .1
            .contains("count mismatch"));
    }

    #[test]
    fn written_cloud_round_trips() {
        for cloud in [
            generate_rect_cloud(9, 7, Bounds::new(-1.0, 2.0, 0.5, 1.5), 0.2, 4).unwrap(),
            generate_annular_cloud(24, 6, 1.0, 4.0, 0.15, 9).unwrap(),
        ] {
            let mut buf = Vec::new();
            write_point_cloud(&cloud, &mut buf).unwrap();
            let back = read_point_cloud(buf.as_slice()).unwrap();
            assert_eq!(back.points, cloud.points);
        }
    }
}
