//! CSV serialization with a JSON sidecar.
//!
//! A path is stored as `<name>.csv` with header `t,v1,...,vd` (one row per
//! breakpoint) plus `<name>.json` holding `{dimension, anchor, horizon,
//! killed_at}`; an infinite horizon is `null`. Numbers are written with the
//! shortest representation that parses back to the same bits, so a write/read
//! round trip is exact.
//!
//! Excursion lists are stored as `g,d,size,killed` rows with `inf` for the
//! right endpoint (and possibly the size) of a killed excursion.

use std::fs::File;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::IoError;
use crate::ops::ExcursionItem;
use crate::path::CadlagPath;

#[derive(Serialize, Deserialize)]
struct Sidecar {
    dimension: usize,
    anchor: Vec<f64>,
    horizon: Option<f64>,
    killed_at: Option<f64>,
}

fn sidecar_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("json")
}

fn fmt(x: f64) -> String {
    if x.is_infinite() {
        "inf".to_string()
    } else {
        format!("{x}")
    }
}

fn parse(field: &str, line: usize) -> Result<f64, IoError> {
    if field == "inf" {
        return Ok(f64::INFINITY);
    }
    field.parse::<f64>().map_err(|e| IoError::Malformed { line, msg: e.to_string() })
}

/// Writes `<csv_path>` and its `.json` sidecar.
pub fn write_path_csv(f: &CadlagPath, csv_path: &Path) -> Result<(), IoError> {
    let mut w = csv::Writer::from_path(csv_path)?;
    let mut header = vec!["t".to_string()];
    header.extend((1..=f.dimension()).map(|i| format!("v{i}")));
    w.write_record(&header)?;
    for (t, v) in f.breakpoints() {
        let mut row = vec![fmt(*t)];
        row.extend(v.iter().map(|x| fmt(*x)));
        w.write_record(&row)?;
    }
    w.flush()?;
    let sidecar = Sidecar {
        dimension: f.dimension(),
        anchor: f.anchor().to_vec(),
        horizon: if f.horizon().is_finite() { Some(f.horizon()) } else { None },
        killed_at: f.killed_at(),
    };
    serde_json::to_writer_pretty(File::create(sidecar_path(csv_path))?, &sidecar)?;
    Ok(())
}

/// Reads a path written by [`write_path_csv`].
pub fn read_path_csv(csv_path: &Path) -> Result<CadlagPath, IoError> {
    let sidecar: Sidecar = serde_json::from_reader(File::open(sidecar_path(csv_path))?)?;
    let mut r = csv::Reader::from_path(csv_path)?;
    let mut bps = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let line = i + 2; // header is line 1
        if rec.len() != sidecar.dimension + 1 {
            return Err(IoError::Malformed {
                line,
                msg: format!("expected {} fields, got {}", sidecar.dimension + 1, rec.len()),
            });
        }
        let t = parse(&rec[0], line)?;
        let v = rec
            .iter()
            .skip(1)
            .map(|s| parse(s, line))
            .collect::<Result<Vec<f64>, _>>()?;
        bps.push((t, v));
    }
    let horizon = sidecar.horizon.unwrap_or(f64::INFINITY);
    Ok(CadlagPath::new(sidecar.dimension, sidecar.anchor, bps, horizon, sidecar.killed_at)?)
}

/// A row of an excursion list: the interval, the size and the killed flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExcursionRecord {
    pub g: f64,
    pub d: f64,
    pub size: f64,
    pub killed: bool,
}

impl From<&ExcursionItem> for ExcursionRecord {
    fn from(item: &ExcursionItem) -> Self {
        ExcursionRecord {
            g: item.left,
            d: item.right,
            size: item.size.unwrap_or(f64::NAN),
            killed: item.is_killed(),
        }
    }
}

/// Writes an excursion list as `g,d,size,killed` rows.
pub fn write_excursions_csv(items: &[ExcursionItem], csv_path: &Path) -> Result<(), IoError> {
    let mut w = csv::Writer::from_path(csv_path)?;
    w.write_record(["g", "d", "size", "killed"])?;
    for item in items {
        let rec = ExcursionRecord::from(item);
        w.write_record([
            fmt(rec.g),
            fmt(rec.d),
            fmt(rec.size),
            rec.killed.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads an excursion list written by [`write_excursions_csv`].
pub fn read_excursions_csv(csv_path: &Path) -> Result<Vec<ExcursionRecord>, IoError> {
    let mut r = csv::Reader::from_path(csv_path)?;
    let mut out = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        if rec.len() != 4 {
            return Err(IoError::Malformed { line, msg: format!("expected 4 fields, got {}", rec.len()) });
        }
        let killed = rec[3]
            .parse::<bool>()
            .map_err(|e| IoError::Malformed { line, msg: e.to_string() })?;
        out.push(ExcursionRecord {
            g: parse(&rec[0], line)?,
            d: parse(&rec[1], line)?,
            size: parse(&rec[2], line)?,
            killed,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ops::decompose_sized;
    use crate::size::SizeFunctional;

    #[test]
    fn path_round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("path.csv");
        // awkward values: thirds, tiny and huge magnitudes
        let f = CadlagPath::new(
            2,
            vec![0.0, 0.5],
            vec![
                (0.0, vec![0.0, 0.5]),
                (1.0 / 3.0, vec![1e-300, 0.1 + 0.2]),
                (2.0 / 3.0, vec![-1e300, 0.5]),
            ],
            10.0,
            Some(9.5),
        )
        .unwrap();
        write_path_csv(&f, &p).unwrap();
        let g = read_path_csv(&p).unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn infinite_horizon_round_trips_via_null() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("path.csv");
        let f = CadlagPath::new(1, vec![0.0], vec![(0.0, vec![1.0])], f64::INFINITY, None).unwrap();
        write_path_csv(&f, &p).unwrap();
        let sidecar = std::fs::read_to_string(dir.path().join("path.json")).unwrap();
        assert!(sidecar.contains("null"));
        assert_eq!(read_path_csv(&p).unwrap(), f);
    }

    #[test]
    fn excursion_round_trip_with_killed_row() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("exc.csv");
        let f = CadlagPath::new(
            1,
            vec![0.0],
            vec![(0.0, vec![0.0]), (1.0, vec![2.0]), (2.0, vec![0.0]), (3.0, vec![1.0])],
            5.0,
            Some(5.0),
        )
        .unwrap();
        let items = decompose_sized(&f, &SizeFunctional::Length);
        write_excursions_csv(&items, &p).unwrap();
        let rows = read_excursions_csv(&p).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0], ExcursionRecord { g: 1.0, d: 2.0, size: 1.0, killed: false });
        assert!(rows[1].killed);
        assert!(rows[1].d.is_infinite());
        assert!(rows[1].size.is_infinite());
        let text = std::fs::read_to_string(&p).unwrap();
        assert!(text.lines().nth(2).unwrap().contains("inf"));
    }

    #[test]
    fn malformed_rows_are_reported_with_line_numbers() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad.csv");
        std::fs::write(&p, "t,v1\n0,0\n0.5,oops\n").unwrap();
        std::fs::write(
            dir.path().join("bad.json"),
            r#"{"dimension":1,"anchor":[0.0],"horizon":1.0,"killed_at":null}"#,
        )
        .unwrap();
        match read_path_csv(&p) {
            Err(IoError::Malformed { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected malformed error, got {other:?}"),
        }
    }
}
