//! File formats.
//!
//! * JSA as CSV: `#`-prefixed header lines carrying the version and the run
//!   configuration, then columns `x,y,re,im` with `x` varying slowest.
//! * JSA as binary: an 8-byte little-endian header length, a JSON header
//!   with grids and configuration, then the matrix as row-major
//!   interleaved `re, im` little-endian `f64`s.
//! * Purity sweeps as CSV with columns `r,purity_gvd,purity_linear`.
//! * Records (Schmidt results, kets, reports) as JSON documents with
//!   `version` and `config` fields next to the payload.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::c64;
use crate::dispersion::SweepRow;
use crate::error::{Error, Result};
use crate::grid::Grid1D;
use crate::jsa::JointAmplitude;
use crate::VERSION;

/// Identifier stored in binary headers.
pub const BINARY_FORMAT: &str = "jsa-forge-matrix";

/// Header of the binary JSA format.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BinaryHeader {
    pub format: String,
    pub version: String,
    pub x_grid: Grid1D,
    pub y_grid: Grid1D,
    /// Always `"row-major re,im f64le"`.
    pub layout: String,
    pub boundary_warning: bool,
    #[serde(default)]
    pub config: Value,
}

pub fn write_jsa_csv(path: impl AsRef<Path>, j: &JointAmplitude, config: &Value) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "# jsa-forge {VERSION}")?;
    writeln!(out, "# config: {}", serde_json::to_string(config)?)?;
    writeln!(out, "x,y,re,im")?;
    let (xs, ys) = (j.x_grid.points(), j.y_grid.points());
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    for (i, x) in xs.iter().enumerate() {
        for (k, y) in ys.iter().enumerate() {
            let v = j.values[(i, k)];
            w.serialize((x, y, v.re, v.im))?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Reads a CSV written by [`write_jsa_csv`] (comment lines are optional),
/// recovering the grids from the coordinate columns.
pub fn read_jsa_csv(path: impl AsRef<Path>) -> Result<JointAmplitude> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)?;
    let mut rows: Vec<(f64, f64, f64, f64)> = Vec::new();
    for rec in rdr.deserialize() {
        rows.push(rec?);
    }
    if rows.len() < 4 {
        return Err(Error::Format("JSA CSV needs at least a 2x2 grid".into()));
    }
    let ny = rows.iter().take_while(|r| r.0 == rows[0].0).count();
    if ny < 2 || !rows.len().is_multiple_of(ny) {
        return Err(Error::Format(
            "JSA CSV rows do not form a rectangular grid".into(),
        ));
    }
    let nx = rows.len() / ny;
    let x_grid = Grid1D::new(rows[0].0, rows[rows.len() - 1].0, nx)?;
    let y_grid = Grid1D::new(rows[0].1, rows[ny - 1].1, ny)?;
    let values = DMatrix::from_fn(nx, ny, |i, k| {
        let r = rows[i * ny + k];
        c64::new(r.2, r.3)
    });
    JointAmplitude::from_matrix(values, x_grid, y_grid)
}

pub fn write_jsa_binary(path: impl AsRef<Path>, j: &JointAmplitude, config: &Value) -> Result<()> {
    let header = BinaryHeader {
        format: BINARY_FORMAT.into(),
        version: VERSION.into(),
        x_grid: j.x_grid,
        y_grid: j.y_grid,
        layout: "row-major re,im f64le".into(),
        boundary_warning: j.boundary_warning,
        config: config.clone(),
    };
    let text = serde_json::to_vec(&header)?;
    let mut out = BufWriter::new(File::create(path)?);
    out.write_all(&(text.len() as u64).to_le_bytes())?;
    out.write_all(&text)?;
    for i in 0..j.values.nrows() {
        for k in 0..j.values.ncols() {
            let v = j.values[(i, k)];
            out.write_all(&v.re.to_le_bytes())?;
            out.write_all(&v.im.to_le_bytes())?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn read_jsa_binary(path: impl AsRef<Path>) -> Result<(JointAmplitude, BinaryHeader)> {
    let mut input = BufReader::new(File::open(path)?);
    let mut len = [0u8; 8];
    input.read_exact(&mut len)?;
    let len = u64::from_le_bytes(len);
    if len > 1 << 30 {
        return Err(Error::Format(format!("implausible header length {len}")));
    }
    let mut text = vec![0u8; len as usize];
    input.read_exact(&mut text)?;
    let header: BinaryHeader = serde_json::from_slice(&text)?;
    if header.format != BINARY_FORMAT {
        return Err(Error::Format(format!(
            "unknown binary format {:?}",
            header.format
        )));
    }
    let (nx, ny) = (header.x_grid.n_points, header.y_grid.n_points);
    let mut buf = vec![0u8; nx * ny * 16];
    input.read_exact(&mut buf)?;
    if !input.fill_buf()?.is_empty() {
        return Err(Error::Format("trailing bytes after matrix".into()));
    }
    let f = |o: usize| f64::from_le_bytes(buf[o..o + 8].try_into().expect("8-byte slice"));
    let values = DMatrix::from_fn(nx, ny, |i, k| {
        let o = 16 * (i * ny + k);
        c64::new(f(o), f(o + 8))
    });
    let j = JointAmplitude::from_matrix(values, header.x_grid, header.y_grid)?;
    Ok((j, header))
}

/// Sweep table with columns `r,purity_gvd,purity_linear`, one row per
/// pulse duration, preceded by the same comment lines as the JSA CSV.
pub fn write_sweep_csv(path: impl AsRef<Path>, rows: &[SweepRow], config: &Value) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "# jsa-forge {VERSION}")?;
    writeln!(out, "# config: {}", serde_json::to_string(config)?)?;
    writeln!(out, "r,purity_gvd,purity_linear")?;
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    for row in rows {
        w.serialize((row.r, row.purity_gvd, row.purity_linear))?;
    }
    w.flush()?;
    Ok(())
}

/// Reads `(r, purity_gvd, purity_linear)` triples back.
pub fn read_sweep_csv(path: impl AsRef<Path>) -> Result<Vec<(f64, f64, f64)>> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)?;
    let headers = rdr.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != ["r", "purity_gvd", "purity_linear"] {
        return Err(Error::Format(format!(
            "unexpected sweep header {headers:?}"
        )));
    }
    rdr.deserialize().map(|r| r.map_err(Error::from)).collect()
}

/// `{"version": …, "config": …, <key>: payload}`.
pub fn envelope<T: Serialize>(key: &str, payload: &T, config: &Value) -> Result<Value> {
    let mut doc = Map::new();
    doc.insert("version".into(), json!(VERSION));
    doc.insert("config".into(), config.clone());
    doc.insert(key.into(), serde_json::to_value(payload)?);
    Ok(Value::Object(doc))
}

pub fn write_json<T: Serialize>(
    path: impl AsRef<Path>,
    key: &str,
    payload: &T,
    config: &Value,
) -> Result<()> {
    let doc = envelope(key, payload, config)?;
    let mut out = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut out, &doc)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

/// Reads the payload stored under `key` by [`write_json`].
pub fn read_json<T: for<'de> Deserialize<'de>>(path: impl AsRef<Path>, key: &str) -> Result<T> {
    let doc: Value = serde_json::from_reader(BufReader::new(File::open(path)?))?;
    let payload = doc
        .get(key)
        .cloned()
        .ok_or_else(|| Error::Format(format!("missing field {key:?}")))?;
    Ok(serde_json::from_value(payload)?)
}
