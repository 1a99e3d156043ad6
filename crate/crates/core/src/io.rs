//! Portable file formats: the JSON mesh document, renormalization tables and
//! solution files.
//!
//! Floating-point values in tables and solution files are written with 17
//! significant digits (`{:.16e}`), which round-trips every `f64` exactly.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::ifs::Family;
use crate::mesh::LevelMesh;
use crate::renorm::RenormEstimate;
use crate::solver::Solution;

/// Serialized form of a [`LevelMesh`]. Indices are 0-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeshDocument {
    pub family: Family,
    pub level: usize,
    pub dimension: usize,
    pub vertices: Vec<Vec<f64>>,
    pub edges: Vec<[usize; 2]>,
    pub cells: Vec<[usize; 3]>,
    pub boundary: Vec<usize>,
}

impl From<&LevelMesh> for MeshDocument {
    fn from(m: &LevelMesh) -> Self {
        MeshDocument {
            family: m.family(),
            level: m.level(),
            dimension: m.dim(),
            vertices: m.vertices().iter().map(|p| p.coords().to_vec()).collect(),
            edges: m.edges().iter().map(|&(a, b)| [a, b]).collect(),
            cells: m.cells().to_vec(),
            boundary: m.boundary_indices().to_vec(),
        }
    }
}

impl MeshDocument {
    pub fn into_mesh(self) -> Result<LevelMesh> {
        let vertices = self
            .vertices
            .iter()
            .map(|c| {
                if c.len() != self.dimension {
                    return Err(Error::DimensionMismatch {
                        expected: self.dimension,
                        found: c.len(),
                    });
                }
                Point::new(c)
            })
            .collect::<Result<Vec<_>>>()?;
        LevelMesh::from_parts(
            self.family,
            self.level,
            vertices,
            self.edges.iter().map(|e| (e[0], e[1])).collect(),
            self.cells,
            self.boundary,
        )
    }
}

pub fn write_mesh<W: Write>(mesh: &LevelMesh, mut w: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, &MeshDocument::from(mesh))?;
    writeln!(w)?;
    Ok(())
}

pub fn read_mesh<R: std::io::Read>(r: R) -> Result<LevelMesh> {
    let doc: MeshDocument = serde_json::from_reader(r)?;
    doc.into_mesh()
}

pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub const TABLE_HEADER: [&str; 5] = ["pair", "max", "mean", "min", "excluded_count"];

/// One parsed row of a renormalization table.
#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub pair: (usize, usize),
    pub max: f64,
    pub mean: f64,
    pub min: f64,
    pub excluded_count: usize,
}

impl From<&RenormEstimate> for TableRow {
    fn from(e: &RenormEstimate) -> Self {
        TableRow {
            pair: e.level_pair,
            max: e.max,
            mean: e.mean,
            min: e.min,
            excluded_count: e.excluded_count,
        }
    }
}

/// Comma-separated table, one row per level pair, pair written as `(n,n+1)`.
pub fn write_table_csv<W: Write>(rows: &[RenormEstimate], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(TABLE_HEADER).map_err(csv_err)?;
    for e in rows {
        let (a, b) = e.level_pair;
        out.write_record([
            format!("({a},{b})"),
            format_f64(e.max),
            format_f64(e.mean),
            format_f64(e.min),
            e.excluded_count.to_string(),
        ])
        .map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_table_csv<R: std::io::Read>(r: R) -> Result<Vec<TableRow>> {
    let mut rdr = csv::Reader::from_reader(r);
    let header = rdr.headers().map_err(csv_err)?.clone();
    if header.iter().collect::<Vec<_>>() != TABLE_HEADER {
        return Err(Error::Parse(format!("unexpected table header {header:?}")));
    }
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(csv_err)?;
        let pair = rec[0]
            .trim_start_matches('(')
            .trim_end_matches(')')
            .split_once(',')
            .and_then(|(a, b)| Some((a.trim().parse().ok()?, b.trim().parse().ok()?)))
            .ok_or_else(|| Error::Parse(format!("bad level pair `{}`", &rec[0])))?;
        rows.push(TableRow {
            pair,
            max: parse_f64(&rec[1])?,
            mean: parse_f64(&rec[2])?,
            min: parse_f64(&rec[3])?,
            excluded_count: rec[4]
                .parse()
                .map_err(|_| Error::Parse(format!("bad count `{}`", &rec[4])))?,
        });
    }
    Ok(rows)
}

/// Fixed-width text rendering with four decimals.
pub fn write_table_text<W: Write>(rows: &[RenormEstimate], mut w: W) -> Result<()> {
    writeln!(
        w,
        "{:<10} {:>10} {:>10} {:>10} {:>9}",
        "(n,n+1)", "max", "mean", "min", "excluded"
    )?;
    for e in rows {
        let (a, b) = e.level_pair;
        writeln!(
            w,
            "{:<10} {:>10.4} {:>10.4} {:>10.4} {:>9}",
            format!("({a},{b})"),
            e.max,
            e.mean,
            e.min,
            e.excluded_count
        )?;
    }
    Ok(())
}

/// Metadata written in the `#` header of a solution file.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionHeader {
    pub family: Family,
    pub level: usize,
    pub method: String,
    pub constant: Option<f64>,
    pub residual: f64,
    pub rhs: String,
}

pub fn write_solution<W: Write>(
    mesh: &LevelMesh,
    sol: &Solution,
    rhs: &str,
    mut w: W,
) -> Result<()> {
    writeln!(w, "# family: {}", mesh.family())?;
    writeln!(w, "# level: {}", sol.level)?;
    writeln!(w, "# method: {}", sol.method)?;
    match sol.renorm_constant {
        Some(c) => writeln!(w, "# constant: {}", format_f64(c))?,
        None => writeln!(w, "# constant: none")?,
    }
    writeln!(w, "# residual: {}", format_f64(sol.solver_residual))?;
    writeln!(w, "# rhs: {rhs}")?;
    let cols = ["x", "y", "z"][..mesh.dim()].join(",");
    writeln!(w, "# columns: {cols},value")?;
    for (p, v) in mesh.vertices().iter().zip(&sol.values.values) {
        let mut line: Vec<String> = p.coords().iter().map(|&c| format_f64(c)).collect();
        line.push(format_f64(*v));
        writeln!(w, "{}", line.join(","))?;
    }
    Ok(())
}

/// Reads a solution file back into its header and `(coordinates, value)` rows.
/// Coordinates and value of one vertex in a solution file.
pub type SolutionRow = (Vec<f64>, f64);

pub fn read_solution<R: BufRead>(r: R) -> Result<(SolutionHeader, Vec<SolutionRow>)> {
    let mut meta = std::collections::HashMap::new();
    let mut rows = Vec::new();
    for line in r.lines() {
        let line = line?;
        if let Some(rest) = line.strip_prefix('#') {
            if let Some((k, v)) = rest.split_once(':') {
                meta.insert(k.trim().to_string(), v.trim().to_string());
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let nums = line.split(',').map(parse_f64).collect::<Result<Vec<_>>>()?;
        let (value, coords) = nums
            .split_last()
            .ok_or_else(|| Error::Parse("empty solution row".into()))?;
        rows.push((coords.to_vec(), *value));
    }
    let get = |k: &str| {
        meta.get(k)
            .cloned()
            .ok_or_else(|| Error::Parse(format!("solution header lacks `{k}`")))
    };
    let constant = get("constant")?;
    let header = SolutionHeader {
        family: get("family")?.parse()?,
        level: get("level")?
            .parse()
            .map_err(|_| Error::Parse("bad level".into()))?,
        method: get("method")?,
        constant: if constant == "none" {
            None
        } else {
            Some(parse_f64(&constant)?)
        },
        residual: parse_f64(&get("residual")?)?,
        rhs: get("rhs")?,
    };
    Ok((header, rows))
}

fn parse_f64(s: &str) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad number `{s}`")))
}

fn csv_err(e: csv::Error) -> Error {
    if e.is_io_error() {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::Io(io),
            other => Error::Parse(format!("{other:?}")),
        }
    } else {
        Error::Parse(e.to_string())
    }
}
