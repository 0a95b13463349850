//! Text formats for clouds, grids, profiles and results.
//!
//! Clouds are plain text, one point per line, whitespace- or comma-separated
//! decimals, `#` comments allowed, dimension inferred from the first data
//! line. Grids add a trailing 0/1 label column and carry their covering
//! radius in a `# epsilon = ...` comment. Numbers are written with 17
//! significant digits, so every save/load round trip is exact.

use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::geom::ExtendedReal;
use crate::profile::BetaReachProfile;
use crate::rconv::{LabeledGrid, RconvBoundResult, ViolationSet};
use crate::reach::ReachBoundResult;
use serde_json::{json, Map, Value};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

/// 17 significant digits: enough to reproduce any f64 exactly.
pub fn fmt_f64(v: f64) -> String {
    if v.is_infinite() {
        "inf".to_string()
    } else {
        format!("{v:.16e}")
    }
}

fn parse_field(tok: &str, line: usize) -> Result<f64> {
    tok.parse::<f64>().map_err(|_| Error::Parse { line, msg: format!("bad number {tok:?}") })
}

struct Row {
    line: usize,
    values: Vec<f64>,
}

fn read_rows<R: BufRead>(reader: R) -> Result<(Vec<Row>, Option<f64>)> {
    let mut rows = Vec::new();
    let mut epsilon = None;
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let trimmed = line.trim();
        if let Some(comment) = trimmed.strip_prefix('#') {
            let c = comment.trim();
            if let Some(rest) = c.strip_prefix("epsilon") {
                let rest = rest.trim_start().trim_start_matches('=').trim();
                if !rest.is_empty() {
                    epsilon = Some(parse_field(rest, lineno)?);
                }
            }
            continue;
        }
        if trimmed.is_empty() {
            continue;
        }
        let values = trimmed
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| parse_field(t, lineno))
            .collect::<Result<Vec<f64>>>()?;
        rows.push(Row { line: lineno, values });
    }
    Ok((rows, epsilon))
}

pub fn write_cloud<W: Write>(out: &mut W, cloud: &PointCloud) -> Result<()> {
    writeln!(out, "# point cloud: {} points, dim {}", cloud.len(), cloud.dim())?;
    for p in cloud.iter() {
        let row: Vec<String> = p.iter().map(|&c| fmt_f64(c)).collect();
        writeln!(out, "{}", row.join(" "))?;
    }
    Ok(())
}

pub fn save_cloud<P: AsRef<Path>>(path: P, cloud: &PointCloud) -> Result<()> {
    let mut file = BufWriter::new(std::fs::File::create(path)?);
    write_cloud(&mut file, cloud)
}

pub fn read_cloud<R: BufRead>(reader: R) -> Result<PointCloud> {
    let (rows, _) = read_rows(reader)?;
    if rows.is_empty() {
        return Err(Error::EmptyCloud);
    }
    let dim = rows[0].values.len();
    let mut flat = Vec::with_capacity(rows.len() * dim);
    for row in &rows {
        if row.values.len() != dim {
            return Err(Error::Parse {
                line: row.line,
                msg: format!("expected {dim} columns, got {}", row.values.len()),
            });
        }
        flat.extend_from_slice(&row.values);
    }
    PointCloud::from_flat(dim, flat)
}

pub fn load_cloud<P: AsRef<Path>>(path: P) -> Result<PointCloud> {
    read_cloud(BufReader::new(std::fs::File::open(path)?))
}

pub fn write_grid<W: Write>(out: &mut W, grid: &LabeledGrid) -> Result<()> {
    writeln!(
        out,
        "# labeled grid: {} points, dim {}, trailing column is the 0/1 label",
        grid.len(),
        grid.phi().dim()
    )?;
    writeln!(out, "# epsilon = {}", fmt_f64(grid.epsilon()))?;
    for i in 0..grid.len() {
        let mut row: Vec<String> = grid.phi().point(i).iter().map(|&c| fmt_f64(c)).collect();
        row.push(if grid.is_inside(i) { "1".into() } else { "0".into() });
        writeln!(out, "{}", row.join(" "))?;
    }
    Ok(())
}

pub fn save_grid<P: AsRef<Path>>(path: P, grid: &LabeledGrid) -> Result<()> {
    let mut file = BufWriter::new(std::fs::File::create(path)?);
    write_grid(&mut file, grid)
}

/// Reads a labeled grid. `epsilon` overrides the value stored in the file;
/// one of the two must be present.
pub fn read_grid<R: BufRead>(reader: R, epsilon: Option<f64>) -> Result<LabeledGrid> {
    let (rows, file_epsilon) = read_rows(reader)?;
    if rows.is_empty() {
        return Err(Error::EmptyCloud);
    }
    let cols = rows[0].values.len();
    if cols < 2 {
        return Err(Error::Parse { line: rows[0].line, msg: "grid rows need coordinates plus a label".into() });
    }
    let dim = cols - 1;
    let mut points = Vec::with_capacity(rows.len());
    let mut labels = Vec::with_capacity(rows.len());
    for row in &rows {
        if row.values.len() != cols {
            return Err(Error::Parse {
                line: row.line,
                msg: format!("expected {cols} columns, got {}", row.values.len()),
            });
        }
        let label = row.values[dim];
        if label != 0.0 && label != 1.0 {
            return Err(Error::Parse { line: row.line, msg: format!("label must be 0 or 1, got {label}") });
        }
        points.push(row.values[..dim].to_vec());
        labels.push(label == 1.0);
    }
    let epsilon = epsilon.or(file_epsilon).ok_or_else(|| {
        Error::InvalidInput("no covering radius: pass epsilon or store it in the file".into())
    })?;
    LabeledGrid::new(&points, &labels, epsilon)
}

pub fn load_grid<P: AsRef<Path>>(path: P, epsilon: Option<f64>) -> Result<LabeledGrid> {
    read_grid(BufReader::new(std::fs::File::open(path)?), epsilon)
}

/// Profile CSV: header `beta,value`, one row per breakpoint, then a terminal
/// row `max_beta,inf` marking where the profile becomes infinite. The token
/// `inf` stands for +infinity. An empty profile writes only the header.
pub fn write_profile<W: Write>(out: &mut W, profile: &BetaReachProfile) -> Result<()> {
    writeln!(out, "beta,value")?;
    for &(beta, value) in profile.breakpoints() {
        writeln!(out, "{},{}", fmt_f64(beta), fmt_f64(value.value()))?;
    }
    if let Some(mb) = profile.max_beta() {
        writeln!(out, "{},inf", fmt_f64(mb))?;
    }
    Ok(())
}

pub fn save_profile<P: AsRef<Path>>(path: P, profile: &BetaReachProfile) -> Result<()> {
    let mut file = BufWriter::new(std::fs::File::create(path)?);
    write_profile(&mut file, profile)
}

pub fn read_profile<R: BufRead>(reader: R) -> Result<BetaReachProfile> {
    let mut entries: Vec<(f64, ExtendedReal)> = Vec::new();
    let mut lineno = 0;
    let mut saw_header = false;
    for line in reader.lines() {
        let line = line?;
        lineno += 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        if !saw_header {
            if trimmed != "beta,value" {
                return Err(Error::Parse { line: lineno, msg: "expected header beta,value".into() });
            }
            saw_header = true;
            continue;
        }
        let mut parts = trimmed.split(',');
        let beta = parse_field(parts.next().unwrap_or(""), lineno)?;
        let value_tok = parts.next().ok_or(Error::Parse { line: lineno, msg: "missing value".into() })?.trim();
        let value = if value_tok == "inf" {
            ExtendedReal::INFINITY
        } else {
            ExtendedReal::finite(parse_field(value_tok, lineno)?)
        };
        entries.push((beta, value));
    }
    if !saw_header {
        return Err(Error::Parse { line: lineno, msg: "missing header beta,value".into() });
    }
    let max_beta = match entries.last() {
        Some(&(b, v)) if v.is_infinite() => {
            entries.pop();
            Some(b)
        }
        Some(_) => {
            return Err(Error::Parse { line: lineno, msg: "profile must end with a terminal inf row".into() })
        }
        None => None,
    };
    BetaReachProfile::from_parts(entries, max_beta)
}

pub fn load_profile<P: AsRef<Path>>(path: P) -> Result<BetaReachProfile> {
    read_profile(BufReader::new(std::fs::File::open(path)?))
}

fn bound_value(v: ExtendedReal) -> Value {
    if v.is_infinite() {
        Value::String("inf".into())
    } else {
        json!(v.value())
    }
}

/// JSON object for a reach bound: keys `bound`, `epsilon` and, when a witness
/// exists, `witness_i`, `witness_j`, `alpha`, `x`.
pub fn reach_result_json(r: &ReachBoundResult) -> Value {
    let mut map = Map::new();
    map.insert("bound".into(), bound_value(r.value));
    map.insert("epsilon".into(), json!(r.epsilon));
    if let Some(w) = &r.witness {
        map.insert("witness_i".into(), json!(w.i));
        map.insert("witness_j".into(), json!(w.j));
        map.insert("alpha".into(), json!(w.alpha));
        map.insert("x".into(), json!(w.x));
    }
    Value::Object(map)
}

/// JSON object for an r-convexity bound: keys `bound`, `epsilon`, `r_max`,
/// `witness` (when present) and `window_limited`.
pub fn rconv_result_json(r: &RconvBoundResult) -> Value {
    let mut map = Map::new();
    map.insert("bound".into(), bound_value(r.value));
    map.insert("epsilon".into(), json!(r.epsilon));
    map.insert("r_max".into(), json!(r.r_max));
    if let Some(w) = r.witness {
        map.insert("witness".into(), json!(w));
    }
    map.insert("window_limited".into(), json!(r.window_limited));
    Value::Object(map)
}

/// Writes flagged points as an XYZ-style file: one point per line, space
/// separated coordinates (three columns in R^3; other dimensions write all
/// their coordinates).
pub fn write_violations_xyz<W: Write>(
    out: &mut W,
    grid: &LabeledGrid,
    violations: &ViolationSet,
) -> Result<()> {
    for &id in &violations.points {
        let row: Vec<String> = grid.phi().point(id).iter().map(|&c| fmt_f64(c)).collect();
        writeln!(out, "{}", row.join(" "))?;
    }
    Ok(())
}

pub fn save_violations_xyz<P: AsRef<Path>>(
    path: P,
    grid: &LabeledGrid,
    violations: &ViolationSet,
) -> Result<()> {
    let mut file = BufWriter::new(std::fs::File::create(path)?);
    write_violations_xyz(&mut file, grid, violations)
}
