//! Field files, profile export, and report formatting.
//!
//! A field file is a one-line text header
//! `capsym-field v1 dim=<n> L=<L> h=<h> order=rowmajor-xn-slowest`
//! followed by whitespace-separated decimal values, the last coordinate
//! varying slowest. Values are written in the shortest representation
//! that parses back to the identical bits. Whether the grid covers the
//! half-space or the full space is recovered from the value count.

use crate::cone::ConeSpec;
use crate::error::{Error, Result};
use crate::grid::{GridSpec, RegionSpec, ScalarField};
use crate::rearrange::{Interpolation, MonotoneProfile};
use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Write as _};
use std::path::Path;

const HEADER_MAGIC: &str = "capsym-field";
const HEADER_VERSION: &str = "v1";
const HEADER_ORDER: &str = "order=rowmajor-xn-slowest";

fn parse_err<T>(path: &Path, line: usize, msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse {
        path: path.to_path_buf(),
        line,
        msg: msg.into(),
    })
}

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Writes a field in the canonical format; the written file parses back
/// to a bit-identical field.
pub fn write_field(path: &Path, field: &ScalarField) -> Result<()> {
    let grid = field.grid();
    let mut out = String::new();
    writeln!(
        out,
        "{HEADER_MAGIC} {HEADER_VERSION} dim={} L={} h={} {HEADER_ORDER}",
        grid.dim(),
        grid.half_extent(),
        grid.spacing()
    )
    .unwrap();
    for chunk in field.values().chunks(8) {
        let mut line = String::new();
        for (k, v) in chunk.iter().enumerate() {
            if k > 0 {
                line.push(' ');
            }
            write!(line, "{v}").unwrap();
        }
        out.push_str(&line);
        out.push('\n');
    }
    std::fs::write(path, out).map_err(|e| io_err(path, e))
}

/// Reads a field file. The cone kind (half- or full-space) is inferred
/// from the value count.
pub fn read_field(path: &Path) -> Result<ScalarField> {
    let file = std::fs::File::open(path).map_err(|e| io_err(path, e))?;
    let mut reader = BufReader::new(file);
    let mut header = String::new();
    reader
        .read_line(&mut header)
        .map_err(|e| io_err(path, e))?;
    let tokens: Vec<&str> = header.split_whitespace().collect();
    if tokens.len() != 6 || tokens[0] != HEADER_MAGIC {
        return parse_err(path, 1, "expected `capsym-field v1 dim=.. L=.. h=.. order=..`");
    }
    if tokens[1] != HEADER_VERSION {
        return parse_err(path, 1, format!("unsupported version {}", tokens[1]));
    }
    let dim: usize = match tokens[2].strip_prefix("dim=").and_then(|s| s.parse().ok()) {
        Some(d) => d,
        None => return parse_err(path, 1, format!("bad dim field {}", tokens[2])),
    };
    let l: f64 = match tokens[3].strip_prefix("L=").and_then(|s| s.parse().ok()) {
        Some(v) => v,
        None => return parse_err(path, 1, format!("bad L field {}", tokens[3])),
    };
    let h: f64 = match tokens[4].strip_prefix("h=").and_then(|s| s.parse().ok()) {
        Some(v) => v,
        None => return parse_err(path, 1, format!("bad h field {}", tokens[4])),
    };
    if tokens[5] != HEADER_ORDER {
        return parse_err(path, 1, format!("unsupported ordering {}", tokens[5]));
    }
    let mut values = Vec::new();
    let mut line = String::new();
    let mut lineno = 1usize;
    loop {
        line.clear();
        let read = reader.read_line(&mut line).map_err(|e| io_err(path, e))?;
        if read == 0 {
            break;
        }
        lineno += 1;
        for tok in line.split_whitespace() {
            match tok.parse::<f64>() {
                Ok(v) if v.is_finite() => values.push(v),
                Ok(v) => return parse_err(path, lineno, format!("non-finite value {v}")),
                Err(_) => return parse_err(path, lineno, format!("bad value `{tok}`")),
            }
        }
    }
    let half = ConeSpec::half_space(dim).and_then(|c| GridSpec::new(c, l, h));
    let full = ConeSpec::full_space(dim).and_then(|c| GridSpec::new(c, l, h));
    let counts: Vec<(GridSpec, usize)> = [half, full]
        .into_iter()
        .flatten()
        .map(|g| (g, g.node_count()))
        .collect();
    if counts.is_empty() {
        return parse_err(path, 1, format!("invalid grid parameters dim={dim} L={l} h={h}"));
    }
    for (grid, count) in &counts {
        if values.len() == *count {
            return ScalarField::new(*grid, values).map_err(|e| Error::Parse {
                path: path.to_path_buf(),
                line: 2,
                msg: e.to_string(),
            });
        }
    }
    let expect: Vec<String> = counts.iter().map(|(_, c)| c.to_string()).collect();
    parse_err(
        path,
        lineno,
        format!(
            "value count {} does not match the declared dim={dim} grid \
             (expected {} values)",
            values.len(),
            expect.join(" or ")
        ),
    )
}

/// Reads a field file as a region level function.
pub fn read_region(path: &Path) -> Result<RegionSpec> {
    let field = read_field(path)?;
    RegionSpec::new(*field.grid(), field.values().to_vec())
}

/// Exports a profile as two-column numeric text with a one-line header.
pub fn write_profile(path: &Path, profile: &MonotoneProfile, name: &str) -> Result<()> {
    let interp = match profile.interpolation() {
        Interpolation::Linear => "linear",
        Interpolation::LeftConstant => "left-constant",
    };
    let mut out = String::new();
    writeln!(
        out,
        "# capsym-profile v1 name={name} interpolation={interp} points={}",
        profile.points().len()
    )
    .unwrap();
    for (a, v) in profile.points() {
        writeln!(out, "{} {}", fmt_sig(*a), fmt_sig(*v)).unwrap();
    }
    std::fs::write(path, out).map_err(|e| io_err(path, e))
}

/// Formats with 12 significant digits; plain decimal in a moderate
/// exponent range, scientific outside it.
pub fn fmt_sig(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let a = v.abs();
    if (1e-4..1e13).contains(&a) {
        let exp = a.log10().floor() as i32;
        let decimals = (11 - exp).max(0) as usize;
        let s = format!("{v:.decimals$}");
        let trimmed = s.trim_end_matches('0').trim_end_matches('.');
        trimmed.to_string()
    } else {
        format!("{v:.11e}")
    }
}

/// Ordered key-value report; rendered as `key = value` lines.
#[derive(Debug, Default, Clone)]
pub struct Report {
    entries: Vec<(String, String)>,
}

impl Report {
    pub fn new() -> Self {
        Report::default()
    }

    pub fn push(&mut self, key: &str, value: impl Into<String>) {
        self.entries.push((key.to_string(), value.into()));
    }

    pub fn push_num(&mut self, key: &str, value: f64) {
        self.push(key, fmt_sig(value));
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            writeln!(out, "{k} = {v}").unwrap();
        }
        out
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.render()).map_err(|e| io_err(path, e))
    }
}

/// Writes a comma-separated numeric table.
pub fn write_table(path: &Path, headers: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| io_err(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    let do_io = |w: &mut std::io::BufWriter<std::fs::File>| -> std::io::Result<()> {
        writeln!(w, "{}", headers.join(","))?;
        for row in rows {
            let cells: Vec<String> = row.iter().map(|v| fmt_sig(*v)).collect();
            writeln!(w, "{}", cells.join(","))?;
        }
        Ok(())
    };
    do_io(&mut w).map_err(|e| io_err(path, e))
}
