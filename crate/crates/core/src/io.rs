//! File formats: h-tables, step functions, traces, samples and JSON reports.
//!
//! Floats are written with 17 significant digits so that every CSV file
//! reads back bit-exactly.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hfun::{GInverse, HFunction};
use crate::map::BoundaryTrace;
use crate::verify::ExitSamples;

/// Version tag of every JSON report.
pub const SCHEMA_VERSION: u32 = 1;

/// Lossless text form of a float.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Deserialize)]
struct HRow {
    r: f64,
    h: f64,
}

/// Reads a tabulated h-function from CSV with header `r,h`.
pub fn read_h_table<R: Read>(reader: R) -> Result<HFunction> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != ["r", "h"] {
        return Err(Error::InvalidH(format!("expected header \"r,h\", got {:?}", headers)));
    }
    let mut radii = Vec::new();
    let mut values = Vec::new();
    for row in rdr.deserialize() {
        let row: HRow = row?;
        radii.push(row.r);
        values.push(row.h);
    }
    HFunction::tabulated(radii, values)
}

pub fn read_h_table_path(path: &Path) -> Result<HFunction> {
    read_h_table(File::open(path)?)
}

#[derive(Debug, Serialize, Deserialize)]
struct StepFile {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

/// Reads a step h-function from JSON `{"breakpoints": [...], "values": [...]}`.
pub fn read_step_json<R: Read>(reader: R) -> Result<HFunction> {
    let s: StepFile = serde_json::from_reader(reader)?;
    HFunction::step(s.breakpoints, s.values)
}

pub fn read_step_json_path(path: &Path) -> Result<HFunction> {
    read_step_json(File::open(path)?)
}

/// Writes `s,g` on `n` uniform points of `[0, 1]`.
pub fn write_g_grid<W: Write>(g: &GInverse, n: usize, out: W) -> Result<()> {
    let mut out = BufWriter::new(out);
    writeln!(out, "s,g")?;
    let m = n.max(2) - 1;
    for k in 0..=m {
        let s = k as f64 / m as f64;
        writeln!(out, "{},{}", fmt_f64(s), fmt_f64(g.eval(s)))?;
    }
    out.flush()?;
    Ok(())
}

/// Writes a trace as `x,re,im,component`.
pub fn write_trace_csv<W: Write>(trace: &BoundaryTrace, out: W) -> Result<()> {
    let mut out = BufWriter::new(out);
    writeln!(out, "x,re,im,component")?;
    for ((x, p), c) in trace.params.iter().zip(&trace.points).zip(&trace.component_labels) {
        writeln!(out, "{},{},{},{}", fmt_f64(*x), fmt_f64(p.re), fmt_f64(p.im), c)?;
    }
    out.flush()?;
    Ok(())
}

#[derive(Debug, Deserialize)]
struct TraceRow {
    x: f64,
    re: f64,
    im: f64,
    component: usize,
}

/// Reads a trace written by [`write_trace_csv`]. A single component whose
/// ends coincide (to `1e-9` of its extent) is taken as closed.
pub fn read_trace_csv<R: Read>(reader: R) -> Result<BoundaryTrace> {
    let mut rdr = csv::Reader::from_reader(reader);
    let mut params = Vec::new();
    let mut points = Vec::new();
    let mut labels = Vec::new();
    for row in rdr.deserialize() {
        let row: TraceRow = row?;
        params.push(row.x);
        points.push(Complex64::new(row.re, row.im));
        labels.push(row.component);
    }
    let mut trace = BoundaryTrace::new(points, params, labels, false);
    if trace.component_count() == 1 && trace.len() > 2 {
        let gap = (trace.points[0] - trace.points[trace.len() - 1]).norm();
        trace.closed = gap <= 1e-9 * trace.bbox_diagonal();
    }
    Ok(trace)
}

/// Writes a polyline as `t,re,im`.
pub fn write_line_csv<W: Write>(ts: &[f64], pts: &[Complex64], out: W) -> Result<()> {
    let mut out = BufWriter::new(out);
    writeln!(out, "t,re,im")?;
    for (t, p) in ts.iter().zip(pts) {
        writeln!(out, "{},{},{}", fmt_f64(*t), fmt_f64(p.re), fmt_f64(p.im))?;
    }
    out.flush()?;
    Ok(())
}

/// Writes radii (merge order) as a `radius` column.
pub fn write_samples_csv<W: Write>(samples: &ExitSamples, out: W) -> Result<()> {
    let mut out = BufWriter::new(out);
    writeln!(out, "radius")?;
    for r in &samples.radii {
        writeln!(out, "{}", fmt_f64(*r))?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_samples_csv<R: Read>(reader: R) -> Result<Vec<f64>> {
    let mut rdr = csv::Reader::from_reader(reader);
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let v = rec
            .get(0)
            .ok_or_else(|| Error::Param("empty sample row".into()))?
            .parse::<f64>()
            .map_err(|e| Error::Param(format!("bad radius: {e}")))?;
        out.push(v);
    }
    Ok(out)
}

#[derive(Serialize)]
struct Envelope<'a, T> {
    schema: u32,
    #[serde(flatten)]
    body: &'a T,
}

/// Serialises a struct as pretty JSON with a leading `"schema"` field.
pub fn report_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(&Envelope {
        schema: SCHEMA_VERSION,
        body: value,
    })?;
    s.push('\n');
    Ok(s)
}

pub fn write_report<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    std::fs::write(path, report_json(value)?)?;
    Ok(())
}

/// Creates `path` for writing.
pub fn create(path: &Path) -> Result<File> {
    Ok(File::create(path)?)
}
