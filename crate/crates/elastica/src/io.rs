//! Trace and snapshot files.
//!
//! Both formats are plain text with every number printed to 17 significant
//! digits, so reading a file back reproduces the written values bit for
//! bit and identical reruns produce byte-identical files.
//!
//! * Trace: CSV with header `t,length,E,Ehat,int_ks2,int_k4,dt`.
//! * Snapshot: optional `# key=value` header lines, then one row per node,
//!   `rho x1 x2` plus `y1 y2` when the curvature field is present.

use std::fs;
use std::path::Path;

use crate::curves::DiscreteCurve;
use crate::diagnostics::{EnergyTrace, TraceRow};
use crate::vec2::Vec2;
use crate::{Error, Result};

pub const TRACE_HEADER: &str = "t,length,E,Ehat,int_ks2,int_k4,dt";

fn io_err(path: &Path, e: std::io::Error) -> Error {
    Error::domain(format!("{}: {e}", path.display()))
}

fn parse_field(path: &Path, line: usize, s: &str) -> Result<f64> {
    s.parse::<f64>().map_err(|_| {
        Error::domain(format!(
            "{}, line {line}: unparsable number {s:?}",
            path.display()
        ))
    })
}

pub fn write_trace(path: impl AsRef<Path>, trace: &EnergyTrace) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::with_capacity(trace.rows.len() * 160 + 64);
    out.push_str(TRACE_HEADER);
    out.push('\n');
    for r in &trace.rows {
        out.push_str(&format!(
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
            r.t, r.length, r.energy, r.scale_invariant, r.int_ks2, r.int_k4, r.dt
        ));
    }
    fs::write(path, out).map_err(|e| io_err(path, e))
}

pub fn read_trace(path: impl AsRef<Path>) -> Result<EnergyTrace> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h == TRACE_HEADER => {}
        _ => {
            return Err(Error::domain(format!(
                "{}: missing trace header",
                path.display()
            )))
        }
    }
    let mut trace = EnergyTrace::new();
    for (i, line) in lines {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            return Err(Error::domain(format!(
                "{}, line {}: expected 7 columns, found {}",
                path.display(),
                i + 1,
                fields.len()
            )));
        }
        let mut v = [0.0; 7];
        for (k, f) in fields.iter().enumerate() {
            v[k] = parse_field(path, i + 1, f)?;
        }
        trace.push(TraceRow {
            t: v[0],
            length: v[1],
            energy: v[2],
            scale_invariant: v[3],
            int_ks2: v[4],
            int_k4: v[5],
            dt: v[6],
        });
    }
    trace.validate()?;
    Ok(trace)
}

pub fn write_snapshot(
    path: impl AsRef<Path>,
    curve: &DiscreteCurve,
    meta: &[(String, String)],
) -> Result<()> {
    let path = path.as_ref();
    curve.validate()?;
    let j_elems = curve.element_count();
    let mut out = String::with_capacity((j_elems + 1) * 120 + 256);
    for (k, v) in meta {
        if k.contains('=') || k.contains('\n') || v.contains('\n') {
            return Err(Error::domain(format!("invalid snapshot header key {k:?}")));
        }
        out.push_str(&format!("# {k}={v}\n"));
    }
    for node in 0..=j_elems {
        let p = curve.x[node];
        match &curve.y {
            Some(y) => out.push_str(&format!(
                "{:.16e} {:.16e} {:.16e} {:.16e} {:.16e}\n",
                curve.rho(node),
                p.x,
                p.y,
                y[node].x,
                y[node].y
            )),
            None => out.push_str(&format!(
                "{:.16e} {:.16e} {:.16e}\n",
                curve.rho(node),
                p.x,
                p.y
            )),
        }
    }
    fs::write(path, out).map_err(|e| io_err(path, e))
}

pub fn read_snapshot(
    path: impl AsRef<Path>,
) -> Result<(DiscreteCurve, Vec<(String, String)>)> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut meta = Vec::new();
    let mut x = Vec::new();
    let mut y = Vec::new();
    let mut cols = 0usize;
    for (i, line) in text.lines().enumerate() {
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            let rest = rest.trim_start();
            match rest.split_once('=') {
                Some((k, v)) => meta.push((k.to_string(), v.to_string())),
                None => {
                    return Err(Error::domain(format!(
                        "{}, line {}: header without '='",
                        path.display(),
                        i + 1
                    )))
                }
            }
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if cols == 0 {
            cols = fields.len();
            if cols != 3 && cols != 5 {
                return Err(Error::domain(format!(
                    "{}, line {}: expected 3 or 5 columns, found {cols}",
                    path.display(),
                    i + 1
                )));
            }
        } else if fields.len() != cols {
            return Err(Error::domain(format!(
                "{}, line {}: inconsistent column count",
                path.display(),
                i + 1
            )));
        }
        // Column 0 is the parameter value, implied by the row index for a
        // uniform grid; it is not stored.
        let px = parse_field(path, i + 1, fields[1])?;
        let py = parse_field(path, i + 1, fields[2])?;
        x.push(Vec2::new(px, py));
        if cols == 5 {
            let yx = parse_field(path, i + 1, fields[3])?;
            let yy = parse_field(path, i + 1, fields[4])?;
            y.push(Vec2::new(yx, yy));
        }
    }
    let curve = DiscreteCurve {
        x,
        y: if cols == 5 { Some(y) } else { None },
    };
    curve.validate()?;
    Ok((curve, meta))
}
