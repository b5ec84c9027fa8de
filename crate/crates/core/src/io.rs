//! File formats: lattice and body JSON, point/sample CSV, report CSV.
//!
//! Every CSV carries a trailing `version` column.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bodies::{Body, BodySpec};
use crate::enumerate::PointSet;
use crate::error::{Error, Result};
use crate::lattice::{matrix_rows, Lattice, Vector};
use crate::slicing::BoundReport;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeFile {
    pub dim: usize,
    /// Basis vectors as rows.
    pub basis: Vec<Vec<f64>>,
}

impl LatticeFile {
    pub fn from_lattice(lat: &Lattice) -> Self {
        LatticeFile { dim: lat.dim(), basis: matrix_rows(lat.basis()) }
    }

    pub fn to_lattice(&self) -> Result<Lattice> {
        if self.basis.len() != self.dim || self.basis.iter().any(|r| r.len() != self.dim) {
            return Err(Error::InvalidInput(format!("lattice basis must be {0}x{0}", self.dim)));
        }
        Lattice::from_rows(&self.basis)
    }
}

pub fn lattice_from_json(text: &str) -> Result<Lattice> {
    serde_json::from_str::<LatticeFile>(text)?.to_lattice()
}

pub fn lattice_to_json(lat: &Lattice) -> Result<String> {
    Ok(serde_json::to_string_pretty(&LatticeFile::from_lattice(lat))?)
}

pub fn read_lattice(path: &Path) -> Result<Lattice> {
    lattice_from_json(&std::fs::read_to_string(path)?)
}

pub fn body_from_json(text: &str) -> Result<Body> {
    Body::from_spec(&serde_json::from_str::<BodySpec>(text)?)
}

pub fn body_to_json(body: &Body) -> Result<String> {
    Ok(serde_json::to_string_pretty(&body.to_spec())?)
}

fn parse_floats(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|_| Error::InvalidInput(format!("not a number: {x:?}"))))
        .collect()
}

fn parse_dim(s: &str) -> Result<usize> {
    match s.parse::<usize>() {
        Ok(d) if d >= 1 => Ok(d),
        _ => Err(Error::InvalidInput(format!("bad dimension {s:?}"))),
    }
}

/// Short body descriptions:
/// `cube:D[:H]`, `box:H1,H2,...`, `cross:D[:S]`, `cross:S1,S2,...`, `ball:D:R`.
pub fn body_from_shorthand(s: &str) -> Result<Body> {
    let parts: Vec<&str> = s.split(':').collect();
    let scalar = |i: usize, default: f64| -> Result<f64> {
        match parts.get(i) {
            None => Ok(default),
            Some(x) => x.parse().map_err(|_| Error::InvalidInput(format!("not a number: {x:?}"))),
        }
    };
    match (parts[0], parts.len()) {
        ("cube", 2 | 3) => Body::cuboid(vec![scalar(2, 1.0)?; parse_dim(parts[1])?]),
        ("box", 2) => Body::cuboid(parse_floats(parts[1])?),
        ("cross", 2) if parts[1].contains(',') => Body::cross_polytope(parse_floats(parts[1])?),
        ("cross", 2 | 3) => Body::cross_polytope(vec![scalar(2, 1.0)?; parse_dim(parts[1])?]),
        ("ball", 3) => Body::ball(parse_dim(parts[1])?, scalar(2, 1.0)?),
        _ => Err(Error::InvalidInput(format!("unrecognized body {s:?}"))),
    }
}

/// A body given as a file path, inline JSON or shorthand.
pub fn parse_body_arg(arg: &str) -> Result<Body> {
    let trimmed = arg.trim_start();
    if trimmed.starts_with('{') {
        return body_from_json(trimmed);
    }
    let path = Path::new(arg);
    if path.is_file() {
        return body_from_json(&std::fs::read_to_string(path)?);
    }
    body_from_shorthand(arg)
}

fn coeff_header(d: usize) -> Vec<String> {
    let mut h: Vec<String> = (0..d).map(|i| format!("c{i}")).collect();
    h.extend((0..d).map(|i| format!("x{i}")));
    h.push("version".into());
    h
}

/// Rows `c0.., x0.., version`: lattice coordinates, then the ambient point.
pub fn write_points_csv<W: Write>(out: W, lat: &Lattice, coeffs: &[Vec<i64>], points: &[Vector]) -> Result<()> {
    let d = lat.dim();
    let mut w = csv::Writer::from_writer(out);
    w.write_record(coeff_header(d))?;
    for (c, x) in coeffs.iter().zip(points) {
        let mut row: Vec<String> = c.iter().map(|v| v.to_string()).collect();
        row.extend(x.iter().map(|v| v.to_string()));
        row.push(crate::VERSION.into());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_point_set_csv<W: Write>(out: W, lat: &Lattice, ps: &PointSet) -> Result<()> {
    write_points_csv(out, lat, ps.coeffs(), ps.points())
}

pub fn write_samples_csv<W: Write>(out: W, lat: &Lattice, samples: &[Vec<i64>]) -> Result<()> {
    let points: Vec<Vector> = samples.iter().map(|c| lat.point(c)).collect();
    write_points_csv(out, lat, samples, &points)
}

/// Reads the coefficient columns back from a point or sample CSV.
pub fn read_points_csv<R: Read>(input: R) -> Result<Vec<Vec<i64>>> {
    let mut r = csv::Reader::from_reader(input);
    let d = r.headers()?.iter().filter(|h| h.starts_with('c')).count();
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let row = (0..d)
            .map(|i| rec[i].parse::<i64>().map_err(|_| Error::InvalidInput(format!("bad coefficient {:?}", &rec[i]))))
            .collect::<Result<Vec<_>>>()?;
        out.push(row);
    }
    Ok(out)
}

/// One CSV row of a bound report; `method` carries `error:<code>` for failed bodies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub body_id: String,
    pub d: usize,
    pub vol: Option<f64>,
    pub vol_err: Option<f64>,
    pub circumradius: Option<f64>,
    pub s: Option<f64>,
    pub p: Option<f64>,
    pub best_ratio_num: Option<u64>,
    pub best_ratio_den: Option<u64>,
    pub method: String,
    pub implied_c_theorem: Option<f64>,
    pub implied_alpha_q1: Option<f64>,
    pub attempts: Option<u64>,
    pub version: String,
}

impl ReportRow {
    pub fn from_report(r: &BoundReport) -> Self {
        ReportRow {
            body_id: r.body_id.clone(),
            d: r.d,
            vol: Some(r.vol),
            vol_err: Some(r.vol_err),
            circumradius: Some(r.circumradius),
            s: Some(r.s_used),
            p: Some(r.p_threshold),
            best_ratio_num: Some(r.best_ratio.on),
            best_ratio_den: Some(r.best_ratio.total),
            method: r.best_method.to_string(),
            implied_c_theorem: r.implied_c_theorem,
            implied_alpha_q1: r.implied_alpha_q1,
            attempts: r.attempts,
            version: r.version.clone(),
        }
    }

    pub fn from_error(body_id: &str, d: usize, err: &Error) -> Self {
        ReportRow {
            body_id: body_id.to_string(),
            d,
            vol: None,
            vol_err: None,
            circumradius: None,
            s: None,
            p: None,
            best_ratio_num: None,
            best_ratio_den: None,
            method: format!("error:{}", err.code()),
            implied_c_theorem: None,
            implied_alpha_q1: None,
            attempts: None,
            version: crate::VERSION.to_string(),
        }
    }
}

pub fn write_report_rows_csv<W: Write>(out: W, rows: &[ReportRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    if rows.is_empty() {
        w.write_record([
            "body_id", "d", "vol", "vol_err", "circumradius", "s", "p", "best_ratio_num", "best_ratio_den",
            "method", "implied_c_theorem", "implied_alpha_q1", "attempts", "version",
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_report_rows_csv<R: Read>(input: R) -> Result<Vec<ReportRow>> {
    let mut r = csv::Reader::from_reader(input);
    Ok(r.deserialize().collect::<std::result::Result<Vec<ReportRow>, _>>()?)
}
