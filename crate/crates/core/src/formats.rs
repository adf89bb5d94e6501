//! CSV and JSON interchange formats for surfaces and sensitivity curves.
//!
//! Surface CSV: header `tnr,tpr,value`, one row per cell in row-major order
//! (row = tpr sample). Curve CSV: header `ratio,sensitivity`. Numbers are
//! printed with 9 significant digits.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{Metric, RescaleInterval};
use crate::sensitivity::{SensitivityCurve, SensitivitySample};
use crate::surface::{GridSpec, MetricSurface};

/// Formats `x` rounded to 9 significant digits, shortest form.
pub fn format_sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{x:.8e}").parse().expect("formatted float parses");
    let magnitude = rounded.abs();
    if (1e-5..1e16).contains(&magnitude) {
        rounded.to_string()
    } else {
        format!("{rounded:e}")
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::Parse(e.to_string())
}

pub fn surface_to_csv(surface: &MetricSurface) -> String {
    let grid = surface.grid();
    let mut out = String::with_capacity(grid.cells() * 32 + 16);
    out.push_str("tnr,tpr,value\n");
    for (i, row) in surface.values().rows().enumerate() {
        let tpr = format_sig9(grid.coord(i));
        for (j, &v) in row.iter().enumerate() {
            out.push_str(&format_sig9(grid.coord(j)));
            out.push(',');
            out.push_str(&tpr);
            out.push(',');
            out.push_str(&format_sig9(v));
            out.push('\n');
        }
    }
    out
}

/// Reads a surface CSV back. The CSV carries no metric or ratio, so the
/// caller supplies them; the grid is inferred from the row count and the
/// coordinates are checked against it.
pub fn surface_from_csv(text: &str, metric: Metric, ratio: f64) -> Result<MetricSurface> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header = reader.headers().map_err(csv_error)?;
    if header != vec!["tnr", "tpr", "value"] {
        return Err(Error::Parse(format!("unexpected surface header {header:?}")));
    }
    let mut cells: Vec<(f64, f64, f64)> = Vec::new();
    for record in reader.deserialize() {
        cells.push(record.map_err(csv_error)?);
    }
    let t = (cells.len() as f64).sqrt().round() as usize;
    if t * t != cells.len() {
        return Err(Error::Parse(format!("{} rows is not a square grid", cells.len())));
    }
    let grid = GridSpec::new(t)?;
    let tol = 1e-8;
    for (k, &(tnr, tpr, _)) in cells.iter().enumerate() {
        let (i, j) = (k / t, k % t);
        if (tnr - grid.coord(j)).abs() > tol || (tpr - grid.coord(i)).abs() > tol {
            return Err(Error::Parse(format!("row {} is not at cell ({i}, {j})", k + 2)));
        }
    }
    MetricSurface::from_values(metric, ratio, grid, cells.into_iter().map(|c| c.2).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceDocument {
    pub metric: Metric,
    pub ratio: f64,
    pub t: GridSpec,
    pub rescale: RescaleInterval,
    pub values: Vec<Vec<f64>>,
}

impl From<&MetricSurface> for SurfaceDocument {
    fn from(s: &MetricSurface) -> Self {
        Self {
            metric: s.metric(),
            ratio: s.ratio(),
            t: s.grid(),
            rescale: s.rescale_interval(),
            values: s.values().rows().map(<[f64]>::to_vec).collect(),
        }
    }
}

impl TryFrom<SurfaceDocument> for MetricSurface {
    type Error = Error;

    fn try_from(doc: SurfaceDocument) -> Result<Self> {
        if doc.rescale != doc.metric.theoretical_range() {
            return Err(Error::Parse(format!("rescale interval does not match {}", doc.metric)));
        }
        if doc.values.len() != doc.t.resolution() || doc.values.iter().any(|r| r.len() != doc.t.resolution()) {
            return Err(Error::Parse("values are not a t x t matrix".into()));
        }
        MetricSurface::from_values(doc.metric, doc.ratio, doc.t, doc.values.concat())
    }
}

pub fn surface_to_json(surface: &MetricSurface) -> String {
    serde_json::to_string(&SurfaceDocument::from(surface)).expect("surface serializes")
}

pub fn surface_from_json(text: &str) -> Result<MetricSurface> {
    let doc: SurfaceDocument = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    doc.try_into()
}

pub fn curve_to_csv(curve: &SensitivityCurve) -> String {
    let mut out = String::from("ratio,sensitivity\n");
    for s in curve.samples() {
        out.push_str(&format!("{},{}\n", format_sig9(s.ratio), format_sig9(s.sensitivity)));
    }
    out
}

pub fn curve_samples_from_csv(text: &str) -> Result<Vec<SensitivitySample>> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header = reader.headers().map_err(csv_error)?;
    if header != vec!["ratio", "sensitivity"] {
        return Err(Error::Parse(format!("unexpected curve header {header:?}")));
    }
    reader
        .deserialize()
        .map(|r| {
            let (ratio, sensitivity): (f64, f64) = r.map_err(csv_error)?;
            Ok(SensitivitySample { ratio, sensitivity })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveDocument {
    pub metric: Metric,
    pub samples: Vec<SensitivitySample>,
}

impl From<&SensitivityCurve> for CurveDocument {
    fn from(c: &SensitivityCurve) -> Self {
        Self { metric: c.metric(), samples: c.samples().to_vec() }
    }
}

/// Curves keyed by metric id, as one JSON object.
pub fn curves_to_json(curves: &[SensitivityCurve]) -> String {
    let by_metric: BTreeMap<String, CurveDocument> =
        curves.iter().map(|c| (c.metric().id(), CurveDocument::from(c))).collect();
    serde_json::to_string_pretty(&by_metric).expect("curves serialize")
}

pub fn curves_from_json(text: &str) -> Result<BTreeMap<String, CurveDocument>> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}
