//! File formats: field CSV with a JSON sidecar, gluing tables, gnuplot
//! slices. Every file written here carries the config hash.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use twistor_core::glue::SampledGluing;
use twistor_core::pde::{Grid3, LambdaTriple, ScalarField3};
use twistor_core::Complex64 as C;

use crate::error::AppError;

/// Header line of a field CSV.
pub const FIELD_HEADER: &str = "x,y,z,re,im";

/// Relative tolerance when checking that CSV coordinates form a grid.
const GRID_MATCH: f64 = 1e-9;

/// A grid point without a value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HoleRecord {
    pub index: usize,
    pub point: [f64; 3],
    pub code: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridRecord {
    pub origin: [f64; 3],
    pub spacing: [f64; 3],
    pub shape: [usize; 3],
}

impl From<&Grid3> for GridRecord {
    fn from(g: &Grid3) -> Self {
        Self {
            origin: g.origin,
            spacing: g.spacing,
            shape: g.shape,
        }
    }
}

/// Metadata written next to a field CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub config_hash: String,
    pub command: String,
    pub csv: String,
    pub grid: GridRecord,
    pub holes: Vec<HoleRecord>,
    /// Command-specific diagnostics.
    pub stats: Value,
}

pub fn write_text(path: &Path, text: &str) -> Result<(), AppError> {
    fs::write(path, text).map_err(|e| AppError::io(path, e))
}

pub fn read_text(path: &Path) -> Result<String, AppError> {
    fs::read_to_string(path).map_err(|e| AppError::io(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), AppError> {
    let text = serde_json::to_string_pretty(value).expect("output serializes") + "\n";
    write_text(path, &text)
}

/// Shortest representation that reads back to the same `f64`.
fn num(v: f64) -> String {
    format!("{v:?}")
}

/// Field values in row-major order with `z` fastest. Holes are written as NaN.
pub fn field_csv(field: &ScalarField3, config_hash: &str) -> String {
    let g = field.grid();
    let mut out = format!("# config_hash: {config_hash}\n{FIELD_HEADER}\n");
    for (i, v) in field.values().iter().enumerate() {
        let [x, y, z] = g.point(i);
        out.push_str(&format!("{},{},{},{},{}\n", num(x), num(y), num(z), num(v.re), num(v.im)));
    }
    out
}

/// The plane `z = 0` as gnuplot blocks `x y re im`, one block per `x`.
/// Returns `None` when no grid plane sits at `z = 0`.
pub fn slice_z0(field: &ScalarField3, config_hash: &str) -> Option<String> {
    let g = field.grid();
    let tol = GRID_MATCH * g.spacing[2].abs().max(1.0);
    let iz = (0..g.shape[2]).find(|&iz| g.coord(2, iz).abs() <= tol)?;
    let mut out = format!("# config_hash: {config_hash}\n# x y re im\n");
    for ix in 0..g.shape[0] {
        if ix > 0 {
            out.push('\n');
        }
        for iy in 0..g.shape[1] {
            let v = field.get(ix, iy, iz);
            out.push_str(&format!("{} {} {} {}\n", num(g.coord(0, ix)), num(g.coord(1, iy)), num(v.re), num(v.im)));
        }
    }
    Some(out)
}

/// Writes `<stem>.csv`, `<stem>.json` and, if the grid meets `z = 0`,
/// `slice_z0.dat`. Returns the paths written.
pub fn write_field(
    dir: &Path,
    stem: &str,
    field: &ScalarField3,
    sidecar: &Sidecar,
    with_slice: bool,
) -> Result<Vec<PathBuf>, AppError> {
    let csv = dir.join(format!("{stem}.csv"));
    write_text(&csv, &field_csv(field, &sidecar.config_hash))?;
    let json = dir.join(format!("{stem}.json"));
    write_json(&json, sidecar)?;
    let mut written = vec![csv, json];
    if with_slice {
        if let Some(text) = slice_z0(field, &sidecar.config_hash) {
            let dat = dir.join("slice_z0.dat");
            write_text(&dat, &text)?;
            written.push(dat);
        }
    }
    Ok(written)
}

/// Sorted distinct values, merging those closer than the tolerance.
fn axis_values(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    let span = v.last().copied().unwrap_or(0.0) - v.first().copied().unwrap_or(0.0);
    let tol = GRID_MATCH * span.abs().max(1e-300);
    let mut out: Vec<f64> = Vec::new();
    for x in v {
        if out.last().is_none_or(|&l| x - l > tol) {
            out.push(x);
        }
    }
    out
}

/// Reads a field CSV as written by [`field_csv`]. The grid is inferred from
/// the coordinates, which must be uniform and in row-major order.
pub fn read_field_csv(path: &Path) -> Result<ScalarField3, AppError> {
    let text = read_text(path)?;
    let bad = |m: String| AppError::parse(path, m);
    let mut lines = text.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty());
    match lines.next() {
        Some(h) if h.trim() == FIELD_HEADER => {}
        other => return Err(bad(format!("expected header `{FIELD_HEADER}`, found {other:?}"))),
    }
    let mut rows = Vec::new();
    for (n, line) in lines.enumerate() {
        let cols: Vec<f64> = line
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| bad(format!("row {}: {e}", n + 1)))?;
        if cols.len() != 5 {
            return Err(bad(format!("row {} has {} columns", n + 1, cols.len())));
        }
        rows.push([cols[0], cols[1], cols[2], cols[3], cols[4]]);
    }
    let axes: [Vec<f64>; 3] = std::array::from_fn(|k| axis_values(rows.iter().map(|r| r[k]).collect()));
    let shape = [axes[0].len(), axes[1].len(), axes[2].len()];
    if shape.iter().product::<usize>() != rows.len() {
        return Err(bad(format!("{} rows do not fill a {shape:?} grid", rows.len())));
    }
    let mut spacing = [1.0; 3];
    for k in 0..3 {
        if shape[k] > 1 {
            spacing[k] = (axes[k][shape[k] - 1] - axes[k][0]) / (shape[k] - 1) as f64;
        }
    }
    let origin = [axes[0][0], axes[1][0], axes[2][0]];
    let grid = Grid3::new(origin, spacing, shape).map_err(|e| bad(e.to_string()))?;
    for (i, r) in rows.iter().enumerate() {
        let p = grid.point(i);
        for k in 0..3 {
            let scale = spacing[k].abs().max(f64::MIN_POSITIVE);
            if (p[k] - r[k]).abs() > 1e-6 * scale {
                return Err(bad(format!("row {} is not on a uniform row-major grid", i + 1)));
            }
        }
    }
    let values = rows.iter().map(|r| C::new(r[3], r[4])).collect();
    ScalarField3::new(grid, values).map_err(|e| bad(e.to_string()))
}

/// Where a gluing table came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GluingProvenance {
    #[serde(rename = "λ1")]
    pub lambda1: [f64; 2],
    #[serde(rename = "λ2")]
    pub lambda2: [f64; 2],
    #[serde(rename = "λ3")]
    pub lambda3: [f64; 2],
    /// Description of the transversal curve `Y`.
    #[serde(rename = "Y")]
    pub curve: String,
}

/// The on-disk gluing table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GluingFile {
    pub config_hash: String,
    pub lambda_samples: Vec<[f64; 2]>,
    /// Chebyshev coefficients of `g(λ_j, t)/t` in `u = t/t_max`, one row per
    /// sample.
    pub cheb_coeffs: Vec<Vec<[f64; 2]>>,
    pub t_max: f64,
    pub fit_residual: f64,
    pub provenance: GluingProvenance,
}

fn pair(z: C) -> [f64; 2] {
    [z.re, z.im]
}

fn cx(p: [f64; 2]) -> C {
    C::new(p[0], p[1])
}

impl GluingFile {
    pub fn from_table(sg: &SampledGluing, config_hash: &str) -> Self {
        let [l1, l2, l3] = sg.lambdas().as_array();
        Self {
            config_hash: config_hash.to_string(),
            lambda_samples: sg.lambda_samples().iter().copied().map(pair).collect(),
            cheb_coeffs: sg.coeffs().iter().map(|r| r.iter().copied().map(pair).collect()).collect(),
            t_max: sg.t_max(),
            fit_residual: sg.fit_residual(),
            provenance: GluingProvenance {
                lambda1: pair(l1),
                lambda2: pair(l2),
                lambda3: pair(l3),
                curve: sg.curve().to_string(),
            },
        }
    }

    pub fn to_table(&self) -> Result<SampledGluing, twistor_core::glue::GlueError> {
        let p = &self.provenance;
        SampledGluing::new(
            LambdaTriple::new(cx(p.lambda1), cx(p.lambda2), cx(p.lambda3)),
            self.lambda_samples.iter().copied().map(cx).collect(),
            self.cheb_coeffs.iter().map(|r| r.iter().copied().map(cx).collect()).collect(),
            self.t_max,
            self.fit_residual,
            p.curve.clone(),
        )
    }
}

pub fn read_gluing(path: &Path) -> Result<SampledGluing, AppError> {
    let text = read_text(path)?;
    let file: GluingFile = serde_json::from_str(&text).map_err(|e| AppError::parse(path, e.to_string()))?;
    file.to_table().map_err(|e| AppError::parse(path, e.to_string()))
}
