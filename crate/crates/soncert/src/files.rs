//! On-disk formats: dataset CSV and certificate JSON.
//!
//! Dataset CSV: header `x1,...,xd,weight` with an optional trailing
//! `label` column; one row per point; `lambda` never lives in the file
//! (the same dataset is swept across regularization values).
//!
//! Certificate JSON: versioned schema storing only what an independent
//! checker needs -- the data `(a, r)`, the parameters `(lambda, nu,
//! iteration, method)`, and the iterate `(x, delta)` -- plus the claimed
//! assignment and verdict. Every derived quantity (gap, subgradients,
//! separations) is recomputed by the verifier from `(x, delta)` alone.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::certify::{Certificate, ClusterMethod, Verdict};
use crate::dataset::Dataset;
use crate::edge::{edge_count, EdgeTable};
use crate::error::{Error, Result};
use crate::experiments::GroundTruth;
use crate::linalg::PointSet;
use crate::socp::clamp_dual;

pub const CERT_SCHEMA_VERSION: u32 = 1;

/// Serialized certificate. `delta` is the clamped (dual-feasible) table in
/// edge-major `i < j` order; `a` and `x` are row-major.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertificateFile {
    pub schema_version: u32,
    pub n: usize,
    pub d: usize,
    pub lambda: f64,
    pub nu: f64,
    pub iteration: usize,
    pub method: ClusterMethod,
    pub verdict: Verdict,
    pub a: Vec<f64>,
    pub r: Vec<f64>,
    pub x: Vec<f64>,
    pub delta: Vec<f64>,
    pub assignment: Vec<usize>,
    pub inconclusive: Vec<usize>,
}

impl CertificateFile {
    /// Assembles the file payload for a certificate produced at `x` with
    /// raw multipliers `delta` (clamped here exactly as certification did).
    pub fn new(ds: &Dataset, x: &PointSet, delta: &EdgeTable, cert: &Certificate) -> Self {
        let clamped = clamp_dual(delta, ds.lambda());
        CertificateFile {
            schema_version: CERT_SCHEMA_VERSION,
            n: ds.n(),
            d: ds.d(),
            lambda: ds.lambda(),
            nu: cert.nu,
            iteration: cert.iteration,
            method: cert.method,
            verdict: cert.verdict,
            a: ds.points().as_slice().to_vec(),
            r: ds.weights().to_vec(),
            x: x.as_slice().to_vec(),
            delta: clamped.as_slice().to_vec(),
            assignment: cert.clusters.assignment.clone(),
            inconclusive: cert.clusters.inconclusive.iter().copied().collect(),
        }
    }

    pub fn to_json(&self) -> Result<Vec<u8>> {
        let mut bytes = serde_json::to_vec_pretty(self)?;
        bytes.push(b'\n');
        Ok(bytes)
    }

    pub fn save(&self, path: &Path) -> Result<String> {
        let bytes = self.to_json()?;
        fs::write(path, &bytes)?;
        Ok(digest_hex(&bytes))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes = fs::read(path)?;
        let file: CertificateFile = serde_json::from_slice(&bytes)?;
        Ok(file)
    }

    /// Consistency of the stored array lengths with `n` and `d`.
    pub fn check_shape(&self) -> Result<()> {
        let nd = self.n * self.d;
        let ed = edge_count(self.n) * self.d;
        for (name, len, want) in [
            ("a", self.a.len(), nd),
            ("x", self.x.len(), nd),
            ("r", self.r.len(), self.n),
            ("delta", self.delta.len(), ed),
            ("assignment", self.assignment.len(), self.n),
        ] {
            if len != want {
                return Err(Error::DimensionMismatch {
                    context: match name {
                        "a" => "certificate field a",
                        "x" => "certificate field x",
                        "r" => "certificate field r",
                        "delta" => "certificate field delta",
                        _ => "certificate field assignment",
                    },
                    expected: want,
                    got: len,
                });
            }
        }
        Ok(())
    }
}

pub fn digest_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let out = hasher.finalize();
    let mut hex = String::with_capacity(64);
    for b in out {
        hex.push_str(&format!("{b:02x}"));
    }
    hex
}

/// Writes points, weights and optional labels as CSV.
pub fn write_dataset_csv(
    path: &Path,
    points: &PointSet,
    weights: &[f64],
    truth: Option<&GroundTruth>,
) -> Result<()> {
    let mut out = Vec::new();
    for k in 0..points.d() {
        write!(out, "x{},", k + 1)?;
    }
    write!(out, "weight")?;
    if truth.is_some() {
        write!(out, ",label")?;
    }
    writeln!(out)?;
    for i in 0..points.n() {
        for v in points.row(i) {
            write!(out, "{v},")?;
        }
        write!(out, "{}", weights[i])?;
        if let Some(t) = truth {
            write!(out, ",{}", t.0[i])?;
        }
        writeln!(out)?;
    }
    fs::write(path, out)?;
    Ok(())
}

/// Reads a dataset CSV written by [`write_dataset_csv`] (or hand-made with
/// the same header convention).
pub fn read_dataset_csv(path: &Path) -> Result<(PointSet, Vec<f64>, Option<GroundTruth>)> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::InvalidDataset("empty dataset file".into()))?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    let has_label = cols.last() == Some(&"label");
    let d = cols.len() - 1 - usize::from(has_label);
    if d == 0 {
        return Err(Error::InvalidDataset(
            "header must list at least one coordinate column".into(),
        ));
    }
    for (k, col) in cols.iter().take(d).enumerate() {
        let expect = format!("x{}", k + 1);
        if *col != expect {
            return Err(Error::InvalidDataset(format!(
                "unexpected column '{col}' (expected '{expect}')"
            )));
        }
    }
    if cols.get(d) != Some(&"weight") {
        return Err(Error::InvalidDataset("missing 'weight' column".into()));
    }

    let mut rows = Vec::new();
    let mut weights = Vec::new();
    let mut labels = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != cols.len() {
            return Err(Error::InvalidDataset(format!(
                "row {} has {} fields, header has {}",
                lineno + 2,
                fields.len(),
                cols.len()
            )));
        }
        let mut row = Vec::with_capacity(d);
        for f in &fields[..d] {
            row.push(parse_f64(f, lineno)?);
        }
        rows.push(row);
        weights.push(parse_f64(fields[d], lineno)?);
        if has_label {
            let l: usize = fields[d + 1]
                .parse()
                .map_err(|_| Error::InvalidDataset(format!("bad label on row {}", lineno + 2)))?;
            labels.push(l);
        }
    }
    if rows.is_empty() {
        return Err(Error::InvalidDataset("dataset has no points".into()));
    }
    let truth = if has_label {
        Some(GroundTruth(labels))
    } else {
        None
    };
    Ok((PointSet::from_rows(&rows), weights, truth))
}

fn parse_f64(s: &str, lineno: usize) -> Result<f64> {
    s.parse()
        .map_err(|_| Error::InvalidDataset(format!("bad number '{s}' on row {}", lineno + 2)))
}
