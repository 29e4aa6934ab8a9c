//! Point-set and geodesic encodings.
//!
//! Binary samples: `u32` dimension, `u64` point count, then `count * d`
//! coordinates, all little-endian. CSV samples: a `d,count` line followed by
//! one comma-separated row per point. Decoders return the raw coordinates;
//! the window and intensity travel separately.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geodesic::GeodesicResult;
use crate::point_process::PoissonSample;

#[derive(Clone, Debug, PartialEq)]
pub struct RawPoints {
    pub dim: usize,
    pub coords: Vec<f64>,
}

impl RawPoints {
    pub fn len(&self) -> usize {
        self.coords.len().checked_div(self.dim).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn to_vecs(&self) -> Vec<Vec<f64>> {
        self.coords
            .chunks_exact(self.dim.max(1))
            .map(<[f64]>::to_vec)
            .collect()
    }
}

fn decode_err(msg: impl Into<String>) -> Error {
    Error::Decode(msg.into())
}

pub fn encode_sample_binary(sample: &PoissonSample) -> Vec<u8> {
    let mut out = Vec::with_capacity(12 + 8 * sample.coords().len());
    out.extend_from_slice(&(sample.dim() as u32).to_le_bytes());
    out.extend_from_slice(&(sample.len() as u64).to_le_bytes());
    for c in sample.coords() {
        out.extend_from_slice(&c.to_le_bytes());
    }
    out
}

pub fn decode_sample_binary(bytes: &[u8]) -> Result<RawPoints> {
    if bytes.len() < 12 {
        return Err(decode_err("truncated header"));
    }
    let dim = u32::from_le_bytes(bytes[0..4].try_into().expect("4 bytes")) as usize;
    let count = u64::from_le_bytes(bytes[4..12].try_into().expect("8 bytes"));
    if dim == 0 {
        return Err(decode_err("dimension must be positive"));
    }
    let body = &bytes[12..];
    let expected = (count as u128) * (dim as u128) * 8;
    if expected != body.len() as u128 {
        return Err(decode_err(format!(
            "body holds {} bytes, header implies {expected}",
            body.len()
        )));
    }
    let coords: Vec<f64> = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect();
    if coords.iter().any(|c| !c.is_finite()) {
        return Err(decode_err("non-finite coordinate"));
    }
    Ok(RawPoints { dim, coords })
}

pub fn encode_sample_csv(sample: &PoissonSample) -> String {
    let mut out = format!("{},{}\n", sample.dim(), sample.len());
    for p in sample.points() {
        let row: Vec<String> = p.iter().map(|c| format!("{c:?}")).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn decode_sample_csv(text: &str) -> Result<RawPoints> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| decode_err("empty input"))?;
    let (d, n) = header
        .split_once(',')
        .ok_or_else(|| decode_err("header must be `d,count`"))?;
    let dim: usize = d
        .trim()
        .parse()
        .map_err(|_| decode_err(format!("bad dimension `{d}`")))?;
    let count: usize = n
        .trim()
        .parse()
        .map_err(|_| decode_err(format!("bad count `{n}`")))?;
    if dim == 0 {
        return Err(decode_err("dimension must be positive"));
    }
    let mut coords = Vec::new();
    let mut rows = 0usize;
    for (line_no, line) in lines.enumerate() {
        rows += 1;
        if rows > count {
            return Err(decode_err(format!("more than {count} rows")));
        }
        let before = coords.len();
        for field in line.split(',') {
            let v: f64 = field
                .trim()
                .parse()
                .map_err(|_| decode_err(format!("row {}: bad value `{field}`", line_no + 1)))?;
            if !v.is_finite() {
                return Err(decode_err(format!("row {}: non-finite value", line_no + 1)));
            }
            coords.push(v);
        }
        if coords.len() - before != dim {
            return Err(decode_err(format!(
                "row {}: expected {dim} values",
                line_no + 1
            )));
        }
    }
    if rows != count {
        return Err(decode_err(format!(
            "header says {count} rows, found {rows}"
        )));
    }
    Ok(RawPoints { dim, coords })
}

/// Serialized form of a geodesic.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeodesicExport {
    pub cost: f64,
    pub certified: bool,
    pub cutoff: f64,
    pub boundary_clear: bool,
    pub alpha: f64,
    pub vertices: Vec<Vec<f64>>,
}

impl From<&GeodesicResult> for GeodesicExport {
    fn from(g: &GeodesicResult) -> Self {
        GeodesicExport {
            cost: g.cost,
            certified: g.certified,
            cutoff: g.cutoff_radius,
            boundary_clear: g.boundary_clear,
            alpha: g.alpha.value(),
            vertices: g.path(),
        }
    }
}

pub fn geodesic_to_json(g: &GeodesicResult) -> String {
    serde_json::to_string_pretty(&GeodesicExport::from(g)).expect("plain data serializes")
}

/// Parse and validate a geodesic export.
pub fn parse_geodesic_json(text: &str) -> Result<GeodesicExport> {
    let g: GeodesicExport = serde_json::from_str(text).map_err(|e| decode_err(e.to_string()))?;
    let dim = g.vertices.first().map_or(0, Vec::len);
    if g.vertices
        .iter()
        .any(|v| v.len() != dim || v.iter().any(|c| !c.is_finite()))
    {
        return Err(decode_err(
            "vertices must be finite and share one dimension",
        ));
    }
    if !(g.alpha > 1.0) || !g.cost.is_finite() {
        return Err(decode_err("alpha must exceed 1 and cost must be finite"));
    }
    Ok(g)
}

/// Vertex rows with an `x0,x1,...` header.
pub fn geodesic_to_csv(g: &GeodesicResult) -> String {
    let header: Vec<String> = (0..g.dim()).map(|i| format!("x{i}")).collect();
    let mut out = header.join(",");
    out.push('\n');
    for v in g.vertices() {
        let row: Vec<String> = v.iter().map(|c| format!("{c:?}")).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}
