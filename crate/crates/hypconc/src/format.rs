//! Exchange formats: functions, sets and signals as JSON records, reports
//! as schema-versioned JSON or CSV with a header row.

use std::io::Write;
use std::sync::Arc;

use base64::engine::general_purpose::STANDARD;
use base64::Engine;
use hypconc_core::bergman::BergmanFunction;
use hypconc_core::concentration::{DeficitReport, LocalizationMatrix};
use hypconc_core::hyperbolic::{GridMask, HyperbolicSet, PseudoDisc};
use hypconc_core::quadrature::{gauss_laguerre, QuadratureGrid};
use hypconc_core::transforms::HalfPlaneSignal;
use hypconc_core::{AlphaParam, Complex64};
use serde::{Deserialize, Serialize};

pub const SCHEMA: &str = "hypconc/1";

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("malformed record: {0}")]
    Malformed(String),
    #[error(transparent)]
    Numeric(#[from] hypconc_core::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Base64(#[from] base64::DecodeError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, FormatError>;

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn unpair(p: [f64; 2]) -> Complex64 {
    Complex64::new(p[0], p[1])
}

/// `{alpha, coeffs: [[re, im], ...]}` in the orthonormal basis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FunctionRecord {
    pub alpha: f64,
    pub coeffs: Vec<[f64; 2]>,
}

impl FunctionRecord {
    pub fn from_function(f: &BergmanFunction) -> Self {
        Self { alpha: f.alpha().alpha(), coeffs: f.coeffs().iter().map(|c| pair(*c)).collect() }
    }

    pub fn to_function(&self) -> Result<BergmanFunction> {
        let a = AlphaParam::new(self.alpha)?;
        Ok(BergmanFunction::new(a, self.coeffs.iter().map(|p| unpair(*p)).collect())?)
    }
}

/// Polar grid built by [`QuadratureGrid::build`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub nr: usize,
    pub ntheta: usize,
    #[serde(default = "default_rmax")]
    pub rmax: f64,
}

fn default_rmax() -> f64 {
    0.999
}

impl GridSpec {
    pub fn build(&self) -> Result<Arc<QuadratureGrid>> {
        Ok(Arc::new(QuadratureGrid::build(self.nr, self.ntheta, self.rmax)?))
    }

    /// Parse `NRxNT`.
    pub fn parse(text: &str, rmax: f64) -> Result<Self> {
        let (a, b) = text
            .split_once(['x', 'X'])
            .ok_or_else(|| FormatError::Malformed(format!("grid '{text}' is not of the form NRxNT")))?;
        let parse = |t: &str| {
            t.trim().parse::<usize>().map_err(|_| FormatError::Malformed(format!("grid size '{t}' is not an integer")))
        };
        Ok(Self { nr: parse(a)?, ntheta: parse(b)?, rmax })
    }
}

/// Set record: `{type: "disc", center, s}` or `{type: "mask", grid, mask}`
/// where `mask` is the base64 of the cell bitset, least significant bit
/// first, cells in ring-major order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum SetRecord {
    Disc { center: [f64; 2], s: f64 },
    Mask { grid: GridSpec, mask: String },
}

pub fn encode_bits(bits: &[bool]) -> String {
    let mut bytes = vec![0u8; bits.len().div_ceil(8)];
    for (i, b) in bits.iter().enumerate() {
        if *b {
            bytes[i / 8] |= 1 << (i % 8);
        }
    }
    STANDARD.encode(bytes)
}

pub fn decode_bits(text: &str, len: usize) -> Result<Vec<bool>> {
    let bytes = STANDARD.decode(text)?;
    if bytes.len() != len.div_ceil(8) {
        return Err(FormatError::Malformed(format!("mask holds {} bytes, grid needs {}", bytes.len(), len.div_ceil(8))));
    }
    Ok((0..len).map(|i| bytes[i / 8] >> (i % 8) & 1 == 1).collect())
}

impl SetRecord {
    pub fn from_mask(spec: GridSpec, mask: &GridMask) -> Self {
        SetRecord::Mask { grid: spec, mask: encode_bits(mask.bits()) }
    }

    pub fn from_disc(d: &PseudoDisc) -> Self {
        SetRecord::Disc { center: pair(d.center()), s: d.measure() }
    }

    pub fn to_set(&self) -> Result<HyperbolicSet> {
        match self {
            SetRecord::Disc { center, s } => Ok(HyperbolicSet::Disc(PseudoDisc::new(unpair(*center), *s)?)),
            SetRecord::Mask { grid, mask } => {
                let g = grid.build()?;
                let bits = decode_bits(mask, g.len())?;
                Ok(HyperbolicSet::Mask(GridMask::new(g, bits)?))
            }
        }
    }
}

/// `{beta, nodes: [[t, re, im], ...]}`, the spectrum on its Laguerre grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignalRecord {
    pub beta: f64,
    pub nodes: Vec<[f64; 3]>,
}

impl SignalRecord {
    pub fn from_signal(beta: f64, f: &HalfPlaneSignal) -> Self {
        let nodes = f.nodes().iter().zip(f.values()).map(|(t, v)| [*t, v.re, v.im]).collect();
        Self { beta, nodes }
    }

    /// The spectral rate is recovered from the first node.
    pub fn to_signal(&self) -> Result<HalfPlaneSignal> {
        let n = self.nodes.len();
        if n == 0 {
            return Err(FormatError::Malformed("signal has no nodes".into()));
        }
        let (x, _) = gauss_laguerre(n, 0.0)?;
        let rate = x[0] / self.nodes[0][0];
        let ts: Vec<f64> = self.nodes.iter().map(|p| p[0]).collect();
        let vals = self.nodes.iter().map(|p| Complex64::new(p[1], p[2])).collect();
        Ok(HalfPlaneSignal::from_samples(rate, &ts, vals)?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeficitRecord {
    pub s: f64,
    pub theta: f64,
    pub concentration: f64,
    pub deficit: f64,
    pub f_norm: f64,
}

impl From<DeficitReport> for DeficitRecord {
    fn from(r: DeficitReport) -> Self {
        Self { s: r.s, theta: r.theta, concentration: r.concentration, deficit: r.deficit, f_norm: r.f_norm }
    }
}

/// Row-major CSV of a localization matrix, each entry as a `re,im` pair.
pub fn write_matrix_csv<W: Write>(m: &LocalizationMatrix, out: W) -> Result<()> {
    let n = m.dim();
    let mut w = csv::Writer::from_writer(out);
    let header: Vec<String> = (0..n).flat_map(|j| [format!("re{j}"), format!("im{j}")]).collect();
    w.write_record(&header)?;
    for i in 0..n {
        let row: Vec<String> = (0..n)
            .flat_map(|j| {
                let v = m.matrix.get(i, j);
                [v.re.to_string(), v.im.to_string()]
            })
            .collect();
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

/// A table of numeric rows with named columns, the parameters that
/// produced it and any invariant violations found on the way.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub command: String,
    pub params: serde_json::Map<String, serde_json::Value>,
    pub columns: Vec<String>,
    #[serde(with = "cells")]
    pub rows: Vec<Vec<f64>>,
    pub violations: Vec<Violation>,
}

/// Finite cells as JSON numbers, the rest as `"inf"`, `"-inf"` or `"nan"`.
mod cells {
    use serde::de::Error;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Cell {
        Num(f64),
        Text(String),
    }

    fn to_cell(v: f64) -> Cell {
        if v.is_finite() {
            Cell::Num(v)
        } else {
            Cell::Text(v.to_string().to_lowercase())
        }
    }

    pub fn serialize<S: Serializer>(rows: &[Vec<f64>], s: S) -> Result<S::Ok, S::Error> {
        let out: Vec<Vec<Cell>> = rows.iter().map(|r| r.iter().map(|v| to_cell(*v)).collect()).collect();
        out.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<f64>>, D::Error> {
        let rows: Vec<Vec<Cell>> = Vec::deserialize(d)?;
        rows.into_iter()
            .map(|r| {
                r.into_iter()
                    .map(|c| match c {
                        Cell::Num(v) => Ok(v),
                        Cell::Text(t) => match t.as_str() {
                            "inf" => Ok(f64::INFINITY),
                            "-inf" => Ok(f64::NEG_INFINITY),
                            "nan" => Ok(f64::NAN),
                            _ => Err(D::Error::custom(format!("bad cell '{t}'"))),
                        },
                    })
                    .collect()
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub row: usize,
    pub what: String,
}

impl Report {
    pub fn new(command: &str, columns: &[&str]) -> Self {
        Self {
            schema: SCHEMA.into(),
            command: command.into(),
            params: serde_json::Map::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            violations: Vec::new(),
        }
    }

    pub fn param(mut self, key: &str, value: impl Serialize) -> Self {
        self.params.insert(key.into(), serde_json::to_value(value).expect("plain parameter"));
        self
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn flag(&mut self, row: usize, what: impl Into<String>) {
        self.violations.push(Violation { row, what: what.into() });
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    pub fn write<W: Write>(&self, format: OutputFormat, mut out: W) -> Result<()> {
        match format {
            OutputFormat::Json => {
                serde_json::to_writer_pretty(&mut out, self)?;
                writeln!(out)?;
            }
            OutputFormat::Csv => {
                let mut w = csv::Writer::from_writer(out);
                w.write_record(&self.columns)?;
                for r in &self.rows {
                    w.write_record(r.iter().map(|v| v.to_string()))?;
                }
                w.flush()?;
            }
        }
        Ok(())
    }

    pub fn read_json(text: &str) -> Result<Self> {
        let r: Report = serde_json::from_str(text)?;
        if r.schema != SCHEMA {
            return Err(FormatError::Malformed(format!("unknown schema '{}'", r.schema)));
        }
        Ok(r)
    }
}
