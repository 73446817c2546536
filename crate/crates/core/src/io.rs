//! Graph file formats and lossless number formatting.
//!
//! JSON: `{"dimension": n, "points": [{"x": [...], "xstar": [...]}, ...]}`,
//! unknown keys rejected.
//! CSV: `2n` comma-separated numeric columns per row, `x` first then `xstar`.
//! A header row is allowed and recognized by a non-numeric first token.
//!
//! Every float is written with 17 significant digits so a save/load cycle
//! reproduces the graph bit for bit.

use std::io::{self, Read, Write};

use nalgebra::DVector;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{GraphError, GraphPoint, OperatorGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum GraphFormat {
    Json,
    Csv,
}

#[derive(Debug, Error)]
pub enum IoError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv line {line}, field {field}: {message}")]
    Csv { line: usize, field: usize, message: String },
    #[error("invalid graph: {0}")]
    Validation(#[from] GraphError),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PointDoc {
    x: Vec<f64>,
    xstar: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphDoc {
    dimension: usize,
    points: Vec<PointDoc>,
}

/// Serialized form of a single graph point, shared with other documents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphPointDoc {
    pub x: Vec<f64>,
    pub xstar: Vec<f64>,
}

impl From<&GraphPoint> for GraphPointDoc {
    fn from(p: &GraphPoint) -> Self {
        Self {
            x: p.x.as_slice().to_vec(),
            xstar: p.xstar.as_slice().to_vec(),
        }
    }
}

impl From<&GraphPointDoc> for GraphPoint {
    fn from(d: &GraphPointDoc) -> Self {
        GraphPoint::from_slices(&d.x, &d.xstar)
    }
}

pub fn load_graph<R: Read>(mut source: R, format: GraphFormat) -> Result<OperatorGraph, IoError> {
    let mut text = String::new();
    source.read_to_string(&mut text)?;
    match format {
        GraphFormat::Json => parse_json(&text),
        GraphFormat::Csv => parse_csv(&text),
    }
}

pub fn save_graph(g: &OperatorGraph, format: GraphFormat) -> Vec<u8> {
    match format {
        GraphFormat::Json => {
            let doc = GraphDoc {
                dimension: g.dimension(),
                points: g
                    .points()
                    .iter()
                    .map(|p| PointDoc {
                        x: p.x.as_slice().to_vec(),
                        xstar: p.xstar.as_slice().to_vec(),
                    })
                    .collect(),
            };
            let mut out = to_json_bytes(&doc);
            out.push(b'\n');
            out
        }
        GraphFormat::Csv => {
            let mut out = String::new();
            for p in g.points() {
                let row: Vec<String> = p.x.iter().chain(p.xstar.iter()).map(|v| format_f64(*v)).collect();
                out.push_str(&row.join(","));
                out.push('\n');
            }
            out.into_bytes()
        }
    }
}

fn parse_json(text: &str) -> Result<OperatorGraph, IoError> {
    let doc: GraphDoc = serde_json::from_str(text)?;
    let points = doc
        .points
        .into_iter()
        .map(|p| GraphPoint::new(DVector::from_vec(p.x), DVector::from_vec(p.xstar)))
        .collect();
    Ok(OperatorGraph::new(doc.dimension, points)?)
}

fn parse_csv(text: &str) -> Result<OperatorGraph, IoError> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width = None;
    for (lineno, line) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = line.split(',').map(str::trim).collect();
        if rows.is_empty() && width.is_none() && tokens[0].parse::<f64>().is_err() {
            // header
            width = Some(tokens.len());
            continue;
        }
        let mut row = Vec::with_capacity(tokens.len());
        for (i, tok) in tokens.iter().enumerate() {
            let value = tok.parse::<f64>().map_err(|e| IoError::Csv {
                line: line_no,
                field: i + 1,
                message: format!("`{tok}` is not a number ({e})"),
            })?;
            row.push(value);
        }
        match width {
            Some(w) if w != row.len() => {
                return Err(IoError::Csv {
                    line: line_no,
                    field: row.len().min(w) + 1,
                    message: format!("expected {w} columns, found {}", row.len()),
                })
            }
            None if row.len() % 2 != 0 => {
                return Err(IoError::Csv {
                    line: line_no,
                    field: row.len(),
                    message: format!("odd column count {}; need x and xstar of equal length", row.len()),
                })
            }
            _ => width = Some(row.len()),
        }
        rows.push(row);
    }
    let width = width.unwrap_or(0);
    if width % 2 != 0 {
        return Err(IoError::Csv {
            line: 1,
            field: width,
            message: format!("odd column count {width}; need x and xstar of equal length"),
        });
    }
    let n = width / 2;
    let points = rows
        .into_iter()
        .map(|r| GraphPoint::from_slices(&r[..n], &r[n..]))
        .collect();
    Ok(OperatorGraph::new(n, points)?)
}

/// Format a float with 17 significant digits.
pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// JSON formatter writing floats with 17 significant digits.
struct LosslessFormatter;

impl serde_json::ser::Formatter for LosslessFormatter {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(format_f64(value).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
}

/// Serialize to compact JSON with lossless float formatting.
pub fn to_json_bytes<T: Serialize>(value: &T) -> Vec<u8> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, LosslessFormatter);
    value
        .serialize(&mut ser)
        .expect("serializing to an in-memory buffer cannot fail");
    out
}

pub fn to_json_string<T: Serialize>(value: &T) -> String {
    String::from_utf8(to_json_bytes(value)).expect("serde_json emits utf-8")
}
