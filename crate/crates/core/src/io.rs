//! Dataset files, result serialization and run manifests.
//!
//! Two input layouts are accepted:
//!
//! * matrix CSV: a header row of grid knots followed by one row per
//!   observation. A header whose first cell is `euclidean` declares plain
//!   coordinates with unit quadrature weights.
//! * channel JSON: `{"schema_version": 1, "channels": [{"name", "grid", "values"}], "ids"}`
//!   where every channel holds an `n × m` matrix on its own grid (or
//!   `"grid": null` for Euclidean coordinates). Channels are concatenated.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::hilbert::{trapezoid_weights, Channel, Grid, WeightedSample};

pub const SCHEMA_VERSION: u32 = 1;

/// 17 significant digits, enough to round-trip any `f64`.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DatasetFormat {
    Csv,
    Json,
}

impl DatasetFormat {
    pub fn from_path(path: &Path) -> Result<Self> {
        match path
            .extension()
            .and_then(|e| e.to_str())
            .map(str::to_ascii_lowercase)
            .as_deref()
        {
            Some("csv") => Ok(DatasetFormat::Csv),
            Some("json") => Ok(DatasetFormat::Json),
            _ => Err(Error::Parse {
                path: path.display().to_string(),
                line: 0,
                message: "cannot infer format; use a .csv or .json extension".into(),
            }),
        }
    }
}

/// A loaded dataset with observation identifiers.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub sample: WeightedSample,
    pub ids: Vec<String>,
}

pub fn load_dataset(path: &Path, format: Option<DatasetFormat>) -> Result<Dataset> {
    let format = match format {
        Some(f) => f,
        None => DatasetFormat::from_path(path)?,
    };
    let text = fs::read_to_string(path)?;
    let name = path.display().to_string();
    match format {
        DatasetFormat::Csv => parse_csv(&text, &name),
        DatasetFormat::Json => parse_json(&text, &name),
    }
}

fn parse_err(path: &str, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.into(),
        line,
        message: message.into(),
    }
}

pub fn parse_csv(text: &str, path: &str) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut records = reader.records();
    let header = match records.next() {
        Some(r) => r?,
        None => return Err(parse_err(path, 1, "empty file")),
    };
    let header_line = header.position().map_or(1, |p| p.line() as usize);
    let euclidean = header
        .get(0)
        .is_some_and(|c| c.eq_ignore_ascii_case("euclidean"));
    let knots = if euclidean {
        None
    } else {
        let knots = header
            .iter()
            .enumerate()
            .map(|(j, c)| {
                c.parse::<f64>().map_err(|_| {
                    parse_err(
                        path,
                        header_line,
                        format!("grid knot {} `{c}` is not a number", j + 1),
                    )
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        Some(knots)
    };

    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width = knots.as_ref().map(Vec::len);
    for record in records {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.len() == 1 && record.get(0) == Some("") {
            continue;
        }
        let expected = *width.get_or_insert(record.len());
        if record.len() != expected {
            return Err(parse_err(
                path,
                line,
                format!("row has {} cells, expected {expected}", record.len()),
            ));
        }
        let row = record
            .iter()
            .enumerate()
            .map(|(j, c)| match c.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(parse_err(
                    path,
                    line,
                    format!("cell {} `{c}` is not a finite number", j + 1),
                )),
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(parse_err(path, header_line, "no observations"));
    }
    let ids = (0..rows.len()).map(|i| i.to_string()).collect();
    let sample = match knots {
        Some(knots) => {
            let grid = Grid::new(knots).map_err(|e| parse_err(path, header_line, e.to_string()))?;
            WeightedSample::on_grid(rows, grid)?
        }
        None => WeightedSample::euclidean(rows)?,
    };
    Ok(Dataset { sample, ids })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonChannel {
    name: String,
    #[serde(default)]
    grid: Option<Vec<f64>>,
    values: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonDataset {
    schema_version: u32,
    channels: Vec<JsonChannel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ids: Option<Vec<String>>,
}

pub fn parse_json(text: &str, path: &str) -> Result<Dataset> {
    let doc: JsonDataset =
        serde_json::from_str(text).map_err(|e| parse_err(path, e.line(), e.to_string()))?;
    if doc.schema_version != SCHEMA_VERSION {
        return Err(parse_err(
            path,
            0,
            format!("unsupported schema_version {}", doc.schema_version),
        ));
    }
    let Some(first) = doc.channels.first() else {
        return Err(parse_err(path, 0, "no channels"));
    };
    let n = first.values.len();
    if n == 0 {
        return Err(parse_err(path, 0, "no observations"));
    }
    let mut q = Vec::new();
    let mut channels = Vec::new();
    let mut rows = vec![Vec::new(); n];
    for ch in &doc.channels {
        if ch.values.len() != n {
            return Err(parse_err(
                path,
                0,
                format!(
                    "channel `{}` has {} rows, expected {n}",
                    ch.name,
                    ch.values.len()
                ),
            ));
        }
        let m = match &ch.grid {
            Some(g) => g.len(),
            None => ch.values[0].len(),
        };
        if let Some((i, r)) = ch.values.iter().enumerate().find(|(_, r)| r.len() != m) {
            return Err(parse_err(
                path,
                0,
                format!(
                    "channel `{}` row {i} has {} values, expected {m}",
                    ch.name,
                    r.len()
                ),
            ));
        }
        let grid = match &ch.grid {
            Some(g) => {
                let grid = Grid::new(g.clone())
                    .map_err(|e| parse_err(path, 0, format!("channel `{}`: {e}", ch.name)))?;
                q.extend(trapezoid_weights(&grid));
                Some(grid)
            }
            None => {
                q.extend(std::iter::repeat_n(1.0, m));
                None
            }
        };
        let start = channels.last().map_or(0, |c: &Channel| c.range.end);
        channels.push(Channel {
            name: ch.name.clone(),
            range: start..start + m,
            grid,
        });
        for (row, vals) in rows.iter_mut().zip(&ch.values) {
            row.extend_from_slice(vals);
        }
    }
    let ids = match doc.ids {
        Some(ids) if ids.len() != n => {
            return Err(parse_err(
                path,
                0,
                format!("{} ids for {n} observations", ids.len()),
            ))
        }
        Some(ids) => ids,
        None => (0..n).map(|i| i.to_string()).collect(),
    };
    let sample = WeightedSample::new(rows, q, channels)?;
    Ok(Dataset { sample, ids })
}

/// Matrix CSV; only single-channel samples fit this layout.
pub fn dataset_to_csv(sample: &WeightedSample) -> Result<String> {
    let [ch] = sample.channels() else {
        return Err(Error::InvalidSample(
            "multi-channel samples must be written as JSON".into(),
        ));
    };
    let mut out = match &ch.grid {
        Some(g) => join(g.knots()),
        None if sample.quad_weights().iter().all(|&w| w == 1.0) => "euclidean".to_owned(),
        None => {
            return Err(Error::InvalidSample(
                "custom quadrature weights cannot be stored in CSV".into(),
            ))
        }
    };
    out.push('\n');
    for row in sample.rows() {
        out.push_str(&join(row));
        out.push('\n');
    }
    Ok(out)
}

pub fn dataset_to_json(dataset: &Dataset) -> Result<String> {
    let s = &dataset.sample;
    let channels = s
        .channels()
        .iter()
        .map(|ch| JsonChannel {
            name: ch.name.clone(),
            grid: ch.grid.as_ref().map(|g| g.knots().to_vec()),
            values: s.rows().map(|r| r[ch.range.clone()].to_vec()).collect(),
        })
        .collect();
    if s.channels()
        .iter()
        .any(|ch| ch.grid.is_none() && s.quad_weights()[ch.range.clone()].iter().any(|&w| w != 1.0))
    {
        return Err(Error::InvalidSample(
            "custom quadrature weights cannot be stored in JSON".into(),
        ));
    }
    let doc = JsonDataset {
        schema_version: SCHEMA_VERSION,
        channels,
        ids: Some(dataset.ids.clone()),
    };
    Ok(serde_json::to_string_pretty(&doc)?)
}

fn join(xs: &[f64]) -> String {
    xs.iter()
        .map(|&x| format_f64(x))
        .collect::<Vec<_>>()
        .join(",")
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn file_sha256(path: &Path) -> Result<String> {
    Ok(sha256_hex(&fs::read(path)?))
}

/// Everything needed to re-run a command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub tool_version: String,
    pub command: String,
    /// Arguments after the program name, verbatim.
    pub args: Vec<String>,
    pub config: serde_json::Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dataset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dataset_sha256: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl RunManifest {
    pub fn new(command: &str, args: Vec<String>, config: serde_json::Value) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").to_owned(),
            command: command.to_owned(),
            args,
            config,
            dataset: None,
            dataset_sha256: None,
            seed: None,
        }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, serde_json::to_string_pretty(self)? + "\n")?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        serde_json::from_str(&text)
            .map_err(|e| parse_err(&path.display().to_string(), e.line(), e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Bin {
    pub lower: f64,
    pub upper: f64,
    pub count: usize,
}

/// Equal-width bins over `[min, max]`; the last bin is closed.
pub fn histogram(values: &[f64], bins: usize) -> Vec<Bin> {
    if values.is_empty() || bins == 0 {
        return Vec::new();
    }
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let width = (hi - lo) / bins as f64;
    let mut out: Vec<Bin> = (0..bins)
        .map(|b| Bin {
            lower: lo + b as f64 * width,
            upper: if b + 1 == bins {
                hi
            } else {
                lo + (b + 1) as f64 * width
            },
            count: 0,
        })
        .collect();
    for &v in values {
        let b = if width > 0.0 {
            (((v - lo) / width) as usize).min(bins - 1)
        } else {
            0
        };
        out[b].count += 1;
    }
    out
}
