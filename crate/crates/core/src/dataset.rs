//! Input–output data defining the production possibility set.

use std::collections::HashSet;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{c, Scalar};

/// Returns-to-scale assumption of the technology.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Rts {
    Variable,
    Constant,
}

impl fmt::Display for Rts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rts::Variable => write!(f, "vrs"),
            Rts::Constant => write!(f, "crs"),
        }
    }
}

/// One decision making unit: a label plus strictly positive input and
/// output vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DmuRecord<S> {
    pub id: String,
    pub inputs: Vec<S>,
    pub outputs: Vec<S>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Dataset<S> {
    pub dmus: Vec<DmuRecord<S>>,
    pub input_names: Vec<String>,
    pub output_names: Vec<String>,
    pub rts: Rts,
}

/// Column-role mapping for CSV loading. When absent, the first column is
/// the id and roles come from the `in:` / `out:` header prefixes.
#[derive(Debug, Clone)]
pub struct Schema {
    pub id: String,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
}

/// Per-variable mean / sd / min / max (sample sd, n−1 convention).
#[derive(Debug, Clone, Serialize)]
pub struct VariableStats<S> {
    pub name: String,
    pub mean: S,
    pub sd: S,
    pub min: S,
    pub max: S,
}

#[derive(Debug, Clone, Serialize)]
pub struct SummaryStats<S> {
    pub inputs: Vec<VariableStats<S>>,
    pub outputs: Vec<VariableStats<S>>,
}

/// Dataset columns divided by their per-variable maximum. All models are
/// assembled in this space so that coefficients stay near unity.
#[derive(Debug, Clone)]
pub struct ScaledData<S> {
    /// `x[j][i]`: scaled input i of DMU j.
    pub x: Vec<Vec<S>>,
    /// `y[j][r]`: scaled output r of DMU j.
    pub y: Vec<Vec<S>>,
    pub xmax: Vec<S>,
    pub ymax: Vec<S>,
}

impl<S: Scalar> Dataset<S> {
    pub fn n(&self) -> usize {
        self.dmus.len()
    }

    pub fn m(&self) -> usize {
        self.input_names.len()
    }

    pub fn s(&self) -> usize {
        self.output_names.len()
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.dmus.iter().position(|d| d.id == id)
    }

    pub fn record(&self, id: &str) -> Result<&DmuRecord<S>> {
        self.index_of(id)
            .map(|j| &self.dmus[j])
            .ok_or_else(|| Error::UnknownDmu(id.to_string()))
    }

    /// Every invariant violation in the dataset; empty means valid.
    pub fn validate(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.n() < 2 {
            out.push(format!("n >= 2 required, got {}", self.n()));
        }
        if self.m() < 1 {
            out.push("m >= 1 required".to_string());
        }
        if self.s() < 1 {
            out.push("s >= 1 required".to_string());
        }
        let mut seen = HashSet::new();
        for d in &self.dmus {
            if !seen.insert(d.id.as_str()) {
                out.push(format!("duplicate id {:?}", d.id));
            }
            if d.inputs.len() != self.m() {
                out.push(format!(
                    "DMU {:?}: {} inputs, expected {}",
                    d.id,
                    d.inputs.len(),
                    self.m()
                ));
            }
            if d.outputs.len() != self.s() {
                out.push(format!(
                    "DMU {:?}: {} outputs, expected {}",
                    d.id,
                    d.outputs.len(),
                    self.s()
                ));
            }
            for (k, v) in d.inputs.iter().enumerate() {
                if !(*v > S::zero()) {
                    out.push(format!("DMU {:?}: input {} must be > 0, got {}", d.id, k, v));
                }
            }
            for (k, v) in d.outputs.iter().enumerate() {
                if !(*v > S::zero()) {
                    out.push(format!("DMU {:?}: output {} must be > 0, got {}", d.id, k, v));
                }
            }
        }
        out
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidDataset(v.join("; ")))
        }
    }

    pub fn describe(&self) -> SummaryStats<S> {
        let col = |values: Vec<S>, name: &str| {
            let n = values.len();
            let mean = values.iter().copied().sum::<S>() / c::<S>(n as f64);
            let sd = if n > 1 {
                let ss = values
                    .iter()
                    .map(|v| (*v - mean) * (*v - mean))
                    .sum::<S>();
                (ss / c::<S>((n - 1) as f64)).sqrt()
            } else {
                S::zero()
            };
            let min = values.iter().copied().fold(S::infinity(), S::min);
            let max = values.iter().copied().fold(S::neg_infinity(), S::max);
            VariableStats {
                name: name.to_string(),
                mean,
                sd,
                min,
                max,
            }
        };
        SummaryStats {
            inputs: self
                .input_names
                .iter()
                .enumerate()
                .map(|(i, name)| col(self.dmus.iter().map(|d| d.inputs[i]).collect(), name))
                .collect(),
            outputs: self
                .output_names
                .iter()
                .enumerate()
                .map(|(r, name)| col(self.dmus.iter().map(|d| d.outputs[r]).collect(), name))
                .collect(),
        }
    }

    pub fn scaled(&self) -> ScaledData<S> {
        let xmax: Vec<S> = (0..self.m())
            .map(|i| {
                self.dmus
                    .iter()
                    .map(|d| d.inputs[i])
                    .fold(S::neg_infinity(), S::max)
            })
            .collect();
        let ymax: Vec<S> = (0..self.s())
            .map(|r| {
                self.dmus
                    .iter()
                    .map(|d| d.outputs[r])
                    .fold(S::neg_infinity(), S::max)
            })
            .collect();
        ScaledData {
            x: self
                .dmus
                .iter()
                .map(|d| d.inputs.iter().zip(&xmax).map(|(v, mx)| *v / *mx).collect())
                .collect(),
            y: self
                .dmus
                .iter()
                .map(|d| {
                    d.outputs
                        .iter()
                        .zip(&ymax)
                        .map(|(v, mx)| *v / *mx)
                        .collect()
                })
                .collect(),
            xmax,
            ymax,
        }
    }

    /// Write the dataset back out in the CSV layout `load_csv` accepts.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("id");
        for n in &self.input_names {
            out.push_str(&format!(",in:{n}"));
        }
        for n in &self.output_names {
            out.push_str(&format!(",out:{n}"));
        }
        out.push('\n');
        for d in &self.dmus {
            out.push_str(&d.id);
            for v in d.inputs.iter().chain(d.outputs.iter()) {
                out.push_str(&format!(",{v}"));
            }
            out.push('\n');
        }
        out
    }
}

pub fn load_csv<S: Scalar>(path: &Path, schema: Option<&Schema>, rts: Rts) -> Result<Dataset<S>> {
    let text = std::fs::read_to_string(path)?;
    load_csv_str(&text, schema, rts)
}

pub fn load_csv_str<S: Scalar>(text: &str, schema: Option<&Schema>, rts: Rts) -> Result<Dataset<S>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers: Vec<String> = reader
        .headers()?
        .iter()
        .map(|h| h.to_string())
        .collect();
    if headers.is_empty() {
        return Err(Error::InvalidDataset("no rows".into()));
    }

    // Column roles: (column index, role).
    let mut id_col: Option<usize> = None;
    let mut in_cols: Vec<(usize, String)> = Vec::new();
    let mut out_cols: Vec<(usize, String)> = Vec::new();
    match schema {
        Some(sch) => {
            let find = |name: &str| {
                headers
                    .iter()
                    .position(|h| h == name)
                    .ok_or_else(|| Error::Data {
                        row: 0,
                        column: name.to_string(),
                        message: "missing column".into(),
                    })
            };
            id_col = Some(find(&sch.id)?);
            for n in &sch.inputs {
                in_cols.push((find(n)?, n.clone()));
            }
            for n in &sch.outputs {
                out_cols.push((find(n)?, n.clone()));
            }
        }
        None => {
            for (k, h) in headers.iter().enumerate() {
                if let Some(rest) = h.strip_prefix("in:") {
                    in_cols.push((k, rest.to_string()));
                } else if let Some(rest) = h.strip_prefix("out:") {
                    out_cols.push((k, rest.to_string()));
                } else if id_col.is_none() && k == 0 {
                    id_col = Some(0);
                } else {
                    return Err(Error::Data {
                        row: 0,
                        column: h.clone(),
                        message: "column has no role; use `in:` or `out:` prefix".into(),
                    });
                }
            }
        }
    }
    let id_col = id_col.ok_or_else(|| Error::Data {
        row: 0,
        column: "id".into(),
        message: "missing id column".into(),
    })?;
    if in_cols.is_empty() || out_cols.is_empty() {
        return Err(Error::InvalidDataset(
            "need at least one input and one output column".into(),
        ));
    }

    let mut dmus: Vec<DmuRecord<S>> = Vec::new();
    let mut seen: HashSet<String> = HashSet::new();
    for (rownum, record) in reader.records().enumerate() {
        let record = record?;
        let row = rownum + 2; // 1-based, after the header
        let cell = |k: usize, name: &str| -> Result<&str> {
            record.get(k).ok_or_else(|| Error::Data {
                row,
                column: name.to_string(),
                message: "missing cell".into(),
            })
        };
        let numeric = |k: usize, name: &str| -> Result<S> {
            let raw = cell(k, name)?;
            let v: f64 = raw.parse().map_err(|_| Error::Data {
                row,
                column: name.to_string(),
                message: format!("non-numeric cell {raw:?}"),
            })?;
            if !(v > 0.0) {
                return Err(Error::Data {
                    row,
                    column: name.to_string(),
                    message: format!("value must be strictly positive, got {v}"),
                });
            }
            Ok(c(v))
        };
        let id = cell(id_col, "id")?.to_string();
        if !seen.insert(id.clone()) {
            return Err(Error::Data {
                row,
                column: "id".into(),
                message: format!("duplicate id {id:?}"),
            });
        }
        let inputs = in_cols
            .iter()
            .map(|(k, n)| numeric(*k, n))
            .collect::<Result<Vec<S>>>()?;
        let outputs = out_cols
            .iter()
            .map(|(k, n)| numeric(*k, n))
            .collect::<Result<Vec<S>>>()?;
        dmus.push(DmuRecord { id, inputs, outputs });
    }
    if dmus.is_empty() {
        return Err(Error::InvalidDataset("no rows".into()));
    }

    let dataset = Dataset {
        dmus,
        input_names: in_cols.into_iter().map(|(_, n)| n).collect(),
        output_names: out_cols.into_iter().map(|(_, n)| n).collect(),
        rts,
    };
    dataset.ensure_valid()?;
    Ok(dataset)
}
