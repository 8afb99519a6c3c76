//! Presentation and run persistence: markdown/CSV rendering of
//! classifications, distance matrices, benchmark solutions and alpha
//! sweeps, plus the append-only run records. Rendering rounds targets to
//! one decimal and distances to three; stored values stay full precision.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::dataset::Dataset;
use crate::error::Result;
use crate::frontier::{DmuStatus, FrontierClassification};
use crate::metrics::{mix_deviation, weighted_l1, DistanceKind, DistanceMatrix};
use crate::model::BenchmarkSolution;
use crate::scalar::Scalar;
use crate::sweep::{detect_changes, AlphaSeries};

pub fn fmt1<S: Scalar>(v: S) -> String {
    format!("{:.1}", v.to_f64().unwrap_or(f64::NAN))
}

pub fn fmt3<S: Scalar>(v: S) -> String {
    format!("{:.3}", v.to_f64().unwrap_or(f64::NAN))
}

fn status_name(status: DmuStatus) -> &'static str {
    match status {
        DmuStatus::ExtremeEfficient => "extreme efficient",
        DmuStatus::NonextremeEfficient => "efficient (nonextreme)",
        DmuStatus::Inefficient => "inefficient",
    }
}

pub fn render_classification_md<S: Scalar>(
    data: &Dataset<S>,
    cls: &FrontierClassification<S>,
) -> String {
    let mut out = String::new();
    out.push_str("| DMU | status |\n|---|---|\n");
    for (j, rec) in data.dmus.iter().enumerate() {
        out.push_str(&format!("| {} | {} |\n", rec.id, status_name(cls.statuses[j])));
    }
    out.push_str(&format!("\nE = {{{}}}\n", cls.extreme.join(", ")));
    out
}

pub fn render_classification_csv<S: Scalar>(
    data: &Dataset<S>,
    cls: &FrontierClassification<S>,
) -> String {
    let mut out = String::from("dmu,status\n");
    for (j, rec) in data.dmus.iter().enumerate() {
        out.push_str(&format!("{},{}\n", rec.id, status_name(cls.statuses[j])));
    }
    out
}

pub fn render_matrix_md<S: Scalar>(matrix: &DistanceMatrix<S>) -> String {
    let mut out = String::from("| DMU |");
    for c in &matrix.col_ids {
        out.push_str(&format!(" {c} |"));
    }
    out.push_str("\n|---|");
    out.push_str(&"---|".repeat(matrix.col_ids.len()));
    out.push('\n');
    for (i, row) in matrix.entries.iter().enumerate() {
        out.push_str(&format!("| {} |", matrix.row_ids[i]));
        for v in row {
            out.push_str(&format!(" {} |", fmt3(*v)));
        }
        out.push('\n');
    }
    out
}

pub fn render_matrix_csv<S: Scalar>(matrix: &DistanceMatrix<S>) -> String {
    let mut out = String::from("dmu");
    for c in &matrix.col_ids {
        out.push_str(&format!(",{c}"));
    }
    out.push('\n');
    for (i, row) in matrix.entries.iter().enumerate() {
        out.push_str(&matrix.row_ids[i]);
        for v in row {
            out.push_str(&format!(",{}", v.to_f64().unwrap_or(f64::NAN)));
        }
        out.push('\n');
    }
    out
}

/// "A (0.933), B (0.867)" — peers with their distances in brackets.
fn peer_list<S: Scalar>(data: &Dataset<S>, sol: &BenchmarkSolution<S>) -> String {
    let origin = data.record(&sol.dmu).ok();
    sol.reference_set
        .iter()
        .map(|id| {
            let d = origin.and_then(|o| {
                data.record(id).ok().and_then(|p| {
                    match sol.model.peer_metric() {
                        DistanceKind::L1 => weighted_l1(o, p),
                        DistanceKind::Mix => mix_deviation(o, p),
                    }
                    .ok()
                })
            });
            match d {
                Some(d) => format!("{id} ({})", fmt3(d)),
                None => id.clone(),
            }
        })
        .collect::<Vec<_>>()
        .join(", ")
}

pub fn render_solution_md<S: Scalar>(data: &Dataset<S>, sol: &BenchmarkSolution<S>) -> String {
    let m = data.m();
    let s = data.s();
    let mut out = String::new();
    out.push_str(&format!(
        "## {} — model {}, alpha {}\n\n",
        sol.dmu,
        sol.model,
        sol.alpha.to_f64().unwrap_or(f64::NAN)
    ));
    if sol.self_benchmark {
        out.push_str("efficient; self-benchmark\n");
        return out;
    }
    out.push_str(&format!("Reference set: {}\n\n", peer_list(data, sol)));
    out.push_str("| variable | actual | target | slack |\n|---|---|---|---|\n");
    for i in 0..m {
        out.push_str(&format!(
            "| {} | {} | {} | {} |\n",
            data.input_names[i],
            fmt1(data.record(&sol.dmu).map(|r| r.inputs[i]).unwrap_or(S::nan())),
            fmt1(sol.targets_in[i]),
            fmt1(sol.input_slacks[i]),
        ));
    }
    for r in 0..s {
        out.push_str(&format!(
            "| {} | {} | {} | {} |\n",
            data.output_names[r],
            fmt1(data.record(&sol.dmu).map(|rec| rec.outputs[r]).unwrap_or(S::nan())),
            fmt1(sol.targets_out[r]),
            fmt1(sol.output_slacks[r]),
        ));
    }
    let lam = sol
        .lambda
        .iter()
        .filter(|(_, w)| *w > S::zero())
        .map(|(id, w)| format!("{id}: {}", fmt3(*w)))
        .collect::<Vec<_>>()
        .join(", ");
    out.push_str(&format!("\nlambda: {lam}\n"));
    out.push_str(&format!(
        "d_proj = {}, d_H = {}, objective = {}\n",
        fmt3(sol.d_proj),
        fmt3(sol.d_h),
        fmt3(sol.objective)
    ));
    out
}

/// Two tables per series: peers per alpha range with the normalized
/// Hausdorff column, then targets per alpha range with the projection
/// distance.
pub fn render_series_md<S: Scalar>(data: &Dataset<S>, series: &AlphaSeries<S>) -> String {
    let m = data.m();
    let s = data.s();
    let norm = (m + s) as f64;
    let segments = detect_changes(series);
    let mut out = String::new();
    out.push_str(&format!("## {} — model {}\n\n", series.dmu, series.model));

    out.push_str(&format!(
        "| alpha | reference set | d_H/{} |\n|---|---|---|\n",
        m + s
    ));
    for seg in &segments {
        let point = &series.points[seg.first];
        let dh = point.d_h.to_f64().unwrap_or(f64::NAN) / norm;
        out.push_str(&format!(
            "| {} | {} | {:.3} |\n",
            seg.label(),
            peer_list(data, point),
            dh
        ));
    }

    out.push_str("\n| alpha |");
    for name in data.input_names.iter().chain(data.output_names.iter()) {
        out.push_str(&format!(" {name} |"));
    }
    out.push_str(" d_proj |\n|---|");
    out.push_str(&"---|".repeat(m + s + 1));
    out.push('\n');
    for seg in &segments {
        let point = &series.points[seg.first];
        out.push_str(&format!("| {} |", seg.label()));
        for v in point.targets_in.iter().chain(point.targets_out.iter()) {
            out.push_str(&format!(" {} |", fmt1(*v)));
        }
        out.push_str(&format!(" {} |\n", fmt3(point.d_proj)));
    }
    out
}

pub fn render_series_csv<S: Scalar>(data: &Dataset<S>, series: &AlphaSeries<S>) -> String {
    let mut out = String::from("dmu,model,alpha,reference_set");
    for name in &data.input_names {
        out.push_str(&format!(",target:{name}"));
    }
    for name in &data.output_names {
        out.push_str(&format!(",target:{name}"));
    }
    out.push_str(",d_proj,d_h,objective\n");
    for point in &series.points {
        out.push_str(&format!(
            "{},{},{},{}",
            point.dmu,
            point.model,
            point.alpha.to_f64().unwrap_or(f64::NAN),
            point.reference_set.join(";")
        ));
        for v in point.targets_in.iter().chain(point.targets_out.iter()) {
            out.push_str(&format!(",{}", v.to_f64().unwrap_or(f64::NAN)));
        }
        out.push_str(&format!(
            ",{},{},{}\n",
            point.d_proj.to_f64().unwrap_or(f64::NAN),
            point.d_h.to_f64().unwrap_or(f64::NAN),
            point.objective.to_f64().unwrap_or(f64::NAN)
        ));
    }
    out
}

pub fn render_solution_csv<S: Scalar>(data: &Dataset<S>, sol: &BenchmarkSolution<S>) -> String {
    let series = AlphaSeries {
        dmu: sol.dmu.clone(),
        model: sol.model,
        grid: vec![sol.alpha],
        points: vec![sol.clone()],
        change_points: Vec::new(),
    };
    render_series_csv(data, &series)
}

/// SHA-256 of the dataset bytes, hex-encoded.
pub fn dataset_digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// One persisted invocation: what ran, on which data, with what result.
#[derive(Debug, Clone, Serialize)]
pub struct RunRecord {
    pub timestamp: String,
    pub dataset_digest: String,
    pub command: String,
    pub results: serde_json::Value,
}

impl RunRecord {
    pub fn new(dataset_digest: &str, command: &str, results: serde_json::Value) -> Self {
        RunRecord {
            timestamp: chrono::Utc::now().to_rfc3339(),
            dataset_digest: dataset_digest.to_string(),
            command: command.to_string(),
            results,
        }
    }
}

/// Append the record as one JSON line to `<dir>/<digest>.jsonl`.
pub fn persist_run(dir: &Path, record: &RunRecord) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(format!("{}.jsonl", record.dataset_digest));
    let mut file = fs::OpenOptions::new().create(true).append(true).open(&path)?;
    let line = serde_json::to_string(record)
        .map_err(|e| crate::error::Error::Invalid(format!("run record serialization: {e}")))?;
    writeln!(file, "{line}")?;
    Ok(path)
}
