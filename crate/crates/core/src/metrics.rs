//! Similarity quantities: weighted L1 distances, Hausdorff aggregation,
//! and mix-deviation sines for the CRS case.

use serde::Serialize;

use crate::dataset::{Dataset, DmuRecord};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Weighted L1 distance normalized by the origin's values:
/// `sum |x0 - xj| / x0 + sum |y0 - yj| / y0`. Asymmetric in general.
pub fn weighted_l1<S: Scalar>(origin: &DmuRecord<S>, other: &DmuRecord<S>) -> Result<S> {
    if origin.inputs.len() != other.inputs.len() || origin.outputs.len() != other.outputs.len() {
        return Err(Error::Invalid(format!(
            "dimension mismatch between {:?} and {:?}",
            origin.id, other.id
        )));
    }
    let inputs = origin
        .inputs
        .iter()
        .zip(&other.inputs)
        .map(|(a, b)| (*a - *b).abs() / *a)
        .sum::<S>();
    let outputs = origin
        .outputs
        .iter()
        .zip(&other.outputs)
        .map(|(a, b)| (*a - *b).abs() / *a)
        .sum::<S>();
    Ok(inputs + outputs)
}

/// Hausdorff distance from a point to a finite set: the maximum of the
/// weighted L1 distances to its members.
pub fn hausdorff_to_set<'a, S: Scalar>(
    origin: &DmuRecord<S>,
    peers: impl IntoIterator<Item = &'a DmuRecord<S>>,
) -> Result<S> {
    let mut best: Option<S> = None;
    for peer in peers {
        let d = weighted_l1(origin, peer)?;
        best = Some(match best {
            None => d,
            Some(b) => b.max(d),
        });
    }
    best.ok_or_else(|| Error::Invalid("hausdorff distance to an empty set".into()))
}

/// Sine of the angle between two strictly positive mixes. `sin^2` is
/// clamped into [0, 1] before the root to absorb float overshoot on
/// near-parallel vectors.
pub fn mix_sine<S: Scalar>(a: &[S], b: &[S]) -> Result<S> {
    if a.len() != b.len() {
        return Err(Error::Invalid("mix_sine: dimension mismatch".into()));
    }
    if a.is_empty() {
        return Err(Error::Invalid("mix_sine: empty vectors".into()));
    }
    let dot = a.iter().zip(b).map(|(p, q)| *p * *q).sum::<S>();
    let na = a.iter().map(|p| *p * *p).sum::<S>().sqrt();
    let nb = b.iter().map(|q| *q * *q).sum::<S>().sqrt();
    let cos = dot / (na * nb);
    let sin2 = (S::one() - cos * cos).max(S::zero()).min(S::one());
    Ok(sin2.sqrt())
}

/// Mix deviation between two DMUs: input-mix sine plus output-mix sine.
pub fn mix_deviation<S: Scalar>(origin: &DmuRecord<S>, other: &DmuRecord<S>) -> Result<S> {
    Ok(mix_sine(&origin.inputs, &other.inputs)? + mix_sine(&origin.outputs, &other.outputs)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DistanceKind {
    L1,
    Mix,
}

#[derive(Debug, Clone, Serialize)]
pub struct DistanceMatrix<S> {
    pub kind: DistanceKind,
    pub row_ids: Vec<String>,
    pub col_ids: Vec<String>,
    pub entries: Vec<Vec<S>>,
}

impl<S: Scalar> DistanceMatrix<S> {
    pub fn entry(&self, row: &str, col: &str) -> Option<S> {
        let i = self.row_ids.iter().position(|r| r == row)?;
        let j = self.col_ids.iter().position(|c| c == col)?;
        Some(self.entries[i][j])
    }
}

/// Distances from `rows` (default: every DMU) to the members of E.
pub fn distance_matrix<S: Scalar>(
    data: &Dataset<S>,
    e_ids: &[String],
    rows: &[String],
    kind: DistanceKind,
) -> Result<DistanceMatrix<S>> {
    let cols: Vec<&DmuRecord<S>> = e_ids
        .iter()
        .map(|id| data.record(id))
        .collect::<Result<_>>()?;
    let mut entries = Vec::with_capacity(rows.len());
    for id in rows {
        let origin = data.record(id)?;
        let row: Vec<S> = cols
            .iter()
            .map(|peer| match kind {
                DistanceKind::L1 => weighted_l1(origin, peer),
                DistanceKind::Mix => mix_deviation(origin, peer),
            })
            .collect::<Result<_>>()?;
        entries.push(row);
    }
    Ok(DistanceMatrix {
        kind,
        row_ids: rows.to_vec(),
        col_ids: e_ids.to_vec(),
        entries,
    })
}
