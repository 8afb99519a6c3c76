//! Efficiency classification and the extreme efficient set E that the
//! benchmarking models range over.
//!
//! Efficiency is decided with the unweighted additive model on data
//! pre-scaled by per-variable maxima; extremity with a representability
//! LP over the remaining DMUs.

use serde::Serialize;

use crate::dataset::{Dataset, Rts, ScaledData};
use crate::error::{Error, Result};
use crate::lp::{solve_lp, LinearProgram, LpStatus, ObjSense, Sense, Variable};
use crate::scalar::{c, Scalar, CHECK_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DmuStatus {
    ExtremeEfficient,
    NonextremeEfficient,
    Inefficient,
}

impl DmuStatus {
    pub fn is_efficient(self) -> bool {
        self != DmuStatus::Inefficient
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FrontierClassification<S> {
    pub statuses: Vec<DmuStatus>,
    /// Additive-model optimal slacks per DMU, in scaled units.
    pub input_slacks: Vec<Vec<S>>,
    pub output_slacks: Vec<Vec<S>>,
    /// Ordered ids of the extreme efficient DMUs.
    pub extreme: Vec<String>,
}

impl<S> FrontierClassification<S> {
    pub fn extreme_indices(&self, data: &Dataset<S>) -> Vec<usize>
    where
        S: Scalar,
    {
        self.extreme
            .iter()
            .map(|id| data.index_of(id).expect("E ids come from the dataset"))
            .collect()
    }
}

/// Which deviations the efficiency test may exploit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum GapMode {
    Both,
    /// Output shortfalls only; input room is free disposal (oriented
    /// output targets).
    OutputsOnly,
    /// Input excesses only (oriented input targets).
    InputsOnly,
}

/// Optimal additive slack sum for projecting the (scaled) point
/// `(px, py)` onto combinations of the (scaled) columns in `x`/`y`.
/// Zero (within tolerance) means the point is efficient for the mode.
pub(crate) fn efficiency_gap<S: Scalar>(
    x: &[Vec<S>],
    y: &[Vec<S>],
    rts: Rts,
    px: &[S],
    py: &[S],
    mode: GapMode,
) -> Result<(S, Vec<S>, Vec<S>)> {
    let n = x.len();
    let m = px.len();
    let s = py.len();
    let mut vars: Vec<Variable<S>> = (0..n)
        .map(|j| Variable::nonneg(format!("lambda{j}")))
        .collect();
    for i in 0..m {
        vars.push(Variable::nonneg(format!("sminus{i}")));
    }
    for r in 0..s {
        vars.push(Variable::nonneg(format!("splus{r}")));
    }
    let mut obj = vec![S::zero(); n + m + s];
    for i in 0..m {
        if mode != GapMode::OutputsOnly {
            obj[n + i] = S::one();
        }
    }
    for r in 0..s {
        if mode != GapMode::InputsOnly {
            obj[n + m + r] = S::one();
        }
    }
    let mut lp = LinearProgram {
        variables: vars,
        constraints: Vec::new(),
        obj_sense: ObjSense::Max,
        objective: obj,
    };
    for i in 0..m {
        let mut row = vec![S::zero(); n + m + s];
        for j in 0..n {
            row[j] = x[j][i];
        }
        row[n + i] = S::one();
        lp.push(row, Sense::Eq, px[i]);
    }
    for r in 0..s {
        let mut row = vec![S::zero(); n + m + s];
        for j in 0..n {
            row[j] = y[j][r];
        }
        row[n + m + r] = -S::one();
        lp.push(row, Sense::Eq, py[r]);
    }
    if rts == Rts::Variable {
        let mut row = vec![S::zero(); n + m + s];
        for j in 0..n {
            row[j] = S::one();
        }
        lp.push(row, Sense::Eq, S::one());
    }
    let sol = solve_lp(&lp)?;
    match sol.status {
        LpStatus::Optimal => Ok((
            sol.objective,
            sol.primal[n..n + m].to_vec(),
            sol.primal[n + m..n + m + s].to_vec(),
        )),
        LpStatus::Infeasible => Err(Error::NumericalBreakdown(
            "additive test reported infeasible for a point of the PPS".into(),
        )),
        LpStatus::Unbounded => Err(Error::NumericalBreakdown(
            "additive test reported unbounded".into(),
        )),
    }
}

/// Can the (scaled) point be written as a combination of the given
/// columns alone?
pub(crate) fn representable<S: Scalar>(
    x: &[Vec<S>],
    y: &[Vec<S>],
    rts: Rts,
    px: &[S],
    py: &[S],
) -> Result<bool> {
    let n = x.len();
    if n == 0 {
        return Ok(false);
    }
    let vars: Vec<Variable<S>> = (0..n)
        .map(|j| Variable::nonneg(format!("lambda{j}")))
        .collect();
    let mut lp = LinearProgram::minimize(vars, vec![S::zero(); n]);
    for (i, target) in px.iter().enumerate() {
        let row = (0..n).map(|j| x[j][i]).collect();
        lp.push(row, Sense::Eq, *target);
    }
    for (r, target) in py.iter().enumerate() {
        let row = (0..n).map(|j| y[j][r]).collect();
        lp.push(row, Sense::Eq, *target);
    }
    if rts == Rts::Variable {
        lp.push(vec![S::one(); n], Sense::Eq, S::one());
    }
    Ok(solve_lp(&lp)?.status == LpStatus::Optimal)
}

/// Full classification: additive efficiency test, then the extremity
/// test on the efficient units.
pub fn classify<S: Scalar>(data: &Dataset<S>) -> Result<FrontierClassification<S>> {
    data.ensure_valid()?;
    let scaled = data.scaled();
    classify_scaled(data, &scaled)
}

pub(crate) fn classify_scaled<S: Scalar>(
    data: &Dataset<S>,
    scaled: &ScaledData<S>,
) -> Result<FrontierClassification<S>> {
    let n = data.n();
    let mut statuses = Vec::with_capacity(n);
    let mut input_slacks = Vec::with_capacity(n);
    let mut output_slacks = Vec::with_capacity(n);
    for j in 0..n {
        let (gap, si, so) = efficiency_gap(
            &scaled.x,
            &scaled.y,
            data.rts,
            &scaled.x[j],
            &scaled.y[j],
            GapMode::Both,
        )?;
        statuses.push(if gap > c(CHECK_TOL) {
            DmuStatus::Inefficient
        } else {
            DmuStatus::NonextremeEfficient // refined below
        });
        input_slacks.push(si);
        output_slacks.push(so);
    }

    let mut extreme = Vec::new();
    for j in 0..n {
        if statuses[j] == DmuStatus::Inefficient {
            continue;
        }
        // Representing set: every other DMU, except exact duplicates with a
        // later index (so the first duplicate wins, deterministically).
        let me = &data.dmus[j];
        let others: Vec<usize> = (0..n)
            .filter(|k| {
                *k != j
                    && !(*k > j
                        && data.dmus[*k].inputs == me.inputs
                        && data.dmus[*k].outputs == me.outputs)
            })
            .collect();
        let ox: Vec<Vec<S>> = others.iter().map(|k| scaled.x[*k].clone()).collect();
        let oy: Vec<Vec<S>> = others.iter().map(|k| scaled.y[*k].clone()).collect();
        if !representable(&ox, &oy, data.rts, &scaled.x[j], &scaled.y[j])? {
            statuses[j] = DmuStatus::ExtremeEfficient;
            extreme.push(data.dmus[j].id.clone());
        }
    }
    if extreme.is_empty() {
        return Err(Error::NumericalBreakdown(
            "no extreme efficient DMU found; the frontier tests disagree".into(),
        ));
    }

    Ok(FrontierClassification {
        statuses,
        input_slacks,
        output_slacks,
        extreme,
    })
}
