//! Independent validity checks on a benchmark solution. All geometric
//! checks run in max-scaled space against a fixed tolerance; a valid
//! solution yields an empty report.

use super::{BenchmarkSolution, ModelKind, SolveStatus};
use crate::dataset::Dataset;
use crate::frontier::{efficiency_gap, FrontierClassification, GapMode};
use crate::metrics::{mix_deviation, weighted_l1, DistanceKind};
use crate::scalar::{c, Scalar, CHECK_TOL};

/// Check a solution against the dataset and classification it came from.
/// Returns one message per violated invariant.
pub fn validate_solution<S: Scalar>(
    sol: &BenchmarkSolution<S>,
    data: &Dataset<S>,
    cls: &FrontierClassification<S>,
) -> Vec<String> {
    let mut report = Vec::new();
    let tol: S = c(CHECK_TOL);
    let kind = sol.model;
    let m = data.m();
    let s = data.s();
    let scaled = data.scaled();

    if sol.status != SolveStatus::Optimal {
        report.push("solution status is not optimal".to_string());
        return report;
    }
    let Some(dmu) = data.index_of(&sol.dmu) else {
        report.push(format!("DMU {:?} is not in the dataset", sol.dmu));
        return report;
    };
    let e_idx = cls.extreme_indices(data);
    if sol.lambda.len() != e_idx.len() {
        report.push(format!(
            "lambda has {} entries for {} extreme efficient DMUs",
            sol.lambda.len(),
            e_idx.len()
        ));
        return report;
    }

    // Weights: nonnegative, and summing to one whenever convexity applies.
    let mut lambda_sum = S::zero();
    for (id, w) in &sol.lambda {
        if *w < -tol {
            report.push(format!("negative weight {w} on {id}"));
        }
        lambda_sum = lambda_sum + *w;
    }
    if kind != ModelKind::BiCrs && (lambda_sum - S::one()).abs() > tol {
        report.push(format!("weights sum to {lambda_sum}, expected 1"));
    }

    // Reference set: drawn from E, consistent with the weights.
    for id in &sol.reference_set {
        if !cls.extreme.contains(id) {
            report.push(format!("reference peer {id} is not extreme efficient"));
        }
        let w = sol
            .lambda
            .iter()
            .find(|(lid, _)| lid == id)
            .map(|(_, w)| *w);
        if !matches!(w, Some(w) if w > S::zero()) {
            report.push(format!("reference peer {id} carries no weight"));
        }
    }

    // Targets recombine from the weights, scale-relative.
    let tx: Vec<S> = (0..m).map(|i| sol.targets_in[i] / scaled.xmax[i]).collect();
    let ty: Vec<S> = (0..s)
        .map(|r| sol.targets_out[r] / scaled.ymax[r])
        .collect();
    for i in 0..m {
        let mut combo = S::zero();
        for (k, j) in e_idx.iter().enumerate() {
            combo = combo + sol.lambda[k].1 * scaled.x[*j][i];
        }
        if (combo - tx[i]).abs() > tol {
            report.push(format!("input target {i} does not recombine from lambda"));
        }
    }
    for r in 0..s {
        let mut combo = S::zero();
        for (k, j) in e_idx.iter().enumerate() {
            combo = combo + sol.lambda[k].1 * scaled.y[*j][r];
        }
        if (combo - ty[r]).abs() > tol {
            report.push(format!("output target {r} does not recombine from lambda"));
        }
    }

    // Domination: the target uses no more input and no less output.
    for i in 0..m {
        if tx[i] > scaled.x[dmu][i] + tol {
            report.push(format!("input target {i} exceeds the DMU's level"));
        }
    }
    for r in 0..s {
        if ty[r] < scaled.y[dmu][r] - tol {
            report.push(format!("output target {r} falls below the DMU's level"));
        }
    }

    // Slack bookkeeping.
    for i in 0..m {
        let expected = data.dmus[dmu].inputs[i] - sol.targets_in[i];
        if (sol.input_slacks[i] - expected).abs() / scaled.xmax[i] > tol {
            report.push(format!("input slack {i} inconsistent with its target"));
        }
    }
    for r in 0..s {
        let expected = sol.targets_out[r] - data.dmus[dmu].outputs[r];
        if (sol.output_slacks[r] - expected).abs() / scaled.ymax[r] > tol {
            report.push(format!("output slack {r} inconsistent with its target"));
        }
    }

    // Hyperplane: admissible coefficients, every E member on or below it,
    // reference peers exactly on it, and complementarity with the weights.
    let hp = &sol.hyperplane;
    let v_scaled: Vec<S> = (0..m).map(|i| hp.v[i] * scaled.xmax[i]).collect();
    let u_scaled: Vec<S> = (0..s).map(|r| hp.u[r] * scaled.ymax[r]).collect();
    let v_floor = if kind == ModelKind::OrientedOutputVrs {
        S::zero()
    } else {
        S::one()
    };
    let u_floor = if kind == ModelKind::OrientedInputVrs {
        S::zero()
    } else {
        S::one()
    };
    for (i, vi) in v_scaled.iter().enumerate() {
        if *vi < v_floor - tol {
            report.push(format!("input weight {i} falls below its bound"));
        }
    }
    for (r, ur) in u_scaled.iter().enumerate() {
        if *ur < u_floor - tol {
            report.push(format!("output weight {r} falls below its bound"));
        }
    }
    if (kind == ModelKind::BiCrs) != hp.u0.is_none() {
        report.push("intercept present/absent contrary to the technology".to_string());
    }
    if hp.delta.len() != e_idx.len() {
        report.push("hyperplane gaps do not cover E".to_string());
    } else {
        for (k, j) in e_idx.iter().enumerate() {
            let (ref id, dk) = hp.delta[k];
            let mut resid = dk;
            for i in 0..m {
                resid = resid - v_scaled[i] * scaled.x[*j][i];
            }
            for r in 0..s {
                resid = resid + u_scaled[r] * scaled.y[*j][r];
            }
            if let Some(u0) = hp.u0 {
                resid = resid + u0;
            }
            if resid.abs() > tol {
                report.push(format!("E member {id} violates the hyperplane identity"));
            }
            if dk < -tol {
                report.push(format!("E member {id} lies strictly above the hyperplane"));
            }
            if sol.lambda[k].1 * dk > tol {
                report.push(format!("peer {id} carries weight but is off the hyperplane"));
            }
            if sol.reference_set.contains(id) && dk > tol {
                report.push(format!("reference peer {id} is off the hyperplane"));
            }
        }
    }

    // Target efficiency: the projection admits no further improvement in
    // the directions the model optimizes over.
    let gap_mode = match kind {
        ModelKind::OrientedOutputVrs => GapMode::OutputsOnly,
        ModelKind::OrientedInputVrs => GapMode::InputsOnly,
        _ => GapMode::Both,
    };
    // Oriented targets are judged from the DMU's own input (or output)
    // levels: free room there is not an inefficiency of the target.
    let (anchor_x, anchor_y): (&[S], &[S]) = match kind {
        ModelKind::OrientedOutputVrs => (&scaled.x[dmu], &ty),
        ModelKind::OrientedInputVrs => (&tx, &scaled.y[dmu]),
        _ => (&tx, &ty),
    };
    match efficiency_gap(&scaled.x, &scaled.y, data.rts, anchor_x, anchor_y, gap_mode) {
        Ok((gap, _, _)) => {
            if gap > tol {
                report.push(format!("target is dominated: residual slack sum {gap}"));
            }
        }
        Err(e) => report.push(format!("target efficiency test failed: {e}")),
    }

    // Reported distances agree with a direct recomputation.
    let record = &data.dmus[dmu];
    if !sol.reference_set.is_empty() {
        let recomputed = sol
            .reference_set
            .iter()
            .map(|id| {
                let peer = data.record(id)?;
                match kind.peer_metric() {
                    DistanceKind::L1 => weighted_l1(record, peer),
                    DistanceKind::Mix => mix_deviation(record, peer),
                }
            })
            .try_fold(S::zero(), |acc, d| d.map(|d| acc.max(d)));
        match recomputed {
            Ok(d) => {
                if (d - sol.d_h).abs() > tol {
                    report.push(format!("reported peer radius {} differs from {d}", sol.d_h));
                }
            }
            Err(e) => report.push(format!("peer radius recomputation failed: {e}")),
        }
    } else if !sol.self_benchmark {
        report.push("empty reference set".to_string());
    }

    let obj = if kind.has_peer_term() {
        sol.alpha * sol.d_proj + kind.peer_coeff(sol.alpha, m, s) * sol.d_h
    } else {
        sol.d_proj
    };
    if (obj - sol.objective).abs() > tol {
        report.push(format!(
            "objective {} differs from its recomputation {obj}",
            sol.objective
        ));
    }

    report
}
