//! Alpha sweeps: solve one DMU/model pair over a grid of tradeoff
//! weights and collapse the results into segments with a stable answer.

use serde::Serialize;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::frontier::FrontierClassification;
use crate::model::{BenchContext, BenchmarkSolution, ModelKind, SolveOptions};
use crate::scalar::{c, Scalar, CHECK_TOL};

#[derive(Debug, Clone, Serialize)]
pub struct AlphaSeries<S> {
    pub dmu: String,
    pub model: ModelKind,
    /// The alpha grid, descending; `points[k].alpha == grid[k]`.
    pub grid: Vec<S>,
    pub points: Vec<BenchmarkSolution<S>>,
    /// Grid alphas where the reference set differs from the previous
    /// (larger-alpha) point.
    pub change_points: Vec<S>,
}

/// One run of consecutive grid points whose reference set and targets
/// agree.
#[derive(Debug, Clone, Serialize)]
pub struct AlphaSegment<S> {
    /// Largest and smallest alpha of the run (the grid is descending).
    pub alpha_hi: S,
    pub alpha_lo: S,
    /// Index of the run's first point in the series.
    pub first: usize,
    pub reference_set: Vec<String>,
    pub targets_in: Vec<S>,
    pub targets_out: Vec<S>,
}

impl<S: Scalar> AlphaSegment<S> {
    /// Human label for the run: a single value, or "hi–lo".
    pub fn label(&self) -> String {
        if self.alpha_hi == self.alpha_lo {
            trim_alpha(self.alpha_hi)
        } else {
            format!("{}–{}", trim_alpha(self.alpha_hi), trim_alpha(self.alpha_lo))
        }
    }
}

fn trim_alpha<S: Scalar>(a: S) -> String {
    let mut s = format!("{:.3}", a.to_f64().unwrap_or(f64::NAN));
    while s.contains('.') && (s.ends_with('0') || s.ends_with('.')) {
        s.pop();
    }
    s
}

/// Descending grid from `hi` down to `lo` in steps of `step`. Endpoints
/// are included; alpha 0 is allowed only when named explicitly as `lo`.
pub fn alpha_grid<S: Scalar>(hi: S, lo: S, step: S) -> Result<Vec<S>> {
    if !(hi.is_finite() && lo.is_finite() && step.is_finite()) {
        return Err(Error::Invalid("alpha grid bounds must be finite".into()));
    }
    if step <= S::zero() {
        return Err(Error::Invalid("alpha step must be positive".into()));
    }
    if lo < S::zero() || hi > S::one() || lo > hi {
        return Err(Error::Invalid(
            "alpha grid must satisfy 0 <= lo <= hi <= 1".into(),
        ));
    }
    let mut grid = Vec::new();
    let mut k = 0u32;
    loop {
        let a = hi - step * c(k as f64);
        if a < lo - c(1e-9) {
            break;
        }
        grid.push(a.max(lo));
        k += 1;
        if k > 100_000 {
            return Err(Error::Invalid("alpha grid has too many points".into()));
        }
    }
    if let Some(last) = grid.last() {
        if (*last - lo).abs() > c(1e-9) {
            grid.push(lo);
        }
    }
    Ok(grid)
}

/// Solve the model at every grid point. Peer distances are computed once
/// for the DMU and shared across the grid.
pub fn alpha_series<S: Scalar>(
    data: &Dataset<S>,
    cls: &FrontierClassification<S>,
    dmu_id: &str,
    kind: ModelKind,
    alphas: &[S],
) -> Result<AlphaSeries<S>> {
    let ctx = BenchContext::new(data, cls);
    if data.rts != kind.required_rts() {
        return Err(Error::RtsMismatch {
            model: kind.to_string(),
            required: kind.required_rts().to_string(),
            actual: data.rts.to_string(),
        });
    }
    let dmu = data
        .index_of(dmu_id)
        .ok_or_else(|| Error::UnknownDmu(dmu_id.to_string()))?;
    let dists = ctx.peer_distances(dmu, kind)?;
    let mut points = Vec::with_capacity(alphas.len());
    for alpha in alphas {
        let opts = SolveOptions::new(*alpha);
        let sol = ctx
            .solve_indexed(dmu, kind, &opts, &dists)
            .map_err(|e| Error::Solve {
                dmu: dmu_id.to_string(),
                alpha: alpha.to_f64().unwrap_or(f64::NAN),
                source: Box::new(e),
            })?;
        points.push(sol);
    }
    let change_points = points
        .windows(2)
        .filter(|w| w[0].reference_set != w[1].reference_set)
        .map(|w| w[1].alpha)
        .collect();
    Ok(AlphaSeries {
        dmu: dmu_id.to_string(),
        model: kind,
        grid: alphas.to_vec(),
        points,
        change_points,
    })
}

/// Collapse a series into segments: consecutive points stay together
/// while the reference set is identical and every target moves by less
/// than the tolerance.
pub fn detect_changes<S: Scalar>(series: &AlphaSeries<S>) -> Vec<AlphaSegment<S>> {
    let tol: S = c(CHECK_TOL);
    let mut segments: Vec<AlphaSegment<S>> = Vec::new();
    for (k, point) in series.points.iter().enumerate() {
        let same = segments.last().is_some_and(|seg| {
            seg.reference_set == point.reference_set
                && seg
                    .targets_in
                    .iter()
                    .zip(&point.targets_in)
                    .all(|(a, b)| (*a - *b).abs() <= tol)
                && seg
                    .targets_out
                    .iter()
                    .zip(&point.targets_out)
                    .all(|(a, b)| (*a - *b).abs() <= tol)
        });
        if same {
            segments.last_mut().expect("nonempty").alpha_lo = point.alpha;
        } else {
            segments.push(AlphaSegment {
                alpha_hi: point.alpha,
                alpha_lo: point.alpha,
                first: k,
                reference_set: point.reference_set.clone(),
                targets_in: point.targets_in.clone(),
                targets_out: point.targets_out.clone(),
            });
        }
    }
    segments
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontier::classify;
    use crate::frontier::tests::t1;

    #[test]
    fn grid_is_descending_and_inclusive() {
        let g = alpha_grid::<f64>(1.0, 0.1, 0.1).unwrap();
        assert_eq!(g.len(), 10);
        assert!((g[0] - 1.0).abs() < 1e-12);
        assert!((g[9] - 0.1).abs() < 1e-9);
        assert!(g.windows(2).all(|w| w[0] > w[1]));

        // explicit zero endpoint is accepted
        let g = alpha_grid::<f64>(1.0, 0.0, 0.25).unwrap();
        assert_eq!(*g.last().unwrap(), 0.0);

        // ragged final step still lands on the low endpoint
        let g = alpha_grid::<f64>(1.0, 0.15, 0.2).unwrap();
        assert!((g.last().unwrap() - 0.15).abs() < 1e-12);

        assert!(alpha_grid::<f64>(1.0, 0.1, 0.0).is_err());
        assert!(alpha_grid::<f64>(0.2, 0.5, 0.1).is_err());
        assert!(alpha_grid::<f64>(1.5, 0.1, 0.1).is_err());
    }

    #[test]
    fn t1_sweep_detects_the_reference_switch() {
        let data = t1();
        let cls = classify(&data).unwrap();
        let grid = alpha_grid(1.0, 0.1, 0.1).unwrap();
        let series = alpha_series(&data, &cls, "D", ModelKind::BiVrs, &grid).unwrap();
        assert_eq!(series.change_points.len(), 1);
        assert!((series.change_points[0] - 0.1).abs() < 1e-9);
        let segments = detect_changes(&series);
        assert_eq!(segments.len(), 2);
        assert_eq!(segments[0].reference_set, vec!["A", "B"]);
        assert!((segments[0].alpha_hi - 1.0).abs() < 1e-12);
        assert!((segments[0].alpha_lo - 0.2).abs() < 1e-9);
        assert_eq!(segments[1].reference_set, vec!["B"]);
        assert!((segments[1].alpha_hi - 0.1).abs() < 1e-9);
        assert_eq!(segments[0].label(), "1–0.2");
        assert_eq!(segments[1].label(), "0.1");
    }

    #[test]
    fn sweep_of_an_extreme_unit_is_one_segment() {
        let data = t1();
        let cls = classify(&data).unwrap();
        let grid = alpha_grid(1.0, 0.2, 0.2).unwrap();
        let series = alpha_series(&data, &cls, "A", ModelKind::BiVrs, &grid).unwrap();
        let segments = detect_changes(&series);
        assert_eq!(segments.len(), 1);
        assert_eq!(segments[0].reference_set, vec!["A"]);
    }
}
