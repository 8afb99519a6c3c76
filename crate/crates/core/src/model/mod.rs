//! Assembly and solving of the benchmarking models: non-oriented closest
//! targets, the bi-objective target/peer tradeoff under VRS and CRS, and
//! the oriented variants.

mod assemble;
mod validate;

pub use validate::validate_solution;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, Rts, ScaledData};
use crate::error::{Error, Result};
use crate::frontier::FrontierClassification;
use crate::lp::{solve_lp, LinearProgram, LpStatus, ObjSense, Sense, Variable};
use crate::metrics::{mix_deviation, weighted_l1, DistanceKind};
use crate::mip::{solve_mip, MipStatus};
use crate::scalar::{c, Scalar, CHECK_TOL};

use assemble::{assemble, VarMap};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    /// Non-oriented closest targets under VRS.
    ClosestVrs,
    /// Bi-objective closest targets / closest reference set under VRS.
    BiVrs,
    /// Output-oriented bi-objective model under VRS.
    OrientedOutputVrs,
    /// Input-oriented mirror of the output-oriented model.
    OrientedInputVrs,
    /// Bi-objective model under CRS, peers matched on mix deviation.
    BiCrs,
}

impl ModelKind {
    pub fn required_rts(self) -> Rts {
        match self {
            ModelKind::BiCrs => Rts::Constant,
            _ => Rts::Variable,
        }
    }

    pub fn peer_metric(self) -> DistanceKind {
        match self {
            ModelKind::BiCrs => DistanceKind::Mix,
            _ => DistanceKind::L1,
        }
    }

    pub fn has_peer_term(self) -> bool {
        self != ModelKind::ClosestVrs
    }

    /// Weight on the raw peer radius z0 in the scalarized objective.
    pub(crate) fn peer_coeff<S: Scalar>(self, alpha: S, m: usize, s: usize) -> S {
        let one_minus = S::one() - alpha;
        match self {
            ModelKind::ClosestVrs => S::zero(),
            ModelKind::BiVrs => one_minus,
            ModelKind::OrientedOutputVrs | ModelKind::OrientedInputVrs => {
                one_minus / c((m + s) as f64)
            }
            ModelKind::BiCrs => one_minus / c(2.0),
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            ModelKind::ClosestVrs => "closest",
            ModelKind::BiVrs => "bi-vrs",
            ModelKind::OrientedOutputVrs => "oriented-out",
            ModelKind::OrientedInputVrs => "oriented-in",
            ModelKind::BiCrs => "bi-crs",
        };
        write!(f, "{name}")
    }
}

#[derive(Debug, Clone)]
pub struct SolveOptions<S> {
    pub alpha: S,
    pub lambda_threshold: S,
    pub endpoint_refine: bool,
}

impl<S: Scalar> SolveOptions<S> {
    pub fn new(alpha: S) -> Self {
        SolveOptions {
            alpha,
            lambda_threshold: c(CHECK_TOL),
            endpoint_refine: true,
        }
    }
}

impl<S: Scalar> Default for SolveOptions<S> {
    fn default() -> Self {
        SolveOptions::new(S::one())
    }
}

/// Supporting hyperplane `-v.X + u.Y + u0 = 0` touching the technology on
/// the face containing the projection. Coefficients are reported in data
/// units; the normalization bounds hold in max-scaled space.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Hyperplane<S> {
    pub v: Vec<S>,
    pub u: Vec<S>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u0: Option<S>,
    /// Per-E-member residual gap to the hyperplane.
    pub delta: Vec<(String, S)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolveStatus {
    Optimal,
    Infeasible,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchmarkSolution<S> {
    pub dmu: String,
    pub model: ModelKind,
    pub alpha: S,
    pub targets_in: Vec<S>,
    pub targets_out: Vec<S>,
    pub input_slacks: Vec<S>,
    pub output_slacks: Vec<S>,
    /// Weight per E member, in E order.
    pub lambda: Vec<(String, S)>,
    pub reference_set: Vec<String>,
    pub hyperplane: Hyperplane<S>,
    /// Projection-distance component (already carries the model's own
    /// normalization for oriented and CRS models).
    pub d_proj: S,
    /// Peer radius: Hausdorff (or mix) distance to the reference set.
    pub d_h: S,
    pub objective: S,
    pub status: SolveStatus,
    /// True when the DMU is extreme efficient and benchmarks itself.
    pub self_benchmark: bool,
}

/// Shared state for solving many (DMU, model, alpha) combinations over
/// one dataset.
pub struct BenchContext<'a, S> {
    pub data: &'a Dataset<S>,
    pub classification: &'a FrontierClassification<S>,
    pub scaled: ScaledData<S>,
    pub e_idx: Vec<usize>,
}

impl<'a, S: Scalar> BenchContext<'a, S> {
    pub fn new(data: &'a Dataset<S>, classification: &'a FrontierClassification<S>) -> Self {
        let e_idx = classification.extreme_indices(data);
        BenchContext {
            data,
            classification,
            scaled: data.scaled(),
            e_idx,
        }
    }

    /// Peer-distance scalars from the evaluated DMU to each E member
    /// (weighted L1, or mix deviation for CRS). Computed once per DMU and
    /// reusable across the whole alpha grid.
    pub fn peer_distances(&self, dmu: usize, kind: ModelKind) -> Result<Vec<S>> {
        let origin = &self.data.dmus[dmu];
        self.e_idx
            .iter()
            .map(|j| match kind.peer_metric() {
                DistanceKind::L1 => weighted_l1(origin, &self.data.dmus[*j]),
                DistanceKind::Mix => mix_deviation(origin, &self.data.dmus[*j]),
            })
            .collect()
    }

    pub fn solve(
        &self,
        dmu_id: &str,
        kind: ModelKind,
        opts: &SolveOptions<S>,
    ) -> Result<BenchmarkSolution<S>> {
        if self.data.rts != kind.required_rts() {
            return Err(Error::RtsMismatch {
                model: kind.to_string(),
                required: kind.required_rts().to_string(),
                actual: self.data.rts.to_string(),
            });
        }
        let dmu = self
            .data
            .index_of(dmu_id)
            .ok_or_else(|| Error::UnknownDmu(dmu_id.to_string()))?;
        let dists = self.peer_distances(dmu, kind)?;
        self.solve_indexed(dmu, kind, opts, &dists)
            .map_err(|e| Error::Solve {
                dmu: dmu_id.to_string(),
                alpha: opts.alpha.to_f64().unwrap_or(f64::NAN),
                source: Box::new(e),
            })
    }

    pub(crate) fn solve_indexed(
        &self,
        dmu: usize,
        kind: ModelKind,
        opts: &SolveOptions<S>,
        dists: &[S],
    ) -> Result<BenchmarkSolution<S>> {
        if let Some(pos) = self.e_idx.iter().position(|j| *j == dmu) {
            return self.self_solution(dmu, pos, kind, opts);
        }

        let (mut prog, map, proj_coeffs) =
            assemble(kind, self.data, &self.scaled, &self.e_idx, dmu, opts.alpha, dists);
        let first = solve_mip(&prog)?;
        if first.status != MipStatus::Optimal {
            return Err(Error::NumericalBreakdown(
                "benchmark model reported infeasible; every model is feasible for valid data"
                    .into(),
            ));
        }

        let mut primal = first.primal;
        if opts.endpoint_refine && kind.has_peer_term() {
            // Second stage: among (near-)optimal solutions prefer the
            // smallest peer radius, then the smallest projection term.
            let z0 = map.z0.expect("peer-term models carry z0");
            let nvars = prog.base.variables.len();
            let budget = first.objective + c(1e-9);
            prog.base
                .push(prog.base.objective.clone(), Sense::Le, budget);
            let mut z_obj = vec![S::zero(); nvars];
            z_obj[z0] = S::one();
            prog.base.objective = z_obj;
            let second = solve_mip(&prog)?;
            if second.status == MipStatus::Optimal {
                let mut row = vec![S::zero(); nvars];
                row[z0] = S::one();
                prog.base.push(row, Sense::Le, second.objective + c(1e-9));
                prog.base.objective = proj_coeffs.clone();
                let third = solve_mip(&prog)?;
                if third.status == MipStatus::Optimal {
                    primal = third.primal;
                } else {
                    primal = second.primal;
                }
            }
        }
        if opts.endpoint_refine {
            self.polish_lambda(dmu, kind, &map, &mut primal)?;
        }

        Ok(self.decode(dmu, kind, opts, &map, &primal))
    }

    /// Final cleanup: re-minimize the projection term over the solution's
    /// own reference support (and, for oriented models, its pattern of
    /// active free-direction slacks) without the refinement budget rows.
    /// The optimum is unchanged in exact arithmetic, but the weights now
    /// come from one alpha-independent LP, so identical supports yield
    /// identical reported values across the alpha grid.
    fn polish_lambda(
        &self,
        dmu: usize,
        kind: ModelKind,
        map: &VarMap,
        primal: &mut [S],
    ) -> Result<()> {
        let m = self.data.m();
        let s = self.data.s();
        let ne = self.e_idx.len();
        let thr: S = c(CHECK_TOL);
        let support: Vec<usize> = (0..ne)
            .filter(|k| primal[map.lambda + *k] > thr)
            .collect();
        if support.is_empty() {
            return Ok(());
        }
        let allow_in: Vec<bool> = (0..m)
            .map(|i| match kind {
                ModelKind::OrientedOutputVrs => primal[map.slack_in + i] > thr,
                _ => true,
            })
            .collect();
        let allow_out: Vec<bool> = (0..s)
            .map(|r| match kind {
                ModelKind::OrientedInputVrs => primal[map.slack_out + r] > thr,
                _ => true,
            })
            .collect();

        let ns = support.len();
        let mut vars: Vec<Variable<S>> = (0..ns)
            .map(|k| Variable::nonneg(format!("lambda{k}")))
            .collect();
        for (i, ok) in allow_in.iter().enumerate() {
            let hi = if *ok { S::infinity() } else { S::zero() };
            vars.push(Variable::bounded(format!("sminus{i}"), S::zero(), hi));
        }
        for (r, ok) in allow_out.iter().enumerate() {
            let hi = if *ok { S::infinity() } else { S::zero() };
            vars.push(Variable::bounded(format!("splus{r}"), S::zero(), hi));
        }
        let total = vars.len();
        let x0 = &self.scaled.x[dmu];
        let y0 = &self.scaled.y[dmu];
        let mut obj = vec![S::zero(); total];
        let (in_w, out_w) = assemble::proj_weights::<S>(kind, m, s);
        for i in 0..m {
            obj[ns + i] = in_w / x0[i];
        }
        for r in 0..s {
            obj[ns + m + r] = out_w / y0[r];
        }
        let mut lp = LinearProgram::minimize(vars, obj);
        for i in 0..m {
            let mut row = vec![S::zero(); total];
            for (k, pos) in support.iter().enumerate() {
                row[k] = self.scaled.x[self.e_idx[*pos]][i];
            }
            row[ns + i] = S::one();
            lp.push(row, Sense::Eq, x0[i]);
        }
        for r in 0..s {
            let mut row = vec![S::zero(); total];
            for (k, pos) in support.iter().enumerate() {
                row[k] = self.scaled.y[self.e_idx[*pos]][r];
            }
            row[ns + m + r] = -S::one();
            lp.push(row, Sense::Eq, y0[r]);
        }
        if kind != ModelKind::BiCrs {
            let mut row = vec![S::zero(); total];
            for k in 0..ns {
                row[k] = S::one();
            }
            lp.push(row, Sense::Eq, S::one());
        }
        let sol = solve_lp(&lp)?;
        if sol.status != LpStatus::Optimal {
            return Ok(()); // keep the solver's weights
        }
        for k in 0..ne {
            primal[map.lambda + k] = S::zero();
        }
        for (k, pos) in support.iter().enumerate() {
            primal[map.lambda + *pos] = sol.primal[k];
        }
        for i in 0..m {
            primal[map.slack_in + i] = sol.primal[ns + i];
        }
        for r in 0..s {
            primal[map.slack_out + r] = sol.primal[ns + m + r];
        }
        Ok(())
    }

    fn decode(
        &self,
        dmu: usize,
        kind: ModelKind,
        opts: &SolveOptions<S>,
        map: &VarMap,
        primal: &[S],
    ) -> BenchmarkSolution<S> {
        let data = self.data;
        let m = data.m();
        let s = data.s();
        let record = &data.dmus[dmu];
        let ne = self.e_idx.len();

        let lambda_vals: Vec<S> = (0..ne).map(|k| primal[map.lambda + k]).collect();
        let lambda: Vec<(String, S)> = self
            .e_idx
            .iter()
            .zip(&lambda_vals)
            .map(|(j, w)| (data.dmus[*j].id.clone(), *w))
            .collect();
        let reference_set: Vec<String> = lambda
            .iter()
            .filter(|(_, w)| *w > opts.lambda_threshold)
            .map(|(id, _)| id.clone())
            .collect();

        let targets_in: Vec<S> = (0..m)
            .map(|i| {
                self.e_idx
                    .iter()
                    .zip(&lambda_vals)
                    .map(|(j, w)| *w * data.dmus[*j].inputs[i])
                    .sum()
            })
            .collect();
        let targets_out: Vec<S> = (0..s)
            .map(|r| {
                self.e_idx
                    .iter()
                    .zip(&lambda_vals)
                    .map(|(j, w)| *w * data.dmus[*j].outputs[r])
                    .sum()
            })
            .collect();
        let input_slacks: Vec<S> = record
            .inputs
            .iter()
            .zip(&targets_in)
            .map(|(x0, t)| *x0 - *t)
            .collect();
        let output_slacks: Vec<S> = targets_out
            .iter()
            .zip(&record.outputs)
            .map(|(t, y0)| *t - *y0)
            .collect();

        let hyperplane = Hyperplane {
            v: (0..m)
                .map(|i| primal[map.v + i] / self.scaled.xmax[i])
                .collect(),
            u: (0..s)
                .map(|r| primal[map.u + r] / self.scaled.ymax[r])
                .collect(),
            u0: map.u0.map(|k| primal[k]),
            delta: self
                .e_idx
                .iter()
                .enumerate()
                .map(|(k, j)| (data.dmus[*j].id.clone(), primal[map.delta + k]))
                .collect(),
        };

        let d_proj = projection_component(kind, record, &input_slacks, &output_slacks);
        let d_h = if reference_set.is_empty() {
            S::zero()
        } else {
            let peers: Vec<&crate::dataset::DmuRecord<S>> = reference_set
                .iter()
                .map(|id| data.record(id).expect("reference ids come from E"))
                .collect();
            match kind.peer_metric() {
                DistanceKind::L1 => peers
                    .iter()
                    .map(|p| weighted_l1(record, p).expect("dimensions match"))
                    .fold(S::zero(), S::max),
                DistanceKind::Mix => peers
                    .iter()
                    .map(|p| mix_deviation(record, p).expect("dimensions match"))
                    .fold(S::zero(), S::max),
            }
        };
        let objective = if kind.has_peer_term() {
            opts.alpha * d_proj + kind.peer_coeff(opts.alpha, m, s) * d_h
        } else {
            d_proj
        };

        BenchmarkSolution {
            dmu: record.id.clone(),
            model: kind,
            alpha: opts.alpha,
            targets_in,
            targets_out,
            input_slacks,
            output_slacks,
            lambda,
            reference_set,
            hyperplane,
            d_proj,
            d_h,
            objective,
            status: SolveStatus::Optimal,
            self_benchmark: false,
        }
    }

    /// Extreme efficient DMUs benchmark themselves; no MILP needed. A
    /// supporting hyperplane through the unit is still produced so the
    /// solution passes the same validity checks as solver output.
    fn self_solution(
        &self,
        dmu: usize,
        e_pos: usize,
        kind: ModelKind,
        opts: &SolveOptions<S>,
    ) -> Result<BenchmarkSolution<S>> {
        let data = self.data;
        let m = data.m();
        let s = data.s();
        let record = &data.dmus[dmu];
        let (v_scaled, u_scaled, u0) = self.supporting_hyperplane_at(e_pos, kind)?;

        let ne = self.e_idx.len();
        let delta: Vec<(String, S)> = self
            .e_idx
            .iter()
            .map(|j| {
                let mut resid = S::zero();
                for i in 0..m {
                    resid = resid - v_scaled[i] * self.scaled.x[*j][i];
                }
                for r in 0..s {
                    resid = resid + u_scaled[r] * self.scaled.y[*j][r];
                }
                if let Some(u0) = u0 {
                    resid = resid + u0;
                }
                (data.dmus[*j].id.clone(), -resid)
            })
            .collect();
        let lambda: Vec<(String, S)> = (0..ne)
            .map(|k| {
                let id = data.dmus[self.e_idx[k]].id.clone();
                (id, if k == e_pos { S::one() } else { S::zero() })
            })
            .collect();

        Ok(BenchmarkSolution {
            dmu: record.id.clone(),
            model: kind,
            alpha: opts.alpha,
            targets_in: record.inputs.clone(),
            targets_out: record.outputs.clone(),
            input_slacks: vec![S::zero(); m],
            output_slacks: vec![S::zero(); s],
            lambda,
            reference_set: vec![record.id.clone()],
            hyperplane: Hyperplane {
                v: (0..m).map(|i| v_scaled[i] / self.scaled.xmax[i]).collect(),
                u: (0..s).map(|r| u_scaled[r] / self.scaled.ymax[r]).collect(),
                u0,
                delta,
            },
            d_proj: S::zero(),
            d_h: S::zero(),
            objective: S::zero(),
            status: SolveStatus::Optimal,
            self_benchmark: true,
        })
    }

    /// Find admissible hyperplane coefficients (in scaled space) that
    /// support the technology exactly at the given E member.
    fn supporting_hyperplane_at(
        &self,
        e_pos: usize,
        kind: ModelKind,
    ) -> Result<(Vec<S>, Vec<S>, Option<S>)> {
        let m = self.data.m();
        let s = self.data.s();
        let ne = self.e_idx.len();
        let v_lower = if kind == ModelKind::OrientedOutputVrs {
            S::zero()
        } else {
            S::one()
        };
        let u_lower = if kind == ModelKind::OrientedInputVrs {
            S::zero()
        } else {
            S::one()
        };
        let has_u0 = kind != ModelKind::BiCrs;

        let mut vars: Vec<Variable<S>> = Vec::new();
        for i in 0..m {
            vars.push(Variable::bounded(format!("v{i}"), v_lower, S::infinity()));
        }
        for r in 0..s {
            vars.push(Variable::bounded(format!("u{r}"), u_lower, S::infinity()));
        }
        if has_u0 {
            vars.push(Variable::free("u0"));
        }
        let delta_start = vars.len();
        for k in 0..ne {
            if k == e_pos {
                vars.push(Variable::bounded(format!("delta{k}"), S::zero(), S::zero()));
            } else {
                vars.push(Variable::nonneg(format!("delta{k}")));
            }
        }
        let nvars = vars.len();
        let mut obj = vec![S::zero(); nvars];
        for k in 0..ne {
            obj[delta_start + k] = S::one();
        }
        let mut lp = LinearProgram {
            variables: vars,
            constraints: Vec::new(),
            obj_sense: ObjSense::Min,
            objective: obj,
        };
        for (k, j) in self.e_idx.iter().enumerate() {
            let mut row = vec![S::zero(); nvars];
            for i in 0..m {
                row[i] = -self.scaled.x[*j][i];
            }
            for r in 0..s {
                row[m + r] = self.scaled.y[*j][r];
            }
            if has_u0 {
                row[m + s] = S::one();
            }
            row[delta_start + k] = S::one();
            lp.push(row, Sense::Eq, S::zero());
        }
        let sol = solve_lp(&lp)?;
        if sol.status != LpStatus::Optimal {
            return Err(Error::NumericalBreakdown(
                "no supporting hyperplane at an extreme efficient DMU".into(),
            ));
        }
        Ok((
            sol.primal[..m].to_vec(),
            sol.primal[m..m + s].to_vec(),
            has_u0.then(|| sol.primal[m + s]),
        ))
    }
}

/// The model's projection-distance component, in data units.
fn projection_component<S: Scalar>(
    kind: ModelKind,
    record: &crate::dataset::DmuRecord<S>,
    input_slacks: &[S],
    output_slacks: &[S],
) -> S {
    let m = record.inputs.len();
    let s = record.outputs.len();
    let in_term = input_slacks
        .iter()
        .zip(&record.inputs)
        .map(|(sl, x0)| *sl / *x0)
        .sum::<S>();
    let out_term = output_slacks
        .iter()
        .zip(&record.outputs)
        .map(|(sl, y0)| *sl / *y0)
        .sum::<S>();
    match kind {
        ModelKind::ClosestVrs | ModelKind::BiVrs => in_term + out_term,
        ModelKind::OrientedOutputVrs => out_term / c(s as f64),
        ModelKind::OrientedInputVrs => in_term / c(m as f64),
        ModelKind::BiCrs => (in_term + out_term) / c((m + s) as f64),
    }
}

// Spec-named entry points.

pub fn solve_closest<S: Scalar>(
    data: &Dataset<S>,
    cls: &FrontierClassification<S>,
    dmu_id: &str,
) -> Result<BenchmarkSolution<S>> {
    BenchContext::new(data, cls).solve(dmu_id, ModelKind::ClosestVrs, &SolveOptions::default())
}

pub fn solve_bi_vrs<S: Scalar>(
    data: &Dataset<S>,
    cls: &FrontierClassification<S>,
    dmu_id: &str,
    opts: &SolveOptions<S>,
) -> Result<BenchmarkSolution<S>> {
    BenchContext::new(data, cls).solve(dmu_id, ModelKind::BiVrs, opts)
}

pub fn solve_oriented_output<S: Scalar>(
    data: &Dataset<S>,
    cls: &FrontierClassification<S>,
    dmu_id: &str,
    opts: &SolveOptions<S>,
) -> Result<BenchmarkSolution<S>> {
    BenchContext::new(data, cls).solve(dmu_id, ModelKind::OrientedOutputVrs, opts)
}

pub fn solve_oriented_input<S: Scalar>(
    data: &Dataset<S>,
    cls: &FrontierClassification<S>,
    dmu_id: &str,
    opts: &SolveOptions<S>,
) -> Result<BenchmarkSolution<S>> {
    BenchContext::new(data, cls).solve(dmu_id, ModelKind::OrientedInputVrs, opts)
}

pub fn solve_bi_crs<S: Scalar>(
    data: &Dataset<S>,
    cls: &FrontierClassification<S>,
    dmu_id: &str,
    opts: &SolveOptions<S>,
) -> Result<BenchmarkSolution<S>> {
    BenchContext::new(data, cls).solve(dmu_id, ModelKind::BiCrs, opts)
}
