//! Brute-force oracle: enumerate every candidate reference subset (and,
//! for oriented models, every pattern of hyperplane-ignored variables),
//! solve plain LPs for each, and take the best scalarized total. Shares
//! no model-assembly code with the engine.

use dea_bench::dataset::{Dataset, Rts};
use dea_bench::frontier::FrontierClassification;
use dea_bench::lp::{solve_lp, LinearProgram, LpStatus, Sense, Variable};
use dea_bench::metrics::{mix_deviation, weighted_l1};
use dea_bench::model::ModelKind;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn peer_coeff(kind: ModelKind, alpha: f64, m: usize, s: usize) -> f64 {
    match kind {
        ModelKind::ClosestVrs => 0.0,
        ModelKind::BiVrs => 1.0 - alpha,
        ModelKind::OrientedOutputVrs | ModelKind::OrientedInputVrs => {
            (1.0 - alpha) / (m + s) as f64
        }
        ModelKind::BiCrs => (1.0 - alpha) / 2.0,
    }
}

/// Is there an admissible hyperplane touching exactly the members of
/// `sset` (positions into `e_idx`), with the coefficients of `zero_pat`
/// (inputs for the output-oriented model, outputs for the input-oriented
/// one) forced to zero?
fn hyperplane_feasible(
    kind: ModelKind,
    x: &[Vec<f64>],
    y: &[Vec<f64>],
    e_idx: &[usize],
    sset: &[usize],
    zero_pat: &[usize],
) -> bool {
    let m = x[0].len();
    let s = y[0].len();
    let ne = e_idx.len();
    let v_lower = if kind == ModelKind::OrientedOutputVrs { 0.0 } else { 1.0 };
    let u_lower = if kind == ModelKind::OrientedInputVrs { 0.0 } else { 1.0 };
    let has_u0 = kind != ModelKind::BiCrs;

    let mut vars: Vec<Variable<f64>> = Vec::new();
    for i in 0..m {
        let forced = kind == ModelKind::OrientedOutputVrs && zero_pat.contains(&i);
        let lo = if forced { 0.0 } else { v_lower };
        let hi = if forced { 0.0 } else { f64::INFINITY };
        vars.push(Variable::bounded(format!("v{i}"), lo, hi));
    }
    for r in 0..s {
        let forced = kind == ModelKind::OrientedInputVrs && zero_pat.contains(&r);
        let lo = if forced { 0.0 } else { u_lower };
        let hi = if forced { 0.0 } else { f64::INFINITY };
        vars.push(Variable::bounded(format!("u{r}"), lo, hi));
    }
    if has_u0 {
        vars.push(Variable::free("u0"));
    }
    let delta_start = vars.len();
    for k in 0..ne {
        if sset.contains(&k) {
            vars.push(Variable::bounded(format!("d{k}"), 0.0, 0.0));
        } else {
            vars.push(Variable::nonneg(format!("d{k}")));
        }
    }
    let total = vars.len();
    let mut lp = LinearProgram::minimize(vars, vec![0.0; total]);
    for (k, j) in e_idx.iter().enumerate() {
        let mut row = vec![0.0; total];
        for i in 0..m {
            row[i] = -x[*j][i];
        }
        for r in 0..s {
            row[m + r] = y[*j][r];
        }
        if has_u0 {
            row[m + s] = 1.0;
        }
        row[delta_start + k] = 1.0;
        lp.push(row, Sense::Eq, 0.0);
    }
    matches!(solve_lp(&lp), Ok(sol) if sol.status == LpStatus::Optimal)
}

/// Best (model-normalized) projection distance for the DMU using only
/// the peers in `sset`, improvement directions limited by the model and
/// the zero pattern. `None` when that combination cannot reach the DMU.
fn projection_optimum(
    kind: ModelKind,
    x: &[Vec<f64>],
    y: &[Vec<f64>],
    rts: Rts,
    e_idx: &[usize],
    sset: &[usize],
    zero_pat: &[usize],
    x0: &[f64],
    y0: &[f64],
) -> Option<f64> {
    let m = x0.len();
    let s = y0.len();
    let ns = sset.len();

    let mut vars: Vec<Variable<f64>> = (0..ns)
        .map(|k| Variable::nonneg(format!("l{k}")))
        .collect();
    for i in 0..m {
        let allowed = match kind {
            ModelKind::OrientedOutputVrs => zero_pat.contains(&i),
            _ => true,
        };
        let hi = if allowed { f64::INFINITY } else { 0.0 };
        vars.push(Variable::bounded(format!("si{i}"), 0.0, hi));
    }
    for r in 0..s {
        let allowed = match kind {
            ModelKind::OrientedInputVrs => zero_pat.contains(&r),
            _ => true,
        };
        let hi = if allowed { f64::INFINITY } else { 0.0 };
        vars.push(Variable::bounded(format!("so{r}"), 0.0, hi));
    }
    let total = vars.len();
    let mut obj = vec![0.0; total];
    let (in_w, out_w): (f64, f64) = match kind {
        ModelKind::ClosestVrs | ModelKind::BiVrs => (1.0, 1.0),
        ModelKind::OrientedOutputVrs => (0.0, 1.0 / s as f64),
        ModelKind::OrientedInputVrs => (1.0 / m as f64, 0.0),
        ModelKind::BiCrs => (1.0 / (m + s) as f64, 1.0 / (m + s) as f64),
    };
    for i in 0..m {
        obj[ns + i] = in_w / x0[i];
    }
    for r in 0..s {
        obj[ns + m + r] = out_w / y0[r];
    }
    let mut lp = LinearProgram::minimize(vars, obj);
    for i in 0..m {
        let mut row = vec![0.0; total];
        for (k, pos) in sset.iter().enumerate() {
            row[k] = x[e_idx[*pos]][i];
        }
        row[ns + i] = 1.0;
        lp.push(row, Sense::Eq, x0[i]);
    }
    for r in 0..s {
        let mut row = vec![0.0; total];
        for (k, pos) in sset.iter().enumerate() {
            row[k] = y[e_idx[*pos]][r];
        }
        row[ns + m + r] = -1.0;
        lp.push(row, Sense::Eq, y0[r]);
    }
    if rts == Rts::Variable {
        let mut row = vec![0.0; total];
        for k in 0..ns {
            row[k] = 1.0;
        }
        lp.push(row, Sense::Eq, 1.0);
    }
    match solve_lp(&lp) {
        Ok(sol) if sol.status == LpStatus::Optimal => Some(sol.objective),
        _ => None,
    }
}

fn subsets(n: usize) -> Vec<Vec<usize>> {
    (0..(1u32 << n))
        .map(|mask| (0..n).filter(|i| mask & (1 << i) != 0).collect())
        .collect()
}

/// Oracle optimum of the scalarized objective for each alpha, by full
/// enumeration of reference subsets and zero patterns.
pub fn oracle_totals(
    data: &Dataset<f64>,
    cls: &FrontierClassification<f64>,
    dmu_id: &str,
    kind: ModelKind,
    alphas: &[f64],
) -> Vec<f64> {
    let scaled = data.scaled();
    let e_idx = cls.extreme_indices(data);
    let ne = e_idx.len();
    let m = data.m();
    let s = data.s();
    let dmu = data.index_of(dmu_id).expect("known DMU");
    let origin = &data.dmus[dmu];
    let dists: Vec<f64> = e_idx
        .iter()
        .map(|j| match kind {
            ModelKind::BiCrs => mix_deviation(origin, &data.dmus[*j]).unwrap(),
            _ => weighted_l1(origin, &data.dmus[*j]).unwrap(),
        })
        .collect();
    let zero_pats: Vec<Vec<usize>> = match kind {
        ModelKind::OrientedOutputVrs => subsets(m),
        ModelKind::OrientedInputVrs => subsets(s),
        _ => vec![Vec::new()],
    };

    let mut best = vec![f64::INFINITY; alphas.len()];
    for smask in 1u32..(1 << ne) {
        let sset: Vec<usize> = (0..ne).filter(|k| smask & (1 << k) != 0).collect();
        let h = sset.iter().map(|k| dists[*k]).fold(0.0f64, f64::max);
        for pat in &zero_pats {
            if !hyperplane_feasible(kind, &scaled.x, &scaled.y, &e_idx, &sset, pat) {
                continue;
            }
            let Some(p) = projection_optimum(
                kind,
                &scaled.x,
                &scaled.y,
                data.rts,
                &e_idx,
                &sset,
                pat,
                &scaled.x[dmu],
                &scaled.y[dmu],
            ) else {
                continue;
            };
            for (t, alpha) in alphas.iter().enumerate() {
                let total = if kind == ModelKind::ClosestVrs {
                    p
                } else {
                    alpha * p + peer_coeff(kind, *alpha, m, s) * h
                };
                if total < best[t] {
                    best[t] = total;
                }
            }
        }
    }
    best
}

/// Deterministic random instance: n DMUs, m inputs, s outputs, values
/// uniform in [1, 10].
pub fn random_dataset(seed: u64, n: usize, m: usize, s: usize, rts: Rts) -> Dataset<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut csv = String::from("id");
    for i in 0..m {
        csv.push_str(&format!(",in:x{i}"));
    }
    for r in 0..s {
        csv.push_str(&format!(",out:y{r}"));
    }
    csv.push('\n');
    for j in 0..n {
        csv.push_str(&format!("D{j}"));
        for _ in 0..(m + s) {
            let v: f64 = rng.gen_range(1.0..=10.0);
            csv.push_str(&format!(",{v}"));
        }
        csv.push('\n');
    }
    dea_bench::dataset::load_csv_str(&csv, None, rts).expect("generated data is valid")
}
