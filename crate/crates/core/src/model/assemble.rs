//! Construction of the mixed-integer programs, in max-scaled space.
//!
//! Variable layout (contiguous blocks, in order): lambda over E, input
//! slacks, output slacks, hyperplane input weights v, output weights u,
//! the VRS intercept u0, per-E-member gaps delta, the binary selectors I,
//! and the peer radius z0. Selector and radius blocks are absent for the
//! pure closest-targets model.

use super::ModelKind;
use crate::dataset::{Dataset, ScaledData};
use crate::lp::{LinearProgram, ObjSense, Sense, Variable};
use crate::mip::{MixedProgram, Sos1Pair};
use crate::scalar::Scalar;

#[derive(Debug, Clone)]
pub(crate) struct VarMap {
    pub lambda: usize,
    pub slack_in: usize,
    pub slack_out: usize,
    pub v: usize,
    pub u: usize,
    pub u0: Option<usize>,
    pub delta: usize,
    pub z0: Option<usize>,
}

/// Build the model for one evaluated DMU. `dists` holds the peer
/// distances from the DMU to each E member (unused for the closest
/// model). Returns the program, the variable layout, and the coefficient
/// vector of the projection-distance term (used for endpoint refinement).
pub(crate) fn assemble<S: Scalar>(
    kind: ModelKind,
    data: &Dataset<S>,
    scaled: &ScaledData<S>,
    e_idx: &[usize],
    dmu: usize,
    alpha: S,
    dists: &[S],
) -> (MixedProgram<S>, VarMap, Vec<S>) {
    let m = data.m();
    let s = data.s();
    let ne = e_idx.len();
    let x0 = &scaled.x[dmu];
    let y0 = &scaled.y[dmu];

    let has_binaries = kind.has_peer_term();
    let has_u0 = kind != ModelKind::BiCrs;
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

    let mut vars: Vec<Variable<S>> = Vec::new();
    let lambda = vars.len();
    for k in 0..ne {
        vars.push(Variable::nonneg(format!("lambda{k}")));
    }
    let slack_in = vars.len();
    for i in 0..m {
        vars.push(Variable::nonneg(format!("sminus{i}")));
    }
    let slack_out = vars.len();
    for r in 0..s {
        vars.push(Variable::nonneg(format!("splus{r}")));
    }
    let v = vars.len();
    for i in 0..m {
        vars.push(Variable::bounded(format!("v{i}"), v_lower, S::infinity()));
    }
    let u = vars.len();
    for r in 0..s {
        vars.push(Variable::bounded(format!("u{r}"), u_lower, S::infinity()));
    }
    let u0 = if has_u0 {
        vars.push(Variable::free("u0"));
        Some(vars.len() - 1)
    } else {
        None
    };
    let delta = vars.len();
    for k in 0..ne {
        vars.push(Variable::nonneg(format!("delta{k}")));
    }
    let ind = if has_binaries {
        let start = vars.len();
        for k in 0..ne {
            vars.push(Variable::bounded(format!("ind{k}"), S::zero(), S::one()));
        }
        Some(start)
    } else {
        None
    };
    let z0 = if has_binaries {
        vars.push(Variable::nonneg("z0"));
        Some(vars.len() - 1)
    } else {
        None
    };
    let total = vars.len();
    let map = VarMap {
        lambda,
        slack_in,
        slack_out,
        v,
        u,
        u0,
        delta,
        z0,
    };

    // Projection term: the model-normalized sum of slack ratios. Slack
    // ratios are scale invariant, so scaled slacks over scaled data give
    // the same value as raw ones.
    let mut proj = vec![S::zero(); total];
    let (in_w, out_w) = proj_weights::<S>(kind, m, s);
    for i in 0..m {
        proj[slack_in + i] = in_w / x0[i];
    }
    for r in 0..s {
        proj[slack_out + r] = out_w / y0[r];
    }

    let mut objective = vec![S::zero(); total];
    if has_binaries {
        for (k, p) in proj.iter().enumerate() {
            objective[k] = alpha * *p;
        }
        objective[z0.unwrap()] = kind.peer_coeff(alpha, m, s);
    } else {
        objective = proj.clone();
    }

    let mut lp = LinearProgram {
        variables: vars,
        constraints: Vec::new(),
        obj_sense: ObjSense::Min,
        objective,
    };

    // Envelopment rows: lambda-combination plus/minus slack hits the DMU.
    for i in 0..m {
        let mut row = vec![S::zero(); total];
        for (k, j) in e_idx.iter().enumerate() {
            row[lambda + k] = scaled.x[*j][i];
        }
        row[slack_in + i] = S::one();
        lp.push(row, Sense::Eq, x0[i]);
    }
    for r in 0..s {
        let mut row = vec![S::zero(); total];
        for (k, j) in e_idx.iter().enumerate() {
            row[lambda + k] = scaled.y[*j][r];
        }
        row[slack_out + r] = -S::one();
        lp.push(row, Sense::Eq, y0[r]);
    }
    if has_u0 {
        let mut row = vec![S::zero(); total];
        for k in 0..ne {
            row[lambda + k] = S::one();
        }
        lp.push(row, Sense::Eq, S::one());
    }

    // Multiplier rows: every E member sits on or below the hyperplane,
    // with delta its gap.
    for (k, j) in e_idx.iter().enumerate() {
        let mut row = vec![S::zero(); total];
        for i in 0..m {
            row[v + i] = -scaled.x[*j][i];
        }
        for r in 0..s {
            row[u + r] = scaled.y[*j][r];
        }
        if let Some(u0) = u0 {
            row[u0] = S::one();
        }
        row[delta + k] = S::one();
        lp.push(row, Sense::Eq, S::zero());
    }

    // Peer-selection linking rows.
    if let (Some(ind), Some(z0)) = (ind, z0) {
        if kind != ModelKind::BiCrs {
            // lambda_k <= I_k; under CRS lambda is unbounded, so the link
            // is the complemented SOS pair instead.
            for k in 0..ne {
                let mut row = vec![S::zero(); total];
                row[lambda + k] = S::one();
                row[ind + k] = -S::one();
                lp.push(row, Sense::Le, S::zero());
            }
        }
        for k in 0..ne {
            let mut row = vec![S::zero(); total];
            row[ind + k] = dists[k];
            row[z0] = -S::one();
            lp.push(row, Sense::Le, S::zero());
        }
    }

    let mut sos1: Vec<Sos1Pair> = (0..ne)
        .map(|k| Sos1Pair::plain(lambda + k, delta + k))
        .collect();
    match kind {
        ModelKind::OrientedOutputVrs => {
            // Input slacks are free room t_i; they may be positive only
            // where the hyperplane ignores the input.
            for i in 0..m {
                sos1.push(Sos1Pair::plain(slack_in + i, v + i));
            }
        }
        ModelKind::OrientedInputVrs => {
            for r in 0..s {
                sos1.push(Sos1Pair::plain(slack_out + r, u + r));
            }
        }
        ModelKind::BiCrs => {
            let ind = ind.unwrap();
            for k in 0..ne {
                sos1.push(Sos1Pair::complemented(lambda + k, ind + k));
            }
        }
        _ => {}
    }

    let binaries = match ind {
        Some(start) => (start..start + ne).collect(),
        None => Vec::new(),
    };

    (
        MixedProgram {
            base: lp,
            binaries,
            sos1,
        },
        map,
        proj,
    )
}

/// Per-slack weights of the projection term, before dividing by the
/// DMU's own levels.
pub(crate) fn proj_weights<S: Scalar>(kind: ModelKind, m: usize, s: usize) -> (S, S) {
    use crate::scalar::c;
    match kind {
        ModelKind::ClosestVrs | ModelKind::BiVrs => (S::one(), S::one()),
        ModelKind::OrientedOutputVrs => (S::zero(), S::one() / c(s as f64)),
        ModelKind::OrientedInputVrs => (S::one() / c(m as f64), S::zero()),
        ModelKind::BiCrs => {
            let w = S::one() / c((m + s) as f64);
            (w, w)
        }
    }
}
