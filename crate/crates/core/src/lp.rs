//! Dense two-phase simplex for the LP relaxations and feasibility
//! subproblems. Problem sizes here are dozens of variables, so a full
//! tableau is the right tool; no sparsity machinery.

use crate::error::{Error, Result};
use crate::scalar::{c, Scalar, FEAS_TOL, PIVOT_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObjSense {
    Min,
    Max,
}

#[derive(Debug, Clone)]
pub struct Variable<S> {
    pub name: String,
    pub lower: S,
    pub upper: S,
}

impl<S: Scalar> Variable<S> {
    pub fn nonneg(name: impl Into<String>) -> Self {
        Variable {
            name: name.into(),
            lower: S::zero(),
            upper: S::infinity(),
        }
    }

    pub fn free(name: impl Into<String>) -> Self {
        Variable {
            name: name.into(),
            lower: S::neg_infinity(),
            upper: S::infinity(),
        }
    }

    pub fn bounded(name: impl Into<String>, lower: S, upper: S) -> Self {
        Variable {
            name: name.into(),
            lower,
            upper,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Constraint<S> {
    pub coeffs: Vec<S>,
    pub sense: Sense,
    pub rhs: S,
}

#[derive(Debug, Clone)]
pub struct LinearProgram<S> {
    pub variables: Vec<Variable<S>>,
    pub constraints: Vec<Constraint<S>>,
    pub obj_sense: ObjSense,
    pub objective: Vec<S>,
}

impl<S: Scalar> LinearProgram<S> {
    pub fn minimize(variables: Vec<Variable<S>>, objective: Vec<S>) -> Self {
        LinearProgram {
            variables,
            constraints: Vec::new(),
            obj_sense: ObjSense::Min,
            objective,
        }
    }

    pub fn push(&mut self, coeffs: Vec<S>, sense: Sense, rhs: S) {
        self.constraints.push(Constraint { coeffs, sense, rhs });
    }

    pub fn well_formed(&self) -> Result<()> {
        let n = self.variables.len();
        if self.objective.len() != n {
            return Err(Error::Program(format!(
                "objective has {} coefficients for {} variables",
                self.objective.len(),
                n
            )));
        }
        for (i, con) in self.constraints.iter().enumerate() {
            if con.coeffs.len() != n {
                return Err(Error::Program(format!(
                    "constraint {i} has {} coefficients for {n} variables",
                    con.coeffs.len()
                )));
            }
        }
        for v in &self.variables {
            if v.lower > v.upper {
                return Err(Error::Program(format!(
                    "variable {:?} has lower {} > upper {}",
                    v.name, v.lower, v.upper
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone)]
pub struct LpSolution<S> {
    pub status: LpStatus,
    /// Values per original variable (empty unless optimal).
    pub primal: Vec<S>,
    /// Multiplier per original constraint (empty unless optimal).
    pub duals: Vec<S>,
    pub objective: S,
    pub dual_objective: S,
    /// Names of the basic columns in the final standard-form tableau.
    pub basis: Vec<String>,
}

impl<S: Scalar> LpSolution<S> {
    fn status_only(status: LpStatus) -> Self {
        LpSolution {
            status,
            primal: Vec::new(),
            duals: Vec::new(),
            objective: S::nan(),
            dual_objective: S::nan(),
            basis: Vec::new(),
        }
    }
}

/// How each original variable maps onto standard-form columns.
#[derive(Debug, Clone)]
enum ColMap<S> {
    Fixed(S),
    Shift { col: usize, off: S },
    Neg { col: usize, off: S },
    Split { pos: usize, neg: usize },
}

pub fn solve_lp<S: Scalar>(lp: &LinearProgram<S>) -> Result<LpSolution<S>> {
    lp.well_formed()?;

    let n = lp.variables.len();
    let cmin: Vec<S> = match lp.obj_sense {
        ObjSense::Min => lp.objective.clone(),
        ObjSense::Max => lp.objective.iter().map(|v| -*v).collect(),
    };

    // Column transform: shift finite lower bounds to zero, negate
    // upper-bounded-only variables, split free variables.
    let mut colmap: Vec<ColMap<S>> = Vec::with_capacity(n);
    let mut ct: Vec<S> = Vec::new();
    let mut names: Vec<String> = Vec::new();
    let mut const_shift = S::zero();
    let mut bound_rows: Vec<(usize, S)> = Vec::new(); // x'_col <= bound
    for (j, v) in lp.variables.iter().enumerate() {
        let lb_fin = v.lower.is_finite();
        let ub_fin = v.upper.is_finite();
        if lb_fin && ub_fin && v.upper - v.lower <= c(1e-12) {
            const_shift = const_shift + cmin[j] * v.lower;
            colmap.push(ColMap::Fixed(v.lower));
        } else if lb_fin {
            let col = ct.len();
            ct.push(cmin[j]);
            names.push(v.name.clone());
            const_shift = const_shift + cmin[j] * v.lower;
            if ub_fin {
                bound_rows.push((col, v.upper - v.lower));
            }
            colmap.push(ColMap::Shift { col, off: v.lower });
        } else if ub_fin {
            let col = ct.len();
            ct.push(-cmin[j]);
            names.push(format!("{}~", v.name));
            const_shift = const_shift + cmin[j] * v.upper;
            colmap.push(ColMap::Neg { col, off: v.upper });
        } else {
            let pos = ct.len();
            ct.push(cmin[j]);
            names.push(format!("{}+", v.name));
            let neg = ct.len();
            ct.push(-cmin[j]);
            names.push(format!("{}-", v.name));
            colmap.push(ColMap::Split { pos, neg });
        }
    }
    let nt = ct.len();

    // Rows: original constraints with substituted columns, then bound rows.
    let mut rows: Vec<(Vec<S>, Sense, S)> = Vec::new();
    for con in &lp.constraints {
        let mut coeffs = vec![S::zero(); nt];
        let mut rhs = con.rhs;
        for (j, a) in con.coeffs.iter().enumerate() {
            if a.abs() <= c(0.0) {
                continue;
            }
            match &colmap[j] {
                ColMap::Fixed(v) => rhs = rhs - *a * *v,
                ColMap::Shift { col, off } => {
                    coeffs[*col] = coeffs[*col] + *a;
                    rhs = rhs - *a * *off;
                }
                ColMap::Neg { col, off } => {
                    coeffs[*col] = coeffs[*col] - *a;
                    rhs = rhs - *a * *off;
                }
                ColMap::Split { pos, neg } => {
                    coeffs[*pos] = coeffs[*pos] + *a;
                    coeffs[*neg] = coeffs[*neg] - *a;
                }
            }
        }
        rows.push((coeffs, con.sense, rhs));
    }
    let n_orig_rows = rows.len();
    for (col, bound) in &bound_rows {
        let mut coeffs = vec![S::zero(); nt];
        coeffs[*col] = S::one();
        rows.push((coeffs, Sense::Le, *bound));
    }

    // Sign-normalize: rhs >= 0 everywhere.
    let m = rows.len();
    let mut flipped = vec![false; m];
    for (i, (coeffs, sense, rhs)) in rows.iter_mut().enumerate() {
        if *rhs < S::zero() {
            for v in coeffs.iter_mut() {
                *v = -*v;
            }
            *rhs = -*rhs;
            *sense = match *sense {
                Sense::Le => Sense::Ge,
                Sense::Eq => Sense::Eq,
                Sense::Ge => Sense::Le,
            };
            flipped[i] = true;
        }
    }

    // Standard-form tableau: structural | slack/surplus | artificial | rhs.
    let n_slack = rows
        .iter()
        .filter(|(_, sense, _)| *sense != Sense::Eq)
        .count();
    let total = nt + n_slack + m;
    let mut tab: Vec<Vec<S>> = Vec::with_capacity(m);
    let mut basis: Vec<usize> = Vec::with_capacity(m);
    let mut all_names = names;
    for i in 0..n_slack {
        all_names.push(format!("slack{i}"));
    }
    for i in 0..m {
        all_names.push(format!("art{i}"));
    }
    let mut b_t: Vec<S> = Vec::with_capacity(m);
    let mut slack_at = 0usize;
    for (i, (coeffs, sense, rhs)) in rows.iter().enumerate() {
        let mut row = vec![S::zero(); total + 1];
        row[..nt].copy_from_slice(coeffs);
        match sense {
            Sense::Le => {
                row[nt + slack_at] = S::one();
                basis.push(nt + slack_at);
                slack_at += 1;
            }
            Sense::Ge => {
                row[nt + slack_at] = -S::one();
                slack_at += 1;
                basis.push(nt + n_slack + i);
            }
            Sense::Eq => {
                basis.push(nt + n_slack + i);
            }
        }
        row[nt + n_slack + i] = S::one();
        row[total] = *rhs;
        b_t.push(*rhs);
        tab.push(row);
    }
    let art_start = nt + n_slack;

    let mut st = Simplex {
        tab,
        basis,
        obj: vec![S::zero(); total + 1],
        total,
        art_start,
        degen: 0,
        iters: 0,
        max_iters: 2000 + 200 * (m + total),
    };

    // Phase 1: minimize the sum of artificial variables.
    let mut ph1 = vec![S::zero(); total];
    for j in art_start..total {
        ph1[j] = S::one();
    }
    st.rebuild_obj(&ph1);
    match st.run(total)? {
        LoopEnd::Optimal => {}
        LoopEnd::Unbounded => {
            return Err(Error::NumericalBreakdown(
                "phase 1 reported unbounded".into(),
            ))
        }
    }
    if st.obj[total] > c(FEAS_TOL) {
        return Ok(LpSolution::status_only(LpStatus::Infeasible));
    }
    st.evict_artificials();

    // Phase 2: original costs, artificial columns locked out.
    let mut ph2 = vec![S::zero(); total];
    ph2[..nt].copy_from_slice(&ct);
    st.rebuild_obj(&ph2);
    match st.run(art_start)? {
        LoopEnd::Optimal => {}
        LoopEnd::Unbounded => return Ok(LpSolution::status_only(LpStatus::Unbounded)),
    }

    // Recover the primal point.
    let mut xt = vec![S::zero(); total];
    for (i, b) in st.basis.iter().enumerate() {
        xt[*b] = st.tab[i][total];
    }
    let primal: Vec<S> = colmap
        .iter()
        .map(|cm| match cm {
            ColMap::Fixed(v) => *v,
            ColMap::Shift { col, off } => *off + xt[*col],
            ColMap::Neg { col, off } => *off - xt[*col],
            ColMap::Split { pos, neg } => xt[*pos] - xt[*neg],
        })
        .collect();

    // Residual check against the original rows and bounds.
    for (i, con) in lp.constraints.iter().enumerate() {
        let lhs: S = con
            .coeffs
            .iter()
            .zip(&primal)
            .map(|(a, x)| *a * *x)
            .sum();
        let viol = match con.sense {
            Sense::Le => lhs - con.rhs,
            Sense::Ge => con.rhs - lhs,
            Sense::Eq => (lhs - con.rhs).abs(),
        };
        if viol > c::<S>(FEAS_TOL) * (S::one() + con.rhs.abs()) {
            return Err(Error::NumericalBreakdown(format!(
                "constraint {i} violated by {viol} at the reported optimum"
            )));
        }
    }
    for (v, x) in lp.variables.iter().zip(&primal) {
        let tol = c::<S>(FEAS_TOL) * (S::one() + x.abs());
        if *x < v.lower - tol || *x > v.upper + tol {
            return Err(Error::NumericalBreakdown(format!(
                "variable {:?} out of bounds at the reported optimum",
                v.name
            )));
        }
    }

    // Duals: reduced cost of artificial i in phase 2 equals -y_i.
    let mut y: Vec<S> = (0..m).map(|i| -st.obj[art_start + i]).collect();
    for (i, f) in flipped.iter().enumerate() {
        if *f {
            y[i] = -y[i];
        }
    }
    let dual_min = const_shift
        + (0..m)
            .map(|i| {
                let yi = if flipped[i] { -y[i] } else { y[i] };
                yi * b_t[i]
            })
            .sum::<S>();

    let objective: S = lp
        .objective
        .iter()
        .zip(&primal)
        .map(|(a, x)| *a * *x)
        .sum();
    let (dual_objective, duals) = match lp.obj_sense {
        ObjSense::Min => (dual_min, y[..n_orig_rows].to_vec()),
        ObjSense::Max => (-dual_min, y[..n_orig_rows].iter().map(|v| -*v).collect()),
    };

    Ok(LpSolution {
        status: LpStatus::Optimal,
        primal,
        duals,
        objective,
        dual_objective,
        basis: st.basis.iter().map(|b| all_names[*b].clone()).collect(),
    })
}

enum LoopEnd {
    Optimal,
    Unbounded,
}

struct Simplex<S> {
    tab: Vec<Vec<S>>,
    basis: Vec<usize>,
    /// Reduced-cost row; last entry is the current objective value.
    obj: Vec<S>,
    total: usize,
    art_start: usize,
    degen: usize,
    iters: usize,
    max_iters: usize,
}

impl<S: Scalar> Simplex<S> {
    fn rebuild_obj(&mut self, costs: &[S]) {
        let total = self.total;
        let mut obj = vec![S::zero(); total + 1];
        obj[..total].copy_from_slice(costs);
        let mut z = S::zero();
        for (i, b) in self.basis.iter().enumerate() {
            let cb = costs[*b];
            if cb.abs() > c(0.0) {
                for j in 0..total {
                    obj[j] = obj[j] - cb * self.tab[i][j];
                }
                z = z + cb * self.tab[i][total];
            }
        }
        obj[total] = z;
        self.obj = obj;
        self.degen = 0;
    }

    /// Run pivots until optimal or unbounded; columns `>= col_limit` may
    /// not enter the basis.
    fn run(&mut self, col_limit: usize) -> Result<LoopEnd> {
        let m = self.tab.len();
        let bland_after = 2 * (m + self.total);
        loop {
            self.iters += 1;
            if self.iters > self.max_iters {
                return Err(Error::NumericalBreakdown(
                    "simplex iteration limit exceeded".into(),
                ));
            }
            let bland = self.degen > bland_after;
            let mut enter: Option<usize> = None;
            let mut best = -c::<S>(PIVOT_TOL);
            for j in 0..col_limit {
                let d = self.obj[j];
                if d < best {
                    enter = Some(j);
                    if bland {
                        break;
                    }
                    best = d;
                }
            }
            let Some(enter) = enter else {
                return Ok(LoopEnd::Optimal);
            };

            let mut leave: Option<usize> = None;
            let mut best_ratio = S::infinity();
            for i in 0..m {
                let a = self.tab[i][enter];
                if a > c(PIVOT_TOL) {
                    let ratio = self.tab[i][self.total] / a;
                    let better = match leave {
                        None => true,
                        Some(cur) => {
                            ratio < best_ratio - c(1e-12)
                                || (ratio < best_ratio + c(1e-12)
                                    && self.basis[i] < self.basis[cur])
                        }
                    };
                    if better {
                        leave = Some(i);
                        best_ratio = ratio;
                    }
                }
            }
            let Some(leave) = leave else {
                return Ok(LoopEnd::Unbounded);
            };
            if best_ratio <= c(1e-12) {
                self.degen += 1;
            } else {
                self.degen = 0;
            }
            self.pivot(enter, leave);
        }
    }

    fn pivot(&mut self, enter: usize, leave: usize) {
        let total = self.total;
        let piv = self.tab[leave][enter];
        for v in self.tab[leave].iter_mut() {
            *v = *v / piv;
        }
        for i in 0..self.tab.len() {
            if i == leave {
                continue;
            }
            let factor = self.tab[i][enter];
            if factor.abs() > c(0.0) {
                for j in 0..=total {
                    let upd = self.tab[leave][j];
                    self.tab[i][j] = self.tab[i][j] - factor * upd;
                }
            }
        }
        let factor = self.obj[enter];
        if factor.abs() > c(0.0) {
            for j in 0..total {
                self.obj[j] = self.obj[j] - factor * self.tab[leave][j];
            }
            self.obj[total] = self.obj[total] + factor * self.tab[leave][total];
        }
        self.basis[leave] = enter;
    }

    /// Pivot basic artificials out wherever a structural pivot exists;
    /// remaining ones sit on redundant rows at value zero.
    fn evict_artificials(&mut self) {
        for i in 0..self.tab.len() {
            if self.basis[i] < self.art_start {
                continue;
            }
            let enter = (0..self.art_start).find(|j| self.tab[i][*j].abs() > c(FEAS_TOL));
            if let Some(enter) = enter {
                self.pivot(enter, i);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp1() -> LinearProgram<f64> {
        // min x s.t. x >= 3
        let mut lp = LinearProgram::minimize(vec![Variable::nonneg("x")], vec![1.0]);
        lp.push(vec![1.0], Sense::Ge, 3.0);
        lp
    }

    #[test]
    fn simple_bound() {
        let sol = solve_lp(&lp1()).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.primal[0] - 3.0).abs() < 1e-9);
        assert!((sol.objective - 3.0).abs() < 1e-9);
    }

    #[test]
    fn infeasible_box() {
        let mut lp = lp1();
        lp.push(vec![1.0], Sense::Le, 2.0);
        let sol = solve_lp(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Infeasible);
    }

    #[test]
    fn two_variable_vertex() {
        // min -x - y s.t. x + 2y <= 4, 3x + y <= 6  ->  (1.6, 1.2), value -2.8
        let mut lp: LinearProgram<f64> = LinearProgram::minimize(
            vec![Variable::nonneg("x"), Variable::nonneg("y")],
            vec![-1.0, -1.0],
        );
        lp.push(vec![1.0, 2.0], Sense::Le, 4.0);
        lp.push(vec![3.0, 1.0], Sense::Le, 6.0);
        let sol = solve_lp(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.primal[0] - 1.6).abs() < 1e-9);
        assert!((sol.primal[1] - 1.2).abs() < 1e-9);
        assert!((sol.objective + 2.8).abs() < 1e-9);
        assert!((sol.objective - sol.dual_objective).abs() <= 1e-7 * (1.0 + sol.objective.abs()));
    }

    #[test]
    fn free_variable_and_max_sense() {
        // max u0 s.t. u0 <= 5, u0 + x = 7, x >= 0
        let mut lp: LinearProgram<f64> = LinearProgram {
            variables: vec![Variable::free("u0"), Variable::nonneg("x")],
            constraints: Vec::new(),
            obj_sense: ObjSense::Max,
            objective: vec![1.0, 0.0],
        };
        lp.push(vec![1.0, 0.0], Sense::Le, 5.0);
        lp.push(vec![1.0, 1.0], Sense::Eq, 7.0);
        let sol = solve_lp(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.primal[0] - 5.0).abs() < 1e-9);
        assert!((sol.objective - sol.dual_objective).abs() <= 1e-7 * (1.0 + sol.objective.abs()));
    }

    #[test]
    fn unbounded_detected() {
        let lp = LinearProgram::minimize(vec![Variable::nonneg("x")], vec![-1.0]);
        let sol = solve_lp(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Unbounded);
    }

    #[test]
    fn resolve_is_bitwise_identical() {
        let mut lp: LinearProgram<f64> = LinearProgram::minimize(
            vec![Variable::nonneg("x"), Variable::nonneg("y"), Variable::free("z")],
            vec![1.0, 2.5, 0.25],
        );
        lp.push(vec![1.0, 1.0, 1.0], Sense::Ge, 3.0);
        lp.push(vec![2.0, -1.0, 0.0], Sense::Le, 4.0);
        lp.push(vec![0.0, 1.0, -1.0], Sense::Eq, 1.0);
        let a = solve_lp(&lp).unwrap();
        let b = solve_lp(&lp).unwrap();
        assert_eq!(a.status, b.status);
        assert_eq!(a.objective.to_bits(), b.objective.to_bits());
        assert_eq!(a.primal, b.primal);
    }

    mod random {
        use super::*;
        use proptest::prelude::*;

        // Feasible-by-construction boxes: random rows, rhs padded so that a
        // random interior point satisfies everything.
        fn arb_lp() -> impl Strategy<Value = LinearProgram<f64>> {
            (2usize..5, 1usize..5).prop_flat_map(|(nv, nc)| {
                (
                    proptest::collection::vec(-5.0f64..5.0, nv),
                    proptest::collection::vec(proptest::collection::vec(-3.0f64..3.0, nv), nc),
                    proptest::collection::vec(0.5f64..4.0, nv),
                    proptest::collection::vec(0.1f64..2.0, nc),
                )
                    .prop_map(move |(obj, rows, point, pad)| {
                        let vars = (0..nv)
                            .map(|j| Variable::bounded(format!("x{j}"), 0.0, 10.0))
                            .collect();
                        let mut lp = LinearProgram::minimize(vars, obj);
                        for (row, p) in rows.into_iter().zip(pad) {
                            let rhs: f64 =
                                row.iter().zip(&point).map(|(a, x)| a * x).sum::<f64>() + p;
                            lp.push(row, Sense::Le, rhs);
                        }
                        lp
                    })
            })
        }

        proptest! {
            #[test]
            fn strong_duality_and_feasibility(lp in arb_lp()) {
                let sol = solve_lp(&lp).unwrap();
                prop_assert_eq!(sol.status, LpStatus::Optimal);
                prop_assert!(
                    (sol.objective - sol.dual_objective).abs()
                        <= 1e-7 * (1.0 + sol.objective.abs())
                );
                for con in &lp.constraints {
                    let lhs: f64 = con.coeffs.iter().zip(&sol.primal).map(|(a, x)| a * x).sum();
                    prop_assert!(lhs <= con.rhs + 1e-7 * (1.0 + con.rhs.abs()));
                }
            }
        }
    }
}
