//! Branch-and-bound over LP relaxations with binary variables and
//! complementarity (SOS1) pairs enforced by disjunctive branching.

use crate::error::{Error, Result};
use crate::lp::{solve_lp, LinearProgram, LpStatus, ObjSense};
use crate::scalar::{c, Scalar, CHECK_TOL};

/// A complementarity pair: `first * second = 0`, or
/// `first * (1 - second) = 0` when `second_complemented` is set (the CRS
/// linking family). Enforced by branching `first = 0` versus
/// `second = 0` (or `second = 1`).
#[derive(Debug, Clone, Copy)]
pub struct Sos1Pair {
    pub first: usize,
    pub second: usize,
    pub second_complemented: bool,
}

impl Sos1Pair {
    pub fn plain(first: usize, second: usize) -> Self {
        Sos1Pair {
            first,
            second,
            second_complemented: false,
        }
    }

    pub fn complemented(first: usize, second: usize) -> Self {
        Sos1Pair {
            first,
            second,
            second_complemented: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct MixedProgram<S> {
    pub base: LinearProgram<S>,
    /// Indices of variables restricted to {0, 1}.
    pub binaries: Vec<usize>,
    pub sos1: Vec<Sos1Pair>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MipStatus {
    Optimal,
    Infeasible,
}

#[derive(Debug, Clone)]
pub struct MipSolution<S> {
    pub status: MipStatus,
    pub primal: Vec<S>,
    pub objective: S,
    pub nodes: u64,
    /// (node at which found, objective) per incumbent improvement.
    pub incumbents: Vec<(u64, S)>,
}

pub const NODE_LIMIT: u64 = 100_000;

struct Node<S> {
    fixes: Vec<(usize, S)>,
    /// LP bound inherited from the parent relaxation.
    bound: S,
    depth: usize,
    id: u64,
}

pub fn solve_mip<S: Scalar>(prog: &MixedProgram<S>) -> Result<MipSolution<S>> {
    prog.base.well_formed()?;
    let nvars = prog.base.variables.len();
    for b in &prog.binaries {
        if *b >= nvars {
            return Err(Error::Program(format!("binary index {b} out of range")));
        }
    }
    for p in &prog.sos1 {
        if p.first >= nvars || p.second >= nvars {
            return Err(Error::Program("sos1 index out of range".into()));
        }
    }
    let minimizing = prog.base.obj_sense == ObjSense::Min;
    let better = |a: S, b: S| if minimizing { a < b - c(1e-9) } else { a > b + c(1e-9) };

    let mut open: Vec<Node<S>> = vec![Node {
        fixes: Vec::new(),
        bound: if minimizing {
            S::neg_infinity()
        } else {
            S::infinity()
        },
        depth: 0,
        id: 0,
    }];
    let mut next_id: u64 = 1;
    let mut nodes: u64 = 0;
    let mut incumbent: Option<(Vec<S>, S)> = None;
    let mut incumbents: Vec<(u64, S)> = Vec::new();

    while !open.is_empty() {
        // Depth-first dive; among equal depth prefer the better bound,
        // then the most recently created node.
        let mut pick = 0usize;
        for (k, node) in open.iter().enumerate() {
            let cur = &open[pick];
            let deeper = node.depth > cur.depth;
            let same_depth = node.depth == cur.depth;
            let tighter = if minimizing {
                node.bound < cur.bound - c(1e-12)
            } else {
                node.bound > cur.bound + c(1e-12)
            };
            let equal_bound = (node.bound - cur.bound).abs() <= c(1e-12)
                || (!node.bound.is_finite() && !cur.bound.is_finite());
            if deeper || (same_depth && (tighter || (equal_bound && node.id > cur.id))) {
                pick = k;
            }
        }
        let node = open.swap_remove(pick);

        if let Some((_, best)) = &incumbent {
            if !better(node.bound, *best) && node.bound.is_finite() {
                continue;
            }
        }
        nodes += 1;
        if nodes > NODE_LIMIT {
            return Err(Error::NodeLimit(NODE_LIMIT));
        }

        let mut lp = prog.base.clone();
        for b in &prog.binaries {
            lp.variables[*b].lower = S::zero();
            lp.variables[*b].upper = S::one();
        }
        // A variable can sit in several pairs; conflicting fixes along one
        // path mean the node is infeasible.
        let mut conflict = false;
        for (var, val) in &node.fixes {
            let v = &mut lp.variables[*var];
            if v.lower == v.upper && v.lower != *val {
                conflict = true;
                break;
            }
            v.lower = *val;
            v.upper = *val;
        }
        if conflict {
            continue;
        }
        let relax = solve_lp(&lp)?;
        match relax.status {
            LpStatus::Infeasible => continue,
            LpStatus::Unbounded => {
                return Err(Error::Program(
                    "relaxation is unbounded; mixed programs here must be bounded".into(),
                ))
            }
            LpStatus::Optimal => {}
        }
        if let Some((_, best)) = &incumbent {
            if !better(relax.objective, *best) {
                continue;
            }
        }

        // Most-violated pair first, then most-fractional binary.
        let pair_violation = |p: &Sos1Pair| {
            let a = relax.primal[p.first].abs();
            let b = if p.second_complemented {
                (S::one() - relax.primal[p.second]).abs()
            } else {
                relax.primal[p.second].abs()
            };
            a.min(b)
        };
        let mut branch_pair: Option<(usize, S)> = None;
        for (k, p) in prog.sos1.iter().enumerate() {
            let v = pair_violation(p);
            if v > c(CHECK_TOL) && branch_pair.map_or(true, |(_, bv)| v > bv) {
                branch_pair = Some((k, v));
            }
        }
        let mut branch_bin: Option<(usize, S)> = None;
        if branch_pair.is_none() {
            for b in &prog.binaries {
                let x = relax.primal[*b];
                let frac = x.min(S::one() - x).abs();
                if frac > c(CHECK_TOL) && branch_bin.map_or(true, |(_, bf)| frac > bf) {
                    branch_bin = Some((*b, frac));
                }
            }
        }

        if branch_pair.is_none() && branch_bin.is_none() {
            // Integral and complementary: candidate incumbent.
            let accept = match &incumbent {
                None => true,
                Some((_, best)) => better(relax.objective, *best),
            };
            if accept {
                incumbent = Some((relax.primal.clone(), relax.objective));
                incumbents.push((nodes, relax.objective));
            }
            continue;
        }

        let mut push = |fixes: Vec<(usize, S)>, depth: usize, bound: S| {
            open.push(Node {
                fixes,
                bound,
                depth,
                id: next_id,
            });
            next_id += 1;
        };
        if let Some((k, _)) = branch_pair {
            let p = prog.sos1[k];
            let mut left = node.fixes.clone();
            left.push((p.first, S::zero()));
            let mut right = node.fixes.clone();
            right.push((
                p.second,
                if p.second_complemented {
                    S::one()
                } else {
                    S::zero()
                },
            ));
            push(left, node.depth + 1, relax.objective);
            push(right, node.depth + 1, relax.objective);
        } else if let Some((b, _)) = branch_bin {
            let mut down = node.fixes.clone();
            down.push((b, S::zero()));
            let mut up = node.fixes.clone();
            up.push((b, S::one()));
            push(down, node.depth + 1, relax.objective);
            push(up, node.depth + 1, relax.objective);
        }
    }

    match incumbent {
        Some((primal, objective)) => Ok(MipSolution {
            status: MipStatus::Optimal,
            primal,
            objective,
            nodes,
            incumbents,
        }),
        None => Ok(MipSolution {
            status: MipStatus::Infeasible,
            primal: Vec::new(),
            objective: S::nan(),
            nodes,
            incumbents,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::{Sense, Variable};

    #[test]
    fn no_binaries_reduces_to_lp() {
        let mut lp: LinearProgram<f64> = LinearProgram::minimize(
            vec![Variable::nonneg("x"), Variable::nonneg("y")],
            vec![-1.0, -1.0],
        );
        lp.push(vec![1.0, 2.0], Sense::Le, 4.0);
        lp.push(vec![3.0, 1.0], Sense::Le, 6.0);
        let mip = MixedProgram {
            base: lp.clone(),
            binaries: vec![],
            sos1: vec![],
        };
        let a = solve_mip(&mip).unwrap();
        let b = solve_lp(&lp).unwrap();
        assert_eq!(a.status, MipStatus::Optimal);
        assert!((a.objective - b.objective).abs() < 1e-9);
    }

    #[test]
    fn exhausted_disjunction_is_infeasible() {
        // min x + y s.t. x >= 0.3, y >= 0.3, pair (x, y)
        let mut lp: LinearProgram<f64> = LinearProgram::minimize(
            vec![Variable::nonneg("x"), Variable::nonneg("y")],
            vec![1.0, 1.0],
        );
        lp.push(vec![1.0, 0.0], Sense::Ge, 0.3);
        lp.push(vec![0.0, 1.0], Sense::Ge, 0.3);
        let mip = MixedProgram {
            base: lp,
            binaries: vec![],
            sos1: vec![Sos1Pair::plain(0, 1)],
        };
        let sol = solve_mip(&mip).unwrap();
        assert_eq!(sol.status, MipStatus::Infeasible);
    }

    #[test]
    fn binary_knapsack() {
        // max 3a + 2b + 2c s.t. a + b + c <= 2, binaries
        let mut lp: LinearProgram<f64> = LinearProgram {
            variables: vec![
                Variable::bounded("a", 0.0, 1.0),
                Variable::bounded("b", 0.0, 1.0),
                Variable::bounded("c", 0.0, 1.0),
            ],
            constraints: Vec::new(),
            obj_sense: ObjSense::Max,
            objective: vec![3.0, 2.0, 2.0],
        };
        lp.push(vec![1.0, 1.0, 1.0], Sense::Le, 2.0);
        let mip = MixedProgram {
            base: lp,
            binaries: vec![0, 1, 2],
            sos1: vec![],
        };
        let sol = solve_mip(&mip).unwrap();
        assert_eq!(sol.status, MipStatus::Optimal);
        assert!((sol.objective - 5.0).abs() < 1e-6);
        assert!((sol.primal[0] - 1.0).abs() < 1e-6);
    }

    /// Exhaustively enumerate all pair-disjunction and binary assignments
    /// and take the best feasible LP value.
    fn enumerate_optimum(prog: &MixedProgram<f64>) -> Option<f64> {
        let k = prog.sos1.len() + prog.binaries.len();
        assert!(k <= 12);
        let minimizing = prog.base.obj_sense == ObjSense::Min;
        let mut best: Option<f64> = None;
        for mask in 0..(1u32 << k) {
            let mut lp = prog.base.clone();
            for (t, p) in prog.sos1.iter().enumerate() {
                if mask & (1 << t) == 0 {
                    lp.variables[p.first].lower = 0.0;
                    lp.variables[p.first].upper = 0.0;
                } else {
                    let v = if p.second_complemented { 1.0 } else { 0.0 };
                    lp.variables[p.second].lower = v;
                    lp.variables[p.second].upper = v;
                }
            }
            for (t, b) in prog.binaries.iter().enumerate() {
                let v = if mask & (1 << (prog.sos1.len() + t)) == 0 {
                    0.0
                } else {
                    1.0
                };
                lp.variables[*b].lower = v;
                lp.variables[*b].upper = v;
            }
            let sol = solve_lp(&lp).unwrap();
            if sol.status == LpStatus::Optimal {
                best = Some(match best {
                    None => sol.objective,
                    Some(b) if minimizing => b.min(sol.objective),
                    Some(b) => b.max(sol.objective),
                });
            }
        }
        best
    }

    mod random {
        use super::*;
        use proptest::prelude::*;

        fn arb_mip() -> impl Strategy<Value = MixedProgram<f64>> {
            (2usize..5, 1usize..4, 0usize..3).prop_flat_map(|(nv, nc, npairs)| {
                (
                    proptest::collection::vec(-4.0f64..4.0, nv),
                    proptest::collection::vec(proptest::collection::vec(-2.0f64..2.0, nv), nc),
                    proptest::collection::vec(0.5f64..4.0, nc),
                    proptest::collection::vec((0..nv, 0..nv), npairs),
                )
                    .prop_map(move |(obj, rows, rhs, pairs)| {
                        let vars = (0..nv)
                            .map(|j| Variable::bounded(format!("x{j}"), 0.0, 3.0))
                            .collect();
                        let mut lp = LinearProgram::minimize(vars, obj);
                        for (row, b) in rows.into_iter().zip(rhs) {
                            lp.push(row, Sense::Le, b);
                        }
                        let sos1 = pairs
                            .into_iter()
                            .filter(|(a, b)| a != b)
                            .map(|(a, b)| Sos1Pair::plain(a, b))
                            .collect();
                        MixedProgram {
                            base: lp,
                            binaries: vec![],
                            sos1,
                        }
                    })
            })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]
            #[test]
            fn matches_exhaustive_enumeration(prog in arb_mip()) {
                let sol = solve_mip(&prog).unwrap();
                let oracle = enumerate_optimum(&prog);
                match (sol.status, oracle) {
                    (MipStatus::Optimal, Some(best)) => {
                        prop_assert!((sol.objective - best).abs() <= 1e-6,
                            "b&b {} vs enumeration {}", sol.objective, best);
                    }
                    (MipStatus::Infeasible, None) => {}
                    other => prop_assert!(false, "status mismatch: {:?}", other.0),
                }
            }

            #[test]
            fn fixing_a_pair_never_improves(prog in arb_mip()) {
                prop_assume!(!prog.sos1.is_empty());
                let sol = solve_mip(&prog).unwrap();
                prop_assume!(sol.status == MipStatus::Optimal);
                let mut fixed = prog.clone();
                let p = fixed.sos1[0];
                fixed.base.variables[p.first].lower = 0.0;
                fixed.base.variables[p.first].upper = 0.0;
                let fixed_sol = solve_mip(&fixed).unwrap();
                if fixed_sol.status == MipStatus::Optimal {
                    prop_assert!(fixed_sol.objective >= sol.objective - 1e-6);
                }
            }
        }
    }
}
