//! Mixed-integer LP by best-first branch-and-bound on LP relaxations.
//!
//! Nodes are ordered by relaxation bound with node id as the tie-break, so
//! the search order (and hence the returned incumbent) is deterministic.
//! Branching picks the most fractional integer column, lowest index on ties.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use super::simplex::solve_lp;
use super::{LpError, LpProblem, SolveOptions, SolveStatus};

/// Desk-scale guard on the integer column count.
const MAX_INTEGER_COLS: usize = 200;

#[derive(Debug, Clone)]
pub struct MilpProblem {
    pub lp: LpProblem,
    /// Column indices required to take integer values.
    pub integers: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MilpStatus {
    Optimal,
    Infeasible,
    /// Node budget exhausted; the incumbent and its proven gap are returned.
    NodeLimit,
}

#[derive(Debug, Clone)]
pub struct MilpSolution {
    pub status: MilpStatus,
    pub primal: Vec<f64>,
    pub objective: f64,
    /// Proven lower bound on the optimum (minimization).
    pub bound: f64,
    /// Relative gap between incumbent and bound.
    pub gap: f64,
    pub nodes_processed: usize,
}

/// One open node: bound overrides relative to the root problem. The node's
/// relaxation bound travels in the heap key.
struct Node {
    overrides: Vec<(usize, f64, f64)>,
}

#[derive(PartialEq)]
struct HeapKey(f64, usize);
impl Eq for HeapKey {}
impl PartialOrd for HeapKey {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapKey {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0).then(self.1.cmp(&other.1))
    }
}

pub fn solve_milp(p: &MilpProblem, opts: &SolveOptions) -> Result<MilpSolution, LpError> {
    p.lp.check()?;
    if p.integers.len() > MAX_INTEGER_COLS {
        return Err(LpError::BadInput(format!(
            "{} integer columns exceeds the desk-scale limit of {MAX_INTEGER_COLS}",
            p.integers.len()
        )));
    }
    for &j in &p.integers {
        if j >= p.lp.num_cols() {
            return Err(LpError::BadInput(format!("integer column {j} out of range")));
        }
    }

    let mut nodes: Vec<Node> = vec![Node {
        overrides: Vec::new(),
    }];
    let mut heap: BinaryHeap<Reverse<HeapKey>> = BinaryHeap::new();
    heap.push(Reverse(HeapKey(f64::NEG_INFINITY, 0)));

    let mut incumbent: Option<(f64, Vec<f64>)> = None;
    let mut lower = f64::NEG_INFINITY;
    let mut processed = 0usize;

    let rel_gap = |u: f64, l: f64| {
        if u.is_finite() && l.is_finite() {
            (u - l).abs() / l.abs().max(1.0)
        } else {
            f64::INFINITY
        }
    };

    while let Some(Reverse(HeapKey(node_bound, id))) = heap.pop() {
        // Best-first: popped bounds are nondecreasing, which keeps the
        // reported lower bound monotone.
        if node_bound.is_finite() {
            lower = lower.max(node_bound);
        }
        if let Some((u, _)) = &incumbent {
            if node_bound >= *u - 1e-12 || rel_gap(*u, lower) <= opts.mip_gap {
                break;
            }
        }
        if processed >= opts.node_limit {
            return Ok(match incumbent {
                Some((u, x)) => MilpSolution {
                    status: MilpStatus::NodeLimit,
                    gap: rel_gap(u, lower),
                    primal: x,
                    objective: u,
                    bound: lower,
                    nodes_processed: processed,
                },
                None => {
                    return Err(LpError::NodeLimit {
                        gap: f64::INFINITY,
                    })
                }
            });
        }
        processed += 1;

        let overrides = std::mem::take(&mut nodes[id].overrides);
        let mut lp = p.lp.clone();
        for &(j, lb, ub) in &overrides {
            lp.lb[j] = lb;
            lp.ub[j] = ub;
        }
        let sol = solve_lp(&lp, opts)?;
        match sol.status {
            SolveStatus::Infeasible => continue,
            SolveStatus::Unbounded => {
                return Err(LpError::BadInput(
                    "unbounded LP relaxation in branch-and-bound".into(),
                ))
            }
            SolveStatus::IterationLimit => {
                return Err(LpError::NumericalBreakdown(
                    "LP relaxation hit the iteration limit".into(),
                ))
            }
            SolveStatus::Optimal => {}
        }
        if let Some((u, _)) = &incumbent {
            if sol.objective >= *u - 1e-12 {
                continue;
            }
        }

        // Most fractional integer column, lowest index on ties.
        let mut branch: Option<(usize, f64)> = None;
        let mut best_score = f64::INFINITY;
        for &j in &p.integers {
            let v = sol.primal[j];
            let frac = v - v.floor();
            let dist = frac.min(1.0 - frac);
            if dist > opts.int_tol {
                let score = (frac - 0.5).abs();
                if score < best_score - 1e-12 {
                    best_score = score;
                    branch = Some((j, score));
                }
            }
        }

        match branch {
            None => {
                // Integer feasible: snap and accept.
                let mut x = sol.primal.clone();
                for &j in &p.integers {
                    x[j] = x[j].round();
                }
                let obj = lp.objective_at(&x);
                if incumbent.as_ref().map_or(true, |(u, _)| obj < *u - 1e-12) {
                    incumbent = Some((obj, x));
                }
            }
            Some((j, _)) => {
                let v = sol.primal[j];
                for (lo, hi) in [
                    (lp.lb[j], v.floor()),
                    (v.ceil(), lp.ub[j]),
                ] {
                    if lo > hi {
                        continue;
                    }
                    let mut ov = overrides.clone();
                    ov.push((j, lo, hi));
                    let nid = nodes.len();
                    nodes.push(Node { overrides: ov });
                    heap.push(Reverse(HeapKey(sol.objective, nid)));
                }
            }
        }
    }

    match incumbent {
        Some((u, x)) => {
            if heap.is_empty() {
                lower = u;
            }
            Ok(MilpSolution {
                status: MilpStatus::Optimal,
                gap: rel_gap(u, lower.min(u)),
                primal: x,
                objective: u,
                bound: lower.min(u),
                nodes_processed: processed,
            })
        }
        None => Ok(MilpSolution {
            status: MilpStatus::Infeasible,
            primal: vec![],
            objective: f64::INFINITY,
            bound: f64::INFINITY,
            gap: 0.0,
            nodes_processed: processed,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::RowSense;

    fn opts() -> SolveOptions {
        SolveOptions::default()
    }

    #[test]
    fn rounds_down_forced() {
        // min -x, x in {0..3}, x <= 2.5 -> x = 2.
        let mut lp = LpProblem::new();
        lp.add_col("x", 0.0, 3.0, -1.0);
        lp.add_row("c", vec![(0, 1.0)], RowSense::Le, 2.5);
        let p = MilpProblem {
            lp,
            integers: vec![0],
        };
        let s = solve_milp(&p, &opts()).unwrap();
        assert_eq!(s.status, MilpStatus::Optimal);
        assert_eq!(s.primal[0], 2.0);
        assert_eq!(s.objective, -2.0);
    }

    #[test]
    fn integral_relaxation_stops_at_root() {
        // Totally unimodular transport: 2 sources, 2 sinks, integral data.
        let mut lp = LpProblem::new();
        for i in 0..2 {
            for j in 0..2 {
                lp.add_col(
                    format!("f{i}{j}"),
                    0.0,
                    f64::INFINITY,
                    ((i + 1) * (j + 2)) as f64,
                );
            }
        }
        lp.add_row("s0", vec![(0, 1.0), (1, 1.0)], RowSense::Eq, 3.0);
        lp.add_row("s1", vec![(2, 1.0), (3, 1.0)], RowSense::Eq, 4.0);
        lp.add_row("d0", vec![(0, 1.0), (2, 1.0)], RowSense::Eq, 5.0);
        lp.add_row("d1", vec![(1, 1.0), (3, 1.0)], RowSense::Eq, 2.0);
        let p = MilpProblem {
            lp,
            integers: (0..4).collect(),
        };
        let s = solve_milp(&p, &opts()).unwrap();
        assert_eq!(s.status, MilpStatus::Optimal);
        assert_eq!(s.nodes_processed, 1);
        for v in &s.primal {
            assert!((v - v.round()).abs() < 1e-9);
        }
    }

    #[test]
    fn infeasible_root() {
        let mut lp = LpProblem::new();
        lp.add_col("x", 0.0, 1.0, 1.0);
        lp.add_row("c", vec![(0, 1.0)], RowSense::Ge, 2.0);
        let p = MilpProblem {
            lp,
            integers: vec![0],
        };
        let s = solve_milp(&p, &opts()).unwrap();
        assert_eq!(s.status, MilpStatus::Infeasible);
    }

    #[test]
    fn rejects_oversized_integer_set() {
        let mut lp = LpProblem::new();
        for j in 0..201 {
            lp.add_col(format!("x{j}"), 0.0, 1.0, 1.0);
        }
        let p = MilpProblem {
            lp,
            integers: (0..201).collect(),
        };
        assert!(matches!(
            solve_milp(&p, &opts()),
            Err(LpError::BadInput(_))
        ));
    }
}
