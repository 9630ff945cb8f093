//! Benders decomposition over the block-structured planning problem.
//!
//! The planning problem carries the capacity and coupling variables plus one
//! value-function variable per sub-period; operational sub-problems are
//! solved with the planning point pinned by fixing rows, whose duals supply
//! the cut gradients.

use std::time::Instant;

use thiserror::Error;

use crate::lp::{
    solve_lp, solve_milp, LpError, LpProblem, MilpProblem, MilpStatus, RowSense, SolveOptions,
    SolveStatus,
};
use crate::reformulate::{BlockProblem, SubBlock};

#[derive(Debug, Error)]
pub enum BendersError {
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("sub-problem w{w} failed: {source}")]
    SubProblem { w: usize, source: LpError },
    #[error("sub-problem w{w} returned status {status:?}")]
    SubProblemStatus { w: usize, status: SolveStatus },
    #[error("BOUND_ORDER: upper bound {u} fell below lower bound {l}")]
    BoundOrder { u: f64, l: f64 },
    #[error("planning problem returned status {0:?}")]
    Planning(SolveStatus),
    #[error("alpha {0} is outside the open interval (0, 1)")]
    AlphaOutOfRange(f64),
}

#[derive(Debug, Clone)]
pub struct BendersConfig {
    /// Relative optimality tolerance on (U - L) / |L|.
    pub tol: f64,
    pub max_iter: usize,
    /// Worker threads for sub-problem solves; 0 picks automatically.
    pub workers: usize,
    /// Enforce integer builds in the planning problem.
    pub integer: bool,
    pub solve_opts: SolveOptions,
}

impl Default for BendersConfig {
    fn default() -> Self {
        BendersConfig {
            tol: 1e-3,
            max_iter: 200,
            workers: 0,
            integer: false,
            solve_opts: SolveOptions::default(),
        }
    }
}

/// One optimality cut for sub-period `w`, anchored at the iterate it was
/// generated from: theta_w >= g + coefs' (v - anchor).
#[derive(Debug, Clone)]
pub struct Cut {
    pub w: usize,
    pub iter: usize,
    pub g: f64,
    /// (planning column, dual) pairs; gradient of the value function.
    pub coefs: Vec<(usize, f64)>,
    /// Anchor values for the same planning columns, in the same order.
    pub anchor: Vec<f64>,
}

impl Cut {
    /// Cut value at a planning point; equals `g` exactly at the anchor.
    pub fn eval(&self, v: &[f64]) -> f64 {
        let mut val = self.g;
        for (i, &(col, dual)) in self.coefs.iter().enumerate() {
            val += dual * (v[col] - self.anchor[i]);
        }
        val
    }
}

/// Result of one operational sub-problem solve at a fixed planning point.
#[derive(Debug, Clone)]
pub struct SubSolve {
    pub w: usize,
    /// Optimal operational cost (unweighted).
    pub g: f64,
    /// Duals of the fixing rows, aligned with `SubBlock::linked`.
    pub duals: Vec<f64>,
}

/// Per-iteration trace record. Regularization fields are None for the
/// plain decomposition.
#[derive(Debug, Clone)]
pub struct IterRecord {
    pub iter: usize,
    pub u: f64,
    pub l: f64,
    pub gap: f64,
    pub wall_ms: f64,
    pub n_cuts: usize,
    pub kind: Option<String>,
    pub alpha: Option<f64>,
    pub l_alpha: Option<f64>,
    pub r_star: Option<f64>,
    pub stage: Option<u8>,
    pub tr_radius: Option<f64>,
}

impl IterRecord {
    pub fn plain(iter: usize, u: f64, l: f64, gap: f64, wall_ms: f64, n_cuts: usize) -> Self {
        IterRecord {
            iter,
            u,
            l,
            gap,
            wall_ms,
            n_cuts,
            kind: None,
            alpha: None,
            l_alpha: None,
            r_star: None,
            stage: None,
            tr_radius: None,
        }
    }
}

/// Mutable decomposition state: cut pool, best bounds, incumbent, trace.
#[derive(Debug, Clone)]
pub struct MasterState {
    pub cuts: Vec<Cut>,
    pub best_u: f64,
    pub best_l: f64,
    /// Planning point achieving `best_u`.
    pub incumbent: Vec<f64>,
    pub trace: Vec<IterRecord>,
}

impl MasterState {
    pub fn new() -> Self {
        MasterState {
            cuts: Vec::new(),
            best_u: f64::INFINITY,
            best_l: f64::NEG_INFINITY,
            incumbent: Vec::new(),
            trace: Vec::new(),
        }
    }

    /// Relative gap (U - L) / |L|, infinite until both bounds exist.
    pub fn gap(&self) -> f64 {
        if self.best_u.is_finite() && self.best_l.is_finite() {
            (self.best_u - self.best_l) / self.best_l.abs().max(1e-12)
        } else {
            f64::INFINITY
        }
    }
}

impl Default for MasterState {
    fn default() -> Self {
        Self::new()
    }
}

#[derive(Debug, Clone)]
pub struct BendersResult {
    pub converged: bool,
    pub u: f64,
    pub l: f64,
    pub gap: f64,
    pub iterations: usize,
    /// Best planning point (columns of `BlockProblem::planning`).
    pub planning: Vec<f64>,
    pub trace: Vec<IterRecord>,
    pub cuts: Vec<Cut>,
}

/// Solve the operational block at a fixed planning point by appending one
/// fixing equality per linked planning column. The fixing-row duals are the
/// sensitivities of the block cost to the planning decisions.
pub fn solve_subproblem(
    block: &SubBlock,
    planning_point: &[f64],
    opts: &SolveOptions,
) -> Result<SubSolve, BendersError> {
    let mut lp = block.lp.clone();
    let nrows = lp.num_rows();
    for (i, &g) in block.linked.iter().enumerate() {
        let j = block.nx + i;
        lp.add_row(
            format!("fix_{}", lp.col_names[j].clone()),
            vec![(j, 1.0)],
            RowSense::Eq,
            planning_point[g],
        );
    }
    let sol = solve_lp(&lp, opts).map_err(|e| BendersError::SubProblem {
        w: block.w,
        source: e,
    })?;
    if sol.status != SolveStatus::Optimal {
        return Err(BendersError::SubProblemStatus {
            w: block.w,
            status: sol.status,
        });
    }
    let duals = (0..block.linked.len())
        .map(|i| sol.row_duals[nrows + i])
        .collect();
    Ok(SubSolve {
        w: block.w,
        g: sol.objective,
        duals,
    })
}

/// Linear planning cost (investment, retirement, coupling-slack penalties)
/// at a planning point.
pub fn planning_cost(bp: &BlockProblem, v: &[f64]) -> f64 {
    bp.planning.obj_offset
        + bp.planning
            .obj
            .iter()
            .zip(v.iter())
            .map(|(c, x)| c * x)
            .sum::<f64>()
}

/// Build the planning problem (master): planning skeleton plus one
/// value-function column per sub-period and all cuts. Returns the LP and
/// the theta column indices aligned with `bp.blocks`.
pub fn build_planning_problem(
    bp: &BlockProblem,
    cuts: &[Cut],
    integer: bool,
) -> (LpProblem, Vec<usize>, Vec<usize>) {
    let mut lp = bp.planning.clone();
    let thetas: Vec<usize> = bp
        .blocks
        .iter()
        .map(|b| lp.add_col(format!("theta_w{}", b.w), 0.0, f64::INFINITY, b.beta))
        .collect();
    let theta_of_w: std::collections::BTreeMap<usize, usize> = bp
        .blocks
        .iter()
        .zip(thetas.iter())
        .map(|(b, &t)| (b.w, t))
        .collect();
    for cut in cuts {
        // theta_w - coefs' v >= g - coefs' anchor
        let mut terms = vec![(theta_of_w[&cut.w], 1.0)];
        let mut rhs = cut.g;
        for (i, &(col, dual)) in cut.coefs.iter().enumerate() {
            terms.push((col, -dual));
            rhs -= dual * cut.anchor[i];
        }
        // Normalize so cut rows with large duals do not wreck the
        // conditioning of the planning basis.
        let scale = terms
            .iter()
            .fold(0.0f64, |m, &(_, v)| m.max(v.abs()))
            .max(1.0);
        for t in terms.iter_mut() {
            t.1 /= scale;
        }
        lp.add_row(
            format!("cut_w{}_k{}", cut.w, cut.iter),
            terms,
            RowSense::Ge,
            rhs / scale,
        );
    }
    let integers = if integer { bp.integers.clone() } else { Vec::new() };
    (lp, thetas, integers)
}

/// Fold a candidate upper bound into the state; ties keep the earlier
/// incumbent so reruns are reproducible.
pub fn compute_upper_bound(state: &mut MasterState, candidate: f64, point: &[f64]) {
    if candidate < state.best_u {
        state.best_u = candidate;
        state.incumbent = point.to_vec();
    }
}

/// Solve the planning problem, LP or MILP depending on config. Returns the
/// planning point (without thetas), theta values, the objective, and the
/// proven lower bound (equal to the objective for LPs).
pub fn solve_planning(
    bp: &BlockProblem,
    cuts: &[Cut],
    cfg: &BendersConfig,
) -> Result<(Vec<f64>, Vec<f64>, f64, f64), BendersError> {
    let (lp, thetas, integers) = build_planning_problem(bp, cuts, cfg.integer);
    let nv = bp.planning.num_cols();
    if integers.is_empty() {
        let sol = solve_lp(&lp, &cfg.solve_opts)?;
        if sol.status != SolveStatus::Optimal {
            return Err(BendersError::Planning(sol.status));
        }
        let th = thetas.iter().map(|&t| sol.primal[t]).collect();
        Ok((sol.primal[..nv].to_vec(), th, sol.objective, sol.objective))
    } else {
        let sol = solve_milp(
            &MilpProblem {
                lp,
                integers,
            },
            &cfg.solve_opts,
        )?;
        if sol.status == MilpStatus::Infeasible {
            return Err(BendersError::Planning(SolveStatus::Infeasible));
        }
        let th = thetas.iter().map(|&t| sol.primal[t]).collect();
        Ok((sol.primal[..nv].to_vec(), th, sol.objective, sol.bound))
    }
}

/// Evaluate all sub-problems at a planning point and register the resulting
/// cuts and upper bound. Returns the candidate upper bound.
pub fn evaluate_point(
    bp: &BlockProblem,
    state: &mut MasterState,
    point: &[f64],
    iter: usize,
    cfg: &BendersConfig,
) -> Result<f64, BendersError> {
    let solves = crate::parallel::map_subproblems(&bp.blocks, point, &cfg.solve_opts, cfg.workers)?;
    let mut candidate = planning_cost(bp, point);
    for (b, s) in bp.blocks.iter().zip(solves.iter()) {
        candidate += b.beta * s.g;
        state.cuts.push(Cut {
            w: b.w,
            iter,
            g: s.g,
            coefs: b
                .linked
                .iter()
                .zip(s.duals.iter())
                .map(|(&col, &d)| (col, d))
                .collect(),
            anchor: b.linked.iter().map(|&col| point[col]).collect(),
        });
    }
    compute_upper_bound(state, candidate, point);
    Ok(candidate)
}

/// Plain (unregularized) Benders decomposition.
pub fn run_benders(bp: &BlockProblem, cfg: &BendersConfig) -> Result<BendersResult, BendersError> {
    let start = Instant::now();
    let mut state = MasterState::new();
    let mut converged = false;
    let mut iterations = 0;
    for iter in 0..cfg.max_iter {
        iterations = iter + 1;
        let (point, _thetas, obj, bound) = solve_planning(bp, &state.cuts, cfg)?;
        let _ = obj;
        state.best_l = state.best_l.max(bound);
        evaluate_point(bp, &mut state, &point, iter, cfg)?;
        if state.best_u < state.best_l - 1e-6 * state.best_l.abs() {
            return Err(BendersError::BoundOrder {
                u: state.best_u,
                l: state.best_l,
            });
        }
        let gap = state.gap();
        state.trace.push(IterRecord::plain(
            iter,
            state.best_u,
            state.best_l,
            gap,
            start.elapsed().as_secs_f64() * 1e3,
            state.cuts.len(),
        ));
        if gap <= cfg.tol {
            converged = true;
            break;
        }
    }
    Ok(BendersResult {
        converged,
        u: state.best_u,
        l: state.best_l,
        gap: state.gap(),
        iterations,
        planning: state.incumbent.clone(),
        trace: state.trace,
        cuts: state.cuts,
    })
}
