//! Convex quadratic programming by a primal active-set method.
//!
//! The quadratic term is `0.5 x'Qx` from `LpProblem::quad`. A feasible
//! starting vertex comes from the LP solver; equality-constrained
//! subproblems are then solved on the current working set, constraints are
//! added when a step is blocked and dropped when their multiplier goes
//! negative. A dedicated normal-equations path covers the common case of a
//! strictly positive diagonal Q, where only a working-set-sized system is
//! needed per step; general dense Q falls back to the full KKT system.
//!
//! Duals follow the same convention as the LP solver: `row_duals[i]` and
//! `reduced_costs[j]` are sensitivities of the optimal objective to the row
//! rhs / active variable bound.

use super::dense::{lu_solve, rows_independent};
use super::simplex::solve_lp;
use super::{LpError, LpProblem, PrimalDualSolution, RowSense, SolveOptions, SolveStatus};

const STEP_TOL: f64 = 1e-10;
const ACT_TOL: f64 = 1e-8;

/// One linear constraint in `a'x <= b` or `a'x = b` form.
struct Con {
    terms: Vec<(usize, f64)>,
    rhs: f64,
    eq: bool,
    /// Where the dual goes: row index or variable bound.
    target: Target,
    /// Multiplier-to-shadow-price sign factor.
    dual_sign: f64,
}

enum Target {
    Row(usize),
    Bound(usize),
}

/// Removes the most recently added non-equality member of the working set.
/// Returns false when only equalities remain.
fn drop_last_inequality(
    cons: &[Con],
    w: &mut Vec<usize>,
    wrows: &mut Vec<f64>,
    in_w: &mut [bool],
    n: usize,
) -> bool {
    let Some(a) = w.iter().rposition(|&ci| !cons[ci].eq) else {
        return false;
    };
    let ci = w.remove(a);
    in_w[ci] = false;
    wrows.drain(a * n..(a + 1) * n);
    true
}

pub fn solve_qp(p: &LpProblem, opts: &SolveOptions) -> Result<PrimalDualSolution, LpError> {
    p.check()?;
    let n = p.num_cols();
    if p.quad.is_empty() {
        return solve_lp(p, opts);
    }

    // Assemble Q dense (entries are full symmetric coordinates).
    let mut q = vec![0.0; n * n];
    let mut diag_only = true;
    for &(i, j, v) in &p.quad {
        q[i * n + j] += v;
        if i != j {
            diag_only = false;
        }
    }
    let diag_pos = diag_only && (0..n).all(|j| q[j * n + j] > 0.0);

    // Feasible start: any vertex of the constraint set. The linear objective
    // is dropped too, since the relaxation may be unbounded where the QP is
    // not.
    let mut relax = p.clone();
    relax.quad.clear();
    relax.obj.iter_mut().for_each(|c| *c = 0.0);
    let start = solve_lp(&relax, opts)?;
    if start.status != SolveStatus::Optimal {
        return Ok(PrimalDualSolution {
            status: start.status,
            primal: vec![],
            objective: f64::NAN,
            row_duals: vec![],
            reduced_costs: vec![],
        });
    }
    let mut x = start.primal;

    // Constraint list: rows first, then finite variable bounds. Inequalities
    // are normalized to `a'x <= b`; the sign factor maps the KKT multiplier
    // back to a rhs sensitivity.
    let mut cons: Vec<Con> = Vec::new();
    for (i, row) in p.rows.iter().enumerate() {
        let (terms, rhs, sign) = match row.sense {
            RowSense::Le | RowSense::Eq => (row.terms.clone(), row.rhs, -1.0),
            RowSense::Ge => (
                row.terms.iter().map(|&(j, v)| (j, -v)).collect(),
                -row.rhs,
                1.0,
            ),
        };
        cons.push(Con {
            terms,
            rhs,
            eq: row.sense == RowSense::Eq,
            target: Target::Row(i),
            dual_sign: sign,
        });
    }
    for j in 0..n {
        if p.lb[j] == p.ub[j] {
            cons.push(Con {
                terms: vec![(j, 1.0)],
                rhs: p.lb[j],
                eq: true,
                target: Target::Bound(j),
                dual_sign: -1.0,
            });
            continue;
        }
        if p.lb[j].is_finite() {
            cons.push(Con {
                terms: vec![(j, -1.0)],
                rhs: -p.lb[j],
                eq: false,
                target: Target::Bound(j),
                dual_sign: 1.0,
            });
        }
        if p.ub[j].is_finite() {
            cons.push(Con {
                terms: vec![(j, 1.0)],
                rhs: p.ub[j],
                eq: false,
                target: Target::Bound(j),
                dual_sign: -1.0,
            });
        }
    }

    // Initial working set: equalities, then active inequalities while the
    // rows stay independent.
    let xscale = 1.0 + x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut in_w = vec![false; cons.len()];
    let mut w: Vec<usize> = Vec::new();
    let mut wrows: Vec<f64> = Vec::new();
    let try_add = |ci: usize,
                       cons: &[Con],
                       w: &mut Vec<usize>,
                       wrows: &mut Vec<f64>,
                       in_w: &mut [bool],
                       check: bool| {
        let mut row = vec![0.0; n];
        for &(j, v) in &cons[ci].terms {
            row[j] += v;
        }
        wrows.extend_from_slice(&row);
        if check && !rows_independent(wrows, w.len() + 1, n) {
            wrows.truncate(w.len() * n);
            return false;
        }
        w.push(ci);
        in_w[ci] = true;
        true
    };
    for ci in 0..cons.len() {
        if cons[ci].eq {
            try_add(ci, &cons, &mut w, &mut wrows, &mut in_w, true);
        }
    }
    for ci in 0..cons.len() {
        if cons[ci].eq || w.len() == n {
            continue;
        }
        let act: f64 = cons[ci].terms.iter().map(|&(j, v)| v * x[j]).sum();
        if (act - cons[ci].rhs).abs() <= ACT_TOL * xscale {
            try_add(ci, &cons, &mut w, &mut wrows, &mut in_w, true);
        }
    }

    let mut grad = vec![0.0; n];
    let mut step = vec![0.0; n];
    let mut lam: Vec<f64> = Vec::new();
    let max_iter = opts.max_iter.max(100);
    // Degenerate working-set churn (parallel rows swapping in and out)
    // makes no primal progress; since the objective is convex the point is
    // then already stationary, so bail out rather than cycle.
    let mut stall = 0usize;
    let mut last_obj = f64::INFINITY;
    for _ in 0..max_iter {
        let obj_now = p.objective_at(&x);
        if obj_now < last_obj - 1e-12 * (1.0 + last_obj.abs()) {
            last_obj = obj_now;
            stall = 0;
        } else {
            stall += 1;
            if stall > 200 {
                let mut lam_pad = lam.clone();
                lam_pad.resize(w.len(), 0.0);
                return Ok(finish(p, &cons, &w, &lam_pad, x, opts));
            }
        }
        for j in 0..n {
            let mut g = p.obj[j];
            for i in 0..n {
                g += q[j * n + i] * x[i];
            }
            grad[j] = g;
        }
        let k = w.len();
        lam.clear();
        lam.resize(k, 0.0);
        if diag_pos {
            // Normal equations: (A D^-1 A') lam = -A D^-1 g, p = -D^-1 (g + A' lam).
            let mut m = vec![0.0; k * k];
            let mut rhs = vec![0.0; k];
            for a in 0..k {
                for b in a..k {
                    let mut s = 0.0;
                    for j in 0..n {
                        s += wrows[a * n + j] * wrows[b * n + j] / q[j * n + j];
                    }
                    m[a * k + b] = s;
                    m[b * k + a] = s;
                }
                let mut s = 0.0;
                for j in 0..n {
                    s += wrows[a * n + j] * grad[j] / q[j * n + j];
                }
                rhs[a] = -s;
            }
            if k > 0 {
                if lu_solve(&mut m, &mut rhs, k).is_err() {
                    // Near-dependent working set (duplicate or parallel
                    // rows); drop the most recent inequality and retry.
                    if drop_last_inequality(&cons, &mut w, &mut wrows, &mut in_w, n) {
                        continue;
                    }
                    return Err(LpError::NumericalBreakdown(
                        "dependent equality working set in qp".into(),
                    ));
                }
                lam.copy_from_slice(&rhs);
            }
            for j in 0..n {
                let mut s = grad[j];
                for a in 0..k {
                    s += wrows[a * n + j] * lam[a];
                }
                step[j] = -s / q[j * n + j];
            }
        } else {
            // Full KKT: [[Q, A'],[A, 0]] [p; lam] = [-g; 0].
            let dim = n + k;
            let mut m = vec![0.0; dim * dim];
            let mut rhs = vec![0.0; dim];
            for i in 0..n {
                for j in 0..n {
                    m[i * dim + j] = q[i * n + j];
                }
                rhs[i] = -grad[i];
            }
            for a in 0..k {
                for j in 0..n {
                    m[j * dim + n + a] = wrows[a * n + j];
                    m[(n + a) * dim + j] = wrows[a * n + j];
                }
            }
            if lu_solve(&mut m, &mut rhs, dim).is_err() {
                if drop_last_inequality(&cons, &mut w, &mut wrows, &mut in_w, n) {
                    continue;
                }
                return Err(LpError::NumericalBreakdown(
                    "dependent equality working set in qp".into(),
                ));
            }
            step[..n].copy_from_slice(&rhs[..n]);
            lam.copy_from_slice(&rhs[n..]);
        }

        let pmax = step.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if pmax <= STEP_TOL * xscale {
            // Stationary on the working set; check multipliers.
            let mut drop: Option<(usize, f64)> = None;
            for (a, &ci) in w.iter().enumerate() {
                if cons[ci].eq {
                    continue;
                }
                if lam[a] < -opts.opt_tol && drop.map_or(true, |(_, l)| lam[a] < l) {
                    drop = Some((a, lam[a]));
                }
            }
            match drop {
                None => {
                    return Ok(finish(p, &cons, &w, &lam, x, opts));
                }
                Some((a, _)) => {
                    let ci = w.remove(a);
                    in_w[ci] = false;
                    wrows.drain(a * n..(a + 1) * n);
                }
            }
            continue;
        }

        // Ratio test over inactive inequalities.
        let mut alpha = 1.0f64;
        let mut block: Option<usize> = None;
        for (ci, con) in cons.iter().enumerate() {
            if in_w[ci] || con.eq {
                continue;
            }
            let ap: f64 = con.terms.iter().map(|&(j, v)| v * step[j]).sum();
            if ap > STEP_TOL {
                let ax: f64 = con.terms.iter().map(|&(j, v)| v * x[j]).sum();
                let t = ((con.rhs - ax) / ap).max(0.0);
                if t < alpha - 1e-12 {
                    alpha = t;
                    block = Some(ci);
                }
            }
        }
        for j in 0..n {
            x[j] += alpha * step[j];
        }
        // The step is only orthogonal to the working set up to rounding,
        // and degenerate iterations let that error accumulate into a real
        // bound violation. Snap x back onto the working-set rows:
        // x += A_w' (A_w A_w')^-1 (b_w - A_w x).
        let k = w.len();
        if k > 0 {
            let mut gram = vec![0.0; k * k];
            let mut resid = vec![0.0; k];
            for a in 0..k {
                for b in a..k {
                    let mut s = 0.0;
                    for j in 0..n {
                        s += wrows[a * n + j] * wrows[b * n + j];
                    }
                    gram[a * k + b] = s;
                    gram[b * k + a] = s;
                }
                gram[a * k + a] += 1e-12;
                let ax: f64 = (0..n).map(|j| wrows[a * n + j] * x[j]).sum();
                resid[a] = cons[w[a]].rhs - ax;
            }
            if lu_solve(&mut gram, &mut resid, k).is_ok() {
                let mut corr = vec![0.0; n];
                let mut dmax = 0.0f64;
                for (j, c) in corr.iter_mut().enumerate() {
                    for a in 0..k {
                        *c += wrows[a * n + j] * resid[a];
                    }
                    dmax = dmax.max(c.abs());
                }
                // An ill-conditioned Gram system can blow the correction
                // up; only genuine drift repair (small moves) is safe.
                if dmax <= 1e-4 * xscale {
                    for j in 0..n {
                        x[j] += corr[j];
                    }
                }
            }
        }
        if let Some(ci) = block {
            // a'p > 0 while A_w p = 0 makes the row independent of the
            // working set in exact arithmetic, but duplicated or parallel
            // constraints can break that numerically. In that case swap
            // out the working-set inequality carrying the dependency.
            if !try_add(ci, &cons, &mut w, &mut wrows, &mut in_w, true) {
                let mut row = vec![0.0; n];
                for &(j, v) in &cons[ci].terms {
                    row[j] += v;
                }
                let k = w.len();
                let mut gram = vec![0.0; k * k];
                let mut mu = vec![0.0; k];
                for a in 0..k {
                    for b in 0..k {
                        let mut s = 0.0;
                        for j in 0..n {
                            s += wrows[a * n + j] * wrows[b * n + j];
                        }
                        gram[a * k + b] = s;
                    }
                    gram[a * k + a] += 1e-12;
                    let mut s = 0.0;
                    for j in 0..n {
                        s += wrows[a * n + j] * row[j];
                    }
                    mu[a] = s;
                }
                let solved = k > 0 && lu_solve(&mut gram, &mut mu, k).is_ok();
                let victim = if solved {
                    (0..k)
                        .filter(|&a| !cons[w[a]].eq)
                        .max_by(|&a, &b| mu[a].abs().total_cmp(&mu[b].abs()))
                } else {
                    w.iter().rposition(|&c| !cons[*&c].eq)
                };
                if let Some(a) = victim {
                    let out = w.remove(a);
                    in_w[out] = false;
                    wrows.drain(a * n..(a + 1) * n);
                    try_add(ci, &cons, &mut w, &mut wrows, &mut in_w, false);
                }
            }
        }
    }
    Ok(PrimalDualSolution {
        status: SolveStatus::IterationLimit,
        objective: p.objective_at(&x),
        primal: x,
        row_duals: vec![0.0; p.num_rows()],
        reduced_costs: vec![0.0; n],
    })
}

fn finish(
    p: &LpProblem,
    cons: &[Con],
    w: &[usize],
    lam: &[f64],
    x: Vec<f64>,
    _opts: &SolveOptions,
) -> PrimalDualSolution {
    let mut row_duals = vec![0.0; p.num_rows()];
    let mut reduced_costs = vec![0.0; p.num_cols()];
    for (a, &ci) in w.iter().enumerate() {
        let price = cons[ci].dual_sign * lam[a];
        match cons[ci].target {
            Target::Row(i) => row_duals[i] += price,
            Target::Bound(j) => reduced_costs[j] += price,
        }
    }
    // Active-set drift can leave the final point infeasible; never label
    // such a point optimal, so callers can fall back. The tolerance is
    // per constraint, relative to its own rhs, so small-scale bounds are
    // not drowned out by large coordinates elsewhere.
    let mut ok = true;
    for con in cons {
        let ax: f64 = con.terms.iter().map(|&(j, v)| v * x[j]).sum();
        let v = if con.eq {
            (ax - con.rhs).abs()
        } else {
            ax - con.rhs
        };
        if v > 1e-6 * (1.0 + con.rhs.abs()) {
            ok = false;
            break;
        }
    }
    let status = if ok {
        SolveStatus::Optimal
    } else {
        SolveStatus::IterationLimit
    };
    PrimalDualSolution {
        status,
        objective: p.objective_at(&x),
        primal: x,
        row_duals,
        reduced_costs,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> SolveOptions {
        SolveOptions::default()
    }

    #[test]
    fn unconstrained_box_minimum() {
        // min (x-1)^2 on [0,2] = x^2 - 2x + 1: minimum at x=1, value 0.
        let mut p = LpProblem::new();
        p.add_col("x", 0.0, 2.0, -2.0);
        p.obj_offset = 1.0;
        p.quad.push((0, 0, 2.0));
        let s = solve_qp(&p, &opts()).unwrap();
        assert_eq!(s.status, SolveStatus::Optimal);
        assert!((s.primal[0] - 1.0).abs() < 1e-9);
        assert!(s.objective.abs() < 1e-9);
    }

    #[test]
    fn active_bound_with_dual() {
        // min (x-5)^2 s.t. x <= 2: optimum x=2, objective 9. The bound
        // sensitivity is d/du (u-5)^2 = -6 at u=2.
        let mut p = LpProblem::new();
        p.add_col("x", 0.0, 2.0, -10.0);
        p.obj_offset = 25.0;
        p.quad.push((0, 0, 2.0));
        let s = solve_qp(&p, &opts()).unwrap();
        assert_eq!(s.status, SolveStatus::Optimal);
        assert!((s.primal[0] - 2.0).abs() < 1e-9);
        assert!((s.objective - 9.0).abs() < 1e-9);
        assert!((s.reduced_costs[0] - -6.0).abs() < 1e-7);
    }

    #[test]
    fn projection_onto_row() {
        // min ||x - (2,0)||^2 s.t. x1 + x2 >= 3: projection onto the line is
        // (2.5, 0.5).
        let mut p = LpProblem::new();
        p.add_col("x1", f64::NEG_INFINITY, f64::INFINITY, -4.0);
        p.add_col("x2", f64::NEG_INFINITY, f64::INFINITY, 0.0);
        p.quad.push((0, 0, 2.0));
        p.quad.push((1, 1, 2.0));
        p.add_row("c", vec![(0, 1.0), (1, 1.0)], RowSense::Ge, 3.0);
        let s = solve_qp(&p, &opts()).unwrap();
        assert_eq!(s.status, SolveStatus::Optimal);
        assert!((s.primal[0] - 2.5).abs() < 1e-8, "{:?}", s.primal);
        assert!((s.primal[1] - 0.5).abs() < 1e-8);
        // Shadow price: v(b) = (b-2)^2/2 at b=3 has derivative 1.
        assert!((s.row_duals[0] - 1.0).abs() < 1e-7);
    }

    #[test]
    fn nondiagonal_quadratic() {
        // min x'Qx with Q = [[2,1],[1,2]] (0.5-scaled entries 2,1,1,2 give
        // f = x1^2 + x1 x2 + x2^2) minus linear pull, inside a box.
        let mut p = LpProblem::new();
        p.add_col("x1", 0.0, 10.0, -3.0);
        p.add_col("x2", 0.0, 10.0, -3.0);
        p.quad.extend([(0, 0, 2.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, 2.0)]);
        let s = solve_qp(&p, &opts()).unwrap();
        assert_eq!(s.status, SolveStatus::Optimal);
        // Gradient zero: 2x1 + x2 = 3, x1 + 2x2 = 3 -> x = (1,1), f = -3.
        assert!((s.primal[0] - 1.0).abs() < 1e-8);
        assert!((s.primal[1] - 1.0).abs() < 1e-8);
        assert!((s.objective - -3.0).abs() < 1e-8);
    }

    #[test]
    fn infeasible_passthrough() {
        let mut p = LpProblem::new();
        p.add_col("x", 0.0, 1.0, 0.0);
        p.quad.push((0, 0, 2.0));
        p.add_row("bad", vec![(0, 1.0)], RowSense::Ge, 5.0);
        let s = solve_qp(&p, &opts()).unwrap();
        assert_eq!(s.status, SolveStatus::Infeasible);
    }
}
