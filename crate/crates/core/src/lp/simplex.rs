//! Bounded-variable revised simplex with exact vertex duals.
//!
//! Two-phase method: a composite phase 1 drives bound violations of the
//! slack basis to zero, phase 2 optimizes the true objective. Pricing is
//! Dantzig with a Bland fallback on prolonged degeneracy. The returned
//! duals are shadow prices taken at an optimal basis, which is what makes
//! the Benders cuts generated from them tight.

use super::lu::Basis;
use super::sparse::CscMat;
use super::{LpError, LpProblem, PrimalDualSolution, RowSense, SolveOptions, SolveStatus};

const ETA_LIMIT: usize = 100;
const BLAND_TRIGGER: usize = 400;
const RATIO_PIVOT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
enum VarState {
    Basic(usize),
    AtLb,
    AtUb,
    FreeAtZero,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Phase {
    One,
    Two,
}

struct Worker {
    m: usize,
    n: usize, // structural + slack
    n_struct: usize,
    mat: CscMat,
    cost: Vec<f64>,
    lb: Vec<f64>,
    ub: Vec<f64>,
    rhs: Vec<f64>,
    state: Vec<VarState>,
    basic: Vec<usize>,
    x: Vec<f64>,
    basis: Basis,
    // scratch
    col_buf: Vec<f64>,
    w: Vec<f64>,
    y: Vec<f64>,
    cb: Vec<f64>,
    feas_tol: f64,
    opt_tol: f64,
}

/// Solves a pure LP (no quadratic term) and returns a primal-dual pair.
pub fn solve_lp(p: &LpProblem, opts: &SolveOptions) -> Result<PrimalDualSolution, LpError> {
    p.check()?;
    if !p.quad.is_empty() {
        return Err(LpError::BadInput(
            "solve_lp does not accept a quadratic term; use solve_qp".into(),
        ));
    }
    let n_struct = p.num_cols();
    let m = p.num_rows();
    if m == 0 {
        return solve_unconstrained(p);
    }

    // column-wise structural matrix, duplicate terms summed
    let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n_struct];
    for (i, row) in p.rows.iter().enumerate() {
        for &(j, v) in &row.terms {
            if v != 0.0 {
                cols[j].push((i, v));
            }
        }
    }
    for col in cols.iter_mut() {
        col.sort_unstable_by_key(|e| e.0);
        col.dedup_by(|b, a| {
            if a.0 == b.0 {
                a.1 += b.1;
                true
            } else {
                false
            }
        });
        col.retain(|e| e.1 != 0.0);
    }

    // geometric-mean equilibration on the structural part
    let mut row_scale = vec![1.0f64; m];
    let mut col_scale = vec![1.0f64; n_struct];
    if opts.scale {
        for _ in 0..2 {
            let mut rmin = vec![f64::INFINITY; m];
            let mut rmax = vec![0.0f64; m];
            for (j, col) in cols.iter().enumerate() {
                for &(i, v) in col {
                    let a = (v * row_scale[i] * col_scale[j]).abs();
                    rmin[i] = rmin[i].min(a);
                    rmax[i] = rmax[i].max(a);
                }
            }
            for i in 0..m {
                if rmax[i] > 0.0 {
                    row_scale[i] /= (rmin[i] * rmax[i]).sqrt();
                }
            }
            let mut cmin = vec![f64::INFINITY; n_struct];
            let mut cmax = vec![0.0f64; n_struct];
            for (j, col) in cols.iter().enumerate() {
                for &(i, v) in col {
                    let a = (v * row_scale[i] * col_scale[j]).abs();
                    cmin[j] = cmin[j].min(a);
                    cmax[j] = cmax[j].max(a);
                }
            }
            for j in 0..n_struct {
                if cmax[j] > 0.0 {
                    col_scale[j] /= (cmin[j] * cmax[j]).sqrt();
                }
            }
        }
    }

    let n = n_struct + m;
    let build_worker = |row_scale: &[f64], col_scale: &[f64]| -> Worker {
        let mut all_cols: Vec<Vec<(usize, f64)>> = Vec::with_capacity(n);
        for (j, col) in cols.iter().enumerate() {
            all_cols.push(
                col.iter()
                    .map(|&(i, v)| (i, v * row_scale[i] * col_scale[j]))
                    .collect(),
            );
        }
        for i in 0..m {
            all_cols.push(vec![(i, 1.0)]);
        }
        let mat = CscMat::from_columns(m, &all_cols);

        let mut cost = vec![0.0; n];
        let mut lb = vec![0.0; n];
        let mut ub = vec![0.0; n];
        for j in 0..n_struct {
            cost[j] = p.obj[j] * col_scale[j];
            lb[j] = p.lb[j] / col_scale[j];
            ub[j] = p.ub[j] / col_scale[j];
        }
        let mut rhs = vec![0.0; m];
        for (i, row) in p.rows.iter().enumerate() {
            rhs[i] = row.rhs * row_scale[i];
            let s = n_struct + i;
            match row.sense {
                RowSense::Le => {
                    lb[s] = 0.0;
                    ub[s] = f64::INFINITY;
                }
                RowSense::Ge => {
                    lb[s] = f64::NEG_INFINITY;
                    ub[s] = 0.0;
                }
                RowSense::Eq => {
                    lb[s] = 0.0;
                    ub[s] = 0.0;
                }
            }
        }

        let mut state = Vec::with_capacity(n);
        for j in 0..n_struct {
            state.push(initial_state(lb[j], ub[j]));
        }
        let mut basic = Vec::with_capacity(m);
        for i in 0..m {
            state.push(VarState::Basic(i));
            basic.push(n_struct + i);
        }

        Worker {
            m,
            n,
            n_struct,
            mat,
            cost,
            lb,
            ub,
            rhs,
            state,
            basic,
            x: vec![0.0; n],
            basis: Basis::new(m),
            col_buf: vec![0.0; m],
            w: vec![0.0; m],
            y: vec![0.0; m],
            cb: vec![0.0; m],
            feas_tol: opts.feas_tol,
            opt_tol: opts.opt_tol,
        }
    };

    let unit = vec![1.0f64; m.max(n_struct)];
    let mut wk = build_worker(&row_scale, &col_scale);
    let mut unscaled_already = !opts.scale;
    let mut status = match wk.refactorize().and_then(|_| wk.run(opts.max_iter)) {
        Ok(s) => s,
        Err(_) if opts.scale => {
            // Equilibration itself can push the arithmetic over the edge;
            // the original data is sometimes the better-behaved system.
            let mut cold = build_worker(&unit[..m], &unit[..n_struct]);
            cold.refactorize()?;
            let s = cold.run(opts.max_iter)?;
            wk = cold;
            row_scale = unit[..m].to_vec();
            col_scale = unit[..n_struct].to_vec();
            unscaled_already = true;
            s
        }
        Err(e) => return Err(e),
    };

    if !unscaled_already && status != SolveStatus::IterationLimit {
        // Scaled-space tolerances can hide true optimality violations or
        // misclassify feasibility when coefficients span many orders of
        // magnitude, so re-run in the original data warm-started from the
        // final basis. This also makes the reported duals honest.
        let mut polished = build_worker(&unit[..m], &unit[..n_struct]);
        polished.state = wk.state.clone();
        polished.basic = wk.basic.clone();
        match polished.refactorize().and_then(|_| polished.run(opts.max_iter)) {
            Ok(s) => {
                status = s;
                wk = polished;
                row_scale = unit[..m].to_vec();
                col_scale = unit[..n_struct].to_vec();
            }
            Err(_) => {
                // Warm start failed numerically; fall back to a cold
                // unscaled solve.
                let mut cold = build_worker(&unit[..m], &unit[..n_struct]);
                cold.refactorize()?;
                status = cold.run(opts.max_iter)?;
                wk = cold;
                row_scale = unit[..m].to_vec();
                col_scale = unit[..n_struct].to_vec();
            }
        }
    }

    // unscale and emit
    let mut primal = vec![0.0; n_struct];
    for j in 0..n_struct {
        primal[j] = wk.x[j] * col_scale[j];
    }
    let objective = match status {
        SolveStatus::Unbounded => f64::NEG_INFINITY,
        SolveStatus::Infeasible => f64::INFINITY,
        _ => p.objective_at(&primal),
    };
    // duals at the final basis with the true objective
    for (q, &bj) in wk.basic.iter().enumerate() {
        wk.cb[q] = wk.cost[bj];
    }
    let cb = wk.cb.clone();
    wk.basis.btran(&cb, &mut wk.y);
    let mut row_duals = vec![0.0; m];
    for i in 0..m {
        row_duals[i] = wk.y[i] * row_scale[i];
    }
    let mut reduced = vec![0.0; n_struct];
    for j in 0..n_struct {
        if let VarState::Basic(_) = wk.state[j] {
            reduced[j] = 0.0;
        } else {
            reduced[j] = (wk.cost[j] - wk.mat.col_dot(j, &wk.y)) / col_scale[j];
        }
    }
    Ok(PrimalDualSolution {
        status,
        primal,
        objective,
        row_duals,
        reduced_costs: reduced,
    })
}

fn initial_state(lb: f64, ub: f64) -> VarState {
    if lb.is_finite() && ub.is_finite() {
        if ub.abs() < lb.abs() {
            VarState::AtUb
        } else {
            VarState::AtLb
        }
    } else if lb.is_finite() {
        VarState::AtLb
    } else if ub.is_finite() {
        VarState::AtUb
    } else {
        VarState::FreeAtZero
    }
}

fn solve_unconstrained(p: &LpProblem) -> Result<PrimalDualSolution, LpError> {
    let n = p.num_cols();
    let mut primal = vec![0.0; n];
    for j in 0..n {
        let c = p.obj[j];
        primal[j] = if c > 0.0 {
            if p.lb[j].is_finite() {
                p.lb[j]
            } else {
                return unbounded(n, 0);
            }
        } else if c < 0.0 {
            if p.ub[j].is_finite() {
                p.ub[j]
            } else {
                return unbounded(n, 0);
            }
        } else if p.lb[j] <= 0.0 && p.ub[j] >= 0.0 {
            0.0
        } else if p.lb[j] > 0.0 {
            p.lb[j]
        } else {
            p.ub[j]
        };
    }
    Ok(PrimalDualSolution {
        status: SolveStatus::Optimal,
        objective: p.objective_at(&primal),
        reduced_costs: p.obj.clone(),
        primal,
        row_duals: Vec::new(),
    })
}

fn unbounded(n: usize, m: usize) -> Result<PrimalDualSolution, LpError> {
    Ok(PrimalDualSolution {
        status: SolveStatus::Unbounded,
        primal: vec![0.0; n],
        objective: f64::NEG_INFINITY,
        row_duals: vec![0.0; m],
        reduced_costs: vec![0.0; n],
    })
}

impl Worker {
    fn refactorize(&mut self) -> Result<(), LpError> {
        // A warm (or drifted) basis can be linearly dependent. Repair it
        // by swapping the offending column for the slack of a row that
        // the independent prefix does not cover; each repair pushes the
        // first failure strictly later, so this terminates within m steps.
        let mut repairs = 0usize;
        while let Err(k) = self.basis.factorize_inner(&self.mat, &self.basic) {
            repairs += 1;
            let replacement = if repairs <= self.m {
                self.basis.unpivoted_rows().into_iter().find(|&r| {
                    !matches!(self.state[self.n_struct + r], VarState::Basic(_))
                })
            } else {
                None
            };
            let Some(r) = replacement else {
                return Err(LpError::NumericalBreakdown(
                    "unable to repair singular basis".into(),
                ));
            };
            let old = self.basic[k];
            self.basic[k] = self.n_struct + r;
            self.state[self.n_struct + r] = VarState::Basic(k);
            self.state[old] = if self.lb[old].is_finite() {
                VarState::AtLb
            } else if self.ub[old].is_finite() {
                VarState::AtUb
            } else {
                VarState::FreeAtZero
            };
        }
        self.recompute_basic_values();
        Ok(())
    }

    fn recompute_basic_values(&mut self) {
        // x_B = B^-1 (rhs - A_N x_N)
        let mut eff = self.rhs.clone();
        for j in 0..self.n {
            let v = match self.state[j] {
                VarState::Basic(_) => continue,
                VarState::AtLb => self.lb[j],
                VarState::AtUb => self.ub[j],
                VarState::FreeAtZero => 0.0,
            };
            self.x[j] = v;
            if v != 0.0 {
                let (rows, vals) = self.mat.col(j);
                for (&r, &a) in rows.iter().zip(vals) {
                    eff[r] -= a * v;
                }
            }
        }
        let mut xb = vec![0.0; self.m];
        self.basis.ftran(&eff, &mut xb);
        for (q, &bj) in self.basic.iter().enumerate() {
            self.x[bj] = xb[q];
        }
    }

    /// Feasibility tolerance for a violation of this variable's lower
    /// bound (relative to the bound's own magnitude, not problem-wide
    /// data, so small-scale variables stay honest next to large rhs).
    fn lb_tol(&self, j: usize) -> f64 {
        self.feas_tol * (1.0 + self.lb[j].abs())
    }

    fn ub_tol(&self, j: usize) -> f64 {
        self.feas_tol * (1.0 + self.ub[j].abs())
    }

    /// Basic values within `mult` times the per-variable tolerance. Phase 1
    /// targets mult = 1; acceptance tests use a looser multiple, since the
    /// last digits are not reachable on ill-conditioned bases and demanding
    /// them just makes the two phases ping-pong.
    fn is_feasible_within(&self, mult: f64) -> bool {
        self.basic.iter().all(|&bj| {
            let v = self.x[bj];
            v >= self.lb[bj] - mult * self.lb_tol(bj) && v <= self.ub[bj] + mult * self.ub_tol(bj)
        })
    }

    fn run(&mut self, max_iter: usize) -> Result<SolveStatus, LpError> {
        const ACCEPT: f64 = 100.0;
        let mut phase = if self.is_feasible_within(1.0) {
            Phase::Two
        } else {
            Phase::One
        };
        // Phase 2 can drift a basic variable off its bound; when its
        // "optimal" point is not actually feasible we return to phase 1
        // a bounded number of times instead of reporting it.
        let mut feas_restarts = 0usize;
        let mut bland = false;
        let mut degenerate_streak = 0usize;
        let mut iters = 0usize;
        let mut p1_rescues = 0usize;

        loop {
            if iters >= max_iter {
                return Ok(SolveStatus::IterationLimit);
            }
            iters += 1;

            // pricing vector
            match phase {
                Phase::One => {
                    for (q, &bj) in self.basic.iter().enumerate() {
                        let v = self.x[bj];
                        self.cb[q] = if v < self.lb[bj] - self.lb_tol(bj) {
                            -1.0
                        } else if v > self.ub[bj] + self.ub_tol(bj) {
                            1.0
                        } else {
                            0.0
                        };
                    }
                }
                Phase::Two => {
                    for (q, &bj) in self.basic.iter().enumerate() {
                        self.cb[q] = self.cost[bj];
                    }
                }
            }
            let cb = self.cb.clone();
            self.basis.btran(&cb, &mut self.y);

            let entering = self.price(phase, bland);
            let Some((enter, dir, _score)) = entering else {
                match phase {
                    Phase::One => {
                        if self.is_feasible_within(ACCEPT) {
                            phase = Phase::Two;
                            bland = false;
                            degenerate_streak = 0;
                            continue;
                        }
                        return Ok(SolveStatus::Infeasible);
                    }
                    Phase::Two => {
                        // Trust but verify: recompute the basic values at
                        // a fresh factorization before declaring victory.
                        self.refactorize()?;
                        if self.is_feasible_within(ACCEPT) {
                            return Ok(SolveStatus::Optimal);
                        }
                        feas_restarts += 1;
                        if feas_restarts > 5 {
                            return Err(LpError::NumericalBreakdown(
                                "phase 2 could not hold feasibility".into(),
                            ));
                        }
                        phase = Phase::One;
                        bland = true;
                        degenerate_streak = 0;
                        continue;
                    }
                }
            };

            // direction through the basis
            self.col_buf.iter_mut().for_each(|v| *v = 0.0);
            {
                let (rows, vals) = self.mat.col(enter);
                for (&r, &v) in rows.iter().zip(vals) {
                    self.col_buf[r] = v;
                }
            }
            let col_buf = self.col_buf.clone();
            self.basis.ftran(&col_buf, &mut self.w);

            let ratio = self.ratio_test(enter, dir, phase);
            let Some((t, leave)) = ratio else {
                match phase {
                    Phase::One => {
                        // The infeasibility sum is bounded below, so a
                        // direction that never blocks means the pricing
                        // signal is stale numerics (eta-file drift).
                        // Rebuild the factorization and re-price.
                        p1_rescues += 1;
                        if p1_rescues > 3 {
                            return Err(LpError::NumericalBreakdown(
                                "unbounded phase-1 direction".into(),
                            ));
                        }
                        self.refactorize()?;
                        bland = true;
                        continue;
                    }
                    Phase::Two => return Ok(SolveStatus::Unbounded),
                }
            };

            if t <= 1e-10 {
                degenerate_streak += 1;
                if degenerate_streak > BLAND_TRIGGER {
                    bland = true;
                }
            } else {
                degenerate_streak = 0;
                if bland {
                    bland = false;
                }
            }

            // apply step
            let step = dir * t;
            self.x[enter] += step;
            for q in 0..self.m {
                if self.w[q] != 0.0 {
                    let bj = self.basic[q];
                    self.x[bj] -= step * self.w[q];
                }
            }

            match leave {
                Leave::BoundFlip => {
                    self.state[enter] = if dir > 0.0 {
                        self.x[enter] = self.ub[enter];
                        VarState::AtUb
                    } else {
                        self.x[enter] = self.lb[enter];
                        VarState::AtLb
                    };
                }
                Leave::Basic(q, to_upper) => {
                    let out = self.basic[q];
                    self.state[out] = if to_upper {
                        self.x[out] = self.ub[out];
                        VarState::AtUb
                    } else {
                        self.x[out] = self.lb[out];
                        VarState::AtLb
                    };
                    self.basic[q] = enter;
                    self.state[enter] = VarState::Basic(q);
                    let w = self.w.clone();
                    if !self.basis.push_eta(q, &w) || self.basis.num_etas() >= ETA_LIMIT {
                        self.refactorize()?;
                    }
                }
            }

            // periodic hygiene refactorization keeps drift in check
            if iters % 997 == 0 {
                self.refactorize()?;
            }
        }
    }

    /// Picks the entering variable. Returns (column, direction, score).
    fn price(&self, phase: Phase, bland: bool) -> Option<(usize, f64, f64)> {
        let mut best: Option<(usize, f64, f64)> = None;
        for j in 0..self.n {
            let (dir, eligible) = match self.state[j] {
                VarState::Basic(_) => continue,
                VarState::AtLb => (1.0, true),
                VarState::AtUb => (-1.0, true),
                VarState::FreeAtZero => (0.0, true),
            };
            if !eligible {
                continue;
            }
            let cj = match phase {
                Phase::One => 0.0,
                Phase::Two => self.cost[j],
            };
            let d = cj - self.mat.col_dot(j, &self.y);
            let (dir, score) = match self.state[j] {
                VarState::AtLb => {
                    if d < -self.opt_tol {
                        (dir, -d)
                    } else {
                        continue;
                    }
                }
                VarState::AtUb => {
                    if d > self.opt_tol {
                        (dir, d)
                    } else {
                        continue;
                    }
                }
                VarState::FreeAtZero => {
                    if d.abs() > self.opt_tol {
                        (-d.signum(), d.abs())
                    } else {
                        continue;
                    }
                }
                VarState::Basic(_) => unreachable!(),
            };
            if bland {
                return Some((j, dir, score));
            }
            if best.map_or(true, |(_, _, s)| score > s) {
                best = Some((j, dir, score));
            }
        }
        best
    }

    /// Ratio test. Returns the step length and the leaving event.
    fn ratio_test(&self, enter: usize, dir: f64, phase: Phase) -> Option<(f64, Leave)> {
        // entering variable's own range
        let mut t_best = if dir > 0.0 {
            self.ub[enter] - self.x[enter]
        } else if dir < 0.0 {
            self.x[enter] - self.lb[enter]
        } else {
            f64::INFINITY
        };
        if !t_best.is_finite() {
            t_best = f64::INFINITY;
        }
        let mut leave = Leave::BoundFlip;
        let mut best_piv = 0.0f64;

        for q in 0..self.m {
            let wq = self.w[q];
            if wq.abs() < RATIO_PIVOT_TOL {
                continue;
            }
            let bj = self.basic[q];
            let xv = self.x[bj];
            let delta = -dir * wq; // movement rate of this basic variable
            let (limit, to_upper) = if phase == Phase::One && xv < self.lb[bj] - self.lb_tol(bj) {
                if delta > 0.0 {
                    ((self.lb[bj] - xv) / delta, false)
                } else {
                    continue;
                }
            } else if phase == Phase::One && xv > self.ub[bj] + self.ub_tol(bj) {
                if delta < 0.0 {
                    ((self.ub[bj] - xv) / delta, true)
                } else {
                    continue;
                }
            } else if delta > 0.0 {
                if self.ub[bj].is_finite() {
                    (((self.ub[bj] - xv) / delta).max(0.0), true)
                } else {
                    continue;
                }
            } else {
                if self.lb[bj].is_finite() {
                    (((self.lb[bj] - xv) / delta).max(0.0), false)
                } else {
                    continue;
                }
            };
            let limit = limit.max(0.0);
            // strict improvement, or a larger pivot within the tie window
            let better = limit < t_best - 1e-10
                || (limit <= t_best + 1e-10 && wq.abs() > best_piv);
            if better {
                t_best = t_best.min(limit);
                leave = Leave::Basic(q, to_upper);
                best_piv = wq.abs();
            }
        }
        if !t_best.is_finite() {
            return None;
        }
        Some((t_best.max(0.0), leave))
    }
}

#[derive(Debug, Clone, Copy)]
enum Leave {
    BoundFlip,
    Basic(usize, bool),
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> SolveOptions {
        SolveOptions::default()
    }

    #[test]
    fn one_variable_bound_row() {
        // min x s.t. x >= 3
        let mut p = LpProblem::new();
        let x = p.add_col("x", f64::NEG_INFINITY, f64::INFINITY, 1.0);
        p.add_row("r0", vec![(x, 1.0)], RowSense::Ge, 3.0);
        let s = solve_lp(&p, &opts()).unwrap();
        assert_eq!(s.status, SolveStatus::Optimal);
        assert!((s.objective - 3.0).abs() < 1e-9);
        assert!((s.row_duals[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn degenerate_vertex_dual() {
        // min x1+x2 s.t. x1+x2 >= 1, x >= 0
        let mut p = LpProblem::new();
        let x1 = p.add_col("x1", 0.0, f64::INFINITY, 1.0);
        let x2 = p.add_col("x2", 0.0, f64::INFINITY, 1.0);
        p.add_row("r0", vec![(x1, 1.0), (x2, 1.0)], RowSense::Ge, 1.0);
        let s = solve_lp(&p, &opts()).unwrap();
        assert_eq!(s.status, SolveStatus::Optimal);
        assert!((s.objective - 1.0).abs() < 1e-9);
        assert!((s.row_duals[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn equality_and_upper_bounds() {
        // min -2x - 3y s.t. x + y = 4, x <= 3, y <= 3
        let mut p = LpProblem::new();
        let x = p.add_col("x", 0.0, 3.0, -2.0);
        let y = p.add_col("y", 0.0, 3.0, -3.0);
        p.add_row("bal", vec![(x, 1.0), (y, 1.0)], RowSense::Eq, 4.0);
        let s = solve_lp(&p, &opts()).unwrap();
        assert_eq!(s.status, SolveStatus::Optimal);
        assert!((s.primal[0] - 1.0).abs() < 1e-8);
        assert!((s.primal[1] - 3.0).abs() < 1e-8);
        assert!((s.objective + 11.0).abs() < 1e-8);
    }

    #[test]
    fn detects_infeasible() {
        let mut p = LpProblem::new();
        let x = p.add_col("x", 0.0, 1.0, 1.0);
        p.add_row("r0", vec![(x, 1.0)], RowSense::Ge, 2.0);
        let s = solve_lp(&p, &opts()).unwrap();
        assert_eq!(s.status, SolveStatus::Infeasible);
    }

    #[test]
    fn detects_unbounded() {
        let mut p = LpProblem::new();
        let x = p.add_col("x", 0.0, f64::INFINITY, -1.0);
        p.add_row("r0", vec![(x, -1.0)], RowSense::Le, 0.0);
        let s = solve_lp(&p, &opts()).unwrap();
        assert_eq!(s.status, SolveStatus::Unbounded);
    }

    #[test]
    fn free_variable_equality() {
        // min x s.t. x + y = 2, y <= 1 (y free below) => x = 1 at y = 1? y free: min x => y as large as allowed
        let mut p = LpProblem::new();
        let x = p.add_col("x", 0.0, f64::INFINITY, 1.0);
        let y = p.add_col("y", f64::NEG_INFINITY, 1.0, 0.0);
        p.add_row("bal", vec![(x, 1.0), (y, 1.0)], RowSense::Eq, 2.0);
        let s = solve_lp(&p, &opts()).unwrap();
        assert_eq!(s.status, SolveStatus::Optimal);
        assert!((s.objective - 1.0).abs() < 1e-8);
    }
}
