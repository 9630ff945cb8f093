//! Level-set regularization of the Benders planning problem, plus the
//! two-stage procedure for integer builds.
//!
//! Each iteration first solves the unrestricted planning problem for a
//! valid lower bound L, then picks the next trial point from the level set
//! { planning-feasible v : objective(v) <= L + alpha (U - L) } by one of
//! three rules: the l2 projection of the previous iterate, the interior
//! (Chebyshev or analytic) center, or an l-infinity trust-region step
//! around the incumbent.

use std::time::Instant;

use crate::benders::{
    evaluate_point, solve_planning, BendersConfig, BendersError, BendersResult,
    Cut, IterRecord, MasterState,
};
use crate::lp::{
    analytic_center, chebyshev_center, solve_lp, solve_qp, CenterMode, LpProblem, RowSense,
    SolveStatus,
};
use crate::reformulate::BlockProblem;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegKind {
    L2,
    Interior,
    TrustRegion,
}

impl RegKind {
    pub fn label(self) -> &'static str {
        match self {
            RegKind::L2 => "l2",
            RegKind::Interior => "int",
            RegKind::TrustRegion => "tr",
        }
    }
}

#[derive(Debug, Clone)]
pub struct RegConfig {
    pub kind: RegKind,
    /// Level parameter in the open interval (0, 1).
    pub alpha: f64,
    pub base: BendersConfig,
    /// Interior-point flavor for `RegKind::Interior`.
    pub center_mode: CenterMode,
    /// Trust-region controls (initial radius as a fraction of the planning
    /// variable range, growth and shrink factors, radius floor).
    pub tr_init_frac: f64,
    pub tr_grow: f64,
    pub tr_shrink: f64,
    pub tr_min: f64,
}

impl RegConfig {
    pub fn new(kind: RegKind, alpha: f64) -> Self {
        RegConfig {
            kind,
            alpha,
            base: BendersConfig::default(),
            center_mode: CenterMode::Chebyshev,
            tr_init_frac: 0.2,
            tr_grow: 2.0,
            tr_shrink: 0.5,
            tr_min: 1e-4,
        }
    }
}

/// Level target L + alpha (U - L). Rejects inverted bounds, which indicate
/// an invalid cut or a corrupted incumbent.
pub fn level_set_bound(l: f64, u: f64, alpha: f64) -> Result<f64, BendersError> {
    if !(0.0..=1.0).contains(&alpha) || alpha == 0.0 || alpha == 1.0 {
        return Err(BendersError::AlphaOutOfRange(alpha));
    }
    if u < l - 1e-6 * l.abs() {
        return Err(BendersError::BoundOrder { u, l });
    }
    Ok(l + alpha * (u - l))
}

/// Planning feasible set with cuts, the value-function columns, and the
/// level row objective <= l_alpha. Integer pins fix columns in place.
fn level_polytope(
    bp: &BlockProblem,
    cuts: &[Cut],
    l_alpha: f64,
    pins: &[(usize, f64)],
) -> (LpProblem, Vec<usize>) {
    let (mut lp, thetas, _) = crate::benders::build_planning_problem(bp, cuts, false);
    let mut terms: Vec<(usize, f64)> = lp
        .obj
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != 0.0)
        .map(|(j, c)| (j, *c))
        .collect();
    // Normalized like the cut rows, for the planning basis' conditioning.
    let scale = terms
        .iter()
        .fold(0.0f64, |m, &(_, v)| m.max(v.abs()))
        .max(1.0);
    for t in terms.iter_mut() {
        t.1 /= scale;
    }
    lp.add_row(
        "level",
        terms,
        RowSense::Le,
        (l_alpha - lp.obj_offset) / scale,
    );
    for &(j, v) in pins {
        lp.lb[j] = v;
        lp.ub[j] = v;
    }
    (lp, thetas)
}

/// l2 projection of the previous iterate onto the level set. The quadratic
/// acts on the planning variables only; value-function columns get a tiny
/// diagonal so the KKT system stays nonsingular.
pub fn regularize_l2(
    bp: &BlockProblem,
    cuts: &[Cut],
    l_alpha: f64,
    v_prev: &[f64],
    opts: &crate::lp::SolveOptions,
) -> Result<Vec<f64>, BendersError> {
    let (mut lp, thetas) = level_polytope(bp, cuts, l_alpha, &[]);
    let nv = bp.planning.num_cols();
    lp.obj.iter_mut().for_each(|c| *c = 0.0);
    lp.obj_offset = 0.0;
    for j in 0..nv {
        lp.quad.push((j, j, 2.0));
        lp.obj[j] = -2.0 * v_prev[j];
    }
    for &t in &thetas {
        lp.quad.push((t, t, 1e-8));
    }
    let sol = solve_qp(&lp, opts)?;
    if sol.status != SolveStatus::Optimal {
        return Err(BendersError::Planning(sol.status));
    }
    Ok(sol.primal[..nv].to_vec())
}

/// Interior center of the level set; returns the planning part of the
/// center and the Chebyshev radius.
pub fn regularize_interior(
    bp: &BlockProblem,
    cuts: &[Cut],
    l_alpha: f64,
    pins: &[(usize, f64)],
    mode: CenterMode,
    opts: &crate::lp::SolveOptions,
) -> Result<(Vec<f64>, f64), BendersError> {
    let (lp, _thetas) = level_polytope(bp, cuts, l_alpha, &[]);
    let nv = bp.planning.num_cols();
    let center = match mode {
        CenterMode::Chebyshev => chebyshev_center(&lp, pins, opts)?,
        CenterMode::Analytic => analytic_center(&lp, pins, opts)?,
    };
    Ok((center.point[..nv].to_vec(), center.radius))
}

/// Planning solve restricted to an l-infinity box around the incumbent.
pub fn regularize_trust_region(
    bp: &BlockProblem,
    cuts: &[Cut],
    center: &[f64],
    radius: f64,
    opts: &crate::lp::SolveOptions,
) -> Result<Vec<f64>, BendersError> {
    let (mut lp, _thetas, _) = crate::benders::build_planning_problem(bp, cuts, false);
    let nv = bp.planning.num_cols();
    for j in 0..nv {
        lp.lb[j] = lp.lb[j].max(center[j] - radius);
        lp.ub[j] = lp.ub[j].min(center[j] + radius);
        if lp.lb[j] > lp.ub[j] {
            // Keep the box consistent if the incumbent sits on a bound.
            let v = center[j].clamp(bp.planning.lb[j], bp.planning.ub[j]);
            lp.lb[j] = v;
            lp.ub[j] = v;
        }
    }
    let sol = solve_lp(&lp, opts)?;
    if sol.status != SolveStatus::Optimal {
        return Err(BendersError::Planning(sol.status));
    }
    Ok(sol.primal[..nv].to_vec())
}

/// Spread of the finite planning bounds, used to size the initial trust
/// region.
fn planning_range(bp: &BlockProblem) -> f64 {
    let mut range: f64 = 1.0;
    for j in 0..bp.planning.num_cols() {
        if bp.planning.ub[j].is_finite() {
            range = range.max(bp.planning.ub[j] - bp.planning.lb[j]);
        }
    }
    range
}

/// Regularized Benders decomposition (continuous planning problem).
pub fn run_regularized(bp: &BlockProblem, cfg: &RegConfig) -> Result<BendersResult, BendersError> {
    if !(cfg.alpha > 0.0 && cfg.alpha < 1.0) {
        return Err(BendersError::AlphaOutOfRange(cfg.alpha));
    }
    let start = Instant::now();
    let mut state = MasterState::new();
    let mut converged = false;
    let mut iterations = 0;
    let range = planning_range(bp);
    let mut radius = cfg.tr_init_frac * range;
    let mut v_prev: Option<Vec<f64>> = None;

    for iter in 0..cfg.base.max_iter {
        iterations = iter + 1;
        let (master_point, _thetas, _obj, bound) = solve_planning(bp, &state.cuts, &cfg.base)?;
        state.best_l = state.best_l.max(bound);

        let mut r_star = None;
        let mut l_alpha_used = None;
        let point = if state.best_u.is_finite() {
            let l_alpha = level_set_bound(state.best_l, state.best_u, cfg.alpha)?;
            l_alpha_used = Some(l_alpha);
            match cfg.kind {
                RegKind::L2 => {
                    let prev = v_prev.as_deref().unwrap_or(&master_point);
                    match regularize_l2(bp, &state.cuts, l_alpha, prev, &cfg.base.solve_opts) {
                        Ok(p) => p,
                        // A projection the QP could not finish cleanly is
                        // not worth failing the run for; the plain master
                        // step is always a sound substitute.
                        Err(BendersError::Planning(SolveStatus::IterationLimit)) => {
                            master_point.clone()
                        }
                        Err(e) => return Err(e),
                    }
                }
                RegKind::Interior => {
                    match regularize_interior(
                        bp,
                        &state.cuts,
                        l_alpha,
                        &[],
                        cfg.center_mode,
                        &cfg.base.solve_opts,
                    ) {
                        Ok((p, r)) => {
                            r_star = Some(r);
                            p
                        }
                        // Near convergence the level set collapses to a
                        // sliver the centering LP can reject; the plain
                        // master step is always available.
                        Err(BendersError::Lp(crate::lp::LpError::Infeasible)) => {
                            master_point.clone()
                        }
                        Err(e) => return Err(e),
                    }
                }
                RegKind::TrustRegion => {
                    let center = if state.incumbent.is_empty() {
                        &master_point
                    } else {
                        &state.incumbent
                    };
                    let center = center.clone();
                    regularize_trust_region(
                        bp,
                        &state.cuts,
                        &center,
                        radius,
                        &cfg.base.solve_opts,
                    )?
                }
            }
        } else {
            // No incumbent yet: take the plain planning step.
            master_point.clone()
        };

        let u_before = state.best_u;
        evaluate_point(bp, &mut state, &point, iter, &cfg.base)?;
        if cfg.kind == RegKind::TrustRegion && u_before.is_finite() {
            if state.best_u < u_before - 1e-12 * u_before.abs() {
                radius = (radius * cfg.tr_grow).min(range);
            } else {
                radius = (radius * cfg.tr_shrink).max(cfg.tr_min);
            }
        }
        if state.best_u < state.best_l - 1e-6 * state.best_l.abs() {
            return Err(BendersError::BoundOrder {
                u: state.best_u,
                l: state.best_l,
            });
        }
        let gap = state.gap();
        let mut rec = IterRecord::plain(
            iter,
            state.best_u,
            state.best_l,
            gap,
            start.elapsed().as_secs_f64() * 1e3,
            state.cuts.len(),
        );
        rec.kind = Some(cfg.kind.label().to_string());
        rec.alpha = Some(cfg.alpha);
        rec.l_alpha = l_alpha_used;
        rec.r_star = r_star;
        if cfg.kind == RegKind::TrustRegion {
            rec.tr_radius = Some(radius);
        }
        state.trace.push(rec);
        if gap <= cfg.base.tol {
            converged = true;
            break;
        }
        v_prev = Some(point);
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

#[derive(Debug, Clone)]
pub struct TwoStageConfig {
    pub reg: RegConfig,
    /// Skip stage 1 entirely (ablation baseline).
    pub skip_stage1: bool,
    /// Stage-1 convergence tolerance; defaults to the base tolerance.
    pub stage1_tol: Option<f64>,
}

impl Default for TwoStageConfig {
    fn default() -> Self {
        TwoStageConfig {
            reg: RegConfig::new(RegKind::Interior, 0.5),
            skip_stage1: false,
            stage1_tol: None,
        }
    }
}

/// Two-stage procedure for integer builds: stage 1 runs the regularized
/// continuous decomposition to build a cut pool; stage 2 switches the
/// planning problem to a MILP, keeps every cut, and re-centers with the
/// integer columns pinned. Upper bounds in stage 2 come exclusively from
/// integer-feasible iterates; the lower bound is the MILP's proven bound.
pub fn run_two_stage(
    bp: &BlockProblem,
    cfg: &TwoStageConfig,
) -> Result<BendersResult, BendersError> {
    if !(cfg.reg.alpha > 0.0 && cfg.reg.alpha < 1.0) {
        return Err(BendersError::AlphaOutOfRange(cfg.reg.alpha));
    }
    let start = Instant::now();
    let mut state = MasterState::new();
    let mut next_iter = 0;

    if !cfg.skip_stage1 {
        let mut stage1_cfg = cfg.reg.clone();
        stage1_cfg.base.integer = false;
        if let Some(t) = cfg.stage1_tol {
            stage1_cfg.base.tol = t;
        }
        let stage1 = run_regularized(bp, &stage1_cfg)?;
        next_iter = stage1.iterations;
        state.cuts = stage1.cuts;
        for mut rec in stage1.trace {
            rec.stage = Some(1);
            state.trace.push(rec);
        }
    }

    // Stage 2: integer planning problem over the inherited cut pool. The
    // continuous bounds and incumbent do not transfer; only integer-feasible
    // points may define U here.
    let mut milp_cfg = cfg.reg.base.clone();
    milp_cfg.integer = true;
    let mut converged = false;
    let mut iterations = next_iter;
    for iter in next_iter..next_iter + cfg.reg.base.max_iter {
        iterations = iter + 1;
        let (milp_point, _thetas, _obj, bound) = solve_planning(bp, &state.cuts, &milp_cfg)?;
        state.best_l = state.best_l.max(bound);

        let mut r_star = None;
        let mut l_alpha_used = None;
        let point = if state.best_u.is_finite() {
            let l_alpha = level_set_bound(state.best_l, state.best_u, cfg.reg.alpha)?;
            l_alpha_used = Some(l_alpha);
            // Pin the integer columns at the MILP values and re-center the
            // continuous part; the result stays integer-feasible.
            let pins: Vec<(usize, f64)> = bp
                .integers
                .iter()
                .map(|&j| (j, milp_point[j].round()))
                .collect();
            match regularize_interior(
                bp,
                &state.cuts,
                l_alpha,
                &pins,
                cfg.reg.center_mode,
                &cfg.reg.base.solve_opts,
            ) {
                Ok((p, r)) => {
                    r_star = Some(r);
                    p
                }
                // The level set can be empty for these pins; fall back to
                // the MILP point itself.
                Err(BendersError::Lp(crate::lp::LpError::Infeasible)) => milp_point.clone(),
                Err(e) => return Err(e),
            }
        } else {
            milp_point.clone()
        };

        evaluate_point(bp, &mut state, &point, iter, &milp_cfg)?;
        if state.best_u < state.best_l - 1e-6 * state.best_l.abs() {
            return Err(BendersError::BoundOrder {
                u: state.best_u,
                l: state.best_l,
            });
        }
        let gap = state.gap();
        let mut rec = IterRecord::plain(
            iter,
            state.best_u,
            state.best_l,
            gap,
            start.elapsed().as_secs_f64() * 1e3,
            state.cuts.len(),
        );
        rec.kind = Some(RegKind::Interior.label().to_string());
        rec.alpha = Some(cfg.reg.alpha);
        rec.l_alpha = l_alpha_used;
        rec.r_star = r_star;
        rec.stage = Some(2);
        state.trace.push(rec);
        if gap <= cfg.reg.base.tol {
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
