//! Interior points of polyhedra: Chebyshev center (default) and an
//! analytic-center Newton iteration as an alternative mode.
//!
//! The Chebyshev center maximizes a uniform slack radius over all
//! inequalities (row-norm scaled) and finite bounds; equalities are kept as
//! hard rows. Because the radius LP can have many optimal centers, a
//! minimum-norm QP tie-break at the optimal radius makes the result unique
//! and therefore invariant to row permutation.

use super::qp::solve_qp;
use super::simplex::solve_lp;
use super::{LpError, LpProblem, RowSense, SolveOptions, SolveStatus};

/// Cap on the slack radius so unbounded regions still yield a finite center.
const RADIUS_CAP: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CenterMode {
    Chebyshev,
    Analytic,
}

#[derive(Debug, Clone)]
pub struct CenterResult {
    pub point: Vec<f64>,
    /// Maximized uniform slack radius (Chebyshev) or the minimum scaled
    /// slack at the returned point (analytic). Zero means the region is
    /// flat: feasible, but with no strict interior.
    pub radius: f64,
}

/// Build the radius-augmented system shared by both modes. Returns the LP
/// with an extra trailing column for the radius and the per-inequality row
/// norms over the free (non-fixed) columns.
fn radius_system(p: &LpProblem, fixed: &[(usize, f64)]) -> LpProblem {
    let n = p.num_cols();
    let mut is_fixed = vec![false; n];
    let mut sys = LpProblem::new();
    for j in 0..n {
        sys.add_col(p.col_names[j].clone(), p.lb[j], p.ub[j], 0.0);
    }
    for &(j, v) in fixed {
        sys.lb[j] = v;
        sys.ub[j] = v;
        is_fixed[j] = true;
    }
    let r = sys.add_col("slack_radius", 0.0, RADIUS_CAP, -1.0);

    for row in &p.rows {
        let norm: f64 = row
            .terms
            .iter()
            .filter(|&&(j, _)| !is_fixed[j])
            .map(|&(_, v)| v * v)
            .sum::<f64>()
            .sqrt();
        let mut terms = row.terms.clone();
        if row.sense != RowSense::Eq && norm > 0.0 {
            match row.sense {
                RowSense::Le => terms.push((r, norm)),
                RowSense::Ge => terms.push((r, -norm)),
                RowSense::Eq => unreachable!(),
            }
        }
        sys.add_row(row.name.clone(), terms, row.sense, row.rhs);
    }
    // Finite bounds on free columns participate in the radius; the column
    // bound itself is relaxed so the radius row is what binds.
    for j in 0..n {
        if is_fixed[j] {
            continue;
        }
        if sys.lb[j].is_finite() {
            let b = sys.lb[j];
            sys.lb[j] = f64::NEG_INFINITY;
            sys.add_row(
                format!("rad_lb_{}", p.col_names[j]),
                vec![(j, 1.0), (r, -1.0)],
                RowSense::Ge,
                b,
            );
        }
        if sys.ub[j].is_finite() {
            let b = sys.ub[j];
            sys.ub[j] = f64::INFINITY;
            sys.add_row(
                format!("rad_ub_{}", p.col_names[j]),
                vec![(j, 1.0), (r, 1.0)],
                RowSense::Le,
                b,
            );
        }
    }
    sys
}

/// Chebyshev center of the feasible region of `p` (objective ignored) with
/// the given columns pinned. Errors with `Infeasible` on an empty region.
pub fn chebyshev_center(
    p: &LpProblem,
    fixed: &[(usize, f64)],
    opts: &SolveOptions,
) -> Result<CenterResult, LpError> {
    let n = p.num_cols();
    let mut sys = radius_system(p, fixed);
    let r = n; // radius column index
    let sol = solve_lp(&sys, opts)?;
    match sol.status {
        SolveStatus::Optimal => {}
        SolveStatus::Infeasible => return Err(LpError::Infeasible),
        _ => {
            return Err(LpError::NumericalBreakdown(
                "radius LP did not solve to optimality".into(),
            ))
        }
    }
    let radius = sol.primal[r].max(0.0);

    // Tie-break: among all centers with the optimal radius, take the one of
    // minimum norm. Strict convexity makes it unique, so the result does not
    // depend on row order.
    sys.obj[r] = 0.0;
    sys.lb[r] = radius;
    sys.ub[r] = radius;
    for j in 0..n {
        sys.quad.push((j, j, 2.0));
    }
    let tie = solve_qp(&sys, opts)?;
    let point = if tie.status == SolveStatus::Optimal {
        tie.primal[..n].to_vec()
    } else {
        sol.primal[..n].to_vec()
    };
    Ok(CenterResult { point, radius })
}

/// Analytic center: damped Newton on the log-barrier of the inequality
/// slacks, staying on the equality rows, started from the Chebyshev center.
pub fn analytic_center(
    p: &LpProblem,
    fixed: &[(usize, f64)],
    opts: &SolveOptions,
) -> Result<CenterResult, LpError> {
    let start = chebyshev_center(p, fixed, opts)?;
    if start.radius <= 0.0 {
        // No strict interior: the barrier is undefined, the Chebyshev point
        // is the best we can do.
        return Ok(start);
    }
    let n = p.num_cols();
    let mut is_fixed = vec![false; n];
    for &(j, _) in fixed {
        is_fixed[j] = true;
    }
    // Inequalities as a'x <= b (dense over free columns), equalities separate.
    let mut ineq: Vec<(Vec<f64>, f64)> = Vec::new();
    let mut eqs: Vec<(Vec<f64>, f64)> = Vec::new();
    let densify = |terms: &[(usize, f64)]| {
        let mut a = vec![0.0; n];
        for &(j, v) in terms {
            a[j] += v;
        }
        a
    };
    for row in &p.rows {
        let a = densify(&row.terms);
        match row.sense {
            RowSense::Le => ineq.push((a, row.rhs)),
            RowSense::Ge => ineq.push((a.iter().map(|v| -v).collect(), -row.rhs)),
            RowSense::Eq => eqs.push((a, row.rhs)),
        }
    }
    for j in 0..n {
        if is_fixed[j] {
            continue;
        }
        if p.lb[j].is_finite() {
            let mut a = vec![0.0; n];
            a[j] = -1.0;
            ineq.push((a, -p.lb[j]));
        }
        if p.ub[j].is_finite() {
            let mut a = vec![0.0; n];
            a[j] = 1.0;
            ineq.push((a, p.ub[j]));
        }
    }
    for &(j, v) in fixed {
        let mut a = vec![0.0; n];
        a[j] = 1.0;
        eqs.push((a, v));
    }

    let mut x = start.point;
    let k = eqs.len();
    let dim = n + k;
    for _ in 0..50 {
        let mut slacks: Vec<f64> = ineq
            .iter()
            .map(|(a, b)| b - a.iter().zip(&x).map(|(u, v)| u * v).sum::<f64>())
            .collect();
        if slacks.iter().any(|&s| s <= 0.0) {
            break; // numerical drift outside; keep the last interior point
        }
        // Newton system on the barrier: H dx + A_eq' nu = -g, A_eq dx = 0.
        let mut m = vec![0.0; dim * dim];
        let mut rhs = vec![0.0; dim];
        for (ai, (a, _)) in ineq.iter().enumerate() {
            let s = slacks[ai];
            for i in 0..n {
                if a[i] == 0.0 {
                    continue;
                }
                rhs[i] -= a[i] / s;
                for j in 0..n {
                    if a[j] != 0.0 {
                        m[i * dim + j] += a[i] * a[j] / (s * s);
                    }
                }
            }
        }
        // Regularize fixed/untouched coordinates so the KKT matrix stays
        // nonsingular.
        for i in 0..n {
            m[i * dim + i] += 1e-12;
        }
        for (e, (a, _)) in eqs.iter().enumerate() {
            for j in 0..n {
                m[(n + e) * dim + j] = a[j];
                m[j * dim + n + e] = a[j];
            }
        }
        super::dense::lu_solve(&mut m, &mut rhs, dim)?;
        let dx = &rhs[..n];
        let dxmax = dx.iter().fold(0.0f64, |mx, v| mx.max(v.abs()));
        if dxmax < 1e-10 {
            break;
        }
        // Step keeping all slacks strictly positive.
        let mut t = 1.0f64;
        for (ai, (a, _)) in ineq.iter().enumerate() {
            let adx: f64 = a.iter().zip(dx).map(|(u, v)| u * v).sum();
            if adx > 0.0 {
                t = t.min(0.99 * slacks[ai] / adx);
            }
        }
        for j in 0..n {
            x[j] += t * dx[j];
        }
        slacks.clear();
    }
    // Report the minimum scaled slack at the analytic center.
    let mut radius = f64::INFINITY;
    for (a, b) in &ineq {
        let norm: f64 = a
            .iter()
            .enumerate()
            .filter(|&(j, _)| !is_fixed[j])
            .map(|(_, v)| v * v)
            .sum::<f64>()
            .sqrt();
        if norm > 0.0 {
            let s = b - a.iter().zip(&x).map(|(u, v)| u * v).sum::<f64>();
            radius = radius.min(s / norm);
        }
    }
    if !radius.is_finite() {
        radius = start.radius;
    }
    Ok(CenterResult {
        point: x,
        radius: radius.max(0.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> SolveOptions {
        SolveOptions::default()
    }

    #[test]
    fn unit_square_center() {
        let mut p = LpProblem::new();
        p.add_col("x", 0.0, 1.0, 0.0);
        p.add_col("y", 0.0, 1.0, 0.0);
        let c = chebyshev_center(&p, &[], &opts()).unwrap();
        assert!((c.point[0] - 0.5).abs() < 1e-8);
        assert!((c.point[1] - 0.5).abs() < 1e-8);
        assert!((c.radius - 0.5).abs() < 1e-8);
    }

    #[test]
    fn triangle_incenter() {
        // x >= 0, y >= 0, x + y <= 1: incenter at (r, r), r = 1/(2+sqrt(2)).
        let mut p = LpProblem::new();
        p.add_col("x", 0.0, f64::INFINITY, 0.0);
        p.add_col("y", 0.0, f64::INFINITY, 0.0);
        p.add_row("cap", vec![(0, 1.0), (1, 1.0)], RowSense::Le, 1.0);
        let c = chebyshev_center(&p, &[], &opts()).unwrap();
        let r = 1.0 / (2.0 + 2.0f64.sqrt());
        assert!((c.radius - r).abs() < 1e-8, "radius {}", c.radius);
        assert!((c.point[0] - r).abs() < 1e-8);
        assert!((c.point[1] - r).abs() < 1e-8);
    }

    #[test]
    fn fixed_coordinate_pins_centering() {
        // Box [0,1]^2 with y1 fixed at 1: center the free coordinate only.
        let mut p = LpProblem::new();
        p.add_col("y1", 0.0, 1.0, 0.0);
        p.add_col("y2", 0.0, 1.0, 0.0);
        p.add_row("lvl", vec![(0, 1.0), (1, 1.0)], RowSense::Le, 2.0);
        let c = chebyshev_center(&p, &[(0, 1.0)], &opts()).unwrap();
        assert!((c.point[0] - 1.0).abs() < 1e-9);
        assert!((c.point[1] - 0.5).abs() < 1e-8, "{:?}", c.point);
    }

    #[test]
    fn row_permutation_invariant() {
        let build = |perm: &[usize]| {
            let mut p = LpProblem::new();
            p.add_col("x", f64::NEG_INFINITY, f64::INFINITY, 0.0);
            p.add_col("y", f64::NEG_INFINITY, f64::INFINITY, 0.0);
            let rows: Vec<(Vec<(usize, f64)>, f64)> = vec![
                (vec![(0, 1.0), (1, 2.0)], 4.0),
                (vec![(0, -1.0)], 0.0),
                (vec![(1, -1.0)], 0.0),
                (vec![(0, 3.0), (1, -1.0)], 6.0),
            ];
            for (i, &ri) in perm.iter().enumerate() {
                let (t, b) = rows[ri].clone();
                p.add_row(format!("r{i}"), t, RowSense::Le, b);
            }
            p
        };
        let a = chebyshev_center(&build(&[0, 1, 2, 3]), &[], &opts()).unwrap();
        let b = chebyshev_center(&build(&[3, 1, 0, 2]), &[], &opts()).unwrap();
        assert!((a.radius - b.radius).abs() < 1e-9);
        assert!((a.point[0] - b.point[0]).abs() < 1e-7);
        assert!((a.point[1] - b.point[1]).abs() < 1e-7);
    }

    #[test]
    fn infeasible_region_rejected() {
        let mut p = LpProblem::new();
        p.add_col("x", 0.0, 1.0, 0.0);
        p.add_row("bad", vec![(0, 1.0)], RowSense::Ge, 2.0);
        assert!(matches!(
            chebyshev_center(&p, &[], &opts()),
            Err(LpError::Infeasible)
        ));
    }

    #[test]
    fn analytic_center_stays_interior() {
        let mut p = LpProblem::new();
        p.add_col("x", 0.0, 1.0, 0.0);
        p.add_col("y", 0.0, 2.0, 0.0);
        p.add_row("cap", vec![(0, 1.0), (1, 1.0)], RowSense::Le, 2.5);
        let c = analytic_center(&p, &[], &opts()).unwrap();
        assert!(c.radius > 0.0);
        assert!(c.point[0] > 0.0 && c.point[0] < 1.0);
        assert!(c.point[1] > 0.0 && c.point[1] < 2.0);
    }
}
