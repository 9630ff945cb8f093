//! Shared test helpers: a slow, independent dense tableau simplex used as an
//! oracle for the production LP solver, plus seeded random-problem builders.
//!
//! The oracle solves via the classic two-phase standard-form tableau with
//! Bland's rule. It shares no code or data structures with the revised
//! simplex in the library, which is the point.

#![allow(dead_code)]

use cem_core::{LpProblem, RowSense};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

const ORACLE_EPS: f64 = 1e-9;

#[derive(Debug, PartialEq)]
pub enum OracleStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

pub struct OracleResult {
    pub status: OracleStatus,
    pub objective: f64,
    pub primal: Vec<f64>,
}

/// Solve an `LpProblem` by dense two-phase tableau simplex.
///
/// Restrictions (enough for the tests that use it): every variable must have
/// a finite lower bound, and upper bounds are handled by adding explicit
/// rows. Variables are shifted so lower bounds become zero.
pub fn tableau_solve(p: &LpProblem) -> OracleResult {
    let n = p.num_cols();
    for j in 0..n {
        assert!(p.lb[j].is_finite(), "oracle requires finite lower bounds");
    }
    // Shift x = lb + x', x' >= 0. Collect rows with shifted rhs.
    let mut rows: Vec<(Vec<f64>, RowSense, f64)> = Vec::new();
    for r in &p.rows {
        let mut coef = vec![0.0; n];
        let mut shift = 0.0;
        for &(j, v) in &r.terms {
            coef[j] += v;
            shift += v * p.lb[j];
        }
        rows.push((coef, r.sense, r.rhs - shift));
    }
    for j in 0..n {
        if p.ub[j].is_finite() {
            let mut coef = vec![0.0; n];
            coef[j] = 1.0;
            rows.push((coef, RowSense::Le, p.ub[j] - p.lb[j]));
        }
    }
    let obj_shift: f64 = (0..n).map(|j| p.obj[j] * p.lb[j]).sum();

    // Standard form: append slack/surplus columns, then artificials.
    let m = rows.len();
    let mut ncols = n;
    let mut a: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut b: Vec<f64> = Vec::with_capacity(m);
    for (coef, sense, rhs) in &rows {
        let mut row = coef.clone();
        row.resize(n + m, 0.0);
        a.push(row);
        b.push(*rhs);
        let _ = sense;
    }
    for (i, (_, sense, _)) in rows.iter().enumerate() {
        match sense {
            RowSense::Le => {
                a[i][ncols] = 1.0;
                ncols += 1;
            }
            RowSense::Ge => {
                a[i][ncols] = -1.0;
                ncols += 1;
            }
            RowSense::Eq => {}
        }
    }
    for row in &mut a {
        row.truncate(ncols);
    }
    // Make rhs nonnegative.
    for i in 0..m {
        if b[i] < 0.0 {
            for v in &mut a[i] {
                *v = -*v;
            }
            b[i] = -b[i];
        }
    }
    // Artificials, one per row; initial basis.
    let art0 = ncols;
    for (i, row) in a.iter_mut().enumerate() {
        row.resize(art0 + m, 0.0);
        row[art0 + i] = 1.0;
    }
    ncols = art0 + m;
    let mut basis: Vec<usize> = (art0..ncols).collect();

    // Phase 1: minimize sum of artificials.
    let mut cost1 = vec![0.0; ncols];
    for c in cost1.iter_mut().skip(art0) {
        *c = 1.0;
    }
    match run_tableau(&mut a, &mut b, &mut basis, &cost1, art0) {
        TabOutcome::Optimal(z) => {
            if z > 1e-7 {
                return OracleResult {
                    status: OracleStatus::Infeasible,
                    objective: f64::INFINITY,
                    primal: vec![],
                };
            }
        }
        TabOutcome::Unbounded => unreachable!("phase 1 is bounded below"),
    }
    // Pivot any artificial still basic out (or its row is redundant).
    for i in 0..m {
        if basis[i] >= art0 {
            if let Some(j) = (0..art0).find(|&j| a[i][j].abs() > 1e-9) {
                pivot(&mut a, &mut b, i, j);
                basis[i] = j;
            }
        }
    }

    // Phase 2 on original columns only (artificials barred by art0 cap).
    let mut cost2 = vec![0.0; ncols];
    cost2[..n].copy_from_slice(&p.obj);
    match run_tableau(&mut a, &mut b, &mut basis, &cost2, art0) {
        TabOutcome::Optimal(z) => {
            let mut x = vec![0.0; ncols];
            for i in 0..m {
                x[basis[i]] = b[i];
            }
            let primal: Vec<f64> = (0..n).map(|j| p.lb[j] + x[j]).collect();
            OracleResult {
                status: OracleStatus::Optimal,
                objective: z + obj_shift + p.obj_offset,
                primal,
            }
        }
        TabOutcome::Unbounded => OracleResult {
            status: OracleStatus::Unbounded,
            objective: f64::NEG_INFINITY,
            primal: vec![],
        },
    }
}

enum TabOutcome {
    Optimal(f64),
    Unbounded,
}

/// Bland-rule simplex on an explicit tableau. Columns >= `col_cap` are never
/// allowed to enter.
fn run_tableau(
    a: &mut [Vec<f64>],
    b: &mut [f64],
    basis: &mut [usize],
    cost: &[f64],
    col_cap: usize,
) -> TabOutcome {
    let m = a.len();
    loop {
        // Reduced costs via basic-cost elimination: d_j = c_j - cb' B^-1 a_j.
        // The tableau is kept in canonical form, so B^-1 a_j is column j.
        let mut enter = None;
        for j in 0..col_cap {
            if basis.contains(&j) {
                continue;
            }
            let mut d = cost[j];
            for i in 0..m {
                d -= cost[basis[i]] * a[i][j];
            }
            if d < -ORACLE_EPS {
                enter = Some(j);
                break; // Bland: smallest index
            }
        }
        let Some(q) = enter else {
            let z: f64 = (0..m).map(|i| cost[basis[i]] * b[i]).sum();
            return TabOutcome::Optimal(z);
        };
        // Ratio test, Bland tie-break on basis index.
        let mut leave: Option<usize> = None;
        let mut best = f64::INFINITY;
        for i in 0..m {
            if a[i][q] > ORACLE_EPS {
                let t = b[i] / a[i][q];
                if t < best - ORACLE_EPS
                    || (t < best + ORACLE_EPS
                        && leave.map_or(true, |l| basis[i] < basis[l]))
                {
                    best = t;
                    leave = Some(i);
                }
            }
        }
        let Some(r) = leave else {
            return TabOutcome::Unbounded;
        };
        pivot(a, b, r, q);
        basis[r] = q;
    }
}

fn pivot(a: &mut [Vec<f64>], b: &mut [f64], r: usize, q: usize) {
    let m = a.len();
    let piv = a[r][q];
    for v in &mut a[r] {
        *v /= piv;
    }
    b[r] /= piv;
    for i in 0..m {
        if i != r {
            let f = a[i][q];
            if f != 0.0 {
                for j in 0..a[i].len() {
                    a[i][j] -= f * a[r][j];
                }
                b[i] -= f * b[r];
            }
        }
    }
}

/// Build a random dense LP that is feasible by construction: rhs values are
/// derived from an interior point of the box.
pub fn random_feasible_lp(seed: u64, nvars: usize, nrows: usize) -> LpProblem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut p = LpProblem::new();
    for j in 0..nvars {
        p.add_col(format!("x{j}"), 0.0, 3.0, rng.gen_range(-5.0..5.0));
    }
    let x0: Vec<f64> = (0..nvars).map(|_| rng.gen_range(0.2..1.5)).collect();
    for i in 0..nrows {
        let terms: Vec<(usize, f64)> = (0..nvars)
            .map(|j| (j, rng.gen_range(-2.0..2.0)))
            .filter(|&(_, v): &(usize, f64)| v.abs() > 0.3)
            .collect();
        if terms.is_empty() {
            continue;
        }
        let ax0: f64 = terms.iter().map(|&(j, v)| v * x0[j]).sum();
        let sense = match i % 3 {
            0 => RowSense::Le,
            1 => RowSense::Ge,
            _ => RowSense::Eq,
        };
        let rhs = match sense {
            RowSense::Le => ax0 + rng.gen_range(0.1..1.0),
            RowSense::Ge => ax0 - rng.gen_range(0.1..1.0),
            RowSense::Eq => ax0,
        };
        p.add_row(&format!("r{i}"), terms, sense, rhs);
    }
    p
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

/// Brute-force convex QP oracle: enumerate every subset of constraints as a
/// candidate active set, solve the equality-constrained KKT system by plain
/// Gauss-Jordan, keep feasible candidates, return the best objective. Only
/// viable for a handful of variables and constraints.
pub fn qp_brute_force(p: &LpProblem) -> Option<(f64, Vec<f64>)> {
    let n = p.num_cols();
    let mut q = vec![0.0; n * n];
    for &(i, j, v) in &p.quad {
        q[i * n + j] += v;
    }
    // Constraints as (coeffs, rhs, is_eq) in a'x <= b or a'x = b form.
    let mut cons: Vec<(Vec<f64>, f64, bool)> = Vec::new();
    for r in &p.rows {
        let mut a = vec![0.0; n];
        for &(j, v) in &r.terms {
            a[j] += v;
        }
        match r.sense {
            RowSense::Le => cons.push((a, r.rhs, false)),
            RowSense::Eq => cons.push((a, r.rhs, true)),
            RowSense::Ge => {
                cons.push((a.iter().map(|v| -v).collect(), -r.rhs, false))
            }
        }
    }
    for j in 0..n {
        if p.lb[j].is_finite() {
            let mut a = vec![0.0; n];
            a[j] = -1.0;
            cons.push((a, -p.lb[j], p.lb[j] == p.ub[j]));
        }
        if p.ub[j].is_finite() && p.lb[j] != p.ub[j] {
            let mut a = vec![0.0; n];
            a[j] = 1.0;
            cons.push((a, p.ub[j], false));
        }
    }
    let nc = cons.len();
    assert!(nc <= 16, "oracle limited to small problems");
    let eq_mask: u32 = cons
        .iter()
        .enumerate()
        .filter(|(_, c)| c.2)
        .map(|(i, _)| 1u32 << i)
        .sum();

    let mut best: Option<(f64, Vec<f64>)> = None;
    for mask in 0..(1u32 << nc) {
        if mask & eq_mask != eq_mask {
            continue;
        }
        let active: Vec<usize> = (0..nc).filter(|i| mask >> i & 1 == 1).collect();
        let k = active.len();
        if k > n {
            continue;
        }
        // KKT: [Q A'; A 0] [x; lam] = [-c; b].
        let dim = n + k;
        let mut m = vec![0.0; dim * (dim + 1)];
        let w = dim + 1;
        for i in 0..n {
            for j in 0..n {
                m[i * w + j] = q[i * n + j];
            }
            m[i * w + dim] = -p.obj[i];
        }
        for (a, &ci) in active.iter().enumerate() {
            for j in 0..n {
                m[(n + a) * w + j] = cons[ci].0[j];
                m[j * w + n + a] = cons[ci].0[j];
            }
            m[(n + a) * w + dim] = cons[ci].1;
        }
        if !gauss_jordan(&mut m, dim) {
            continue;
        }
        let x: Vec<f64> = (0..n).map(|i| m[i * w + dim]).collect();
        let feasible = cons.iter().all(|(a, b, eq)| {
            let ax: f64 = a.iter().zip(&x).map(|(u, v)| u * v).sum();
            if *eq {
                (ax - b).abs() <= 1e-7
            } else {
                ax <= b + 1e-7
            }
        });
        if !feasible {
            continue;
        }
        let obj = p.objective_at(&x);
        if best.as_ref().map_or(true, |(bo, _)| obj < bo - 0.0) {
            best = Some((obj, x));
        }
    }
    best
}

/// Gauss-Jordan on an augmented `dim x (dim+1)` system; false if singular.
fn gauss_jordan(m: &mut [f64], dim: usize) -> bool {
    let w = dim + 1;
    for k in 0..dim {
        let mut piv = k;
        for i in k + 1..dim {
            if m[i * w + k].abs() > m[piv * w + k].abs() {
                piv = i;
            }
        }
        if m[piv * w + k].abs() < 1e-10 {
            return false;
        }
        if piv != k {
            for j in 0..w {
                m.swap(k * w + j, piv * w + j);
            }
        }
        let d = m[k * w + k];
        for j in 0..w {
            m[k * w + j] /= d;
        }
        for i in 0..dim {
            if i != k {
                let f = m[i * w + k];
                if f != 0.0 {
                    for j in 0..w {
                        m[i * w + j] -= f * m[k * w + j];
                    }
                }
            }
        }
    }
    true
}

/// Random strictly convex box-constrained QP with a few rows, feasible by
/// construction around an interior point.
pub fn random_convex_qp(seed: u64, nvars: usize, nrows: usize) -> LpProblem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut p = LpProblem::new();
    for j in 0..nvars {
        p.add_col(format!("x{j}"), 0.0, 2.0, rng.gen_range(-3.0..3.0));
    }
    if seed % 2 == 0 {
        for j in 0..nvars {
            p.quad.push((j, j, rng.gen_range(0.5..3.0)));
        }
    } else {
        // SPD via M'M + I.
        let mvals: Vec<f64> = (0..nvars * nvars)
            .map(|_| rng.gen_range(-1.0..1.0))
            .collect();
        for i in 0..nvars {
            for j in 0..nvars {
                let mut v: f64 = (0..nvars).map(|k| mvals[k * nvars + i] * mvals[k * nvars + j]).sum();
                if i == j {
                    v += 1.0;
                }
                p.quad.push((i, j, v));
            }
        }
    }
    let x0: Vec<f64> = (0..nvars).map(|_| rng.gen_range(0.3..1.2)).collect();
    for i in 0..nrows {
        let terms: Vec<(usize, f64)> = (0..nvars)
            .map(|j| (j, rng.gen_range(-1.5..1.5)))
            .filter(|&(_, v): &(usize, f64)| v.abs() > 0.2)
            .collect();
        if terms.is_empty() {
            continue;
        }
        let ax0: f64 = terms.iter().map(|&(j, v)| v * x0[j]).sum();
        let sense = if i % 2 == 0 { RowSense::Le } else { RowSense::Ge };
        let rhs = match sense {
            RowSense::Le => ax0 + rng.gen_range(0.05..0.8),
            _ => ax0 - rng.gen_range(0.05..0.8),
        };
        p.add_row(format!("r{i}"), terms, sense, rhs);
    }
    p
}

/// Oracle for the Chebyshev radius: enumerate all vertices of the radius LP
/// `max r s.t. a_i'x + ||a_i|| r <= b_i` by solving every square subsystem,
/// keep feasible ones, take the best r. Constraints are given densely.
pub fn chebyshev_radius_oracle(cons: &[(Vec<f64>, f64)], n: usize) -> Option<f64> {
    let dim = n + 1; // x plus r
    let rows: Vec<(Vec<f64>, f64)> = cons
        .iter()
        .map(|(a, b)| {
            let norm: f64 = a.iter().map(|v| v * v).sum::<f64>().sqrt();
            let mut row = a.clone();
            row.push(norm);
            (row, *b)
        })
        .collect();
    let nc = rows.len();
    assert!(nc <= 20 && dim <= 5);
    let mut best: Option<f64> = None;
    // Choose dim constraints to be tight; solve; check feasibility.
    let mut idx: Vec<usize> = (0..dim).collect();
    loop {
        let mut m = vec![0.0; dim * (dim + 1)];
        let w = dim + 1;
        for (i, &ci) in idx.iter().enumerate() {
            for j in 0..dim {
                m[i * w + j] = rows[ci].0[j];
            }
            m[i * w + dim] = rows[ci].1;
        }
        if gauss_jordan(&mut m, dim) {
            let pt: Vec<f64> = (0..dim).map(|i| m[i * w + dim]).collect();
            let ok = rows.iter().all(|(a, b)| {
                a.iter().zip(&pt).map(|(u, v)| u * v).sum::<f64>() <= b + 1e-7
            });
            if ok && pt[n] >= 0.0 {
                best = Some(best.map_or(pt[n], |b: f64| b.max(pt[n])));
            }
        }
        // Next combination.
        let mut i = dim;
        loop {
            if i == 0 {
                return best;
            }
            i -= 1;
            if idx[i] < nc - dim + i {
                idx[i] += 1;
                for k in i + 1..dim {
                    idx[k] = idx[k - 1] + 1;
                }
                break;
            }
        }
    }
}
