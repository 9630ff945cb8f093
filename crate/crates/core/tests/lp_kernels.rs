//! Cross-checks of the production LP solver against an independent dense
//! tableau simplex, plus duality invariants on random instances.

mod common;

use cem_core::{solve_lp, LpProblem, RowSense, SolveOptions, SolveStatus};
use common::{rel_close, random_feasible_lp, tableau_solve, OracleStatus};

#[test]
fn random_lps_match_tableau_oracle() {
    let opts = SolveOptions::default();
    let mut solved = 0;
    for seed in 0..20u64 {
        let nvars = 4 + (seed as usize % 5);
        let nrows = 3 + (seed as usize % 4);
        let p = random_feasible_lp(1000 + seed, nvars, nrows);
        let oracle = tableau_solve(&p);
        assert_eq!(
            oracle.status,
            OracleStatus::Optimal,
            "seed {seed}: constructed LP should be feasible and bounded"
        );
        let sol = solve_lp(&p, &opts).unwrap();
        assert_eq!(sol.status, SolveStatus::Optimal, "seed {seed}");
        assert!(
            rel_close(sol.objective, oracle.objective, 1e-7),
            "seed {seed}: solver {} vs oracle {}",
            sol.objective,
            oracle.objective
        );
        solved += 1;
    }
    assert_eq!(solved, 20);
}

#[test]
fn random_lps_satisfy_duality_invariants() {
    let opts = SolveOptions::default();
    for seed in 0..50u64 {
        let nvars = 3 + (seed as usize % 6);
        let nrows = 2 + (seed as usize % 5);
        let p = random_feasible_lp(7000 + seed, nvars, nrows);
        let sol = solve_lp(&p, &opts).unwrap();
        assert_eq!(sol.status, SolveStatus::Optimal, "seed {seed}");

        // Primal feasibility.
        let scale = 1.0 + sol.objective.abs();
        for (ri, row) in p.rows.iter().enumerate() {
            let ax: f64 = row.terms.iter().map(|&(j, v)| v * sol.primal[j]).sum();
            let resid = match row.sense {
                RowSense::Le => (ax - row.rhs).max(0.0),
                RowSense::Ge => (row.rhs - ax).max(0.0),
                RowSense::Eq => (ax - row.rhs).abs(),
            };
            assert!(resid <= 1e-7 * scale, "seed {seed} row {ri} resid {resid}");
        }
        for j in 0..p.num_cols() {
            assert!(sol.primal[j] >= p.lb[j] - 1e-7 * scale, "seed {seed}");
            assert!(sol.primal[j] <= p.ub[j] + 1e-7 * scale, "seed {seed}");
        }

        // Strong duality: c'x = b'y + sum_j d_j x_j (complementarity puts
        // nonzero reduced costs only on variables at their bounds).
        let by: f64 = p
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| r.rhs * sol.row_duals[i])
            .sum();
        let dx: f64 = (0..p.num_cols())
            .map(|j| sol.reduced_costs[j] * sol.primal[j])
            .sum();
        let gap = (sol.objective - p.obj_offset - by - dx).abs();
        assert!(gap <= 1e-6 * scale, "seed {seed}: duality gap {gap}");

        // Complementary slackness on rows: dual nonzero only if row tight.
        for (ri, row) in p.rows.iter().enumerate() {
            if row.sense == RowSense::Eq {
                continue;
            }
            let ax: f64 = row.terms.iter().map(|&(j, v)| v * sol.primal[j]).sum();
            let slack = (ax - row.rhs).abs();
            let resid = sol.row_duals[ri].abs() * slack;
            assert!(
                resid <= 1e-6 * scale,
                "seed {seed} row {ri}: compl slackness {resid}"
            );
        }
    }
}

#[test]
fn oracle_agrees_on_textbook_lp() {
    // max x + y s.t. x + 2y <= 4, 3x + y <= 6  =>  min -(x+y), opt at (8/5, 6/5).
    let mut p = LpProblem::new();
    p.add_col("x", 0.0, f64::INFINITY, -1.0);
    p.add_col("y", 0.0, f64::INFINITY, -1.0);
    p.add_row("c1", vec![(0, 1.0), (1, 2.0)], RowSense::Le, 4.0);
    p.add_row("c2", vec![(0, 3.0), (1, 1.0)], RowSense::Le, 6.0);
    // The oracle needs finite lower bounds only; infinite ub is fine for the
    // solver but the oracle adds ub rows only when finite.
    let oracle = tableau_solve(&p);
    let sol = solve_lp(&p, &SolveOptions::default()).unwrap();
    assert!(rel_close(oracle.objective, -2.8, 1e-9));
    assert!(rel_close(sol.objective, -2.8, 1e-9));
}


#[test]
fn random_qps_match_active_set_enumeration() {
    use cem_core::lp::solve_qp;
    use common::{qp_brute_force, random_convex_qp};
    let opts = SolveOptions::default();
    for seed in 0..30u64 {
        let nvars = 2 + (seed as usize % 3);
        let nrows = seed as usize % 3;
        let p = random_convex_qp(4000 + seed, nvars, nrows);
        let (oracle_obj, _) = qp_brute_force(&p).expect("feasible by construction");
        let sol = solve_qp(&p, &opts).unwrap();
        assert_eq!(sol.status, SolveStatus::Optimal, "seed {seed}");
        assert!(
            rel_close(sol.objective, oracle_obj, 1e-6),
            "seed {seed}: solver {} vs oracle {}",
            sol.objective,
            oracle_obj
        );
    }
}

#[test]
fn knapsacks_match_exhaustive_enumeration() {
    use cem_core::{solve_milp, MilpProblem, MilpStatus};
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    for seed in 0..15u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(300 + seed);
        let n = 6;
        let weights: Vec<f64> = (0..n).map(|_| rng.gen_range(1.0..9.0)).collect();
        let values: Vec<f64> = (0..n).map(|_| rng.gen_range(1.0..9.0)).collect();
        let cap: f64 = weights.iter().sum::<f64>() * rng.gen_range(0.3..0.7);

        // max value -> min -value
        let mut lp = LpProblem::new();
        for j in 0..n {
            lp.add_col(format!("pick{j}"), 0.0, 1.0, -values[j]);
        }
        lp.add_row(
            "cap",
            weights.iter().cloned().enumerate().collect(),
            RowSense::Le,
            cap,
        );
        let p = MilpProblem {
            lp,
            integers: (0..n).collect(),
        };
        let s = solve_milp(&p, &SolveOptions::default()).unwrap();
        assert_eq!(s.status, MilpStatus::Optimal, "seed {seed}");

        // Exhaustive 2^6 oracle.
        let mut best = 0.0f64;
        for mask in 0u32..64 {
            let w: f64 = (0..n).filter(|j| mask >> j & 1 == 1).map(|j| weights[j]).sum();
            if w <= cap {
                let v: f64 = (0..n).filter(|j| mask >> j & 1 == 1).map(|j| values[j]).sum();
                best = best.max(v);
            }
        }
        assert!(
            (s.objective + best).abs() < 1e-9,
            "seed {seed}: milp {} vs enumeration {}",
            -s.objective,
            best
        );
    }
}

#[test]
fn chebyshev_matches_vertex_enumeration() {
    use cem_core::lp::chebyshev_center;
    use common::chebyshev_radius_oracle;
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(8800 + seed);
        let n = 2 + (seed as usize % 3);
        // Bounded polytope: box [-2, 2]^n plus a few random cuts through the
        // neighborhood of the origin.
        let mut cons: Vec<(Vec<f64>, f64)> = Vec::new();
        for j in 0..n {
            let mut a = vec![0.0; n];
            a[j] = 1.0;
            cons.push((a.clone(), 2.0));
            a[j] = -1.0;
            cons.push((a, 2.0));
        }
        for _ in 0..3 {
            let a: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            if a.iter().map(|v| v * v).sum::<f64>() < 0.1 {
                continue;
            }
            cons.push((a, rng.gen_range(0.5..2.0)));
        }
        let oracle = chebyshev_radius_oracle(&cons, n).expect("nonempty");

        let mut p = LpProblem::new();
        for j in 0..n {
            p.add_col(format!("x{j}"), f64::NEG_INFINITY, f64::INFINITY, 0.0);
        }
        for (i, (a, b)) in cons.iter().enumerate() {
            let terms: Vec<(usize, f64)> = a
                .iter()
                .cloned()
                .enumerate()
                .filter(|&(_, v)| v != 0.0)
                .collect();
            p.add_row(format!("c{i}"), terms, RowSense::Le, *b);
        }
        let c = chebyshev_center(&p, &[], &SolveOptions::default()).unwrap();
        assert!(
            (c.radius - oracle).abs() <= 1e-7 * (1.0 + oracle),
            "seed {seed}: r* {} vs oracle {}",
            c.radius,
            oracle
        );
        // Every slack at least r* (scaled by the row norm).
        for (a, b) in &cons {
            let norm: f64 = a.iter().map(|v| v * v).sum::<f64>().sqrt();
            let s = b - a.iter().zip(&c.point).map(|(u, v)| u * v).sum::<f64>();
            assert!(s >= c.radius * norm - 1e-7, "seed {seed}: slack {s}");
        }
    }
}
