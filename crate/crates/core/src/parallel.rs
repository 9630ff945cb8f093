//! Deterministic parallel evaluation of operational sub-problems.
//!
//! Blocks are assigned to workers statically (block index modulo worker
//! count) and results are gathered back in block order, so the output —
//! and everything derived from it, cuts included — is identical for any
//! worker count.

use std::sync::Mutex;

use crate::benders::{solve_subproblem, BendersError, SubSolve};
use crate::lp::SolveOptions;
use crate::reformulate::SubBlock;

/// Static work assignment: `lanes[k]` holds the block indices worker `k`
/// processes, in ascending order.
#[derive(Debug, Clone)]
pub struct WorkBatch {
    pub lanes: Vec<Vec<usize>>,
}

impl WorkBatch {
    pub fn round_robin(n_blocks: usize, workers: usize) -> Self {
        let workers = workers.max(1);
        let mut lanes = vec![Vec::new(); workers];
        for i in 0..n_blocks {
            lanes[i % workers].push(i);
        }
        WorkBatch { lanes }
    }
}

/// Resolve the worker count: the BENDERS_WORKERS environment variable wins,
/// then an explicit positive request, then available parallelism.
pub fn resolve_workers(requested: usize) -> usize {
    if let Ok(s) = std::env::var("BENDERS_WORKERS") {
        if let Ok(n) = s.trim().parse::<usize>() {
            if n > 0 {
                return n;
            }
        }
    }
    if requested > 0 {
        return requested;
    }
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

/// Solve every block at the given planning point. Results come back in
/// block order; the first failing block (lowest index) reports its error.
pub fn map_subproblems(
    blocks: &[SubBlock],
    planning_point: &[f64],
    opts: &SolveOptions,
    workers: usize,
) -> Result<Vec<SubSolve>, BendersError> {
    let workers = resolve_workers(workers).min(blocks.len().max(1));
    if workers <= 1 {
        return blocks
            .iter()
            .map(|b| solve_subproblem(b, planning_point, opts))
            .collect();
    }
    let batch = WorkBatch::round_robin(blocks.len(), workers);
    let slots: Vec<Mutex<Option<Result<SubSolve, BendersError>>>> =
        (0..blocks.len()).map(|_| Mutex::new(None)).collect();
    std::thread::scope(|scope| {
        for lane in &batch.lanes {
            let slots = &slots;
            scope.spawn(move || {
                for &i in lane {
                    let res = solve_subproblem(&blocks[i], planning_point, opts);
                    *slots[i].lock().unwrap() = Some(res);
                }
            });
        }
    });
    let mut out = Vec::with_capacity(blocks.len());
    for slot in slots {
        match slot.into_inner().unwrap() {
            Some(Ok(s)) => out.push(s),
            Some(Err(e)) => return Err(e),
            None => unreachable!("worker skipped a block"),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{generate_synthetic, GeneratorSpec};
    use crate::reformulate::assemble_block_problem;

    #[test]
    fn round_robin_covers_all_blocks_once() {
        let batch = WorkBatch::round_robin(7, 3);
        let mut seen: Vec<usize> = batch.lanes.iter().flatten().copied().collect();
        seen.sort();
        assert_eq!(seen, (0..7).collect::<Vec<_>>());
        assert_eq!(batch.lanes[0], vec![0, 3, 6]);
        assert_eq!(batch.lanes[1], vec![1, 4]);
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let inst = generate_synthetic(&GeneratorSpec::small(), 5).unwrap();
        let bp = assemble_block_problem(&inst);
        let nv = bp.planning.num_cols();
        let mut point = vec![0.0; nv];
        for (j, name) in bp.planning.col_names.iter().enumerate() {
            if name.starts_with("y_cap_") {
                point[j] = 80.0;
            }
        }
        let opts = SolveOptions::default();
        let one = map_subproblems(&bp.blocks, &point, &opts, 1).unwrap();
        for workers in [2, 3, 5] {
            let many = map_subproblems(&bp.blocks, &point, &opts, workers).unwrap();
            assert_eq!(one.len(), many.len());
            for (a, b) in one.iter().zip(many.iter()) {
                assert_eq!(a.w, b.w);
                assert_eq!(a.g.to_bits(), b.g.to_bits(), "objective differs at w{}", a.w);
                for (x, y) in a.duals.iter().zip(b.duals.iter()) {
                    assert_eq!(x.to_bits(), y.to_bits());
                }
            }
        }
    }
}
