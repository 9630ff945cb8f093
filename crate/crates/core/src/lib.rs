//! Capacity-expansion planning solver framework.
//!
//! Block-structured multi-period, multi-scenario planning instances are
//! reformulated into per-sub-period operational blocks plus planning-side
//! coupling, then solved either monolithically or by parallel Benders
//! decomposition with optional level-set regularization and a two-stage
//! mixed-integer procedure. All numerical kernels are embedded; an MPS
//! exporter and solution importer provide an external-solver escape hatch.

pub mod benders;
pub mod instance;
pub mod lp;
pub mod parallel;
pub mod reformulate;
pub mod regularize;
pub mod report;

/// Errors from instance construction, generation, and (de)serialization.
#[derive(Debug, thiserror::Error)]
pub enum InstanceError {
    #[error("invalid generator spec: {0}")]
    SpecInvalid(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("{file}:{line}: {message}")]
    Parse {
        file: String,
        line: usize,
        message: String,
    },
}

pub use instance::{
    generate_synthetic, load_instance, save_instance, tiny1, tiny1_integer, validate_instance,
    CEMInstance, GeneratorSpec, PenaltyConfig, PlanningPeriod, Policy, PolicyKind, Resource,
    ResourceKind, Scenario, SubPeriod, TransmissionLink, ValidationReport, Violation, Zone,
};
pub use lp::{
    solve_lp, solve_milp, solve_qp, LpError, LpProblem, MilpProblem, MilpSolution, MilpStatus,
    PrimalDualSolution, RowSense, SolveOptions, SolveStatus,
};
pub use benders::{
    run_benders, solve_subproblem, BendersConfig, BendersError, BendersResult, Cut, IterRecord,
    MasterState, SubSolve,
};
pub use parallel::{map_subproblems, WorkBatch};
pub use regularize::{
    level_set_bound, run_regularized, run_two_stage, RegConfig, RegKind, TwoStageConfig,
};
pub use report::{write_solution, write_trace, RunManifest};
pub use reformulate::{
    assemble_block_problem, assemble_monolithic, build_coupling_blocks, build_operational_block,
    BlockProblem, CouplingMode, ReformOptions, SubBlock,
};
