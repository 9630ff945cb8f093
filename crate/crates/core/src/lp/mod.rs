//! Embedded desk-scale optimization kernels.
//!
//! Provides a bounded revised simplex LP solver with exact vertex duals,
//! a convex QP solver (active set), a best-first branch-and-bound MILP
//! solver, Chebyshev/analytic center computations, and an MPS writer
//! with a CSV solution importer for external cross-checks.

mod center;
mod dense;
mod lu;
mod milp;
mod mps;
mod qp;
mod simplex;
mod sparse;

pub use center::{analytic_center, chebyshev_center, CenterMode, CenterResult};
pub use milp::{solve_milp, MilpProblem, MilpSolution, MilpStatus};
pub use mps::{export_mps, import_solution, ImportedSolution};
pub use qp::solve_qp;
pub use simplex::solve_lp;

use thiserror::Error;

/// Row sense of a linear constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowSense {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

#[derive(Debug, Error)]
pub enum LpError {
    #[error("numerical breakdown: {0}")]
    NumericalBreakdown(String),
    #[error("inconsistent problem data: {0}")]
    BadInput(String),
    #[error("node limit reached with relative gap {gap:.3e}")]
    NodeLimit { gap: f64 },
    #[error("parse error at line {line}: {message}")]
    ParseError { line: usize, message: String },
    #[error("infeasible system")]
    Infeasible,
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// One linear constraint row: sparse terms, sense, right-hand side.
#[derive(Debug, Clone)]
pub struct Row {
    pub name: String,
    pub terms: Vec<(usize, f64)>,
    pub sense: RowSense,
    pub rhs: f64,
}

/// A linear (optionally quadratic) program over bounded variables.
///
/// Minimization is assumed throughout. The quadratic term, when present,
/// is `0.5 * x' Q x` with `Q` symmetric PSD, stored as coordinate entries
/// of the full symmetric matrix (both `(i,j)` and `(j,i)` or a diagonal).
#[derive(Debug, Clone, Default)]
pub struct LpProblem {
    pub obj: Vec<f64>,
    pub obj_offset: f64,
    pub lb: Vec<f64>,
    pub ub: Vec<f64>,
    pub col_names: Vec<String>,
    pub rows: Vec<Row>,
    pub quad: Vec<(usize, usize, f64)>,
}

impl LpProblem {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn num_cols(&self) -> usize {
        self.obj.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn add_col(&mut self, name: impl Into<String>, lb: f64, ub: f64, obj: f64) -> usize {
        debug_assert!(lb <= ub, "lower bound above upper bound");
        self.obj.push(obj);
        self.lb.push(lb);
        self.ub.push(ub);
        self.col_names.push(name.into());
        self.obj.len() - 1
    }

    pub fn add_row(
        &mut self,
        name: impl Into<String>,
        terms: Vec<(usize, f64)>,
        sense: RowSense,
        rhs: f64,
    ) -> usize {
        self.rows.push(Row {
            name: name.into(),
            terms,
            sense,
            rhs,
        });
        self.rows.len() - 1
    }

    pub fn col_index(&self, name: &str) -> Option<usize> {
        self.col_names.iter().position(|n| n == name)
    }

    /// Checks dimension consistency and finiteness of all coefficients.
    pub fn check(&self) -> Result<(), LpError> {
        let n = self.num_cols();
        for (j, (&l, &u)) in self.lb.iter().zip(self.ub.iter()).enumerate() {
            if l > u {
                return Err(LpError::BadInput(format!(
                    "column {} has lb {} > ub {}",
                    self.col_names[j], l, u
                )));
            }
        }
        for row in &self.rows {
            for &(j, v) in &row.terms {
                if j >= n {
                    return Err(LpError::BadInput(format!(
                        "row {} references column {} out of {}",
                        row.name, j, n
                    )));
                }
                if !v.is_finite() {
                    return Err(LpError::BadInput(format!(
                        "row {} has non-finite coefficient on column {}",
                        row.name, j
                    )));
                }
            }
            if !row.rhs.is_finite() {
                return Err(LpError::BadInput(format!("row {} has non-finite rhs", row.name)));
            }
        }
        for &(i, j, _) in &self.quad {
            if i >= n || j >= n {
                return Err(LpError::BadInput("quadratic entry out of range".into()));
            }
        }
        Ok(())
    }

    /// Objective value `c'x + 0.5 x'Qx + offset` at a point.
    pub fn objective_at(&self, x: &[f64]) -> f64 {
        let mut v = self.obj_offset;
        for (j, &c) in self.obj.iter().enumerate() {
            v += c * x[j];
        }
        for &(i, j, q) in &self.quad {
            v += 0.5 * q * x[i] * x[j];
        }
        v
    }
}

/// Solver options shared by the LP, QP, and MILP paths.
#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub feas_tol: f64,
    pub opt_tol: f64,
    pub int_tol: f64,
    pub mip_gap: f64,
    pub max_iter: usize,
    pub node_limit: usize,
    pub scale: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            feas_tol: 1e-7,
            opt_tol: 1e-7,
            int_tol: 1e-6,
            mip_gap: 1e-3,
            max_iter: 200_000,
            node_limit: 20_000,
            scale: true,
        }
    }
}

/// Primal-dual solution of an LP or QP.
///
/// Row duals are shadow prices `d(objective)/d(rhs)`: for a minimization
/// problem a binding `<=` row carries a nonpositive dual and a binding
/// `>=` row a nonnegative one; equality-row duals are free. Reduced costs
/// follow the same convention (`d(objective)/d(bound)` for columns at a
/// bound).
#[derive(Debug, Clone)]
pub struct PrimalDualSolution {
    pub status: SolveStatus,
    pub primal: Vec<f64>,
    pub objective: f64,
    pub row_duals: Vec<f64>,
    pub reduced_costs: Vec<f64>,
}

impl PrimalDualSolution {
    pub fn infeasible(n: usize, m: usize) -> Self {
        Self {
            status: SolveStatus::Infeasible,
            primal: vec![0.0; n],
            objective: f64::INFINITY,
            row_duals: vec![0.0; m],
            reduced_costs: vec![0.0; n],
        }
    }
}
