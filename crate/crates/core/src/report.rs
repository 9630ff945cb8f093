//! Run artifacts: iteration traces, planning solutions, and run manifests,
//! all as plain CSV.

use std::io::Write;
use std::path::Path;

use crate::benders::IterRecord;

fn fmt_opt_f(v: Option<f64>) -> String {
    v.map(|x| format!("{x}")).unwrap_or_default()
}

/// Write the iteration trace. The regularization columns appear whenever
/// any record carries them, so a plain run yields the six base columns.
pub fn write_trace(path: &Path, trace: &[IterRecord]) -> std::io::Result<()> {
    let extras = trace
        .iter()
        .any(|r| r.kind.is_some() || r.stage.is_some());
    let mut f = std::fs::File::create(path)?;
    if extras {
        writeln!(
            f,
            "iter,U,L,gap,wall_ms,n_cuts,kind,alpha,L_alpha,r_star,stage,tr_radius"
        )?;
    } else {
        writeln!(f, "iter,U,L,gap,wall_ms,n_cuts")?;
    }
    for r in trace {
        if extras {
            writeln!(
                f,
                "{},{},{},{},{},{},{},{},{},{},{},{}",
                r.iter,
                r.u,
                r.l,
                r.gap,
                r.wall_ms,
                r.n_cuts,
                r.kind.clone().unwrap_or_default(),
                fmt_opt_f(r.alpha),
                fmt_opt_f(r.l_alpha),
                fmt_opt_f(r.r_star),
                r.stage.map(|s| s.to_string()).unwrap_or_default(),
                fmt_opt_f(r.tr_radius),
            )?;
        } else {
            writeln!(
                f,
                "{},{},{},{},{},{}",
                r.iter, r.u, r.l, r.gap, r.wall_ms, r.n_cuts
            )?;
        }
    }
    Ok(())
}

/// Planning solution as `column,value` rows.
pub fn write_solution(path: &Path, names: &[String], values: &[f64]) -> std::io::Result<()> {
    let mut f = std::fs::File::create(path)?;
    writeln!(f, "column,value")?;
    for (n, v) in names.iter().zip(values.iter()) {
        writeln!(f, "{n},{v}")?;
    }
    Ok(())
}

/// Summary of one solver run, written as `key,value` pairs.
#[derive(Debug, Clone)]
pub struct RunManifest {
    pub algo: String,
    pub instance: String,
    pub seed: Option<u64>,
    pub alpha: Option<f64>,
    pub tol: f64,
    pub workers: usize,
    pub converged: bool,
    pub objective: f64,
    pub lower_bound: f64,
    pub gap: f64,
    pub iterations: usize,
    pub wall_ms: f64,
}

impl RunManifest {
    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        let mut f = std::fs::File::create(path)?;
        writeln!(f, "key,value")?;
        writeln!(f, "algo,{}", self.algo)?;
        writeln!(f, "instance,{}", self.instance)?;
        writeln!(f, "seed,{}", self.seed.map(|s| s.to_string()).unwrap_or_default())?;
        writeln!(f, "alpha,{}", fmt_opt_f(self.alpha))?;
        writeln!(f, "tol,{}", self.tol)?;
        writeln!(f, "workers,{}", self.workers)?;
        writeln!(f, "converged,{}", self.converged)?;
        writeln!(f, "objective,{}", self.objective)?;
        writeln!(f, "lower_bound,{}", self.lower_bound)?;
        writeln!(f, "gap,{}", self.gap)?;
        writeln!(f, "iterations,{}", self.iterations)?;
        writeln!(f, "wall_ms,{}", self.wall_ms)?;
        Ok(())
    }
}
