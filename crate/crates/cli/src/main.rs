//! `cem` — capacity-expansion planning solver.
//!
//! `cem solve` runs one algorithm on an instance (loaded from a directory
//! or generated from a spec) and writes trace/solution/manifest artifacts.
//! `cem compare` runs several algorithms on the same instance and tabulates
//! convergence behavior.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use cem_core::lp::{export_mps, solve_lp, solve_milp, CenterMode, MilpProblem, SolveStatus};
use cem_core::regularize::{RegConfig, RegKind, TwoStageConfig};
use cem_core::reformulate::CouplingMode;
use cem_core::{
    assemble_block_problem, assemble_monolithic, generate_synthetic, load_instance, run_benders,
    run_regularized, run_two_stage, validate_instance, BendersConfig, BendersResult, CEMInstance,
    GeneratorSpec, IterRecord, RunManifest,
};

#[derive(Parser)]
#[command(name = "cem", version, about = "Capacity-expansion planning solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance with one algorithm.
    Solve(SolveArgs),
    /// Run several algorithms on one instance and tabulate convergence.
    Compare(CompareArgs),
}

#[derive(Args, Clone)]
struct InstanceArgs {
    /// Instance directory (as written by --save or the serializer).
    #[arg(long, conflicts_with = "generate")]
    instance: Option<PathBuf>,
    /// Generator spec, e.g. "small" or "medium,zones=4,hours=8".
    #[arg(long)]
    generate: Option<String>,
    /// Seed for the generator.
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    /// Algorithm: monolithic, benders, benders-l2, benders-int, benders-tr,
    /// or two-stage.
    #[arg(long, default_value = "benders")]
    algo: String,
    /// Level parameter for regularized algorithms, in (0, 1).
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    /// Relative convergence tolerance.
    #[arg(long, default_value_t = 1e-3)]
    tol: f64,
    #[arg(long, default_value_t = 200)]
    max_iter: usize,
    /// Sub-problem worker threads (0 = automatic).
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// Output directory for trace.csv, solution.csv, manifest.csv.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Also export the monolithic model in MPS format.
    #[arg(long)]
    export_mps: bool,
    /// Use the analytic center instead of the Chebyshev center.
    #[arg(long)]
    analytic_center: bool,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    /// Comma-separated algorithms to run.
    #[arg(long, default_value = "benders,benders-l2,benders-int,benders-tr")]
    algos: String,
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    #[arg(long, default_value_t = 1e-3)]
    tol: f64,
    #[arg(long, default_value_t = 200)]
    max_iter: usize,
    #[arg(long, default_value_t = 0)]
    workers: usize,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

fn load(args: &InstanceArgs) -> Result<(CEMInstance, String)> {
    let (inst, label) = if let Some(dir) = &args.instance {
        let inst = load_instance(dir)
            .with_context(|| format!("failed to load instance from {}", dir.display()))?;
        (inst, dir.display().to_string())
    } else if let Some(spec) = &args.generate {
        let spec: GeneratorSpec = spec
            .parse()
            .map_err(|e| anyhow::anyhow!("bad generator spec: {e}"))?;
        let inst = generate_synthetic(&spec, args.seed)?;
        (inst, format!("generated(seed={})", args.seed))
    } else {
        bail!("provide either --instance or --generate");
    };
    let report = validate_instance(&inst);
    if !report.is_empty() {
        bail!(
            "instance failed validation:\n{}",
            report
                .violations
                .iter()
                .map(|v| format!("  [{}] {}", v.code, v.message))
                .collect::<Vec<_>>()
                .join("\n")
        );
    }
    Ok((inst, label))
}

fn base_config(tol: f64, max_iter: usize, workers: usize) -> BendersConfig {
    BendersConfig {
        tol,
        max_iter,
        workers,
        ..BendersConfig::default()
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        bail!("--alpha must lie in the open interval (0, 1), got {alpha}");
    }
    Ok(())
}

enum RunOutcome {
    Decomposition(BendersResult),
    Monolithic {
        objective: f64,
        converged: bool,
        names: Vec<String>,
        values: Vec<f64>,
    },
}

fn run_algo(
    algo: &str,
    inst: &CEMInstance,
    alpha: f64,
    base: BendersConfig,
    analytic: bool,
) -> Result<RunOutcome> {
    if algo == "monolithic" {
        let (lp, integers) = assemble_monolithic(inst, CouplingMode::Decomposed);
        let (objective, converged, primal) = if integers.is_empty() {
            let sol = solve_lp(&lp, &base.solve_opts)?;
            (
                sol.objective,
                sol.status == SolveStatus::Optimal,
                sol.primal,
            )
        } else {
            let sol = solve_milp(
                &MilpProblem {
                    lp: lp.clone(),
                    integers,
                },
                &base.solve_opts,
            )?;
            (
                sol.objective,
                sol.gap <= base.solve_opts.mip_gap,
                sol.primal,
            )
        };
        return Ok(RunOutcome::Monolithic {
            objective,
            converged,
            names: lp.col_names.clone(),
            values: primal,
        });
    }

    let bp = assemble_block_problem(inst);
    let center_mode = if analytic {
        CenterMode::Analytic
    } else {
        CenterMode::Chebyshev
    };
    let res = match algo {
        "benders" => run_benders(&bp, &base)?,
        "benders-l2" | "benders-int" | "benders-tr" => {
            check_alpha(alpha)?;
            let kind = match algo {
                "benders-l2" => RegKind::L2,
                "benders-int" => RegKind::Interior,
                _ => RegKind::TrustRegion,
            };
            let mut cfg = RegConfig::new(kind, alpha);
            cfg.base = base;
            cfg.center_mode = center_mode;
            run_regularized(&bp, &cfg)?
        }
        "two-stage" => {
            check_alpha(alpha)?;
            let mut reg = RegConfig::new(RegKind::Interior, alpha);
            reg.base = base;
            reg.center_mode = center_mode;
            run_two_stage(
                &bp,
                &TwoStageConfig {
                    reg,
                    ..TwoStageConfig::default()
                },
            )?
        }
        other => bail!(
            "unknown algorithm {other:?}; expected monolithic, benders, benders-l2, \
             benders-int, benders-tr, or two-stage"
        ),
    };
    Ok(RunOutcome::Decomposition(res))
}

fn iters_to_1pct(trace: &[IterRecord]) -> Option<usize> {
    trace.iter().find(|r| r.gap <= 0.01).map(|r| r.iter + 1)
}

fn cmd_solve(args: &SolveArgs) -> Result<u8> {
    let (inst, label) = load(&args.instance)?;
    if args.tol <= 0.0 {
        bail!("--tol must be positive");
    }
    std::fs::create_dir_all(&args.out)?;

    if args.export_mps {
        let (lp, integers) = assemble_monolithic(&inst, CouplingMode::Decomposed);
        export_mps(&lp, &integers, &args.out.join("model.mps"))?;
    }

    let start = Instant::now();
    let outcome = run_algo(
        &args.algo,
        &inst,
        args.alpha,
        base_config(args.tol, args.max_iter, args.workers),
        args.analytic_center,
    )?;
    let wall_ms = start.elapsed().as_secs_f64() * 1e3;

    let regularized = args.algo != "monolithic" && args.algo != "benders";
    let converged = match &outcome {
        RunOutcome::Monolithic {
            objective,
            converged,
            names,
            values,
        } => {
            cem_core::write_solution(&args.out.join("solution.csv"), names, values)?;
            RunManifest {
                algo: args.algo.clone(),
                instance: label,
                seed: args.instance.generate.as_ref().map(|_| args.instance.seed),
                alpha: None,
                tol: args.tol,
                workers: args.workers,
                converged: *converged,
                objective: *objective,
                lower_bound: *objective,
                gap: 0.0,
                iterations: 1,
                wall_ms,
            }
            .write(&args.out.join("manifest.csv"))?;
            println!("objective {objective}");
            *converged
        }
        RunOutcome::Decomposition(res) => {
            let bp = assemble_block_problem(&inst);
            cem_core::write_trace(&args.out.join("trace.csv"), &res.trace)?;
            if !res.planning.is_empty() {
                cem_core::write_solution(
                    &args.out.join("solution.csv"),
                    &bp.planning.col_names,
                    &res.planning,
                )?;
            }
            RunManifest {
                algo: args.algo.clone(),
                instance: label,
                seed: args.instance.generate.as_ref().map(|_| args.instance.seed),
                alpha: regularized.then_some(args.alpha),
                tol: args.tol,
                workers: args.workers,
                converged: res.converged,
                objective: res.u,
                lower_bound: res.l,
                gap: res.gap,
                iterations: res.iterations,
                wall_ms,
            }
            .write(&args.out.join("manifest.csv"))?;
            println!(
                "U {}  L {}  gap {:.3e}  iterations {}",
                res.u, res.l, res.gap, res.iterations
            );
            res.converged
        }
    };
    Ok(if converged { 0 } else { 2 })
}

fn cmd_compare(args: &CompareArgs) -> Result<u8> {
    let (inst, _label) = load(&args.instance)?;
    std::fs::create_dir_all(&args.out)?;
    let mut rows = Vec::new();
    for algo in args.algos.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let start = Instant::now();
        let outcome = run_algo(
            algo,
            &inst,
            args.alpha,
            base_config(args.tol, args.max_iter, args.workers),
            false,
        )?;
        let wall_ms = start.elapsed().as_secs_f64() * 1e3;
        let (gap, iters, to1) = match &outcome {
            RunOutcome::Monolithic { .. } => (0.0, 1, Some(1)),
            RunOutcome::Decomposition(res) => {
                (res.gap, res.iterations, iters_to_1pct(&res.trace))
            }
        };
        rows.push(format!(
            "{algo},{gap},{iters},{wall_ms},{}",
            to1.map(|n| n.to_string()).unwrap_or_default()
        ));
    }
    let path = args.out.join("compare.csv");
    let body = rows.join("\n");
    std::fs::write(&path, format!("algo,final_gap,iterations,wall_ms,iters_to_1pct\n{body}\n"))?;
    println!("algo,final_gap,iterations,wall_ms,iters_to_1pct\n{body}");
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = match &cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Compare(args) => cmd_compare(args),
    };
    match run {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
