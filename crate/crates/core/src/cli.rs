//! Command-line front end.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::acceptance::{CriterionResult, ALL_CRITERIA};
use crate::error::{Error, Result};
use crate::factor::{theta_grid, FactorOptions, Factorization, Factorizer, Objective, COST_TOL};
use crate::family::Family;
use crate::lie::{LieAlgebraModel, Mode};
use crate::linalg::expm;
use crate::pauli::{schedule, schedule_error, PauliSchedule};
use crate::report::{to_json, AlgebraReport};
use crate::vqe::adapt::{spin_collapse_demo, SpinCollapseReport, VqeRun};
use crate::vqe::config::VqeConfig;
use crate::vqe::pool::PoolKind;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(name = "spinfact", version, about = "Spin-adapted generator algebras, exact factorizations, Pauli schedules and adaptive VQE")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Output file (or directory for multi-angle factorizations).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Random seed.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Command tolerance: factorization cost, schedule check, or VQE gradient threshold.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Print machine-readable JSON on stdout instead of text.
    #[arg(long, global = true)]
    pub json: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a generator algebra and report its structure.
    Algebra {
        /// s2-iiab, s2-ijaa, s4-singlet or s4-triplet
        #[arg(long)]
        family: Family,
        /// appendix (listed generators) or discovery (closure of the seed set)
        #[arg(long, default_value = "appendix")]
        mode: Mode,
    },
    /// Factorize exp(θG) into one-parameter factors.
    Factorize {
        /// s2-iiab, s2-ijaa, s4-singlet or s4-triplet
        #[arg(long)]
        family: Family,
        /// Angles to solve; defaults to the grid.
        #[arg(long, allow_hyphen_values = true, value_delimiter = ',')]
        theta: Vec<f64>,
        /// Number of evenly spaced angles in [-π, π] when no angle is given.
        #[arg(long, default_value_t = 9)]
        grid: usize,
        /// Random restarts before giving up on an angle.
        #[arg(long, default_value_t = 8)]
        restarts: usize,
        /// faithful (Fock blocks) or adjoint
        #[arg(long, default_value = "faithful")]
        objective: Objective,
    },
    /// Emit the Pauli rotation schedule of a factorization.
    Schedule {
        /// factorization.json produced by `factorize`.
        input: PathBuf,
        /// Replay the schedule on every basis state against the exact exponential.
        #[arg(long)]
        check: bool,
    },
    /// Run adaptive VQE on FCIDUMP or synthetic integrals.
    Vqe(VqeArgs),
    /// Run the full acceptance battery.
    VerifyAll {
        /// Restrict to these criterion numbers.
        #[arg(long, value_delimiter = ',')]
        only: Vec<usize>,
    },
}

#[derive(Debug, Clone, Args)]
pub struct VqeArgs {
    /// Run configuration JSON; command-line options override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// FCIDUMP file with the Hamiltonian.
    #[arg(long, conflicts_with = "synthetic")]
    pub fcidump: Option<PathBuf>,
    /// Synthetic Hamiltonian as `n,seed`.
    #[arg(long)]
    pub synthetic: Option<String>,
    /// Operator pool: sd, sa or pair
    #[arg(long)]
    pub pool: Option<PoolKind>,
    /// ADAPT iteration limit
    #[arg(long)]
    pub max_iters: Option<usize>,
    /// Also write the trajectory as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Run the triplet-reference spin-collapse comparison instead.
    #[arg(long)]
    pub spin_collapse: bool,
}

#[derive(Serialize)]
struct Artifact<'a, T: Serialize> {
    #[serde(flatten)]
    body: &'a T,
    tool_version: &'static str,
    config: serde_json::Value,
}

fn write_artifact<T: Serialize>(path: &Path, body: &T, config: serde_json::Value) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, to_json(&Artifact { body, tool_version: VERSION, config })?)?;
    Ok(())
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::invalid(format!("cannot read {}: {e}", path.display())))
}

/// Outcome of a command: text for stdout and whether the run succeeded numerically.
struct Outcome {
    text: String,
    json: serde_json::Value,
    ok: bool,
}

fn cmd_algebra(g: &GlobalArgs, family: Family, mode: Mode) -> Result<Outcome> {
    let model = LieAlgebraModel::for_family(family, mode)?;
    let report = AlgebraReport::from_model(&model, g.seed)?;
    let config = serde_json::json!({ "command": "algebra", "family": family, "mode": report.mode, "seed": g.seed });
    if let Some(out) = &g.out {
        write_artifact(out, &report, config)?;
    }
    let mut ok = true;
    let mut text = format!("{family} ({}): {}\n", report.mode, report.summary_line());
    if report.killing_max_eigenvalue >= 0.0 {
        ok = false;
        text.push_str(&format!("check failed: Killing form not negative definite (max eigenvalue {:e})\n", report.killing_max_eigenvalue));
    }
    if model.structure.closure_residual > crate::lie::INDEPENDENCE_TOL {
        ok = false;
        text.push_str("check failed: basis not closed under commutators\n");
    }
    Ok(Outcome { text, json: serde_json::to_value(&report)?, ok })
}

#[derive(Serialize)]
struct FactorRow {
    theta: f64,
    converged: bool,
    cost_residual: Option<f64>,
    fock_residual: Option<f64>,
    nonzero_parameters: Option<usize>,
    error: Option<String>,
}

fn cmd_factorize(g: &GlobalArgs, family: Family, theta: &[f64], grid: usize, restarts: usize, objective: Objective) -> Result<Outcome> {
    let thetas = if theta.is_empty() { theta_grid(grid) } else { theta.to_vec() };
    if thetas.is_empty() {
        return Err(Error::invalid("no angles to factorize"));
    }
    let opts = FactorOptions { seed: g.seed, restarts, objective, cost_tol: g.tol.unwrap_or(COST_TOL), ..Default::default() };
    let fz = Factorizer::new(family)?;
    let multi = thetas.len() > 1;
    if let (true, Some(out)) = (multi, &g.out) {
        fs::create_dir_all(out)?;
    }
    let mut rows = Vec::new();
    let mut text = format!("{family}: {} factors, objective {objective:?}\n", fz.center.len() + fz.semisimple.len());
    text.push_str(&format!("{:>10} {:>12} {:>12} {:>8}\n", "theta", "cost", "fock", "nonzero"));
    for (k, &th) in thetas.iter().enumerate() {
        let config = serde_json::json!({
            "command": "factorize", "family": family, "theta": th, "seed": g.seed,
            "restarts": restarts, "objective": objective, "cost_tol": opts.cost_tol,
        });
        match fz.factorize(th, &opts) {
            Ok(fac) => {
                let nonzero = fac.central.iter().map(|c| c.angle).chain(fac.semisimple.iter().map(|s| s.t)).filter(|v| v.abs() > 1e-12).count();
                text.push_str(&format!("{th:>10.6} {:>12.3e} {:>12.3e} {nonzero:>8}\n", fac.cost_residual, fac.fock_residual));
                if let Some(out) = &g.out {
                    let path = if multi { out.join(format!("factorization_{k:02}.json")) } else { out.clone() };
                    write_artifact(&path, &fac, config)?;
                }
                rows.push(FactorRow {
                    theta: th,
                    converged: true,
                    cost_residual: Some(fac.cost_residual),
                    fock_residual: Some(fac.fock_residual),
                    nonzero_parameters: Some(nonzero),
                    error: None,
                });
            }
            Err(e) if !e.is_usage() => {
                text.push_str(&format!("{th:>10.6} FAILED: {e}\n"));
                rows.push(FactorRow { theta: th, converged: false, cost_residual: None, fock_residual: None, nonzero_parameters: None, error: Some(e.to_string()) });
            }
            Err(e) => return Err(e),
        }
    }
    let ok = rows.iter().all(|r| r.converged);
    Ok(Outcome { text, json: serde_json::json!({ "family": family, "rows": rows }), ok })
}

fn cmd_schedule(g: &GlobalArgs, input: &Path, check: bool) -> Result<Outcome> {
    let fac: Factorization = serde_json::from_str(&read_text(input)?)?;
    let fz = Factorizer::new(fac.family)?;
    let sched = match schedule(&fz, &fac) {
        Ok(s) => s,
        Err(e @ Error::Numerical(_)) => {
            return Ok(Outcome { text: format!("schedule failed: {e}\n"), json: serde_json::json!({ "error": e.to_string() }), ok: false })
        }
        Err(e) => return Err(e),
    };
    let config = serde_json::json!({ "command": "schedule", "input": input, "check": check });
    if let Some(out) = &g.out {
        write_artifact(out, &sched, config)?;
    }
    let mut text = format!(
        "{}: total_strings={} rotations={} per_factor={:?} cnot={} rz={}\n",
        fac.family, sched.total_strings, sched.total_rotations, sched.per_factor_counts, sched.gate_estimate.cnot, sched.gate_estimate.rz
    );
    let mut ok = true;
    let mut check_err = None;
    if check {
        let tol = g.tol.unwrap_or(1e-6);
        let exact = expm(&(fz.generator().to_dense() * fac.theta));
        let err = schedule_error(&sched, &exact)?;
        ok = err < tol;
        check_err = Some(err);
        text.push_str(&format!("check: max column error {err:.3e} ({})\n", if ok { "ok" } else { "FAILED" }));
    }
    let json = serde_json::json!({ "schedule": summary(&sched), "check_error": check_err });
    Ok(Outcome { text, json, ok })
}

fn summary(s: &PauliSchedule) -> serde_json::Value {
    serde_json::json!({
        "family": s.family, "theta": s.theta, "total_strings": s.total_strings,
        "total_rotations": s.total_rotations, "per_factor_counts": s.per_factor_counts,
    })
}

fn resolve_vqe_config(g: &GlobalArgs, args: &VqeArgs) -> Result<VqeConfig> {
    let mut cfg = match &args.config {
        Some(p) => serde_json::from_str(&read_text(p)?)?,
        None => VqeConfig { seed: g.seed, ..Default::default() },
    };
    if let Some(p) = &args.fcidump {
        cfg.source = p.display().to_string();
    }
    if let Some(s) = &args.synthetic {
        cfg.source = format!("synthetic:{s}");
    }
    if let Some(p) = args.pool {
        cfg.pool = p;
    }
    if let Some(m) = args.max_iters {
        cfg.max_iters = m;
    }
    if let Some(t) = g.tol {
        cfg.grad_tol = t;
    }
    Ok(cfg)
}

fn cmd_vqe(g: &GlobalArgs, args: &VqeArgs) -> Result<Outcome> {
    let cfg = resolve_vqe_config(g, args)?;
    let opts = cfg.adapt_options();
    let config = serde_json::to_value(&cfg)?;
    if args.spin_collapse {
        let demo: SpinCollapseReport = spin_collapse_demo(cfg.seed, &opts)?;
        if let Some(out) = &g.out {
            write_artifact(out, &demo, config)?;
        }
        let text = format!(
            "singlet ground {:.10}, triplet ground {:.10}\nSD: E={:.10} <S2>={:.6} params={}\nSA: E={:.10} <S2>={:.6} params={}\n",
            demo.singlet_ground, demo.triplet_ground, demo.sd.final_energy, demo.sd.final_s2, demo.sd.n_parameters,
            demo.sa.final_energy, demo.sa.final_s2, demo.sa.n_parameters
        );
        let ok = demo.sa.converged && demo.sd.converged;
        return Ok(Outcome { text, json: serde_json::to_value(&demo)?, ok });
    }
    let problem = cfg.problem()?;
    let run: VqeRun = problem.run(cfg.pool, &opts)?;
    if let Some(out) = &g.out {
        write_artifact(out, &run, config)?;
    }
    if let Some(csv) = &args.csv {
        fs::write(csv, run.to_csv())?;
    }
    let mut text = String::new();
    for r in &run.iterations {
        text.push_str(&format!("{:>4} {:<24} E={:.10} <S2>={:.3e} |g|={:.3e}\n", r.iteration, r.operator, r.energy, r.s2, r.max_gradient));
    }
    text.push_str(&format!(
        "pool={} converged={} parameters={} distinct={} E={:.10} exact={:.10} gap={:.3e}\n",
        run.pool,
        run.converged,
        run.n_parameters,
        run.distinct_operators,
        run.final_energy,
        run.reference_energy.unwrap_or(f64::NAN),
        run.energy_error().unwrap_or(f64::NAN)
    ));
    if let Some(m) = &run.message {
        text.push_str(&format!("note: {m}\n"));
    }
    Ok(Outcome { text, json: serde_json::to_value(&run)?, ok: run.converged })
}

fn cmd_verify_all(g: &GlobalArgs, only: &[usize]) -> Result<Outcome> {
    if let Some(bad) = only.iter().find(|&&k| k == 0 || k > ALL_CRITERIA.len()) {
        return Err(Error::invalid(format!("no criterion {bad}")));
    }
    let mut text = format!("spinfact {VERSION}, seeds: factorization 0, ideal split 0, synthetic VQE 0-4\n");
    let mut results: Vec<CriterionResult> = Vec::new();
    for (k, c) in ALL_CRITERIA.iter().enumerate() {
        if !only.is_empty() && !only.contains(&(k + 1)) {
            continue;
        }
        let r = c();
        text.push_str(&r.line());
        text.push('\n');
        for d in &r.details {
            text.push_str(&format!("       {d}\n"));
        }
        results.push(r);
    }
    let ok = results.iter().all(|r| r.passed);
    let report = serde_json::json!({ "tool_version": VERSION, "results": results });
    if let Some(out) = &g.out {
        fs::write(out, to_json(&report)?)?;
    }
    Ok(Outcome { text, json: report, ok })
}

/// Runs a parsed command; returns the process exit code.
pub fn run(cli: Cli) -> ExitCode {
    let g = &cli.global;
    let result = match &cli.command {
        Command::Algebra { family, mode } => cmd_algebra(g, *family, *mode),
        Command::Factorize { family, theta, grid, restarts, objective } => cmd_factorize(g, *family, theta, *grid, *restarts, *objective),
        Command::Schedule { input, check } => cmd_schedule(g, input, *check),
        Command::Vqe(args) => cmd_vqe(g, args),
        Command::VerifyAll { only } => cmd_verify_all(g, only),
    };
    match result {
        Ok(o) => {
            if g.json {
                println!("{}", serde_json::to_string_pretty(&o.json).unwrap_or_default());
            } else {
                print!("{}", o.text);
            }
            if o.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_usage() { 2 } else { 1 })
        }
    }
}

pub fn main() -> ExitCode {
    run(Cli::parse())
}
