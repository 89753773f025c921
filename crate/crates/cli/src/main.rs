//! `rodmech` — scenario runner for the rigid-body variational integrators.
//!
//! Subcommands:
//! * `run --config <path> --out <path>` — integrate one scenario, write the
//!   sampled time series as CSV and a run summary as JSON on stdout.
//! * `converge --config <path> --h <list> --out <path>` — convergence study
//!   over a list of step sizes; JSON report to `<out>` plus a CSV next to it.
//! * `check --seed <n>` — run the verification suites; JSON report on
//!   stdout, nonzero exit if any suite fails.
//!
//! Exit codes: 0 success, 2 configuration error, 3 simulation error,
//! 4 check failure. `RODMECH_THREADS` caps the parallelism of `converge`.

mod config;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use rodmech_core::diagnostics::{convergence_study, momenta, ConvergenceReport, RefRule};
use rodmech_core::dynamics::{simulate, PotentialModel, SystemState};
use rodmech_core::models::{pendulum_invariants, FreeModel};

use config::{BuiltScenario, ResolvedRun, ScenarioConfig};
use output::{csv_row, fmt_f64, write_atomic, CSV_HEADER};

#[derive(Parser)]
#[command(
    name = "rodmech",
    about = "Rigid-body variational integrator toolkit",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a scenario and write the sampled time series as CSV.
    Run {
        /// Scenario configuration (JSON).
        #[arg(long)]
        config: PathBuf,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Measure convergence order over a list of step sizes.
    Converge {
        /// Scenario configuration (JSON).
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated step sizes, e.g. `1e-1,3e-2,1e-2,3e-3,1e-3`.
        #[arg(long, value_delimiter = ',', required = true)]
        h: Vec<f64>,
        /// Output JSON path (a CSV with the per-h errors is written next to it).
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the verification suites.
    Check {
        /// Seed for the randomized suites.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Simulation(String),
    CheckFailure,
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Simulation(_) => 3,
            CliError::CheckFailure => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "configuration error: {msg}"),
            CliError::Simulation(msg) => write!(f, "simulation error: {msg}"),
            CliError::CheckFailure => write!(f, "one or more checks failed"),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config, out } => cmd_run(&config, &out),
        Command::Converge { config, h, out } => cmd_converge(&config, &h, &out),
        Command::Check { seed } => cmd_check(seed),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("rodmech: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn load_config(path: &Path) -> Result<ScenarioConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    ScenarioConfig::from_json(&text)
}

/// Per-scenario auxiliary CSV columns: the pendulum's conserved pair
/// `(Rρ0·Ω, ‖Rρ0‖)`, zeros elsewhere.
fn aux_columns(scenario: &BuiltScenario, state: &SystemState) -> (f64, f64) {
    match scenario {
        BuiltScenario::Pendulum(_, model) => {
            let (_, axial, length) = pendulum_invariants(state, model).unwrap_or((0.0, 0.0, 0.0));
            (axial, length)
        }
        _ => (0.0, 0.0),
    }
}

fn cmd_run(config_path: &Path, out: &Path) -> Result<(), CliError> {
    let run = load_config(config_path)?.resolve()?;
    match &run.scenario {
        BuiltScenario::Pendulum(state, model) => run_and_write(&run, state, model, out),
        BuiltScenario::Torus(state, model) => run_and_write(&run, state, model, out),
        BuiltScenario::Custom(state) => run_and_write(&run, state, &FreeModel, out),
    }
}

fn run_and_write<M: PotentialModel + ?Sized>(
    run: &ResolvedRun,
    initial: &SystemState,
    model: &M,
    out: &Path,
) -> Result<(), CliError> {
    let started = Instant::now();
    let mut csv = String::from(CSV_HEADER);
    csv.push('\n');

    let mut e0 = f64::NAN;
    let mut aux0 = (0.0, 0.0);
    let mut max_drift_abs: f64 = 0.0;
    let mut max_aux_drift = (0.0f64, 0.0f64);
    let mut m0 = None;
    let mut max_momentum_drift = (0.0f64, 0.0f64);
    let mut samples = 0usize;

    let final_state = simulate(
        initial,
        model,
        run.scheme,
        run.h,
        run.t_end,
        run.sample_every,
        |state, ledger, m| {
            let aux = aux_columns(&run.scenario, state);
            if samples == 0 {
                e0 = ledger.total;
                aux0 = aux;
                m0 = Some(*m);
            }
            samples += 1;
            max_drift_abs = max_drift_abs.max((ledger.total - e0).abs());
            max_aux_drift.0 = max_aux_drift.0.max((aux.0 - aux0.0).abs());
            max_aux_drift.1 = max_aux_drift.1.max((aux.1 - aux0.1).abs());
            if let Some(m0) = &m0 {
                max_momentum_drift.0 = max_momentum_drift.0.max((m.linear - m0.linear).abs().max());
                max_momentum_drift.1 = max_momentum_drift
                    .1
                    .max((m.total_angular - m0.total_angular).abs().max());
            }
            csv.push_str(&csv_row(ledger, m, aux));
            csv.push('\n');
        },
    )
    .map_err(|e| CliError::Simulation(e.to_string()))?;

    write_atomic(out, &csv)
        .map_err(|e| CliError::Simulation(format!("writing {}: {e}", out.display())))?;

    let final_ledger = rodmech_core::diagnostics::energy_ledger(&final_state, model)
        .map_err(|e| CliError::Simulation(e.to_string()))?;
    let final_momenta = momenta(&final_state);
    let steps = (run.t_end / run.h).round() as usize;
    let summary = serde_json::json!({
        "scenario": run.scenario.name(),
        "scheme": run.scheme.name(),
        "h": run.h,
        "t_end": run.t_end,
        "seed": run.seed,
        "steps": steps,
        "samples": samples,
        "wall_clock_seconds": started.elapsed().as_secs_f64(),
        "final_energy": final_ledger,
        "final_momenta": final_momenta,
        "max_energy_drift_abs": max_drift_abs,
        "max_energy_drift_rel": if e0 != 0.0 { Some(max_drift_abs / e0.abs()) } else { None },
        "invariants": {
            "max_aux1_drift": max_aux_drift.0,
            "max_aux2_drift": max_aux_drift.1,
            "max_linear_momentum_drift": max_momentum_drift.0,
            "max_angular_momentum_drift": max_momentum_drift.1,
        },
        "out": out.display().to_string(),
    });
    println!("{}", serde_json::to_string_pretty(&summary).unwrap());
    Ok(())
}

fn cmd_converge(config_path: &Path, h_list: &[f64], out: &Path) -> Result<(), CliError> {
    if h_list.len() < 3 {
        return Err(CliError::Config(format!(
            "converge needs at least 3 step sizes, got {}",
            h_list.len()
        )));
    }
    if h_list.iter().any(|h| !(*h > 0.0 && h.is_finite())) {
        return Err(CliError::Config("step sizes must be positive".into()));
    }
    let run = load_config(config_path)?.resolve()?;

    let pool = thread_pool()?;
    let study = |state: &SystemState, model: &(dyn PotentialModel + Sync)| {
        pool.install(|| {
            convergence_study(
                state,
                model,
                run.scheme,
                h_list,
                run.t_end,
                RefRule::default(),
            )
        })
    };
    let report = match &run.scenario {
        BuiltScenario::Pendulum(state, model) => study(state, model),
        BuiltScenario::Torus(state, model) => study(state, model),
        BuiltScenario::Custom(state) => study(state, &FreeModel),
    }
    .map_err(|e| CliError::Simulation(e.to_string()))?;

    let json = serde_json::json!({
        "scenario": run.scenario.name(),
        "scheme": run.scheme.name(),
        "t_end": run.t_end,
        "report": report,
    });
    write_atomic(out, &serde_json::to_string_pretty(&json).unwrap())
        .map_err(|e| CliError::Simulation(format!("writing {}: {e}", out.display())))?;
    let csv_path = out.with_extension("csv");
    write_atomic(&csv_path, &report_csv(&report))
        .map_err(|e| CliError::Simulation(format!("writing {}: {e}", csv_path.display())))?;

    println!(
        "{}: energy slope {:.3} (R²={:.4}), trajectory slope {:.3} (R²={:.4})",
        run.scheme.name(),
        report.energy_fit.slope,
        report.energy_fit.r_squared,
        report.trajectory_fit.slope,
        report.trajectory_fit.r_squared,
    );
    Ok(())
}

fn report_csv(report: &ConvergenceReport) -> String {
    let mut csv = String::from("h,e_error,q_error,q_error_diff\n");
    for p in &report.points {
        csv.push_str(&fmt_f64(p.h));
        csv.push(',');
        csv.push_str(&fmt_f64(p.e_error));
        csv.push(',');
        csv.push_str(&fmt_f64(p.q_error));
        csv.push(',');
        if let Some(d) = p.q_error_diff {
            csv.push_str(&fmt_f64(d));
        }
        csv.push('\n');
    }
    csv
}

/// Build the rayon pool for sweep parallelism, honoring `RODMECH_THREADS`.
fn thread_pool() -> Result<rayon::ThreadPool, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("RODMECH_THREADS") {
        let n: usize = v.parse().map_err(|_| {
            CliError::Config(format!(
                "RODMECH_THREADS must be a positive integer, got {v:?}"
            ))
        })?;
        if n == 0 {
            return Err(CliError::Config("RODMECH_THREADS must be ≥ 1".into()));
        }
        builder = builder.num_threads(n);
    }
    builder
        .build()
        .map_err(|e| CliError::Simulation(format!("thread pool: {e}")))
}

fn cmd_check(seed: u64) -> Result<(), CliError> {
    let outcomes =
        rodmech_core::checks::run_all(seed).map_err(|e| CliError::Simulation(e.to_string()))?;
    let all_pass = outcomes.iter().all(|c| c.pass);
    let json = serde_json::json!({
        "seed": seed,
        "checks": outcomes,
        "all_pass": all_pass,
    });
    println!("{}", serde_json::to_string_pretty(&json).unwrap());
    if all_pass {
        Ok(())
    } else {
        Err(CliError::CheckFailure)
    }
}
