//! Command-line front end: single solves, success-rate experiments,
//! failure-region maps, bound checks and one-shot table reproduction.
//!
//! Exit codes: 0 on success, 2 on any precondition or configuration
//! violation, 3 on internal numerical failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use glide_opt::analysis::TheoremTag;
use glide_opt::harness::{
    self, bound_check, failure_region_map, trajectory_dump, BoundCheckConfig, ExperimentSpec,
    HarnessError, SolverSection,
};
use glide_opt::oracles::{OracleConfig, OracleError};
use glide_opt::sets::{Point, RegionError};
use glide_opt::solver::SolveError;

#[derive(Parser)]
#[command(
    name = "glide-opt",
    about = "Projected subgradient and subgradient gliding methods with a seeded experiment harness",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one solver instance from a JSON config and print the run record.
    Solve {
        #[arg(long)]
        config: PathBuf,
        /// Initial point as comma-separated coordinates, e.g. "0.5,0.5".
        #[arg(long)]
        x1: String,
        /// Optional per-step trajectory CSV.
        #[arg(long)]
        trajectory: Option<PathBuf>,
    },
    /// Run a seeded success-rate experiment and write a JSON report.
    SuccessRate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Also write one per-trial CSV per grid cell into this directory.
        #[arg(long)]
        trials_csv: Option<PathBuf>,
    },
    /// Map one-step PSG failures over an interior grid of the ellipse
    /// instance, comparing the geometric simulation with the predicate.
    FailureMap {
        #[arg(long, value_delimiter = ',')]
        rho_list: Vec<f64>,
        #[arg(long, default_value_t = 200)]
        grid: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 2.0)]
        k1: f64,
        #[arg(long, default_value_t = 100.0)]
        r: f64,
    },
    /// Compare measured ergodic gaps against a theorem's closed-form bound.
    BoundCheck {
        #[arg(long)]
        config: PathBuf,
        /// Theorem tag: t3c1..t3c4, t4c1..t4c4, t5sc, t6c1..t6c3, t7c1..t7c3, t8sc.
        #[arg(long)]
        theorem: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// One-shot reproduction of the success-rate tables (1, 2 or 3).
    Tables {
        #[arg(long)]
        which: u8,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
        /// Trials per grid cell (tables 1 and 3).
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        /// Worker threads for the batch runs (defaults to all cores).
        #[arg(long)]
        threads: Option<usize>,
    },
}

#[derive(Debug, Deserialize)]
struct SolveFileConfig {
    oracle: OracleConfig,
    solver: SolverSection,
    #[serde(default)]
    seed: Option<u64>,
}

/// Prints to stdout, tolerating a closed pipe (e.g. `glide-opt ... | head`).
fn emit(line: std::fmt::Arguments<'_>) {
    use std::io::Write;
    let _ = writeln!(std::io::stdout(), "{line}");
}

fn env_seed_override(config_seed: Option<u64>) -> Result<Option<u64>, HarnessError> {
    match std::env::var("GLIDE_OPT_SEED") {
        Ok(raw) => raw.trim().parse::<u64>().map(Some).map_err(|_| {
            HarnessError::Config(format!("GLIDE_OPT_SEED must be a u64, got `{raw}`"))
        }),
        Err(_) => Ok(config_seed),
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, HarnessError> {
    let raw = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&raw)?)
}

fn parse_x1(raw: &str) -> Result<Point, HarnessError> {
    let coords: Result<Vec<f64>, _> = raw.split(',').map(|c| c.trim().parse::<f64>()).collect();
    let coords = coords.map_err(|e| HarnessError::Config(format!("bad --x1: {e}")))?;
    Point::new(coords).map_err(|e| HarnessError::Config(format!("bad --x1: {e}")))
}

fn cmd_solve(config: &Path, x1: &str, trajectory: Option<&Path>) -> Result<(), HarnessError> {
    let cfg: SolveFileConfig = read_json(config)?;
    let oracle = cfg.oracle.build()?;
    let t = cfg
        .solver
        .t
        .ok_or_else(|| HarnessError::Config("solve config needs solver.t".into()))?;
    let mut solver = cfg.solver.resolve(&oracle, t)?;
    solver.record_trajectory |= trajectory.is_some();
    let x1 = parse_x1(x1)?;
    let seed = env_seed_override(cfg.seed)?.unwrap_or(0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let record = if solver.record_trajectory {
        trajectory_dump(&oracle, &solver, &x1, &mut rng)?
    } else {
        glide_opt::solver::run(&oracle, oracle.region(), &x1, &solver, &mut rng)?
    };
    if let Some(path) = trajectory {
        harness::write_trajectory_csv(path, &record)?;
    }
    let mut summary = record;
    if trajectory.is_some() {
        summary.trajectory = None; // already on disk
    }
    emit(format_args!("{}", serde_json::to_string_pretty(&summary)?));
    Ok(())
}

fn cmd_success_rate(
    config: &Path,
    out: &Path,
    trials_csv: Option<&Path>,
) -> Result<(), HarnessError> {
    let mut spec: ExperimentSpec = read_json(config)?;
    if let Some(seed) = env_seed_override(None)? {
        spec.master_seed = seed;
    }
    let started = Instant::now();
    let output = harness::run_experiment_full(&spec)?;
    eprintln!(
        "experiment `{}` finished in {:.2}s",
        spec.name,
        started.elapsed().as_secs_f64()
    );
    std::fs::write(out, serde_json::to_string_pretty(&output.report)?)?;
    if let Some(dir) = trials_csv {
        std::fs::create_dir_all(dir)?;
        for (label, records) in &output.per_cell {
            let file = format!("{}-{}.csv", spec.name, label.replace('=', "-"));
            harness::write_batch_csv(dir.join(file), records)?;
        }
    }
    for cell in &output.report.cells {
        emit(format_args!(
            "{:12} {:?} rate={:.3} +-{:.3} ({}/{})",
            cell.params, cell.method, cell.rate, cell.std_err, cell.n_success, cell.n_trials
        ));
    }
    Ok(())
}

fn cmd_failure_map(
    rho_list: &[f64],
    grid: usize,
    out: &Path,
    k1: f64,
    r: f64,
) -> Result<(), HarnessError> {
    if rho_list.is_empty() || rho_list.iter().any(|rho| *rho < 1.0) {
        return Err(HarnessError::Config(
            "--rho-list needs values >= 1 (rho = k2/k1)".into(),
        ));
    }
    let cells = failure_region_map(k1, r, rho_list, grid);
    harness::write_failure_map_csv(out, &cells)?;
    for &rho in rho_list {
        let block: Vec<_> = cells.iter().filter(|c| c.rho == rho).collect();
        let agree = block
            .iter()
            .filter(|c| c.one_step_fail == c.predicate)
            .count();
        let fail = block.iter().filter(|c| c.one_step_fail).count();
        emit(format_args!(
            "rho={rho}: {} cells, failure fraction {:.3}, predicate agreement {:.5}",
            block.len(),
            fail as f64 / block.len() as f64,
            agree as f64 / block.len() as f64
        ));
    }
    Ok(())
}

fn cmd_bound_check(config: &Path, theorem: &str, out: &Path) -> Result<(), HarnessError> {
    let mut cfg: BoundCheckConfig = read_json(config)?;
    if let Some(seed) = env_seed_override(None)? {
        cfg.master_seed = seed;
    }
    let tag = TheoremTag::parse(theorem)
        .ok_or_else(|| HarnessError::Config(format!("unknown theorem tag `{theorem}`")))?;
    let rows = bound_check(&cfg, tag)?;
    std::fs::write(out, serde_json::to_string_pretty(&rows)?)?;
    let satisfied = rows.iter().filter(|r| r.satisfied).count();
    emit(format_args!(
        "{theorem}: {satisfied}/{} rows satisfied",
        rows.len()
    ));
    if satisfied != rows.len() {
        return Err(HarnessError::Config(format!(
            "{} bound rows violated",
            rows.len() - satisfied
        )));
    }
    Ok(())
}

fn cmd_tables(
    which: u8,
    seed: Option<u64>,
    out: &Path,
    trials: usize,
    threads: Option<usize>,
) -> Result<(), HarnessError> {
    let seed = env_seed_override(seed)?.unwrap_or(42);
    let started = Instant::now();
    let body = || -> Result<PathBuf, HarnessError> {
        match which {
            1 => Ok(harness::reproduce_table1(out, seed, trials)?.0),
            2 => Ok(harness::reproduce_table2(out, seed)?.0),
            3 => Ok(harness::reproduce_table3(out, seed, trials)?.0),
            other => Err(HarnessError::Config(format!(
                "--which must be 1, 2 or 3, got {other}"
            ))),
        }
    };
    let path = match threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| HarnessError::Config(e.to_string()))?;
            pool.install(body)?
        }
        None => body()?,
    };
    eprintln!(
        "table {which} written to {} in {:.2}s",
        path.display(),
        started.elapsed().as_secs_f64()
    );
    Ok(())
}

/// Precondition/config problems exit 2, numerical failures exit 3.
fn classify_exit(err: &HarnessError) -> u8 {
    match err {
        HarnessError::Config(_) | HarnessError::Json(_) => 2,
        HarnessError::Oracle(OracleError::OutOfDomain)
        | HarnessError::Oracle(OracleError::UnknownInstance(_))
        | HarnessError::Oracle(OracleError::DimensionMismatch { .. })
        | HarnessError::Oracle(OracleError::InvalidParameter(_)) => 2,
        HarnessError::Solve(solve) => match solve {
            SolveError::PreconditionViolated(_)
            | SolveError::Oracle(_)
            | SolveError::Schedule(_)
            | SolveError::EmptyRun => 2,
            SolveError::Region(RegionError::ProjectionNonconvergence { .. })
            | SolveError::NonFiniteIterate { .. } => 3,
            SolveError::Region(_) => 2,
        },
        HarnessError::Analysis(a) => match a {
            glide_opt::analysis::AnalysisError::BracketFailure => 3,
            _ => 2,
        },
        HarnessError::Io(_) => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Solve {
            config,
            x1,
            trajectory,
        } => cmd_solve(config, x1, trajectory.as_deref()),
        Command::SuccessRate {
            config,
            out,
            trials_csv,
        } => cmd_success_rate(config, out, trials_csv.as_deref()),
        Command::FailureMap {
            rho_list,
            grid,
            out,
            k1,
            r,
        } => cmd_failure_map(rho_list, *grid, out, *k1, *r),
        Command::BoundCheck {
            config,
            theorem,
            out,
        } => cmd_bound_check(config, theorem, out),
        Command::Tables {
            which,
            seed,
            out,
            trials,
            threads,
        } => cmd_tables(*which, *seed, out, *trials, *threads),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(classify_exit(&err))
        }
    }
}
