//! Seeded experiment driver: success-rate sweeps, failure-region maps,
//! trajectory dumps, the adaptive-beta comparison, and one-shot table
//! reproduction.
//!
//! Determinism contract: trial `i` of a batch draws everything (initial point,
//! noise) from the ChaCha8 stream `(master_seed, i)`, so identical specs and
//! seeds produce byte-identical reports regardless of thread count. Wall time
//! is logged to stderr and never written into report files. CSV output uses
//! `.` decimals and 17 significant digits so floats round-trip exactly.

use std::io::Write as _;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::{
    bound_value, e1_failure_predicate, AnalysisError, BoundSpec, RunStats, TheoremTag,
};
use crate::oracles::{NoiseModel, Oracle, OracleConfig, OracleError};
use crate::schedules::{eq12_weight, AlphaRule, BetaRule, WeightRule};
use crate::sets::Point;
use crate::solver::{
    run, run_batch, sample_strict_interior, Method, RunRecord, RunStatus, SolveError, SolverConfig,
};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("invalid config: {0}")]
    Config(String),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
}

/// Success rule of one experiment: a run must finish its `max_iters`
/// iterations without hitting an undefined subgradient (or stop early at an
/// exact optimum) and, when a threshold is set, reach
/// `min_f - f* <= gap_threshold`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuccessRule {
    pub max_iters: u64,
    pub gap_threshold: Option<f64>,
}

impl SuccessRule {
    pub fn classify(&self, record: &RunRecord, f_star: Option<f64>) -> bool {
        if !record.status.is_completed_or_optimal() {
            return false;
        }
        match (self.gap_threshold, f_star) {
            (Some(th), Some(fs)) => record.min_gap(fs) <= th,
            (Some(_), None) => false,
            (None, _) => true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepParam {
    K2,
    N,
}

/// One-axis parameter grid, e.g. `{"param":"k2","values":[5,7,10,15,20]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Sweep {
    pub param: SweepParam,
    pub values: Vec<f64>,
}

/// Solver section of config files. `alpha` is raw JSON so that `R`, `L`,
/// `mu` and `t_total` may be omitted and filled from the oracle metadata.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolverSection {
    pub method: Method,
    pub alpha: serde_json::Value,
    #[serde(default = "default_beta")]
    pub beta: BetaRule,
    #[serde(default = "default_weight")]
    pub weight: WeightRule,
    #[serde(default)]
    pub t: Option<u64>,
    #[serde(default)]
    pub noise: NoiseModel,
    #[serde(default)]
    pub record_trajectory: bool,
}

fn default_beta() -> BetaRule {
    BetaRule::Constant { value: 0.5 }
}

fn default_weight() -> WeightRule {
    WeightRule::ConstantW
}

impl SolverSection {
    /// Resolves the raw alpha JSON against oracle metadata and builds a
    /// validated `SolverConfig` with horizon `t`.
    pub fn resolve(&self, oracle: &Oracle, t: u64) -> Result<SolverConfig, HarnessError> {
        let mut alpha = self.alpha.clone();
        let obj = alpha
            .as_object_mut()
            .ok_or_else(|| HarnessError::Config("alpha must be a JSON object".into()))?;
        let ty = obj
            .get("type")
            .and_then(|t| t.as_str())
            .ok_or_else(|| HarnessError::Config("alpha needs a `type` field".into()))?
            .to_string();
        let mut fill = |key: &str, value: Option<f64>, why: &str| -> Result<(), HarnessError> {
            if !obj.contains_key(key) {
                let v = value.ok_or_else(|| {
                    HarnessError::Config(format!("alpha `{ty}` needs `{key}` ({why})"))
                })?;
                obj.insert(key.into(), serde_json::json!(v));
            }
            Ok(())
        };
        match ty.as_str() {
            "constant-horizon" => {
                fill("R", Some(oracle.radius_r()), "containment radius")?;
                fill(
                    "L",
                    oracle.lipschitz_l(),
                    "no Lipschitz constant on this instance",
                )?;
                if !obj.contains_key("t_total") {
                    obj.insert("t_total".into(), serde_json::json!(t));
                }
            }
            "decaying-rl" => {
                fill("R", Some(oracle.radius_r()), "containment radius")?;
                fill(
                    "L",
                    oracle.lipschitz_l(),
                    "no Lipschitz constant on this instance",
                )?;
            }
            "normalized" | "adaptive-g" => {
                fill("R", Some(oracle.radius_r()), "containment radius")?;
            }
            "strongly-convex-joint" => {
                fill("mu", oracle.strong_mu(), "instance is not strongly convex")?;
            }
            other => {
                return Err(HarnessError::Config(format!(
                    "unknown alpha type `{other}`"
                )));
            }
        }
        let alpha: AlphaRule = serde_json::from_value(alpha)?;
        let config = SolverConfig {
            method: self.method,
            alpha,
            beta: self.beta.clone(),
            weight: self.weight,
            t,
            noise: self.noise,
            success_gap: None,
            record_trajectory: self.record_trajectory,
        };
        config.validate().map_err(HarnessError::Solve)?;
        Ok(config)
    }
}

/// A named, fully seeded success-rate experiment.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub name: String,
    pub oracle: OracleConfig,
    pub solver: SolverSection,
    pub n_trials: usize,
    pub master_seed: u64,
    pub success: SuccessRule,
    #[serde(default)]
    pub sweep: Option<Sweep>,
}

impl ExperimentSpec {
    pub fn from_json(json: &str) -> Result<Self, HarnessError> {
        Ok(serde_json::from_str(json)?)
    }

    fn cell_oracle(&self, value: Option<f64>) -> Result<(String, Oracle), HarnessError> {
        let mut cfg = self.oracle.clone();
        let label = match (value, self.sweep.as_ref().map(|s| s.param)) {
            (Some(v), Some(SweepParam::K2)) => {
                match &mut cfg {
                    OracleConfig::E1 { k2, .. } => *k2 = v,
                    _ => {
                        return Err(HarnessError::Config(
                            "k2 sweep only applies to the ellipse instance".into(),
                        ))
                    }
                }
                format!("k2={v}")
            }
            (Some(v), Some(SweepParam::N)) => {
                let n = v as usize;
                if (n as f64 - v).abs() > 0.0 {
                    return Err(HarnessError::Config(
                        "n sweep values must be integers".into(),
                    ));
                }
                match &mut cfg {
                    OracleConfig::E3 { n: field, .. }
                    | OracleConfig::L1Box { n: field }
                    | OracleConfig::MaxAbsBox { n: field } => *field = n,
                    OracleConfig::E1 { .. } | OracleConfig::E2 {} => {
                        return Err(HarnessError::Config(
                            "n sweep does not apply to fixed-dimension instances".into(),
                        ))
                    }
                }
                format!("n={n}")
            }
            _ => "-".into(),
        };
        Ok((label, cfg.build()?))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CellReport {
    pub params: String,
    pub method: Method,
    pub n_trials: usize,
    pub n_success: usize,
    pub rate: f64,
    /// Binomial standard error `sqrt(rate (1 - rate) / n)`.
    pub std_err: f64,
    pub mean_min_f: f64,
    pub mean_iterations: f64,
    /// Largest per-run interior-violation count in the cell (0 for SGM with
    /// a gliding step in (0,1) and an interior start).
    pub max_interior_violations: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportMetadata {
    pub master_seed: u64,
    pub spec_hash: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuccessRateReport {
    pub cells: Vec<CellReport>,
    pub metadata: ReportMetadata,
}

/// FNV-1a over the canonical spec JSON; stable across runs and platforms.
fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

/// Full output of an experiment: the aggregate report plus the per-cell
/// trial records (for per-trial CSV export).
pub struct ExperimentOutput {
    pub report: SuccessRateReport,
    pub per_cell: Vec<(String, Vec<Result<RunRecord, SolveError>>)>,
}

/// Runs every grid cell of the spec and aggregates success counts. A trial
/// that errors counts as a failure and is logged to stderr.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<SuccessRateReport, HarnessError> {
    Ok(run_experiment_full(spec)?.report)
}

pub fn run_experiment_full(spec: &ExperimentSpec) -> Result<ExperimentOutput, HarnessError> {
    let spec_hash = format!("{:016x}", fnv1a64(serde_json::to_string(spec)?.as_bytes()));
    let values: Vec<Option<f64>> = match &spec.sweep {
        Some(sweep) => sweep.values.iter().copied().map(Some).collect(),
        None => vec![None],
    };
    let mut cells = Vec::new();
    let mut per_cell = Vec::new();
    for value in values {
        let (label, oracle) = spec.cell_oracle(value)?;
        let config = spec.solver.resolve(&oracle, spec.success.max_iters)?;
        let region = oracle.region().clone();
        let results = run_batch(
            &oracle,
            &region,
            &config,
            spec.n_trials,
            spec.master_seed,
            |rng| sample_strict_interior(&region, rng),
        );
        let mut n_success = 0usize;
        let mut sum_min_f = 0.0;
        let mut sum_iters = 0.0;
        let mut n_ok = 0usize;
        let mut max_violations = 0u64;
        for (trial, result) in results.iter().enumerate() {
            match result {
                Ok(record) => {
                    n_ok += 1;
                    sum_min_f += record.min_f;
                    sum_iters += record.iterations_done as f64;
                    max_violations = max_violations.max(record.interior_violations);
                    if spec.success.classify(record, oracle.f_star()) {
                        n_success += 1;
                    }
                }
                Err(err) => {
                    eprintln!("[{}] trial {trial} failed: {err}", spec.name);
                }
            }
        }
        let rate = n_success as f64 / spec.n_trials as f64;
        cells.push(CellReport {
            params: label.clone(),
            method: config.method,
            n_trials: spec.n_trials,
            n_success,
            rate,
            std_err: (rate * (1.0 - rate) / spec.n_trials as f64).sqrt(),
            mean_min_f: if n_ok > 0 {
                sum_min_f / n_ok as f64
            } else {
                f64::NAN
            },
            mean_iterations: if n_ok > 0 {
                sum_iters / n_ok as f64
            } else {
                f64::NAN
            },
            max_interior_violations: max_violations,
        });
        per_cell.push((label, results));
    }
    Ok(ExperimentOutput {
        report: SuccessRateReport {
            cells,
            metadata: ReportMetadata {
                master_seed: spec.master_seed,
                spec_hash,
            },
        },
        per_cell,
    })
}

/// Float formatting used in every CSV: 17 significant digits, `.` decimal.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_csv<P: AsRef<Path>>(
    path: P,
    header: &[&str],
    rows: &[Vec<String>],
) -> Result<(), HarnessError> {
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    let mut file = std::fs::File::create(path)?;
    file.write_all(out.as_bytes())?;
    Ok(())
}

/// Per-trial CSV export of batch results.
pub fn write_batch_csv<P: AsRef<Path>>(
    path: P,
    records: &[Result<RunRecord, SolveError>],
) -> Result<(), HarnessError> {
    let rows: Vec<Vec<String>> = records
        .iter()
        .enumerate()
        .map(|(trial, result)| match result {
            Ok(r) => vec![
                trial.to_string(),
                r.status.to_string(),
                r.iterations_done.to_string(),
                fmt_float(r.min_f),
                r.ergodic_gap.map_or(String::new(), fmt_float),
                fmt_float(r.bound_terms.max_gnorm),
                r.interior_violations.to_string(),
            ],
            Err(e) => vec![
                trial.to_string(),
                format!("error({e})"),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
            ],
        })
        .collect();
    write_csv(
        path,
        &[
            "trial",
            "status",
            "iterations_done",
            "min_f",
            "ergodic_gap",
            "max_gnorm",
            "interior_violations",
        ],
        &rows,
    )
}

// ---------------------------------------------------------------------------
// Failure-region map
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, Serialize)]
pub struct FailureMapCell {
    pub rho: f64,
    pub x1: f64,
    pub x2: f64,
    /// Direct geometric simulation of the first PSG step.
    pub one_step_fail: bool,
    /// Analytic predicate at the same point.
    pub predicate: bool,
}

/// First PSG update on the ellipse instance with `alpha_1 = R/||g_1||`:
/// does it leave the open ellipse?
pub fn one_step_psg_failure(k1: f64, k2: f64, r: f64, x: &Point) -> bool {
    let slack = r - k1 * x[0] * x[0] - k2 * x[1] * x[1];
    debug_assert!(slack > 0.0);
    let g = [k1 * x[0], k2 * x[1]];
    let gn = (g[0] * g[0] + g[1] * g[1]).sqrt() / slack.sqrt();
    if gn == 0.0 {
        return false; // exact optimum, no step
    }
    let big_r = (r / k1).sqrt().max((r / k2).sqrt());
    let scale = big_r / (g[0] * g[0] + g[1] * g[1]).sqrt() * slack.sqrt();
    let y = [
        x[0] - scale * g[0] / slack.sqrt(),
        x[1] - scale * g[1] / slack.sqrt(),
    ];
    k1 * y[0] * y[0] + k2 * y[1] * y[1] >= r
}

/// Grid of strictly interior initial points with the simulated and analytic
/// one-step failure columns, one block per eccentricity `rho = k2/k1`.
pub fn failure_region_map(k1: f64, r: f64, rhos: &[f64], grid: usize) -> Vec<FailureMapCell> {
    let mut cells = Vec::new();
    for &rho in rhos {
        let k2 = rho * k1;
        let a = (r / k1).sqrt();
        let b = (r / k2).sqrt();
        for i in 0..grid {
            let x1 = -a + 2.0 * a * (i as f64 + 0.5) / grid as f64;
            for j in 0..grid {
                let x2 = -b + 2.0 * b * (j as f64 + 0.5) / grid as f64;
                let c = k1 * x1 * x1 + k2 * x2 * x2;
                if c >= r - crate::TAU_INT {
                    continue;
                }
                let x = Point::raw(vec![x1, x2]);
                let one_step_fail = one_step_psg_failure(k1, k2, r, &x);
                let predicate = if c > 0.0 {
                    let theta = (x2 * k2.sqrt()).atan2(x1 * k1.sqrt());
                    e1_failure_predicate(r, c, theta, rho)
                } else {
                    false // exact center: zero gradient, no failure
                };
                cells.push(FailureMapCell {
                    rho,
                    x1,
                    x2,
                    one_step_fail,
                    predicate,
                });
            }
        }
    }
    cells
}

pub fn write_failure_map_csv<P: AsRef<Path>>(
    path: P,
    cells: &[FailureMapCell],
) -> Result<(), HarnessError> {
    let rows: Vec<Vec<String>> = cells
        .iter()
        .map(|c| {
            vec![
                fmt_float(c.rho),
                fmt_float(c.x1),
                fmt_float(c.x2),
                (c.one_step_fail as u8).to_string(),
                (c.predicate as u8).to_string(),
            ]
        })
        .collect();
    write_csv(
        path,
        &["rho", "x1", "x2", "one_step_fail", "predicate"],
        &rows,
    )
}

// ---------------------------------------------------------------------------
// Trajectory dump
// ---------------------------------------------------------------------------

/// Runs with trajectory recording forced on; feeds the per-step CSV used to
/// regenerate the figure data.
pub fn trajectory_dump(
    oracle: &Oracle,
    config: &SolverConfig,
    x1: &Point,
    rng: &mut ChaCha8Rng,
) -> Result<RunRecord, SolveError> {
    let mut config = config.clone();
    config.record_trajectory = true;
    run(oracle, oracle.region(), x1, &config, rng)
}

pub fn write_trajectory_csv<P: AsRef<Path>>(
    path: P,
    record: &RunRecord,
) -> Result<(), HarnessError> {
    let steps = record
        .trajectory
        .as_ref()
        .ok_or_else(|| HarnessError::Config("run did not record a trajectory".into()))?;
    let dim = steps.first().map_or(0, |s| s.x.dim());
    let mut header: Vec<String> = vec!["s".into()];
    header.extend((0..dim).map(|i| format!("x{}", i + 1)));
    header.extend(["f", "g_norm", "alpha", "beta", "w"].map(String::from));
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows: Vec<Vec<String>> = steps
        .iter()
        .map(|s| {
            let mut row = vec![s.s.to_string()];
            row.extend(s.x.as_slice().iter().map(|v| fmt_float(*v)));
            row.extend([s.f, s.g_norm, s.alpha, s.beta, s.w].map(fmt_float));
            row
        })
        .collect();
    write_csv(path, &header_refs, &rows)
}

// ---------------------------------------------------------------------------
// Adaptive-beta comparison
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, Serialize)]
pub struct AdaBetaRow {
    pub s: u64,
    pub fixed_01_db: f64,
    pub fixed_05_db: f64,
    pub fixed_09_db: f64,
    pub searched_db: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AdaptiveBetaComparison {
    pub rows: Vec<AdaBetaRow>,
    pub final_gaps: [f64; 4],
    pub psg_status: RunStatus,
}

fn gap_db(gap: f64) -> f64 {
    10.0 * gap.max(1e-300).log10()
}

/// Runs the strongly convex instance under (C3) with fixed gliding steps
/// 0.1/0.5/0.9 and with the per-step search over that candidate set, all
/// from the same seeded initial point; emits per-step decibel gaps
/// `10 log10(f(x_s) - f*)` plus the PSG baseline status.
pub fn adaptive_beta_comparison(
    n: usize,
    b: f64,
    t: u64,
    master_seed: u64,
) -> Result<AdaptiveBetaComparison, HarnessError> {
    let oracle = Oracle::example3(n, b)?;
    let f_star = oracle.f_star().expect("known optimum");
    let mu = oracle.strong_mu().expect("strongly convex");
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(0);
    let x1 = sample_strict_interior(oracle.region(), &mut rng);

    let mk = |beta: BetaRule| SolverConfig {
        method: Method::Sgm,
        alpha: AlphaRule::StronglyConvexJoint { mu },
        beta,
        weight: WeightRule::StronglyConvexLinear,
        t,
        noise: NoiseModel::None,
        success_gap: None,
        record_trajectory: true,
    };
    let betas = [
        BetaRule::Constant { value: 0.1 },
        BetaRule::Constant { value: 0.5 },
        BetaRule::Constant { value: 0.9 },
        BetaRule::SearchedSet {
            candidates: vec![0.1, 0.5, 0.9],
        },
    ];
    let mut per_variant: Vec<Vec<f64>> = Vec::new();
    let mut final_gaps = [0.0f64; 4];
    for (i, beta) in betas.iter().enumerate() {
        let mut trial_rng = rng.clone();
        let record = run(
            &oracle,
            oracle.region(),
            &x1,
            &mk(beta.clone()),
            &mut trial_rng,
        )?;
        let steps = record.trajectory.as_ref().expect("recorded");
        per_variant.push(steps.iter().map(|s| gap_db(s.f - f_star)).collect());
        final_gaps[i] = oracle.evaluate(&record.final_point)? - f_star;
    }
    let mut psg = mk(BetaRule::One);
    psg.method = Method::Psg;
    psg.record_trajectory = false;
    let mut trial_rng = rng.clone();
    let psg_status = run(&oracle, oracle.region(), &x1, &psg, &mut trial_rng)?.status;

    let rows = (0..t as usize)
        .filter(|&s| per_variant.iter().all(|v| s < v.len()))
        .map(|s| AdaBetaRow {
            s: s as u64 + 1,
            fixed_01_db: per_variant[0][s],
            fixed_05_db: per_variant[1][s],
            fixed_09_db: per_variant[2][s],
            searched_db: per_variant[3][s],
        })
        .collect();
    Ok(AdaptiveBetaComparison {
        rows,
        final_gaps,
        psg_status,
    })
}

pub fn write_ada_beta_csv<P: AsRef<Path>>(
    path: P,
    data: &AdaptiveBetaComparison,
) -> Result<(), HarnessError> {
    let rows: Vec<Vec<String>> = data
        .rows
        .iter()
        .map(|r| {
            vec![
                r.s.to_string(),
                fmt_float(r.fixed_01_db),
                fmt_float(r.fixed_05_db),
                fmt_float(r.fixed_09_db),
                fmt_float(r.searched_db),
            ]
        })
        .collect();
    write_csv(
        path,
        &[
            "s",
            "sgm_beta_0.1_db",
            "sgm_beta_0.5_db",
            "sgm_beta_0.9_db",
            "sgm_ada_beta_db",
        ],
        &rows,
    )
}

// ---------------------------------------------------------------------------
// Table reproduction
// ---------------------------------------------------------------------------

/// Success-rate sweep over the ellipse eccentricities, one block per step
/// size family (`eq4` normalized, `eq6` adaptive with a = 1). Success is
/// completing all 100 iterations without an undefined subgradient.
pub fn table1_spec(block: &str, method: Method, trials: usize, seed: u64) -> ExperimentSpec {
    let alpha = match block {
        "eq4" => serde_json::json!({"type": "normalized"}),
        "eq6" => serde_json::json!({"type": "adaptive-g", "a": 1.0}),
        other => panic!("unknown table-1 block {other}"),
    };
    let weight = match block {
        "eq4" => WeightRule::AlphaW,
        _ => eq12_weight(0.0),
    };
    ExperimentSpec {
        name: format!("table1-{block}-{method:?}"),
        oracle: OracleConfig::E1 {
            k1: 2.0,
            k2: 5.0,
            r: 100.0,
        },
        solver: SolverSection {
            method,
            alpha,
            beta: BetaRule::Constant { value: 0.5 },
            weight,
            t: None,
            noise: NoiseModel::None,
            record_trajectory: false,
        },
        n_trials: trials,
        master_seed: seed,
        success: SuccessRule {
            max_iters: 100,
            gap_threshold: None,
        },
        sweep: Some(Sweep {
            param: SweepParam::K2,
            values: vec![5.0, 7.0, 10.0, 15.0, 20.0],
        }),
    }
}

/// Strongly convex success-rate sweep over the hypercube dimension for one
/// bound `B`, 10 iterations, gap threshold 1e-7.
pub fn table3_spec(b: f64, method: Method, trials: usize, seed: u64) -> ExperimentSpec {
    ExperimentSpec {
        name: format!("table3-B{b}-{method:?}"),
        oracle: OracleConfig::E3 { n: 1, b },
        solver: SolverSection {
            method,
            alpha: serde_json::json!({"type": "strongly-convex-joint"}),
            beta: BetaRule::Constant { value: 0.5 },
            weight: WeightRule::StronglyConvexLinear,
            t: None,
            noise: NoiseModel::None,
            record_trajectory: false,
        },
        n_trials: trials,
        master_seed: seed,
        success: SuccessRule {
            max_iters: 10,
            gap_threshold: Some(1e-7),
        },
        sweep: Some(Sweep {
            param: SweepParam::N,
            values: vec![1.0, 10.0, 100.0, 1000.0],
        }),
    }
}

fn report_rows(block: &str, method: &str, report: &SuccessRateReport) -> Vec<Vec<String>> {
    report
        .cells
        .iter()
        .map(|c| {
            vec![
                block.to_string(),
                method.to_string(),
                c.params.clone(),
                c.n_trials.to_string(),
                c.n_success.to_string(),
                fmt_float(c.rate),
                fmt_float(c.std_err),
                fmt_float(c.mean_min_f),
                fmt_float(c.mean_iterations),
                c.max_interior_violations.to_string(),
            ]
        })
        .collect()
}

const TABLE_HEADER: [&str; 10] = [
    "block",
    "method",
    "params",
    "n_trials",
    "n_success",
    "rate",
    "std_err",
    "mean_min_f",
    "mean_iterations",
    "max_interior_violations",
];

/// Writes `table1.csv` under `out_dir` and returns its path along with the
/// computed reports keyed by `(block, method)`.
pub fn reproduce_table1(
    out_dir: &Path,
    seed: u64,
    trials: usize,
) -> Result<(PathBuf, Vec<(String, SuccessRateReport)>), HarnessError> {
    std::fs::create_dir_all(out_dir)?;
    let mut rows = Vec::new();
    let mut reports = Vec::new();
    for block in ["eq4", "eq6"] {
        for (method, label) in [(Method::Psg, "psg"), (Method::Sgm, "sgm")] {
            let report = run_experiment(&table1_spec(block, method, trials, seed))?;
            rows.extend(report_rows(block, label, &report));
            reports.push((format!("{block}/{label}"), report));
        }
    }
    let path = out_dir.join("table1.csv");
    write_csv(&path, &TABLE_HEADER, &rows)?;
    Ok((path, reports))
}

pub fn reproduce_table3(
    out_dir: &Path,
    seed: u64,
    trials: usize,
) -> Result<(PathBuf, Vec<(String, SuccessRateReport)>), HarnessError> {
    std::fs::create_dir_all(out_dir)?;
    let mut rows = Vec::new();
    let mut reports = Vec::new();
    for b in [2.0, 1.5, 1.1, 1.01, 1.001] {
        for (method, label) in [(Method::Psg, "psg"), (Method::Sgm, "sgm")] {
            let report = run_experiment(&table3_spec(b, method, trials, seed))?;
            rows.extend(report_rows(&format!("B={b}"), label, &report));
            reports.push((format!("B={b}/{label}"), report));
        }
    }
    let path = out_dir.join("table3.csv");
    write_csv(&path, &TABLE_HEADER, &rows)?;
    // companion figure data: per-step decibel gaps of the fixed and searched
    // glides on the high-dimensional instance
    let ada = adaptive_beta_comparison(10_000, 2.0, 10, seed)?;
    write_ada_beta_csv(out_dir.join("ada_beta.csv"), &ada)?;
    Ok((path, reports))
}

#[derive(Debug, Clone, Serialize)]
pub struct Table2Row {
    pub block: String,
    pub case: usize,
    pub method: String,
    pub preset_iters: u64,
    pub actual_iters: u64,
    pub fail_step: Option<u64>,
    pub min_f: f64,
    pub succeed: bool,
}

/// Five seeded runs on the ratio-quadratic instance per step-size block,
/// PSG and SGM side by side; success threshold `min f <= 5e-3`. The SGM
/// glide is 0.1 here: under the normalized step sizes the limiting
/// oscillation amplitude scales with beta, and 0.1 reproduces the reported
/// min-f magnitudes where 0.5 would sit above the threshold.
pub fn reproduce_table2(
    out_dir: &Path,
    seed: u64,
) -> Result<(PathBuf, Vec<Table2Row>), HarnessError> {
    std::fs::create_dir_all(out_dir)?;
    let oracle = Oracle::example2();
    let presets: [u64; 5] = [10_000, 10_000, 100, 1_000, 1_000];
    let mut rows = Vec::new();
    for (case, &preset) in presets.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(case as u64);
        let x1 = sample_strict_interior(oracle.region(), &mut rng);
        for block in ["eq4", "eq6"] {
            let alpha = match block {
                "eq4" => AlphaRule::Normalized {
                    r: oracle.radius_r(),
                },
                _ => AlphaRule::AdaptiveG {
                    r: oracle.radius_r(),
                    a: 1.0,
                },
            };
            for (method, label) in [(Method::Psg, "psg"), (Method::Sgm, "sgm")] {
                let config = SolverConfig {
                    method,
                    alpha: alpha.clone(),
                    beta: BetaRule::Constant { value: 0.1 },
                    weight: WeightRule::ConstantW,
                    t: preset,
                    noise: NoiseModel::None,
                    success_gap: Some(5e-3),
                    record_trajectory: false,
                };
                let mut trial_rng = rng.clone();
                let record = run(&oracle, oracle.region(), &x1, &config, &mut trial_rng)?;
                let fail_step = match record.status {
                    RunStatus::SubgradientUndefinedAt(s) => Some(s),
                    _ => None,
                };
                let succeed = record.status.is_completed_or_optimal() && record.min_f <= 5e-3;
                rows.push(Table2Row {
                    block: block.to_string(),
                    case: case + 1,
                    method: label.to_string(),
                    preset_iters: preset,
                    actual_iters: record.iterations_done,
                    fail_step,
                    min_f: record.min_f,
                    succeed,
                });
            }
        }
    }
    let csv_rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.block.clone(),
                r.case.to_string(),
                r.method.clone(),
                r.preset_iters.to_string(),
                r.actual_iters.to_string(),
                r.fail_step.map_or(String::new(), |s| s.to_string()),
                fmt_float(r.min_f),
                (r.succeed as u8).to_string(),
            ]
        })
        .collect();
    let path = out_dir.join("table2.csv");
    write_csv(
        &path,
        &[
            "block",
            "case",
            "method",
            "preset_iters",
            "actual_iters",
            "fail_step",
            "min_f",
            "succeed",
        ],
        &csv_rows,
    )?;
    Ok((path, rows))
}

// ---------------------------------------------------------------------------
// Bound checks
// ---------------------------------------------------------------------------

/// Configuration of a `bound-check` invocation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundCheckConfig {
    pub oracle: OracleConfig,
    pub n_trials: usize,
    pub master_seed: u64,
    pub t: u64,
    /// Constant gliding step (its value is the (C2+) floor `c`).
    pub beta: f64,
    /// Noise level for the stochastic tags.
    #[serde(default)]
    pub sigma: Option<f64>,
    /// Exponent of the adaptive family where it applies.
    #[serde(default)]
    pub a: Option<f64>,
    /// Weight exponent for the k-indexed tags.
    #[serde(default)]
    pub k: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundCheckRow {
    pub tag: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trial: Option<usize>,
    pub params: BoundSpec,
    pub bound: f64,
    pub empirical_gap: f64,
    pub satisfied: bool,
}

/// Assembles the (alpha, weight) pairing a theorem tag refers to.
pub fn rules_for_tag(
    tag: TheoremTag,
    oracle: &Oracle,
    t: u64,
    k: f64,
    a: f64,
    l_effective: Option<f64>,
) -> Result<(AlphaRule, WeightRule), HarnessError> {
    use TheoremTag::*;
    let r = oracle.radius_r();
    let need_l = || {
        l_effective
            .ok_or_else(|| HarnessError::Config("this tag needs a Lipschitz constant".into()))
    };
    Ok(match tag {
        T3c1 | T6c1 => (
            AlphaRule::ConstantHorizon {
                r,
                l: need_l()?,
                t_total: t,
            },
            WeightRule::ConstantW,
        ),
        T3c2 | T6c2 => (AlphaRule::DecayingRl { r, l: need_l()? }, eq12_weight(k)),
        T3c3 => (AlphaRule::Normalized { r }, WeightRule::AlphaW),
        T3c4 | T6c3 => (AlphaRule::AdaptiveG { r, a }, eq12_weight(k)),
        T4c1 | T7c1 => (
            AlphaRule::ConstantHorizon {
                r,
                l: need_l()?,
                t_total: t,
            },
            WeightRule::BetaW,
        ),
        T4c2 | T7c2 => (AlphaRule::DecayingRl { r, l: need_l()? }, WeightRule::BetaW),
        T4c3 => (AlphaRule::Normalized { r }, WeightRule::AlphaBetaW),
        T4c4 | T7c3 => (AlphaRule::AdaptiveG { r, a }, WeightRule::BetaW),
        T5sc | T8sc => {
            let mu = oracle.strong_mu().ok_or_else(|| {
                HarnessError::Config("strongly convex tags need an instance with mu > 0".into())
            })?;
            (
                AlphaRule::StronglyConvexJoint { mu },
                WeightRule::StronglyConvexLinear,
            )
        }
    })
}

/// Runs the batch the tag prescribes and compares measured ergodic gaps with
/// the closed-form bound: per run for the deterministic tags, batch mean
/// against the expectation bound for the stochastic ones.
pub fn bound_check(
    cfg: &BoundCheckConfig,
    tag: TheoremTag,
) -> Result<Vec<BoundCheckRow>, HarnessError> {
    let oracle = cfg.oracle.build()?;
    oracle
        .f_star()
        .ok_or_else(|| HarnessError::Config("bound checks need a known optimum".into()))?;
    let k = cfg.k.unwrap_or(0.0);
    let a = cfg.a.unwrap_or(1.0);
    let stochastic = tag.is_stochastic();
    let sigma = if stochastic {
        Some(
            cfg.sigma
                .or_else(|| oracle.lipschitz_l().map(|l| 0.5 * l))
                .ok_or_else(|| {
                    HarnessError::Config(
                        "stochastic tags need `sigma` (no Lipschitz default here)".into(),
                    )
                })?,
        )
    } else {
        None
    };
    // The stochastic Lipschitz constant satisfies E||g~||^2 <= L^2 + sigma^2;
    // it feeds both the step sizes and the L-dependent bounds.
    let l_effective = match (oracle.lipschitz_l(), sigma) {
        (Some(l), Some(s)) => Some((l * l + s * s).sqrt()),
        (Some(l), None) => Some(l),
        (None, _) => None,
    };
    let (alpha, weight) = rules_for_tag(tag, &oracle, cfg.t, k, a, l_effective)?;
    let config = SolverConfig {
        method: Method::Sgm,
        alpha,
        beta: BetaRule::Constant { value: cfg.beta },
        weight,
        t: cfg.t,
        noise: match sigma {
            Some(s) => NoiseModel::Gaussian { sigma: s },
            None => NoiseModel::None,
        },
        success_gap: None,
        record_trajectory: false,
    };
    let region = oracle.region().clone();
    let records: Vec<RunRecord> = run_batch(
        &oracle,
        &region,
        &config,
        cfg.n_trials,
        cfg.master_seed,
        |rng| sample_strict_interior(&region, rng),
    )
    .into_iter()
    .collect::<Result<_, _>>()?;

    let mut spec = BoundSpec {
        tag: Some(tag),
        r: Some(oracle.radius_r()),
        l: l_effective,
        c: Some(cfg.beta),
        mu: oracle.strong_mu(),
        k: Some(k),
        t: Some(cfg.t),
    };
    let gap_of = |record: &RunRecord| -> Result<f64, HarnessError> {
        record
            .ergodic_gap
            .ok_or_else(|| HarnessError::Config("run produced no ergodic point".into()))
    };

    if stochastic {
        let n = records.len() as f64;
        let mean_gap = records.iter().map(gap_of).sum::<Result<f64, _>>()? / n;
        let mean_max_g = records.iter().map(|r| r.bound_terms.max_gnorm).sum::<f64>() / n;
        let mean_max_gsq = records
            .iter()
            .map(|r| r.bound_terms.max_gnorm * r.bound_terms.max_gnorm)
            .sum::<f64>()
            / n;
        let stats = RunStats {
            max_gnorm: Some(mean_max_g),
            max_gnorm_sq: Some(mean_max_gsq),
        };
        let bound = bound_value(&spec, &stats)?;
        Ok(vec![BoundCheckRow {
            tag: format!("{tag:?}").to_lowercase(),
            trial: None,
            params: spec,
            bound,
            empirical_gap: mean_gap,
            satisfied: mean_gap <= bound + 1e-9,
        }])
    } else {
        spec.l = oracle.lipschitz_l();
        let mut rows = Vec::with_capacity(records.len());
        for (trial, record) in records.iter().enumerate() {
            let stats = RunStats {
                max_gnorm: Some(record.bound_terms.max_gnorm),
                max_gnorm_sq: Some(record.bound_terms.max_gnorm * record.bound_terms.max_gnorm),
            };
            let bound = bound_value(&spec, &stats)?;
            let gap = gap_of(record)?;
            rows.push(BoundCheckRow {
                tag: format!("{tag:?}").to_lowercase(),
                trial: Some(trial),
                params: spec.clone(),
                bound,
                empirical_gap: gap,
                satisfied: gap <= bound + 1e-9,
            });
        }
        Ok(rows)
    }
}
