//! PSG and SGM iteration loops, trajectory bookkeeping, ergodic readout and
//! termination semantics.
//!
//! One step of the gliding scheme from iterate `x_s`:
//!
//! ```text
//! y_{s+1} = x_s - alpha_s g_s,   g_s in df(x_s)
//! z_{s+1} = P_X(y_{s+1})
//! x_{s+1} = (1 - beta_s) x_s + beta_s z_{s+1}
//! ```
//!
//! PSG is the `beta == 1` specialization. A run terminates early when the
//! oracle reports an undefined subgradient (`SubgradientUndefinedAt`) or a
//! zero subgradient (`EarlyOptimal`); all statistics through the preceding
//! step are kept so success criteria can evaluate partial records.
//!
//! Bookkeeping conventions: the ergodic sums run over the query points
//! `x_1..x_t`; `min_f` additionally includes the post-update point `x_{t+1}`
//! (the best value seen anywhere during the run); `iterations_done` counts
//! steps with a valid subgradient, with the failing step index carried in the
//! status.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::oracles::{NoiseModel, Oracle, OracleError, SubgradientOutcome};
use crate::schedules::{beta_next, AlphaRule, AlphaState, BetaRule, ScheduleError, WeightRule};
use crate::sets::{FeasibleRegion, Point, RegionError};

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error(transparent)]
    Region(#[from] RegionError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
    #[error("iterate became non-finite at step {step}")]
    NonFiniteIterate { step: u64 },
    #[error("run accumulated no completed steps")]
    EmptyRun,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Psg,
    Sgm,
}

/// Full configuration of one solver run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolverConfig {
    pub method: Method,
    pub alpha: AlphaRule,
    #[serde(default = "default_beta")]
    pub beta: BetaRule,
    #[serde(default = "default_weight")]
    pub weight: WeightRule,
    pub t: u64,
    #[serde(default)]
    pub noise: NoiseModel,
    #[serde(default)]
    pub success_gap: Option<f64>,
    #[serde(default)]
    pub record_trajectory: bool,
}

fn default_beta() -> BetaRule {
    BetaRule::Constant { value: 0.5 }
}

fn default_weight() -> WeightRule {
    WeightRule::ConstantW
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), SolveError> {
        if self.t < 1 {
            return Err(SolveError::PreconditionViolated("t must be >= 1".into()));
        }
        self.alpha.validate()?;
        self.beta.validate()?;
        self.weight.validate()?;
        if let Some(gap) = self.success_gap {
            if gap.is_nan() || gap <= 0.0 {
                return Err(SolveError::PreconditionViolated(
                    "success_gap must be > 0".into(),
                ));
            }
        }
        Ok(())
    }

    /// The gliding rule actually executed: PSG forces `beta == 1`.
    pub fn effective_beta(&self) -> BetaRule {
        match self.method {
            Method::Psg => BetaRule::One,
            Method::Sgm => self.beta.clone(),
        }
    }

    /// SGM with the `One` rule is allowed but runs exactly as PSG; the
    /// interior-preservation guarantee is void in that case.
    pub fn is_psg_equivalent(&self) -> bool {
        matches!(self.effective_beta(), BetaRule::One)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunStatus {
    Completed,
    SubgradientUndefinedAt(u64),
    EarlyOptimal(u64),
}

impl RunStatus {
    pub fn is_completed_or_optimal(&self) -> bool {
        matches!(self, RunStatus::Completed | RunStatus::EarlyOptimal(_))
    }
}

impl std::fmt::Display for RunStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunStatus::Completed => write!(f, "completed"),
            RunStatus::SubgradientUndefinedAt(s) => write!(f, "subgradient-undefined-at({s})"),
            RunStatus::EarlyOptimal(s) => write!(f, "early-optimal({s})"),
        }
    }
}

/// Accumulated terms of the master ergodic bound
/// `(1/sum w) (R^2 w_t/(2 a_t b_t) + sum w_s a_s ||g_s||^2 / 2)`.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct BoundTerms {
    pub sum_w: f64,
    pub sum_w_alpha_gsq: f64,
    pub last_w_over_alphabeta: f64,
    pub max_gnorm: f64,
    pub sum_gnorm_sq: f64,
}

impl BoundTerms {
    /// Right-hand side of the master bound for containment radius `r`.
    pub fn master_bound(&self, r: f64) -> f64 {
        (r * r * self.last_w_over_alphabeta / 2.0 + self.sum_w_alpha_gsq / 2.0) / self.sum_w
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrajectoryStep {
    pub s: u64,
    pub x: Point,
    pub f: f64,
    pub g_norm: f64,
    pub alpha: f64,
    pub beta: f64,
    pub w: f64,
}

/// Trajectory summary of one solver run.
#[derive(Debug, Clone, Serialize)]
pub struct RunRecord {
    pub status: RunStatus,
    pub iterations_done: u64,
    pub ergodic_point: Option<Point>,
    pub ergodic_gap: Option<f64>,
    pub min_f: f64,
    pub min_f_step: u64,
    pub final_point: Point,
    pub bound_terms: BoundTerms,
    pub interior_violations: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trajectory: Option<Vec<TrajectoryStep>>,
}

impl RunRecord {
    pub fn min_gap(&self, f_star: f64) -> f64 {
        self.min_f - f_star
    }
}

/// Weighted ergodic average `sum w_s x_s / sum w_s` over the completed steps.
pub fn ergodic_readout(record: &RunRecord) -> Result<Point, SolveError> {
    record.ergodic_point.clone().ok_or(SolveError::EmptyRun)
}

/// Runs PSG or SGM from `x1`. The RNG drives stochastic subgradient noise
/// only; deterministic runs never consume from it.
pub fn run(
    oracle: &Oracle,
    region: &FeasibleRegion,
    x1: &Point,
    config: &SolverConfig,
    rng: &mut ChaCha8Rng,
) -> Result<RunRecord, SolveError> {
    config.validate()?;
    if x1.dim() != region.dim() || x1.dim() != oracle.dimension() {
        return Err(SolveError::PreconditionViolated(format!(
            "x1 has dimension {}, region {} and oracle {}",
            x1.dim(),
            region.dim(),
            oracle.dimension()
        )));
    }
    match config.method {
        Method::Sgm => {
            if !region.strictly_interior(x1)? {
                return Err(SolveError::PreconditionViolated(
                    "SGM requires a strictly interior initial point".into(),
                ));
            }
        }
        Method::Psg => {
            if !region.contains(x1)? {
                return Err(SolveError::PreconditionViolated(
                    "PSG requires a feasible initial point".into(),
                ));
            }
        }
    }

    let beta_rule = config.effective_beta();
    let mut alpha_state = AlphaState::new(config.alpha.clone());
    let mut prev_beta = beta_rule.provisional_start();

    let dim = x1.dim();
    let mut x = x1.clone();
    let mut status = RunStatus::Completed;
    let mut iterations_done = 0u64;
    let mut min_f = f64::INFINITY;
    let mut min_f_step = 0u64;
    let mut interior_violations = 0u64;
    let mut bound = BoundTerms::default();
    let mut ergodic_num = vec![0.0f64; dim];
    let mut trajectory = config.record_trajectory.then(Vec::new);

    let track_min = |f: f64, s: u64, min_f: &mut f64, min_f_step: &mut u64| {
        if f < *min_f {
            *min_f = f;
            *min_f_step = s;
        }
    };

    let mut stepped = false;
    for s in 1..=config.t {
        let f_x = oracle.evaluate(&x)?;
        track_min(f_x, s, &mut min_f, &mut min_f_step);
        if !region.strictly_interior(&x)? {
            interior_violations += 1;
        }

        let g = match oracle.stochastic_subgradient(&config.noise, &x, rng) {
            SubgradientOutcome::Available(g) => g,
            SubgradientOutcome::Undefined { .. } => {
                status = RunStatus::SubgradientUndefinedAt(s);
                break;
            }
        };
        let g_norm = g.norm();
        if g_norm == 0.0 {
            // 0 in df(x_s): the iterate is optimal.
            status = RunStatus::EarlyOptimal(s);
            break;
        }

        // Evaluation order: rules whose alpha depends on beta (the (C3)
        // coupling) pick beta first, each searched candidate priced with its
        // own coupled alpha and projection so the search scores the step it
        // would actually execute. Beta-independent rules compute alpha (and
        // its single projection) first and search over glides toward it.
        let (alpha_s, beta_s, z) = if config.alpha.depends_on_beta() {
            let beta_s = match &beta_rule {
                BetaRule::SearchedSet { .. } => {
                    let mut probe_state = alpha_state.clone();
                    let mut eval = |b: f64| {
                        let alpha_b = match probe_state.alpha_next(s, g_norm, b) {
                            Ok(a) => a,
                            Err(_) => return f64::INFINITY,
                        };
                        match region.project(&x.step(alpha_b, &g)) {
                            Ok(p) => oracle
                                .evaluate(&x.glide(b, &p.point))
                                .unwrap_or(f64::INFINITY),
                            Err(_) => f64::INFINITY,
                        }
                    };
                    beta_next(&beta_rule, s, Some(&mut eval))?
                }
                _ => beta_next(&beta_rule, s, None)?,
            };
            let alpha_s = alpha_state.alpha_next(s, g_norm, beta_s)?;
            let z = region.project(&x.step(alpha_s, &g))?.point;
            (alpha_s, beta_s, z)
        } else {
            let alpha_s = match alpha_state.alpha_next(s, g_norm, prev_beta) {
                Ok(a) => a,
                Err(ScheduleError::ZeroSubgradient) => {
                    status = RunStatus::EarlyOptimal(s);
                    break;
                }
                Err(e) => return Err(e.into()),
            };
            let z = region.project(&x.step(alpha_s, &g))?.point;
            let beta_s = match &beta_rule {
                BetaRule::SearchedSet { .. } => {
                    let mut eval =
                        |b: f64| oracle.evaluate(&x.glide(b, &z)).unwrap_or(f64::INFINITY);
                    beta_next(&beta_rule, s, Some(&mut eval))?
                }
                _ => beta_next(&beta_rule, s, None)?,
            };
            (alpha_s, beta_s, z)
        };

        let w_s = config.weight.weight_next(s, alpha_s, beta_s);
        bound.sum_w += w_s;
        bound.sum_w_alpha_gsq += w_s * alpha_s * g_norm * g_norm;
        bound.last_w_over_alphabeta = w_s / (alpha_s * beta_s);
        bound.max_gnorm = bound.max_gnorm.max(g_norm);
        bound.sum_gnorm_sq += g_norm * g_norm;
        for (num, xi) in ergodic_num.iter_mut().zip(x.as_slice()) {
            *num += w_s * xi;
        }
        if let Some(steps) = trajectory.as_mut() {
            steps.push(TrajectoryStep {
                s,
                x: x.clone(),
                f: f_x,
                g_norm,
                alpha: alpha_s,
                beta: beta_s,
                w: w_s,
            });
        }

        let next = x.glide(beta_s, &z);
        if !next.is_finite() {
            return Err(SolveError::NonFiniteIterate { step: s });
        }
        x = next;
        prev_beta = beta_s;
        iterations_done = s;
        stepped = true;
    }

    if status == RunStatus::Completed && stepped {
        // the post-update point x_{t+1}: best-value tracking only
        let f_final = oracle.evaluate(&x)?;
        track_min(f_final, iterations_done + 1, &mut min_f, &mut min_f_step);
        if !region.strictly_interior(&x)? {
            interior_violations += 1;
        }
    }
    match status {
        RunStatus::SubgradientUndefinedAt(s) | RunStatus::EarlyOptimal(s) => {
            iterations_done = s - 1;
        }
        RunStatus::Completed => {}
    }

    let ergodic_point = if bound.sum_w > 0.0 {
        Some(
            Point::new(ergodic_num.iter().map(|n| n / bound.sum_w).collect()).map_err(|_| {
                SolveError::NonFiniteIterate {
                    step: iterations_done,
                }
            })?,
        )
    } else {
        None
    };
    let ergodic_gap = match (&ergodic_point, oracle.f_star()) {
        (Some(p), Some(fs)) => oracle.evaluate(p).ok().map(|f| f - fs),
        _ => None,
    };

    Ok(RunRecord {
        status,
        iterations_done,
        ergodic_point,
        ergodic_gap,
        min_f,
        min_f_step,
        final_point: x,
        bound_terms: bound,
        interior_violations,
        trajectory,
    })
}

/// Uniform sample from the strict interior by rejection from the bounding
/// box. The ellipse accepts with probability pi/4, so a handful of draws
/// suffice in expectation.
pub fn sample_strict_interior(region: &FeasibleRegion, rng: &mut ChaCha8Rng) -> Point {
    let (lo, hi): (Vec<f64>, Vec<f64>) = match region {
        FeasibleRegion::Ball { center, radius } => (
            center.as_slice().iter().map(|c| c - radius).collect(),
            center.as_slice().iter().map(|c| c + radius).collect(),
        ),
        FeasibleRegion::Box { lower, upper } => {
            (lower.as_slice().to_vec(), upper.as_slice().to_vec())
        }
        FeasibleRegion::Ellipse2D { k1, k2, r } => {
            let a = (r / k1).sqrt();
            let b = (r / k2).sqrt();
            (vec![-a, -b], vec![a, b])
        }
    };
    loop {
        let coords: Vec<f64> = lo
            .iter()
            .zip(&hi)
            .map(|(&l, &h)| rng.random_range(l..h))
            .collect();
        let candidate = Point::raw(coords);
        if region
            .strictly_interior(&candidate)
            .expect("sampler dimension")
        {
            return candidate;
        }
    }
}

/// Runs `n_trials` independent trials. Trial `i` owns the PRNG stream
/// `(master_seed, i)` for both its initial point and any stochastic noise,
/// so results are independent of execution order and parallelism degree.
pub fn run_batch<S>(
    oracle: &Oracle,
    region: &FeasibleRegion,
    config: &SolverConfig,
    n_trials: usize,
    master_seed: u64,
    sample_init: S,
) -> Vec<Result<RunRecord, SolveError>>
where
    S: Fn(&mut ChaCha8Rng) -> Point + Sync,
{
    (0..n_trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
            rng.set_stream(trial as u64);
            let x1 = sample_init(&mut rng);
            run(oracle, region, &x1, config, &mut rng)
        })
        .collect()
}
