//! Subgradient methods for nonsmooth convex optimization over compact convex
//! sets, built around two iteration schemes:
//!
//! * **PSG** — the classical projected subgradient method
//!   `x_{s+1} = P_X(x_s - a_s g_s)`, which terminates as soon as it lands on a
//!   boundary point where the objective has no subgradient;
//! * **SGM** — the subgradient gliding method, which moves only part of the
//!   way toward the projection, `x_{s+1} = (1-b_s) x_s + b_s P_X(x_s - a_s g_s)`,
//!   keeping every iterate strictly interior whenever `0 < b_s < 1`.
//!
//! The crate ships the standard step-size families (constant-horizon,
//! `R/(L sqrt(s))`, subgradient-normalized, the adaptive `G_s` family, and the
//! strongly convex coupling `a_s b_s = 2/(mu (s+1))`), ergodic-weight rules,
//! closed-form convergence-bound evaluators, analytic one-step-failure
//! predicates for PSG, and a deterministic, seedable experiment harness that
//! regenerates the success-rate tables and figure data.

pub mod analysis;
pub mod harness;
pub mod oracles;
pub mod schedules;
pub mod sets;
pub mod solver;

pub use oracles::{NoiseModel, Oracle, OracleError, SubgradientOutcome};
pub use schedules::{AlphaRule, AlphaState, BetaRule, ScheduleError, WeightRule};
pub use sets::{FeasibleRegion, Point, ProjectionResult, RegionError};
pub use solver::{Method, RunRecord, RunStatus, SolveError, SolverConfig};

/// Convergence tolerance on the ellipse secular equation residual and the
/// bound accepted for projection constraint residuals.
pub const TAU_PROJ: f64 = 1e-12;

/// Strict-interior margin: a point within `TAU_INT` of the boundary is not
/// considered strictly interior, and boundary-undefined subgradients are
/// reported inside this margin.
pub const TAU_INT: f64 = 1e-12;

/// Slack allowed by closed membership tests.
pub const TAU_MEMBER: f64 = 1e-12;
