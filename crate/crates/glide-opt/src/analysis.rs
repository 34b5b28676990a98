//! Closed-form theory artifacts: convergence-bound evaluators, the analytic
//! one-step PSG failure predicates, and the subgradient-geometry identities
//! of the ratio-quadratic objective.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sets::Point;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("missing parameter `{0}` for bound evaluation")]
    MissingParameter(&'static str),
    #[error("auxiliary function does not change sign on the bracket")]
    BracketFailure,
    #[error("angle of a zero vector is undefined")]
    ZeroVector,
    #[error("point outside the valid domain")]
    OutOfDomain,
}

/// Theorem tags for the closed-form ergodic bounds. `c1..c4` index the step
/// size cases (constant-horizon, decaying, normalized, adaptive); `sc` are
/// the strongly convex O(1/t) rates; `t6..t8` are the stochastic
/// counterparts evaluated in expectation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TheoremTag {
    T3c1,
    T3c2,
    T3c3,
    T3c4,
    T4c1,
    T4c2,
    T4c3,
    T4c4,
    T5sc,
    T6c1,
    T6c2,
    T6c3,
    T7c1,
    T7c2,
    T7c3,
    T8sc,
}

impl TheoremTag {
    pub fn parse(s: &str) -> Option<TheoremTag> {
        use TheoremTag::*;
        Some(match s.to_ascii_lowercase().as_str() {
            "t3c1" => T3c1,
            "t3c2" => T3c2,
            "t3c3" => T3c3,
            "t3c4" => T3c4,
            "t4c1" => T4c1,
            "t4c2" => T4c2,
            "t4c3" => T4c3,
            "t4c4" => T4c4,
            "t5sc" => T5sc,
            "t6c1" => T6c1,
            "t6c2" => T6c2,
            "t6c3" => T6c3,
            "t7c1" => T7c1,
            "t7c2" => T7c2,
            "t7c3" => T7c3,
            "t8sc" => T8sc,
            _ => return None,
        })
    }

    /// Tags whose bound consumes the (expected) running max of `||g||`
    /// instead of a Lipschitz constant.
    pub fn uses_gnorm_stat(&self) -> bool {
        use TheoremTag::*;
        matches!(self, T3c4 | T4c4 | T5sc | T6c3 | T7c3 | T8sc)
    }

    /// Stochastic tags: the bound holds in expectation and is evaluated
    /// against the batch mean gap.
    pub fn is_stochastic(&self) -> bool {
        use TheoremTag::*;
        matches!(self, T6c1 | T6c2 | T6c3 | T7c1 | T7c2 | T7c3 | T8sc)
    }
}

/// Parameters for a bound evaluation. Which fields are required depends on
/// the tag; `bound_value` reports the first missing one.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct BoundSpec {
    pub tag: Option<TheoremTag>,
    #[serde(rename = "R")]
    pub r: Option<f64>,
    #[serde(rename = "L")]
    pub l: Option<f64>,
    /// Uniform floor of the gliding step size (condition (C2+)).
    pub c: Option<f64>,
    pub mu: Option<f64>,
    pub k: Option<f64>,
    pub t: Option<u64>,
}

/// Per-run (or per-batch) gradient statistics plugged into the
/// `max ||g||`-dependent bounds: `max_gnorm` is `max_s ||g_s||` for the
/// deterministic tags and the batch mean of that maximum for T6c3/T7c3;
/// `max_gnorm_sq` is the (mean of the) squared maximum for T8sc.
#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct RunStats {
    pub max_gnorm: Option<f64>,
    pub max_gnorm_sq: Option<f64>,
}

fn sum_pow(t: u64, e: f64) -> f64 {
    (1..=t).map(|s| (s as f64).powf(e)).sum()
}

/// Shared prefactor of the decaying and adaptive families:
/// `(t^((k+1)/2) + sum s^((k-1)/2)) / (2 c sum s^(k/2))`.
fn k_prefactor(t: u64, k: f64, c: f64) -> f64 {
    let tf = t as f64;
    (tf.powf((k + 1.0) / 2.0) + sum_pow(t, (k - 1.0) / 2.0)) / (2.0 * c * sum_pow(t, k / 2.0))
}

/// Evaluates the right-hand side of the tagged convergence bound, exactly as
/// written ("log" is the natural logarithm).
pub fn bound_value(spec: &BoundSpec, stats: &RunStats) -> Result<f64, AnalysisError> {
    use TheoremTag::*;
    let tag = spec.tag.ok_or(AnalysisError::MissingParameter("tag"))?;
    let need = |v: Option<f64>, name: &'static str| v.ok_or(AnalysisError::MissingParameter(name));
    let t = spec.t.ok_or(AnalysisError::MissingParameter("t"))?;
    let tf = t as f64;
    let c = need(spec.c, "c")?;
    let gmax = || {
        stats
            .max_gnorm
            .ok_or(AnalysisError::MissingParameter("max_gnorm"))
    };

    Ok(match tag {
        T3c1 | T4c1 | T6c1 | T7c1 => {
            let (r, l) = (need(spec.r, "R")?, need(spec.l, "L")?);
            r * l / (c * tf.sqrt())
        }
        T3c2 | T6c2 => {
            let (r, l, k) = (need(spec.r, "R")?, need(spec.l, "L")?, need(spec.k, "k")?);
            k_prefactor(t, k, c) * r * l
        }
        T3c3 | T4c3 => {
            let (r, l) = (need(spec.r, "R")?, need(spec.l, "L")?);
            (2.0 * r * l + r * l * tf.ln()) / (4.0 * c * ((tf + 1.0).sqrt() - 1.0))
        }
        T3c4 | T6c3 => {
            let (r, k) = (need(spec.r, "R")?, need(spec.k, "k")?);
            k_prefactor(t, k, c) * r * gmax()?
        }
        T4c2 | T7c2 => {
            let (r, l) = (need(spec.r, "R")?, need(spec.l, "L")?);
            3.0 * r * l / (2.0 * c * tf.sqrt())
        }
        T4c4 | T7c3 => {
            let r = need(spec.r, "R")?;
            3.0 * r * gmax()? / (2.0 * c * tf.sqrt())
        }
        T5sc => {
            let mu = need(spec.mu, "mu")?;
            let g = gmax()?;
            2.0 * g * g / (c * mu * (tf + 1.0))
        }
        T8sc => {
            let mu = need(spec.mu, "mu")?;
            let gsq = stats
                .max_gnorm_sq
                .ok_or(AnalysisError::MissingParameter("max_gnorm_sq"))?;
            2.0 * gsq / (c * mu * (tf + 1.0))
        }
    })
}

/// Analytic one-step-failure predicate for PSG on the ellipse instance with
/// the normalized first step `alpha_1 = R/||g_1||`: true iff the initial
/// point parameterized by
///
/// ```text
/// x1 = (sqrt(c/k1) cos(theta), sqrt(c/(rho k1)) sin(theta)),  rho = k2/k1
/// ```
///
/// leaves the open ellipse after one update, i.e.
///
/// ```text
/// c + r rho (rho - 1) sin^2(theta) / (1 + (rho - 1) sin^2(theta))
///   - 2 sqrt(r c (1 + (rho - 1) sin^2(theta)))  >=  0.
/// ```
///
/// Callers normalize `rho = max(k1,k2)/min(k1,k2) >= 1` and keep
/// `c in (0, r)`.
pub fn e1_failure_predicate(r: f64, c: f64, theta: f64, rho: f64) -> bool {
    debug_assert!(r > 0.0 && c > 0.0 && c < r && rho >= 1.0);
    let s2 = theta.sin() * theta.sin();
    let denom = 1.0 + (rho - 1.0) * s2;
    c + r * rho * (rho - 1.0) * s2 / denom - 2.0 * (r * c * denom).sqrt() >= 0.0
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct E3FailureProbability {
    /// Root of `q(x) = x - (1 + log x)/mu` in `(0, B)`.
    pub p_root: f64,
    /// Probability that at least one coordinate of the first PSG update
    /// leaves the open orthant: `1 - (p/B)^n`.
    pub prob: f64,
}

/// One-step failure probability of PSG with `alpha_1 = 1/mu` on the negative
/// entropy instance. The auxiliary `q` is strictly decreasing on `(0, B]`
/// with `q(1/e) > 0 > q(1)`, so the root is bracketed in `(1/e, 1)`.
pub fn e3_failure_probability(
    b: f64,
    mu: f64,
    n: u32,
) -> Result<E3FailureProbability, AnalysisError> {
    let params_valid = b > 1.0 && mu > 0.0 && mu <= 1.0 / b;
    if !params_valid {
        return Err(AnalysisError::OutOfDomain);
    }
    let q = |x: f64| x - (1.0 + x.ln()) / mu;
    let dq = |x: f64| 1.0 - 1.0 / (mu * x);
    let mut lo = (-1f64).exp();
    let mut hi = 1.0;
    if !(q(lo) > 0.0 && q(hi) < 0.0) {
        return Err(AnalysisError::BracketFailure);
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let fx = q(x);
        if fx.abs() <= 1e-12 {
            break;
        }
        if fx > 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let newton = x - fx / dq(x);
        x = if newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
    }
    if q(x).abs() > 1e-12 {
        return Err(AnalysisError::BracketFailure);
    }
    Ok(E3FailureProbability {
        p_root: x,
        prob: 1.0 - (x / b).powi(n as i32),
    })
}

/// Angle between two nonzero vectors, in `[0, pi]`: the arccosine of the
/// clamped normalized inner product, evaluated via the uniformly
/// well-conditioned form `2 atan2(||u^ - v^||, ||u^ + v^||)`.
pub fn angle(u: &Point, v: &Point) -> Result<f64, AnalysisError> {
    let (nu, nv) = (u.norm(), v.norm());
    if nu == 0.0 || nv == 0.0 {
        return Err(AnalysisError::ZeroVector);
    }
    if u.dim() != v.dim() {
        return Err(AnalysisError::OutOfDomain);
    }
    let mut diff_sq = 0.0;
    let mut sum_sq = 0.0;
    for (a, b) in u.as_slice().iter().zip(v.as_slice()) {
        let (a, b) = (a / nu, b / nv);
        diff_sq += (a - b) * (a - b);
        sum_sq += (a + b) * (a + b);
    }
    Ok(2.0 * diff_sq.sqrt().atan2(sum_sq.sqrt()))
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct E2GeometryErrors {
    /// `| angle(x, e1) - angle(-g, -x) |`
    pub angle_identity_err: f64,
    /// `| angle(-g, grad||g||) - (pi/2 + angle(x, e1)) |`
    pub descent_angle_err: f64,
}

/// Checks the two subgradient-geometry identities of the ratio-quadratic
/// objective at a point strictly inside its rectangle with `x1 > 0`,
/// `x2 != 0`, using `grad ||g(x)|| = (-2 x2^2/x1^3, 2 x2/x1^2)`.
pub fn e2_geometry_check(x: &Point) -> Result<E2GeometryErrors, AnalysisError> {
    if x.dim() != 2 {
        return Err(AnalysisError::OutOfDomain);
    }
    let (x1, x2) = (x[0], x[1]);
    if !(x1 > 0.0 && x1 < 1.0 && x2 > -1.0 && x2 < 1.0 && x2 != 0.0) {
        return Err(AnalysisError::OutOfDomain);
    }
    let ratio = x2 / x1;
    let g = Point::new(vec![1.0 - ratio * ratio, 2.0 * ratio])
        .map_err(|_| AnalysisError::OutOfDomain)?;
    let grad_gnorm = Point::new(vec![-2.0 * x2 * x2 / (x1 * x1 * x1), 2.0 * x2 / (x1 * x1)])
        .map_err(|_| AnalysisError::OutOfDomain)?;

    let e1 = Point::new(vec![1.0, 0.0]).unwrap();
    let theta = angle(x, &e1)?;
    let mirror = angle(&g.neg(), &x.neg())?;
    let descent = angle(&g.neg(), &grad_gnorm)?;
    Ok(E2GeometryErrors {
        angle_identity_err: (theta - mirror).abs(),
        descent_angle_err: (descent - (std::f64::consts::FRAC_PI_2 + theta)).abs(),
    })
}
