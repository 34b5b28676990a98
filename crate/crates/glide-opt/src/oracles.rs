//! Objective oracles: evaluation, subgradient maps that report `Undefined`
//! where the subdifferential is empty, and a Gaussian stochastic wrapper.
//!
//! Three boundary-pathological instances are built in:
//!
//! * `e1` — `f(x) = -sqrt(r - k1 x1^2 - k2 x2^2)` on the ellipse; no
//!   subgradients anywhere on the boundary.
//! * `e2` — `f(x) = (x1^2 + x2^2)/x1` (0 at the origin) on
//!   `[0,1] x [-1,1]`; no subgradients on the segment `x1 = 0, x2 != 0`,
//!   and not Lipschitz on any level set.
//! * `e3` — negative entropy `sum x_i log x_i` on `[0,B]^n`; no subgradients
//!   where any coordinate vanishes; strongly convex with `mu = 1/B`.
//!
//! Two Lipschitz sanity instances (`l1-box`, `max-abs-box`) have subgradients
//! everywhere and exact constants for exercising the convergence bounds.

use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sets::{FeasibleRegion, Point};
use crate::TAU_INT;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("point is outside the oracle domain")]
    OutOfDomain,
    #[error("unknown sanity instance `{0}`")]
    UnknownInstance(String),
    #[error("dimension mismatch: oracle expects {expected}, point has {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid oracle parameters: {0}")]
    InvalidParameter(String),
}

/// Outcome of a subgradient query. `Undefined` is data, not an error: it
/// arises exactly where the mathematical subdifferential is empty or the
/// query point lies outside the oracle domain.
#[derive(Debug, Clone, PartialEq)]
pub enum SubgradientOutcome {
    Available(Point),
    Undefined { reason: &'static str },
}

impl SubgradientOutcome {
    pub fn available(self) -> Option<Point> {
        match self {
            SubgradientOutcome::Available(g) => Some(g),
            SubgradientOutcome::Undefined { .. } => None,
        }
    }

    pub fn is_undefined(&self) -> bool {
        matches!(self, SubgradientOutcome::Undefined { .. })
    }
}

/// Additive noise model for the stochastic first-order oracle. Gaussian noise
/// has mean zero and total variance `sigma^2` split evenly across
/// coordinates, so `E(g~|x) = g(x)` and `E||g~||^2 = ||g||^2 + sigma^2`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum NoiseModel {
    #[default]
    None,
    Gaussian {
        sigma: f64,
    },
}

#[derive(Debug, Clone)]
enum ObjectiveKind {
    /// `-sqrt(r - k1 x1^2 - k2 x2^2)`
    EllipseSqrt { k1: f64, k2: f64, r: f64 },
    /// `(x1^2 + x2^2)/x1`, 0 at the origin
    RatioQuadratic,
    /// `sum_i x_i log x_i` with `0 log 0 = 0`
    NegEntropy { b: f64 },
    /// `||x||_1`
    L1Norm,
    /// `max_i |x_i|`
    MaxAbs,
}

/// An objective with evaluation, subgradient map and instance metadata.
#[derive(Debug, Clone)]
pub struct Oracle {
    id: String,
    kind: ObjectiveKind,
    dimension: usize,
    f_star: Option<f64>,
    x_star: Option<Point>,
    lipschitz_l: Option<f64>,
    strong_mu: Option<f64>,
    radius_r: f64,
    region: FeasibleRegion,
}

/// JSON configuration for oracle instances, e.g.
/// `{"example":"e1","k1":2,"k2":5,"r":100}` or `{"example":"l1-box","n":2}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "example")]
pub enum OracleConfig {
    #[serde(rename = "e1")]
    E1 { k1: f64, k2: f64, r: f64 },
    #[serde(rename = "e2")]
    E2 {},
    #[serde(rename = "e3")]
    E3 {
        n: usize,
        #[serde(rename = "B")]
        b: f64,
    },
    #[serde(rename = "l1-box")]
    L1Box { n: usize },
    #[serde(rename = "max-abs-box")]
    MaxAbsBox { n: usize },
}

impl OracleConfig {
    pub fn build(&self) -> Result<Oracle, OracleError> {
        match *self {
            OracleConfig::E1 { k1, k2, r } => Oracle::example1(k1, k2, r),
            OracleConfig::E2 {} => Ok(Oracle::example2()),
            OracleConfig::E3 { n, b } => Oracle::example3(n, b),
            OracleConfig::L1Box { n } => Oracle::sanity_instance("l1-box", n),
            OracleConfig::MaxAbsBox { n } => Oracle::sanity_instance("max-abs-box", n),
        }
    }
}

impl Oracle {
    /// `f(x) = -sqrt(r - k1 x1^2 - k2 x2^2)` over its own ellipse.
    /// `R` is the semi-major axis length `max(sqrt(r/k1), sqrt(r/k2))`.
    pub fn example1(k1: f64, k2: f64, r: f64) -> Result<Self, OracleError> {
        let region = FeasibleRegion::ellipse2d(k1, k2, r)
            .map_err(|e| OracleError::InvalidParameter(e.to_string()))?;
        Ok(Oracle {
            id: format!("e1(k1={k1},k2={k2},r={r})"),
            kind: ObjectiveKind::EllipseSqrt { k1, k2, r },
            dimension: 2,
            f_star: Some(-r.sqrt()),
            x_star: Some(Point::raw(vec![0.0, 0.0])),
            lipschitz_l: None,
            strong_mu: None,
            radius_r: (r / k1).sqrt().max((r / k2).sqrt()),
            region,
        })
    }

    /// `f(x) = (x1^2 + x2^2)/x1` on `[0,1] x [-1,1]`, with `f(0,0) = 0`.
    pub fn example2() -> Self {
        let region =
            FeasibleRegion::box_region(Point::raw(vec![0.0, -1.0]), Point::raw(vec![1.0, 1.0]))
                .expect("static box");
        Oracle {
            id: "e2".into(),
            kind: ObjectiveKind::RatioQuadratic,
            dimension: 2,
            f_star: Some(0.0),
            x_star: Some(Point::raw(vec![0.0, 0.0])),
            lipschitz_l: None,
            strong_mu: None,
            radius_r: 2f64.sqrt(),
            region,
        }
    }

    /// Negative entropy on `[0,B]^n` with the optimal strong convexity
    /// parameter `mu = 1/B`; minimized at `x* = (1/e, ..., 1/e)`.
    pub fn example3(n: usize, b: f64) -> Result<Self, OracleError> {
        if n == 0 || !(b.is_finite() && b > 1.0) {
            return Err(OracleError::InvalidParameter(
                "negative entropy instance needs n >= 1 and B > 1".into(),
            ));
        }
        let region = FeasibleRegion::box_region(Point::raw(vec![0.0; n]), Point::raw(vec![b; n]))
            .expect("valid box");
        let inv_e = (-1f64).exp();
        Ok(Oracle {
            id: format!("e3(n={n},B={b})"),
            kind: ObjectiveKind::NegEntropy { b },
            dimension: n,
            f_star: Some(-(n as f64) * inv_e),
            x_star: Some(Point::raw(vec![inv_e; n])),
            lipschitz_l: None,
            strong_mu: Some(1.0 / b),
            radius_r: (n as f64).sqrt() * (b - inv_e),
            region,
        })
    }

    /// Lipschitz sanity instances on `[-1,1]^n` with subgradients available
    /// everywhere: `l1-box` (`f = ||x||_1`, `L = sqrt(n)`) and `max-abs-box`
    /// (`f = max_i |x_i|`, `L = 1`). Kink tie-breaks map 0 to +1.
    pub fn sanity_instance(name: &str, n: usize) -> Result<Self, OracleError> {
        if n == 0 {
            return Err(OracleError::InvalidParameter("n must be >= 1".into()));
        }
        let region =
            FeasibleRegion::box_region(Point::raw(vec![-1.0; n]), Point::raw(vec![1.0; n]))
                .expect("valid box");
        let (kind, l) = match name {
            "l1-box" => (ObjectiveKind::L1Norm, (n as f64).sqrt()),
            "max-abs-box" => (ObjectiveKind::MaxAbs, 1.0),
            other => return Err(OracleError::UnknownInstance(other.into())),
        };
        Ok(Oracle {
            id: format!("{name}(n={n})"),
            kind,
            dimension: n,
            f_star: Some(0.0),
            x_star: Some(Point::raw(vec![0.0; n])),
            lipschitz_l: Some(l),
            strong_mu: None,
            radius_r: (n as f64).sqrt(),
            region,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }
    pub fn dimension(&self) -> usize {
        self.dimension
    }
    pub fn f_star(&self) -> Option<f64> {
        self.f_star
    }
    pub fn x_star(&self) -> Option<&Point> {
        self.x_star.as_ref()
    }
    pub fn lipschitz_l(&self) -> Option<f64> {
        self.lipschitz_l
    }
    pub fn strong_mu(&self) -> Option<f64> {
        self.strong_mu
    }
    pub fn radius_r(&self) -> f64 {
        self.radius_r
    }
    pub fn region(&self) -> &FeasibleRegion {
        &self.region
    }

    fn check_dim(&self, x: &Point) -> Result<(), OracleError> {
        if x.dim() != self.dimension {
            return Err(OracleError::DimensionMismatch {
                expected: self.dimension,
                got: x.dim(),
            });
        }
        Ok(())
    }

    /// Evaluates `f(x)` for `x` in the closed region. The value may be
    /// `+inf` where the extended-real objective is infinite (e2 on the
    /// segment `x1 = 0, x2 != 0`).
    pub fn evaluate(&self, x: &Point) -> Result<f64, OracleError> {
        self.check_dim(x)?;
        if !self
            .region
            .contains(x)
            .map_err(|_| OracleError::OutOfDomain)?
        {
            return Err(OracleError::OutOfDomain);
        }
        Ok(match &self.kind {
            ObjectiveKind::EllipseSqrt { k1, k2, r } => {
                let slack = r - k1 * x[0] * x[0] - k2 * x[1] * x[1];
                -slack.max(0.0).sqrt()
            }
            ObjectiveKind::RatioQuadratic => {
                if x[0] > 0.0 {
                    (x[0] * x[0] + x[1] * x[1]) / x[0]
                } else if x[1] == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            ObjectiveKind::NegEntropy { .. } => x
                .as_slice()
                .iter()
                .map(|&xi| if xi > 0.0 { xi * xi.ln() } else { 0.0 })
                .sum(),
            ObjectiveKind::L1Norm => x.as_slice().iter().map(|xi| xi.abs()).sum(),
            ObjectiveKind::MaxAbs => x.as_slice().iter().fold(0.0, |m, xi| m.max(xi.abs())),
        })
    }

    /// Returns a subgradient where the subdifferential is nonempty and
    /// `Undefined` on the documented failure sets: the full ellipse boundary
    /// for e1, the segment `x1 = 0` (including the origin, where no selection
    /// is defined) for e2, and any coordinate within `TAU_INT` of zero for
    /// e3. Sanity instances are defined everywhere on their boxes.
    pub fn subgradient(&self, x: &Point) -> SubgradientOutcome {
        assert_eq!(x.dim(), self.dimension, "subgradient query dimension");
        match &self.kind {
            ObjectiveKind::EllipseSqrt { k1, k2, r } => {
                let slack = r - k1 * x[0] * x[0] - k2 * x[1] * x[1];
                if slack < -crate::TAU_MEMBER {
                    return SubgradientOutcome::Undefined {
                        reason: "outside the ellipse domain",
                    };
                }
                if slack <= TAU_INT {
                    return SubgradientOutcome::Undefined {
                        reason: "no subgradient on the ellipse boundary",
                    };
                }
                let root = slack.sqrt();
                SubgradientOutcome::Available(Point::raw(vec![k1 * x[0] / root, k2 * x[1] / root]))
            }
            ObjectiveKind::RatioQuadratic => {
                if x[0] <= 0.0 {
                    let reason = if x[0] == 0.0 && x[1] == 0.0 {
                        "no subgradient selection at the origin"
                    } else if x[0] == 0.0 {
                        "no subgradient on the segment x1 = 0"
                    } else {
                        "outside the domain x1 >= 0"
                    };
                    return SubgradientOutcome::Undefined { reason };
                }
                let ratio = x[1] / x[0];
                let g = Point::raw(vec![1.0 - ratio * ratio, 2.0 * ratio]);
                if g.is_finite() {
                    SubgradientOutcome::Available(g)
                } else {
                    SubgradientOutcome::Undefined {
                        reason: "subgradient overflow near x1 = 0",
                    }
                }
            }
            ObjectiveKind::NegEntropy { b } => {
                if x.as_slice().iter().any(|&xi| xi <= TAU_INT) {
                    return SubgradientOutcome::Undefined {
                        reason: "no subgradient where a coordinate vanishes",
                    };
                }
                if x.as_slice().iter().any(|&xi| xi > b + crate::TAU_MEMBER) {
                    return SubgradientOutcome::Undefined {
                        reason: "outside the hypercube domain",
                    };
                }
                SubgradientOutcome::Available(Point::raw(
                    x.as_slice().iter().map(|&xi| 1.0 + xi.ln()).collect(),
                ))
            }
            ObjectiveKind::L1Norm => SubgradientOutcome::Available(Point::raw(
                x.as_slice()
                    .iter()
                    .map(|&xi| if xi < 0.0 { -1.0 } else { 1.0 })
                    .collect(),
            )),
            ObjectiveKind::MaxAbs => {
                // Smallest index attaining the max; sign tie-break 0 -> +1.
                let mut arg = 0usize;
                let mut best = -1.0f64;
                for (i, &xi) in x.as_slice().iter().enumerate() {
                    if xi.abs() > best {
                        best = xi.abs();
                        arg = i;
                    }
                }
                let mut g = vec![0.0; self.dimension];
                g[arg] = if x[arg] < 0.0 { -1.0 } else { 1.0 };
                SubgradientOutcome::Available(Point::raw(g))
            }
        }
    }

    /// Stochastic first-order oracle: adds noise from `noise` (drawn on the
    /// caller's deterministic stream) to the exact subgradient. Noise cannot
    /// create a subgradient where none exists.
    pub fn stochastic_subgradient(
        &self,
        noise: &NoiseModel,
        x: &Point,
        rng: &mut ChaCha8Rng,
    ) -> SubgradientOutcome {
        let g = match self.subgradient(x) {
            SubgradientOutcome::Available(g) => g,
            undefined => return undefined,
        };
        match noise {
            NoiseModel::None => SubgradientOutcome::Available(g),
            NoiseModel::Gaussian { sigma } => {
                if *sigma == 0.0 {
                    return SubgradientOutcome::Available(g);
                }
                let per_coord = sigma / (self.dimension as f64).sqrt();
                let normal = Normal::new(0.0, per_coord).expect("sigma >= 0");
                SubgradientOutcome::Available(Point::raw(
                    g.as_slice()
                        .iter()
                        .map(|gi| gi + normal.sample(rng))
                        .collect(),
                ))
            }
        }
    }
}
