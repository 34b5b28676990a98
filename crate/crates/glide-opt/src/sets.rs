//! Feasible regions with exact membership, strict-interior tests and
//! Euclidean projection.
//!
//! Three compact convex sets are supported: Euclidean balls, axis-aligned
//! boxes and 2-D ellipses `k1 x1^2 + k2 x2^2 <= r`. Ball and box projections
//! are closed-form clamps; the ellipse projection solves the secular equation
//! in the Lagrange multiplier with a safeguarded Newton iteration.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::{TAU_INT, TAU_MEMBER, TAU_PROJ};

#[derive(Debug, Error)]
pub enum RegionError {
    #[error("dimension mismatch: region expects {expected}, point has {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("point coordinates must be finite and non-empty")]
    InvalidPoint,
    #[error("invalid region: {0}")]
    InvalidRegion(String),
    #[error(
        "ellipse projection did not converge: |phi| = {residual:.3e} after {iters} iterations"
    )]
    ProjectionNonconvergence { residual: f64, iters: usize },
}

/// A finite real vector in `R^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point {
    coords: Vec<f64>,
}

impl Point {
    /// Builds a point, rejecting empty or non-finite coordinate lists.
    pub fn new(coords: Vec<f64>) -> Result<Self, RegionError> {
        if coords.is_empty() || coords.iter().any(|c| !c.is_finite()) {
            return Err(RegionError::InvalidPoint);
        }
        Ok(Self { coords })
    }

    /// Internal constructor for solver-produced iterates; the caller checks
    /// finiteness separately so it can surface a numerical-failure error
    /// instead of a panic.
    pub(crate) fn raw(coords: Vec<f64>) -> Self {
        debug_assert!(!coords.is_empty());
        Self { coords }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.coords
    }

    pub fn is_finite(&self) -> bool {
        self.coords.iter().all(|c| c.is_finite())
    }

    pub fn norm(&self) -> f64 {
        self.coords.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn dist(&self, other: &Point) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    pub fn dot(&self, other: &Point) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a * b)
            .sum()
    }

    /// `self - alpha * g`, the unprojected subgradient step.
    pub fn step(&self, alpha: f64, g: &Point) -> Point {
        debug_assert_eq!(self.dim(), g.dim());
        Point::raw(
            self.coords
                .iter()
                .zip(&g.coords)
                .map(|(x, gi)| x - alpha * gi)
                .collect(),
        )
    }

    /// Convex combination `(1 - beta) * self + beta * other`.
    pub fn glide(&self, beta: f64, other: &Point) -> Point {
        debug_assert_eq!(self.dim(), other.dim());
        Point::raw(
            self.coords
                .iter()
                .zip(&other.coords)
                .map(|(x, z)| (1.0 - beta) * x + beta * z)
                .collect(),
        )
    }

    pub fn scale(&self, a: f64) -> Point {
        Point::raw(self.coords.iter().map(|c| a * c).collect())
    }

    pub fn neg(&self) -> Point {
        self.scale(-1.0)
    }

    pub fn sub(&self, other: &Point) -> Point {
        debug_assert_eq!(self.dim(), other.dim());
        Point::raw(
            self.coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }
}

impl std::ops::Index<usize> for Point {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.coords[i]
    }
}

impl From<&[f64]> for Point {
    fn from(s: &[f64]) -> Self {
        Point::raw(s.to_vec())
    }
}

/// Result of a Euclidean projection.
///
/// `constraint_residual` is the active constraint function evaluated at the
/// projected point minus its bound (nonpositive up to `TAU_PROJ`).
/// `landed_on_boundary` is true exactly when the input was outside the closed
/// region or on its boundary.
#[derive(Debug, Clone, Serialize)]
pub struct ProjectionResult {
    pub point: Point,
    pub constraint_residual: f64,
    pub landed_on_boundary: bool,
}

/// A compact convex set with nonempty interior.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum FeasibleRegion {
    Ball {
        center: Point,
        radius: f64,
    },
    Box {
        lower: Point,
        upper: Point,
    },
    #[serde(rename = "ellipse2d")]
    Ellipse2D {
        k1: f64,
        k2: f64,
        r: f64,
    },
}

impl FeasibleRegion {
    pub fn ball(center: Point, radius: f64) -> Result<Self, RegionError> {
        let region = FeasibleRegion::Ball { center, radius };
        region.validate()?;
        Ok(region)
    }

    pub fn box_region(lower: Point, upper: Point) -> Result<Self, RegionError> {
        let region = FeasibleRegion::Box { lower, upper };
        region.validate()?;
        Ok(region)
    }

    pub fn ellipse2d(k1: f64, k2: f64, r: f64) -> Result<Self, RegionError> {
        let region = FeasibleRegion::Ellipse2D { k1, k2, r };
        region.validate()?;
        Ok(region)
    }

    /// Checks the structural invariants (positivity, nonempty interior).
    /// Deserialized regions must be validated before use.
    pub fn validate(&self) -> Result<(), RegionError> {
        match self {
            FeasibleRegion::Ball { center, radius } => {
                if !center.is_finite() || center.dim() == 0 {
                    return Err(RegionError::InvalidPoint);
                }
                if !(radius.is_finite() && *radius > 0.0) {
                    return Err(RegionError::InvalidRegion("ball radius must be > 0".into()));
                }
            }
            FeasibleRegion::Box { lower, upper } => {
                if !lower.is_finite() || !upper.is_finite() || lower.dim() == 0 {
                    return Err(RegionError::InvalidPoint);
                }
                if lower.dim() != upper.dim() {
                    return Err(RegionError::DimensionMismatch {
                        expected: lower.dim(),
                        got: upper.dim(),
                    });
                }
                if lower
                    .as_slice()
                    .iter()
                    .zip(upper.as_slice())
                    .any(|(l, u)| l >= u)
                {
                    return Err(RegionError::InvalidRegion(
                        "box needs lower[i] < upper[i] for all i".into(),
                    ));
                }
            }
            FeasibleRegion::Ellipse2D { k1, k2, r } => {
                if !(k1.is_finite() && k2.is_finite() && r.is_finite())
                    || *k1 <= 0.0
                    || *k2 <= 0.0
                    || *r <= 0.0
                {
                    return Err(RegionError::InvalidRegion(
                        "ellipse needs k1, k2, r > 0".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        match self {
            FeasibleRegion::Ball { center, .. } => center.dim(),
            FeasibleRegion::Box { lower, .. } => lower.dim(),
            FeasibleRegion::Ellipse2D { .. } => 2,
        }
    }

    fn check_dim(&self, x: &Point) -> Result<(), RegionError> {
        if x.dim() != self.dim() {
            return Err(RegionError::DimensionMismatch {
                expected: self.dim(),
                got: x.dim(),
            });
        }
        Ok(())
    }

    /// Active constraint function minus its bound: nonpositive inside the
    /// region, zero on the boundary, positive outside.
    pub fn constraint_value(&self, x: &Point) -> f64 {
        match self {
            FeasibleRegion::Ball { center, radius } => x.dist(center) - radius,
            FeasibleRegion::Box { lower, upper } => x
                .as_slice()
                .iter()
                .zip(lower.as_slice().iter().zip(upper.as_slice()))
                .map(|(xi, (l, u))| (l - xi).max(xi - u))
                .fold(f64::NEG_INFINITY, f64::max),
            FeasibleRegion::Ellipse2D { k1, k2, r } => k1 * x[0] * x[0] + k2 * x[1] * x[1] - r,
        }
    }

    /// Closed membership: constraint value at most `TAU_MEMBER`.
    pub fn contains(&self, x: &Point) -> Result<bool, RegionError> {
        self.check_dim(x)?;
        Ok(self.constraint_value(x) <= TAU_MEMBER)
    }

    /// Strict interior with margin: every constraint holds with slack
    /// strictly greater than `TAU_INT`.
    pub fn strictly_interior(&self, x: &Point) -> Result<bool, RegionError> {
        self.check_dim(x)?;
        Ok(self.constraint_value(x) < -TAU_INT)
    }

    /// Euclidean projection onto the closed region.
    pub fn project(&self, y: &Point) -> Result<ProjectionResult, RegionError> {
        self.check_dim(y)?;
        let landed = self.constraint_value(y) >= 0.0;
        let point = match self {
            FeasibleRegion::Ball { center, radius } => {
                let d = y.dist(center);
                if d <= *radius {
                    y.clone()
                } else {
                    let scale = radius / d;
                    Point::raw(
                        y.as_slice()
                            .iter()
                            .zip(center.as_slice())
                            .map(|(yi, ci)| ci + scale * (yi - ci))
                            .collect(),
                    )
                }
            }
            FeasibleRegion::Box { lower, upper } => Point::raw(
                y.as_slice()
                    .iter()
                    .zip(lower.as_slice().iter().zip(upper.as_slice()))
                    .map(|(yi, (l, u))| yi.clamp(*l, *u))
                    .collect(),
            ),
            FeasibleRegion::Ellipse2D { k1, k2, r } => {
                if !landed {
                    y.clone()
                } else {
                    project_ellipse(*k1, *k2, *r, y)?
                }
            }
        };
        let constraint_residual = self.constraint_value(&point);
        Ok(ProjectionResult {
            point,
            constraint_residual,
            landed_on_boundary: landed,
        })
    }
}

/// Projects an exterior (or boundary) point onto the ellipse
/// `k1 y1^2 + k2 y2^2 = r` by solving the secular equation
///
/// ```text
/// phi(lam) = k1 y1^2/(1+2 lam k1)^2 + k2 y2^2/(1+2 lam k2)^2 - r = 0
/// ```
///
/// for `lam >= 0`; the projection is `x_i = y_i / (1 + 2 lam k_i)`. `phi` is
/// strictly decreasing, so a doubling bracket plus safeguarded Newton always
/// converges for exterior points.
fn project_ellipse(k1: f64, k2: f64, r: f64, y: &Point) -> Result<Point, RegionError> {
    let (y1, y2) = (y[0], y[1]);
    // phi evaluates the constraint at the rounded candidate coordinates with
    // exactly the arithmetic of `constraint_value`, so the convergence test
    // and the projection contract agree to the last bit.
    let phi = |lam: f64| {
        let x1 = y1 / (1.0 + 2.0 * lam * k1);
        let x2 = y2 / (1.0 + 2.0 * lam * k2);
        k1 * x1 * x1 + k2 * x2 * x2 - r
    };
    let dphi = |lam: f64| {
        let d1 = 1.0 + 2.0 * lam * k1;
        let d2 = 1.0 + 2.0 * lam * k2;
        -4.0 * k1 * k1 * y1 * y1 / (d1 * d1 * d1) - 4.0 * k2 * k2 * y2 * y2 / (d2 * d2 * d2)
    };
    let at = |lam: f64| {
        Point::raw(vec![
            y1 / (1.0 + 2.0 * lam * k1),
            y2 / (1.0 + 2.0 * lam * k2),
        ])
    };

    if phi(0.0) <= TAU_PROJ {
        // Input already on the boundary to within tolerance.
        return Ok(at(0.0));
    }
    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    let mut iters = 0usize;
    while phi(hi) > 0.0 {
        lo = hi;
        hi *= 2.0;
        iters += 1;
        if iters > 200 {
            return Err(RegionError::ProjectionNonconvergence {
                residual: phi(hi),
                iters,
            });
        }
    }
    let mut lam = 0.5 * (lo + hi);
    for iters in 0..200 {
        let f = phi(lam);
        if f.abs() <= TAU_PROJ {
            return Ok(at(lam));
        }
        if f > 0.0 {
            lo = lam;
        } else {
            hi = lam;
        }
        let newton = lam - f / dphi(lam);
        lam = if newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo <= f64::EPSILON * lam.max(1.0) && phi(lam).abs() > TAU_PROJ {
            return Err(RegionError::ProjectionNonconvergence {
                residual: phi(lam),
                iters,
            });
        }
    }
    let residual = phi(lam);
    if residual.abs() <= TAU_PROJ {
        Ok(at(lam))
    } else {
        Err(RegionError::ProjectionNonconvergence {
            residual,
            iters: 200,
        })
    }
}

/// `||P(y1) - P(y2)|| - ||y1 - y2||`; nonpositive up to roundoff by the
/// projection theorem. Test utility.
pub fn nonexpansiveness_gap(
    region: &FeasibleRegion,
    y1: &Point,
    y2: &Point,
) -> Result<f64, RegionError> {
    let p1 = region.project(y1)?;
    let p2 = region.project(y2)?;
    Ok(p1.point.dist(&p2.point) - y1.dist(y2))
}
