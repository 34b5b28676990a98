//! C ABI over the glide-opt solvers.
//!
//! Conventions: every function returns a [`GlideStatus`] code and writes its
//! results through out-pointers. Handles (`GlideRegion`, `GlideOracle`) are
//! opaque; free them with the matching `*_free`. Strings returned through
//! `char**` are NUL-terminated, allocated by this library, and must be
//! released with `glide_string_free`. All functions are panic-safe: a caught
//! panic maps to `GLIDE_STATUS_INTERNAL_ERROR`.

use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use glide_opt::analysis;
use glide_opt::harness::SolverSection;
use glide_opt::oracles::{Oracle, OracleConfig, SubgradientOutcome};
use glide_opt::sets::{FeasibleRegion, Point};
use glide_opt::solver;

/// Status codes returned by every FFI entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GlideStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ParseError = 3,
    DimensionMismatch = 4,
    PreconditionViolated = 5,
    NumericalFailure = 6,
    /// The subdifferential is empty at the query point (data, not an error
    /// in the solver sense; no gradient is written).
    SubgradientUndefined = 7,
    InternalError = 8,
}

/// Opaque feasible-region handle.
pub struct GlideRegion(FeasibleRegion);

/// Opaque objective-oracle handle.
pub struct GlideOracle(Oracle);

fn catch(body: impl FnOnce() -> GlideStatus) -> GlideStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => GlideStatus::InternalError,
    }
}

/// # Safety
/// `ptr` must be valid for reads of a NUL-terminated string.
unsafe fn parse_utf8<'a>(ptr: *const c_char) -> Result<&'a str, GlideStatus> {
    if ptr.is_null() {
        return Err(GlideStatus::NullPointer);
    }
    CStr::from_ptr(ptr)
        .to_str()
        .map_err(|_| GlideStatus::ParseError)
}

unsafe fn slice_arg<'a>(ptr: *const f64, len: usize) -> Result<&'a [f64], GlideStatus> {
    if ptr.is_null() {
        return Err(GlideStatus::NullPointer);
    }
    Ok(std::slice::from_raw_parts(ptr, len))
}

fn point_arg(coords: &[f64]) -> Result<Point, GlideStatus> {
    Point::new(coords.to_vec()).map_err(|_| GlideStatus::InvalidArgument)
}

/// Builds a feasible region from its JSON description, e.g.
/// `{"type":"ellipse2d","k1":2,"k2":5,"r":100}`.
///
/// # Safety
/// `json` must point to a NUL-terminated string and `out` must be valid for
/// writes.
#[no_mangle]
pub unsafe extern "C" fn glide_region_from_json(
    json: *const c_char,
    out: *mut *mut GlideRegion,
) -> GlideStatus {
    catch(|| {
        if out.is_null() {
            return GlideStatus::NullPointer;
        }
        let text = match parse_utf8(json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let region: FeasibleRegion = match serde_json::from_str(text) {
            Ok(r) => r,
            Err(_) => return GlideStatus::ParseError,
        };
        if region.validate().is_err() {
            return GlideStatus::InvalidArgument;
        }
        *out = Box::into_raw(Box::new(GlideRegion(region)));
        GlideStatus::Ok
    })
}

/// # Safety
/// `region` must be a valid handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn glide_region_free(region: *mut GlideRegion) {
    if !region.is_null() {
        drop(Box::from_raw(region));
    }
}

/// # Safety
/// `region` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn glide_region_dim(
    region: *const GlideRegion,
    out: *mut usize,
) -> GlideStatus {
    catch(|| {
        if region.is_null() || out.is_null() {
            return GlideStatus::NullPointer;
        }
        *out = (*region).0.dim();
        GlideStatus::Ok
    })
}

/// Closed membership test (constraint value within tolerance of the bound).
///
/// # Safety
/// `region`, `coords` (length `dim`) and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn glide_region_contains(
    region: *const GlideRegion,
    coords: *const f64,
    dim: usize,
    out: *mut bool,
) -> GlideStatus {
    catch(|| {
        if region.is_null() || out.is_null() {
            return GlideStatus::NullPointer;
        }
        let coords = match slice_arg(coords, dim) {
            Ok(c) => c,
            Err(s) => return s,
        };
        let point = match point_arg(coords) {
            Ok(p) => p,
            Err(s) => return s,
        };
        match (*region).0.contains(&point) {
            Ok(v) => {
                *out = v;
                GlideStatus::Ok
            }
            Err(_) => GlideStatus::DimensionMismatch,
        }
    })
}

/// Strict-interior test with the library's interior margin.
///
/// # Safety
/// `region`, `coords` (length `dim`) and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn glide_region_strictly_interior(
    region: *const GlideRegion,
    coords: *const f64,
    dim: usize,
    out: *mut bool,
) -> GlideStatus {
    catch(|| {
        if region.is_null() || out.is_null() {
            return GlideStatus::NullPointer;
        }
        let coords = match slice_arg(coords, dim) {
            Ok(c) => c,
            Err(s) => return s,
        };
        let point = match point_arg(coords) {
            Ok(p) => p,
            Err(s) => return s,
        };
        match (*region).0.strictly_interior(&point) {
            Ok(v) => {
                *out = v;
                GlideStatus::Ok
            }
            Err(_) => GlideStatus::DimensionMismatch,
        }
    })
}

/// Euclidean projection. Writes the projected point into `out_point`
/// (length `dim`); `out_residual` and `out_on_boundary` are optional.
///
/// # Safety
/// `region`, `coords` and `out_point` must be valid for `dim` doubles;
/// the two optional out-pointers may be NULL.
#[no_mangle]
pub unsafe extern "C" fn glide_region_project(
    region: *const GlideRegion,
    coords: *const f64,
    dim: usize,
    out_point: *mut f64,
    out_residual: *mut f64,
    out_on_boundary: *mut bool,
) -> GlideStatus {
    catch(|| {
        if region.is_null() || out_point.is_null() {
            return GlideStatus::NullPointer;
        }
        let coords = match slice_arg(coords, dim) {
            Ok(c) => c,
            Err(s) => return s,
        };
        let point = match point_arg(coords) {
            Ok(p) => p,
            Err(s) => return s,
        };
        match (*region).0.project(&point) {
            Ok(result) => {
                std::ptr::copy_nonoverlapping(result.point.as_slice().as_ptr(), out_point, dim);
                if !out_residual.is_null() {
                    *out_residual = result.constraint_residual;
                }
                if !out_on_boundary.is_null() {
                    *out_on_boundary = result.landed_on_boundary;
                }
                GlideStatus::Ok
            }
            Err(glide_opt::sets::RegionError::DimensionMismatch { .. }) => {
                GlideStatus::DimensionMismatch
            }
            Err(_) => GlideStatus::NumericalFailure,
        }
    })
}

/// Builds an oracle from its JSON description, e.g.
/// `{"example":"e1","k1":2,"k2":5,"r":100}` or `{"example":"l1-box","n":2}`.
///
/// # Safety
/// `json` must point to a NUL-terminated string and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn glide_oracle_from_json(
    json: *const c_char,
    out: *mut *mut GlideOracle,
) -> GlideStatus {
    catch(|| {
        if out.is_null() {
            return GlideStatus::NullPointer;
        }
        let text = match parse_utf8(json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let config: OracleConfig = match serde_json::from_str(text) {
            Ok(c) => c,
            Err(_) => return GlideStatus::ParseError,
        };
        match config.build() {
            Ok(oracle) => {
                *out = Box::into_raw(Box::new(GlideOracle(oracle)));
                GlideStatus::Ok
            }
            Err(_) => GlideStatus::InvalidArgument,
        }
    })
}

/// # Safety
/// `oracle` must be a valid handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn glide_oracle_free(oracle: *mut GlideOracle) {
    if !oracle.is_null() {
        drop(Box::from_raw(oracle));
    }
}

/// # Safety
/// `oracle` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn glide_oracle_dim(
    oracle: *const GlideOracle,
    out: *mut usize,
) -> GlideStatus {
    catch(|| {
        if oracle.is_null() || out.is_null() {
            return GlideStatus::NullPointer;
        }
        *out = (*oracle).0.dimension();
        GlideStatus::Ok
    })
}

/// Objective value at a feasible point (may be +inf where the extended
/// objective is infinite).
///
/// # Safety
/// `oracle`, `coords` (length `dim`) and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn glide_oracle_evaluate(
    oracle: *const GlideOracle,
    coords: *const f64,
    dim: usize,
    out: *mut f64,
) -> GlideStatus {
    catch(|| {
        if oracle.is_null() || out.is_null() {
            return GlideStatus::NullPointer;
        }
        let oracle = &(*oracle).0;
        if dim != oracle.dimension() {
            return GlideStatus::DimensionMismatch;
        }
        let coords = match slice_arg(coords, dim) {
            Ok(c) => c,
            Err(s) => return s,
        };
        let point = match point_arg(coords) {
            Ok(p) => p,
            Err(s) => return s,
        };
        match oracle.evaluate(&point) {
            Ok(v) => {
                *out = v;
                GlideStatus::Ok
            }
            Err(_) => GlideStatus::PreconditionViolated,
        }
    })
}

/// Subgradient at a point. Returns `GLIDE_STATUS_SUBGRADIENT_UNDEFINED`
/// (without touching `out_g`) where the subdifferential is empty.
///
/// # Safety
/// `oracle` and `coords`/`out_g` (length `dim`) must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn glide_oracle_subgradient(
    oracle: *const GlideOracle,
    coords: *const f64,
    dim: usize,
    out_g: *mut f64,
) -> GlideStatus {
    catch(|| {
        if oracle.is_null() || out_g.is_null() {
            return GlideStatus::NullPointer;
        }
        let oracle = &(*oracle).0;
        if dim != oracle.dimension() {
            return GlideStatus::DimensionMismatch;
        }
        let coords = match slice_arg(coords, dim) {
            Ok(c) => c,
            Err(s) => return s,
        };
        let point = match point_arg(coords) {
            Ok(p) => p,
            Err(s) => return s,
        };
        match oracle.subgradient(&point) {
            SubgradientOutcome::Available(g) => {
                std::ptr::copy_nonoverlapping(g.as_slice().as_ptr(), out_g, dim);
                GlideStatus::Ok
            }
            SubgradientOutcome::Undefined { .. } => GlideStatus::SubgradientUndefined,
        }
    })
}

/// Runs PSG/SGM from JSON configs and returns the run record as a JSON
/// string. `solver_json` follows the library's solver-section schema, e.g.
/// `{"method":"sgm","alpha":{"type":"adaptive-g","a":1.0},"beta":{"type":"constant","value":0.5},"t":100}`
/// (missing `R`/`L`/`mu` are filled from the oracle metadata).
///
/// # Safety
/// `oracle_json`/`solver_json` must be NUL-terminated strings, `x1` valid
/// for `dim` doubles, `out_json` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn glide_solve_json(
    oracle_json: *const c_char,
    solver_json: *const c_char,
    x1: *const f64,
    dim: usize,
    seed: u64,
    out_json: *mut *mut c_char,
) -> GlideStatus {
    catch(|| {
        if out_json.is_null() {
            return GlideStatus::NullPointer;
        }
        let oracle_text = match parse_utf8(oracle_json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let solver_text = match parse_utf8(solver_json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let oracle = match serde_json::from_str::<OracleConfig>(oracle_text)
            .ok()
            .and_then(|c| c.build().ok())
        {
            Some(o) => o,
            None => return GlideStatus::ParseError,
        };
        let section: SolverSection = match serde_json::from_str(solver_text) {
            Ok(s) => s,
            Err(_) => return GlideStatus::ParseError,
        };
        let t = match section.t {
            Some(t) => t,
            None => return GlideStatus::InvalidArgument,
        };
        let config = match section.resolve(&oracle, t) {
            Ok(c) => c,
            Err(_) => return GlideStatus::InvalidArgument,
        };
        let coords = match slice_arg(x1, dim) {
            Ok(c) => c,
            Err(s) => return s,
        };
        let point = match point_arg(coords) {
            Ok(p) => p,
            Err(s) => return s,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let record = match solver::run(&oracle, oracle.region(), &point, &config, &mut rng) {
            Ok(r) => r,
            Err(solver::SolveError::PreconditionViolated(_)) => {
                return GlideStatus::PreconditionViolated
            }
            Err(solver::SolveError::Oracle(_)) => return GlideStatus::PreconditionViolated,
            Err(_) => return GlideStatus::NumericalFailure,
        };
        let json = match serde_json::to_string(&record) {
            Ok(j) => j,
            Err(_) => return GlideStatus::InternalError,
        };
        match CString::new(json) {
            Ok(cstr) => {
                *out_json = cstr.into_raw();
                GlideStatus::Ok
            }
            Err(_) => GlideStatus::InternalError,
        }
    })
}

/// Analytic one-step-failure predicate of PSG on the ellipse instance.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn glide_e1_failure_predicate(
    r: f64,
    c: f64,
    theta: f64,
    rho: f64,
    out: *mut bool,
) -> GlideStatus {
    catch(|| {
        if out.is_null() {
            return GlideStatus::NullPointer;
        }
        if !(r > 0.0 && c > 0.0 && c < r && rho >= 1.0) {
            return GlideStatus::InvalidArgument;
        }
        *out = analysis::e1_failure_predicate(r, c, theta, rho);
        GlideStatus::Ok
    })
}

/// One-step PSG failure probability on the negative-entropy instance:
/// writes the root of the auxiliary function and `1 - (p/B)^n`.
///
/// # Safety
/// `out_p_root` and `out_prob` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn glide_e3_failure_probability(
    b: f64,
    mu: f64,
    n: u32,
    out_p_root: *mut f64,
    out_prob: *mut f64,
) -> GlideStatus {
    catch(|| {
        if out_p_root.is_null() || out_prob.is_null() {
            return GlideStatus::NullPointer;
        }
        match analysis::e3_failure_probability(b, mu, n) {
            Ok(out) => {
                *out_p_root = out.p_root;
                *out_prob = out.prob;
                GlideStatus::Ok
            }
            Err(analysis::AnalysisError::OutOfDomain) => GlideStatus::InvalidArgument,
            Err(_) => GlideStatus::NumericalFailure,
        }
    })
}

/// Frees a string returned by this library.
///
/// # Safety
/// `s` must have been returned by a glide-opt FFI call and not freed yet.
#[no_mangle]
pub unsafe extern "C" fn glide_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
