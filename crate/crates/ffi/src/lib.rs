//! C ABI over the `cctree` library.
//!
//! Laws and offspring laws are opaque heap handles created by `*_new` /
//! `*_build` and released by the matching `*_free`. Every fallible call
//! returns a [`CctreeStatus`] and writes its results through out-pointers;
//! on failure the message is available from [`cctree_last_error`] until the
//! next call on the same thread. Panics never cross the boundary.

use cctree::analysis::{
    classify_phase, critical_curve_with, reach_bounds, reach_limit_cdf, reach_params,
    survival_bounds, survival_limit, CurveForm, CurveOptions, PhaseKind, Scheme, SolveFor,
    DEFAULT_LAMBDA_MAX,
};
use cctree::analysis::colony_count_bounds;
use cctree::offspring::{build, OffspringLaw, Provenance};
use cctree::sim::{estimate, Horizon, ProcessConfig, RootKind, Variant};
use cctree::{Catastrophe, Error, Growth, SurvivorLaw};
use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CctreeStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    Domain = 3,
    Precision = 4,
    Overflow = 5,
    Hypothesis = 6,
    NoRoot = 7,
    Consistency = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CctreeGrowth {
    Poisson = 0,
    Yule = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CctreeCatastrophe {
    Geometric = 0,
    Binomial = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CctreeProvenance {
    UInterior = 0,
    URoot = 1,
    LInterior = 2,
    LRoot = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CctreePhase {
    ExtinctCertified = 0,
    SurvivesCertified = 1,
    Undetermined = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CctreeVariant {
    Original = 0,
    SelfAvoiding = 1,
    ForwardOrDie = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CctreeRootKind {
    FullTree = 0,
    RootedTree = 1,
}

/// Opaque survivor law.
pub struct CctreeLaw(SurvivorLaw);

/// Opaque offspring law.
pub struct CctreeOffspring(OffspringLaw);

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CctreeSurvivalBounds {
    pub lower: f64,
    pub upper: f64,
    pub psi: f64,
    pub rho: f64,
}

/// Critical-curve roots in λ at fixed p. A side without a root has its
/// `*_found` flag cleared and its value set to NaN.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CctreeCurveBounds {
    pub lower: f64,
    pub upper: f64,
    pub lower_found: bool,
    pub upper_found: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CctreeHorizon {
    pub max_events: u64,
    pub max_colonies_alive: u64,
    pub max_depth: u64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CctreeSimSummary {
    pub replications: u64,
    pub extinct: u64,
    pub censored: u64,
    /// Censored fraction and its Wilson 99% interval.
    pub survival: f64,
    pub survival_lower: f64,
    pub survival_upper: f64,
    /// Means over extinct replications; NaN if there were none.
    pub colonies_mean: f64,
    pub reach_mean: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> CctreeStatus {
    match e {
        Error::Domain(_) => CctreeStatus::Domain,
        Error::Precision { .. } => CctreeStatus::Precision,
        Error::Overflow(_) => CctreeStatus::Overflow,
        Error::Hypothesis(_) => CctreeStatus::Hypothesis,
        Error::NoRoot(_) => CctreeStatus::NoRoot,
        Error::Consistency(_) => CctreeStatus::Consistency,
        Error::InvalidParameter(_) => CctreeStatus::InvalidParameter,
    }
}

/// Runs `f`, mapping errors and panics to a status.
fn guard(f: impl FnOnce() -> Result<(), (CctreeStatus, String)>) -> CctreeStatus {
    set_error("");
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CctreeStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            CctreeStatus::Panic
        }
    }
}

trait IntoFfi<T> {
    fn ffi(self) -> Result<T, (CctreeStatus, String)>;
}

impl<T> IntoFfi<T> for Result<T, Error> {
    fn ffi(self) -> Result<T, (CctreeStatus, String)> {
        self.map_err(|e| (status_of(&e), e.to_string()))
    }
}

fn null() -> (CctreeStatus, String) {
    (CctreeStatus::NullPointer, "null pointer argument".into())
}

unsafe fn deref<'a, T>(p: *const T) -> Result<&'a T, (CctreeStatus, String)> {
    p.as_ref().ok_or_else(null)
}

unsafe fn write<T>(p: *mut T, v: T) -> Result<(), (CctreeStatus, String)> {
    if p.is_null() {
        return Err(null());
    }
    p.write(v);
    Ok(())
}

/// Message of the last failed call on this thread, or an empty string.
/// The pointer stays valid until the next call into this library.
#[no_mangle]
pub extern "C" fn cctree_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn cctree_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Creates a survivor law. Only Poisson/geometric and Yule/binomial are
/// available.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn cctree_law_new(
    growth: CctreeGrowth,
    catastrophe: CctreeCatastrophe,
    lambda: f64,
    p: f64,
    out: *mut *mut CctreeLaw,
) -> CctreeStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        let g = match growth {
            CctreeGrowth::Poisson => Growth::Poisson,
            CctreeGrowth::Yule => Growth::Yule,
        };
        let c = match catastrophe {
            CctreeCatastrophe::Geometric => Catastrophe::Geometric,
            CctreeCatastrophe::Binomial => Catastrophe::Binomial,
        };
        let law = SurvivorLaw::new(g, c, lambda, p).ffi()?;
        write(out, Box::into_raw(Box::new(CctreeLaw(law))))
    })
}

/// Releases a law; null is ignored.
///
/// # Safety
/// `law` must come from [`cctree_law_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn cctree_law_free(law: *mut CctreeLaw) {
    if !law.is_null() {
        drop(Box::from_raw(law));
    }
}

/// `E[s^N]` for `s` in `[0, 1]`.
///
/// # Safety
/// `law` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cctree_law_pgf(law: *const CctreeLaw, s: f64, out: *mut f64) -> CctreeStatus {
    guard(|| write(out, deref(law)?.0.pgf(s).ffi()?))
}

/// `P(N = n)`.
///
/// # Safety
/// `law` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cctree_law_pmf(law: *const CctreeLaw, n: u64, out: *mut f64) -> CctreeStatus {
    guard(|| write(out, deref(law)?.0.pmf(n).ffi()?))
}

/// `E(N)`; `INFINITY` when the mean is infinite.
///
/// # Safety
/// `law` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cctree_law_mean(law: *const CctreeLaw, out: *mut f64) -> CctreeStatus {
    guard(|| write(out, deref(law)?.0.mean().value()))
}

/// Builds the offspring law of a comparison process.
///
/// # Safety
/// `law` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cctree_offspring_build(
    provenance: CctreeProvenance,
    d: u32,
    law: *const CctreeLaw,
    out: *mut *mut CctreeOffspring,
) -> CctreeStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        let prov = match provenance {
            CctreeProvenance::UInterior => Provenance::UInterior,
            CctreeProvenance::URoot => Provenance::URoot,
            CctreeProvenance::LInterior => Provenance::LInterior,
            CctreeProvenance::LRoot => Provenance::LRoot,
        };
        let ol = build(prov, d, &deref(law)?.0).ffi()?;
        write(out, Box::into_raw(Box::new(CctreeOffspring(ol))))
    })
}

/// Releases an offspring law; null is ignored.
///
/// # Safety
/// `ol` must come from [`cctree_offspring_build`] and not be used
/// afterwards.
#[no_mangle]
pub unsafe extern "C" fn cctree_offspring_free(ol: *mut CctreeOffspring) {
    if !ol.is_null() {
        drop(Box::from_raw(ol));
    }
}

/// Number of support points, `max Y + 1`.
///
/// # Safety
/// `ol` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cctree_offspring_len(ol: *const CctreeOffspring, out: *mut usize) -> CctreeStatus {
    guard(|| write(out, deref(ol)?.0.probs.len()))
}

/// Copies `min(len, support)` probabilities into `buf`.
///
/// # Safety
/// `ol` must be a live handle and `buf` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn cctree_offspring_probs(ol: *const CctreeOffspring, buf: *mut f64, len: usize) -> CctreeStatus {
    guard(|| {
        let probs = &deref(ol)?.0.probs;
        if buf.is_null() && len > 0 {
            return Err(null());
        }
        let n = len.min(probs.len());
        std::ptr::copy_nonoverlapping(probs.as_ptr(), buf, n);
        Ok(())
    })
}

/// `E[s^Y]`.
///
/// # Safety
/// `ol` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cctree_offspring_pgf(ol: *const CctreeOffspring, s: f64, out: *mut f64) -> CctreeStatus {
    guard(|| write(out, deref(ol)?.0.pgf(s)))
}

/// Phase class from the survivor pgf at `d/(d+1)`.
///
/// # Safety
/// `law` must be a live handle; `kind` writable; `pgf_value` may be null.
#[no_mangle]
pub unsafe extern "C" fn cctree_classify_phase(
    d: u32,
    law: *const CctreeLaw,
    kind: *mut CctreePhase,
    pgf_value: *mut f64,
) -> CctreeStatus {
    guard(|| {
        let c = classify_phase(d, &deref(law)?.0).ffi()?;
        let k = match c.kind {
            PhaseKind::ExtinctCertified => CctreePhase::ExtinctCertified,
            PhaseKind::SurvivesCertified => CctreePhase::SurvivesCertified,
            PhaseKind::Undetermined => CctreePhase::Undetermined,
        };
        write(kind, k)?;
        if !pgf_value.is_null() {
            pgf_value.write(c.pgf_value);
        }
        Ok(())
    })
}

/// Survival sandwich on the tree of degree `d`.
///
/// # Safety
/// `law` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cctree_survival_bounds(
    d: u32,
    law: *const CctreeLaw,
    out: *mut CctreeSurvivalBounds,
) -> CctreeStatus {
    guard(|| {
        let b = survival_bounds(d, &deref(law)?.0).ffi()?;
        write(out, CctreeSurvivalBounds { lower: b.lower, upper: b.upper, psi: b.psi, rho: b.rho })
    })
}

/// Large-`d` survival limit `1 - ν`.
///
/// # Safety
/// `law` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cctree_survival_limit(law: *const CctreeLaw, out: *mut f64) -> CctreeStatus {
    guard(|| write(out, survival_limit(&deref(law)?.0).ffi()?.limit))
}

/// Critical-curve bounds in λ at fixed `p`. `yule` selects Yule/binomial
/// over Poisson/geometric; `pgf_form` solves the direct pgf inequality
/// instead of the hypergeometric closed form.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cctree_critical_curve(
    d: u32,
    yule: bool,
    p: f64,
    pgf_form: bool,
    out: *mut CctreeCurveBounds,
) -> CctreeStatus {
    guard(|| {
        let scheme = if yule { Scheme::YuleBinomial } else { Scheme::PoissonGeometric };
        let opts = CurveOptions {
            form: if pgf_form { CurveForm::Pgf } else { CurveForm::Closed },
            lambda_max: DEFAULT_LAMBDA_MAX,
        };
        let b = critical_curve_with(d, scheme, SolveFor::LambdaGivenP, p, &opts).ffi()?;
        write(
            out,
            CctreeCurveBounds {
                lower: b.lower.clone().unwrap_or(f64::NAN),
                upper: b.upper.clone().unwrap_or(f64::NAN),
                lower_found: b.lower.is_ok(),
                upper_found: b.upper.is_ok(),
            },
        )
    })
}

/// Bounds on `P(M_d <= m)`; fails with `Hypothesis` outside the
/// subcritical regime.
///
/// # Safety
/// `law` must be a live handle; `lower` and `upper` writable.
#[no_mangle]
pub unsafe extern "C" fn cctree_reach_cdf_bounds(
    d: u32,
    law: *const CctreeLaw,
    m: u64,
    lower: *mut f64,
    upper: *mut f64,
) -> CctreeStatus {
    guard(|| {
        let params = reach_params(d, &deref(law)?.0).ffi()?;
        let b = reach_bounds(&params, m).ffi()?;
        write(lower, b.lower)?;
        write(upper, b.upper)
    })
}

/// Large-`d` limit of `P(M_d <= m)`.
///
/// # Safety
/// `law` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cctree_reach_limit_cdf(law: *const CctreeLaw, m: u64, out: *mut f64) -> CctreeStatus {
    guard(|| write(out, reach_limit_cdf(&deref(law)?.0, m).ffi()?))
}

/// Bounds on the expected number of colonies.
///
/// # Safety
/// `law` must be a live handle; `lower` and `upper` writable.
#[no_mangle]
pub unsafe extern "C" fn cctree_colony_bounds(
    d: u32,
    law: *const CctreeLaw,
    lower: *mut f64,
    upper: *mut f64,
) -> CctreeStatus {
    guard(|| {
        let b = colony_count_bounds(d, &deref(law)?.0).ffi()?;
        write(lower, b.lower)?;
        write(upper, b.upper)
    })
}

/// Default simulation horizon.
#[no_mangle]
pub extern "C" fn cctree_default_horizon() -> CctreeHorizon {
    let h = Horizon::default();
    CctreeHorizon {
        max_events: h.max_events,
        max_colonies_alive: h.max_colonies_alive,
        max_depth: h.max_depth,
    }
}

/// Runs `replications` replications and summarizes them. Deterministic in
/// `(seed, arguments)`.
///
/// # Safety
/// `law` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cctree_simulate(
    d: u32,
    law: *const CctreeLaw,
    variant: CctreeVariant,
    root_kind: CctreeRootKind,
    horizon: CctreeHorizon,
    seed: u64,
    replications: u64,
    out: *mut CctreeSimSummary,
) -> CctreeStatus {
    guard(|| {
        let cfg = ProcessConfig {
            d,
            root_kind: match root_kind {
                CctreeRootKind::FullTree => RootKind::FullTree,
                CctreeRootKind::RootedTree => RootKind::RootedTree,
            },
            variant: match variant {
                CctreeVariant::Original => Variant::Original,
                CctreeVariant::SelfAvoiding => Variant::SelfAvoiding,
                CctreeVariant::ForwardOrDie => Variant::ForwardOrDie,
            },
            law: deref(law)?.0.clone(),
            horizon: Horizon {
                max_events: horizon.max_events,
                max_colonies_alive: horizon.max_colonies_alive,
                max_depth: horizon.max_depth,
            },
            base_seed: seed,
        };
        let e = estimate(&cfg, replications).ffi()?;
        write(
            out,
            CctreeSimSummary {
                replications: e.replications,
                extinct: e.extinct,
                censored: e.censored,
                survival: e.survival.estimate,
                survival_lower: e.survival.lower,
                survival_upper: e.survival.upper,
                colonies_mean: e.colonies_given_extinct.mean,
                reach_mean: e.reach_given_extinct.mean,
            },
        )
    })
}
