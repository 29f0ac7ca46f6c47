use cctree_ffi::*;
use std::ffi::CStr;
use std::ptr;

fn law(growth: CctreeGrowth, cat: CctreeCatastrophe, lambda: f64, p: f64) -> *mut CctreeLaw {
    let mut h = ptr::null_mut();
    let st = unsafe { cctree_law_new(growth, cat, lambda, p, &mut h) };
    assert_eq!(st, CctreeStatus::Ok);
    assert!(!h.is_null());
    h
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(cctree_last_error()) }.to_string_lossy().into_owned()
}

#[test]
fn worked_example_through_abi() {
    let h = law(CctreeGrowth::Poisson, CctreeCatastrophe::Geometric, 5.0, 0.6);
    let mut b = CctreeSurvivalBounds::default();
    assert_eq!(unsafe { cctree_survival_bounds(10, h, &mut b) }, CctreeStatus::Ok);
    assert!((b.lower - 0.8733).abs() < 1e-4 && (b.upper - 0.8778).abs() < 1e-4);
    let mut lim = 0.0;
    assert_eq!(unsafe { cctree_survival_limit(h, &mut lim) }, CctreeStatus::Ok);
    assert!((lim - 0.88).abs() < 1e-12);
    let mut kind = CctreePhase::Undetermined;
    assert_eq!(unsafe { cctree_classify_phase(10, h, &mut kind, ptr::null_mut()) }, CctreeStatus::Ok);
    assert_eq!(kind, CctreePhase::SurvivesCertified);
    unsafe { cctree_law_free(h) };
}

#[test]
fn errors_map_to_status_codes() {
    let mut h = ptr::null_mut();
    let st = unsafe {
        cctree_law_new(CctreeGrowth::Poisson, CctreeCatastrophe::Binomial, 1.0, 0.5, &mut h)
    };
    assert_eq!(st, CctreeStatus::InvalidParameter);
    assert!(h.is_null());
    assert!(last_error().contains("pairing"));

    let st = unsafe { cctree_law_new(CctreeGrowth::Poisson, CctreeCatastrophe::Geometric, 1.0, 0.5, ptr::null_mut()) };
    assert_eq!(st, CctreeStatus::NullPointer);

    let h = law(CctreeGrowth::Poisson, CctreeCatastrophe::Geometric, 5.0, 0.6);
    let (mut lo, mut hi) = (0.0, 0.0);
    assert_eq!(unsafe { cctree_reach_cdf_bounds(4, h, 3, &mut lo, &mut hi) }, CctreeStatus::Hypothesis);
    assert_eq!(unsafe { cctree_colony_bounds(4, h, &mut lo, &mut hi) }, CctreeStatus::Hypothesis);
    assert_eq!(unsafe { cctree_survival_bounds(1, h, &mut CctreeSurvivalBounds::default()) }, CctreeStatus::Domain);
    let mut v = 0.0;
    assert_eq!(unsafe { cctree_law_pgf(ptr::null(), 0.5, &mut v) }, CctreeStatus::NullPointer);
    assert_eq!(unsafe { cctree_law_pgf(h, 0.5, &mut v) }, CctreeStatus::Ok);
    assert_eq!(last_error(), "");
    unsafe { cctree_law_free(h) };
    unsafe { cctree_law_free(ptr::null_mut()) };
}

#[test]
fn offspring_handle() {
    let h = law(CctreeGrowth::Yule, CctreeCatastrophe::Binomial, 0.5, 0.4);
    let mut ol = ptr::null_mut();
    assert_eq!(unsafe { cctree_offspring_build(CctreeProvenance::LInterior, 3, h, &mut ol) }, CctreeStatus::Ok);
    let mut len = 0usize;
    assert_eq!(unsafe { cctree_offspring_len(ol, &mut len) }, CctreeStatus::Ok);
    assert_eq!(len, 4);
    let mut buf = vec![0.0; len];
    assert_eq!(unsafe { cctree_offspring_probs(ol, buf.as_mut_ptr(), len) }, CctreeStatus::Ok);
    assert!((buf.iter().sum::<f64>() - 1.0).abs() < 1e-10);
    let mut g = 0.0;
    assert_eq!(unsafe { cctree_offspring_pgf(ol, 0.0, &mut g) }, CctreeStatus::Ok);
    assert_eq!(g, buf[0]);
    unsafe {
        cctree_offspring_free(ol);
        cctree_law_free(h);
    }
}

#[test]
fn curve_and_reach() {
    let mut b = CctreeCurveBounds::default();
    assert_eq!(unsafe { cctree_critical_curve(4, false, 1.0, false, &mut b) }, CctreeStatus::Ok);
    assert!(b.lower_found && b.upper_found);
    assert!((b.upper - 1.0 / 3.0).abs() < 1e-12);

    let h = law(CctreeGrowth::Poisson, CctreeCatastrophe::Geometric, 1.0, 0.2);
    let (mut lo, mut hi, mut lim) = (0.0, 0.0, 0.0);
    assert_eq!(unsafe { cctree_reach_cdf_bounds(2, h, 2, &mut lo, &mut hi) }, CctreeStatus::Ok);
    assert!(0.0 <= lo && lo <= hi && hi <= 1.0);
    assert_eq!(unsafe { cctree_reach_limit_cdf(h, 0, &mut lim) }, CctreeStatus::Ok);
    let mut p0 = 0.0;
    assert_eq!(unsafe { cctree_law_pmf(h, 0, &mut p0) }, CctreeStatus::Ok);
    assert!((lim - p0).abs() < 1e-15);
    unsafe { cctree_law_free(h) };
}

#[test]
fn simulation_is_deterministic() {
    let h = law(CctreeGrowth::Poisson, CctreeCatastrophe::Geometric, 1.0, 0.2);
    let mut a = CctreeSimSummary::default();
    let mut b = CctreeSimSummary::default();
    let hz = cctree_default_horizon();
    for out in [&mut a, &mut b] {
        let st = unsafe {
            cctree_simulate(2, h, CctreeVariant::Original, CctreeRootKind::FullTree, hz, 7, 2000, out)
        };
        assert_eq!(st, CctreeStatus::Ok);
    }
    assert_eq!(a, b);
    assert_eq!(a.replications, 2000);
    assert!(a.extinct >= 1998);
    unsafe { cctree_law_free(h) };
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(cctree_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}
