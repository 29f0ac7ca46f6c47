//! Analytic results: phase classification, extinction fixed points, the
//! survival sandwich, critical curves, reach and colony-count bounds.

mod colonies;
mod curve;
mod fixed_point;
mod phase;
mod reach;
mod report;
mod survival;

pub use colonies::{colony_count_bounds, colony_count_limit, ColonyBounds};
pub use curve::{
    critical_curve, critical_curve_with, poisson_lambda_roots, poisson_p_roots, CurveBounds,
    CurveForm, CurveOptions, Scheme, SolveFor, DEFAULT_LAMBDA_MAX,
};
pub use fixed_point::{extinction_fixed_point, FixedPoint};
pub use phase::{classify_phase, PhaseClass, PhaseKind};
pub use reach::{
    poisson_reach_closed_form, reach_bounds, reach_limit_cdf, reach_limit_mean,
    reach_mean_bounds, reach_params, PoissonReachClosedForm, ReachCdfBounds, ReachMeanBounds,
    ReachParams,
};
pub use report::{analyze, BoundsReport, ColonyReport, ReachReport, Section, Tolerances};
pub use survival::{
    poisson_survival_limit_closed_form, survival_bounds, survival_limit, SurvivalBounds,
    SurvivalLimit,
};
