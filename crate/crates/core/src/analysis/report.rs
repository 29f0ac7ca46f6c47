use super::colonies::{colony_count_bounds, colony_count_limit};
use super::phase::{classify_phase, PhaseClass};
use super::reach::{
    reach_bounds, reach_limit_cdf, reach_limit_mean, reach_mean_bounds, reach_params,
    ReachCdfBounds, ReachMeanBounds, ReachParams,
};
use super::survival::{survival_bounds, survival_limit};
use crate::error::{Error, Result};
use crate::specialfn::SeriesControl;
use crate::survivor::{Moment, SurvivorLaw};
use serde::Serialize;

/// Numerical tolerances in force, recorded in every report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    pub series_abs_tol: f64,
    pub series_rel_tol: f64,
    pub series_max_terms: usize,
    pub fixed_point_step_tol: f64,
    pub fixed_point_residual_tol: f64,
    pub offspring_truncation_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        let ctl = SeriesControl::default();
        Self {
            series_abs_tol: ctl.abs_tol,
            series_rel_tol: ctl.rel_tol,
            series_max_terms: ctl.max_terms,
            fixed_point_step_tol: 1e-13,
            fixed_point_residual_tol: 1e-12,
            offspring_truncation_tol: 1e-13,
        }
    }
}

/// A report section that is only defined under a hypothesis.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Section<T> {
    Available(T),
    Unavailable { hypothesis_not_met: String },
}

impl<T> Section<T> {
    fn from_result(r: Result<T>) -> Result<Self> {
        match r {
            Ok(v) => Ok(Section::Available(v)),
            Err(Error::Hypothesis(msg)) => Ok(Section::Unavailable {
                hypothesis_not_met: msg,
            }),
            Err(e) => Err(e),
        }
    }

    pub fn available(&self) -> Option<&T> {
        match self {
            Section::Available(v) => Some(v),
            Section::Unavailable { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReachReport {
    pub params: ReachParams,
    pub cdf: Vec<ReachCdfBounds>,
    pub mean: ReachMeanBounds,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ColonyReport {
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitReach {
    /// `P(M <= m)` for `m = 0..=m_max`.
    pub cdf: Vec<f64>,
    pub mean: Moment,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsReport {
    pub d: u32,
    pub law: SurvivorLaw,
    pub mean_survivors: Moment,
    pub phase: PhaseClass,
    pub psi: f64,
    pub rho: f64,
    pub nu: f64,
    pub survival_lower: f64,
    pub survival_upper: f64,
    pub survival_limit: f64,
    pub reach: Section<ReachReport>,
    pub reach_limit: LimitReach,
    pub colonies: Section<ColonyReport>,
    pub colony_limit: Section<f64>,
    pub tolerances: Tolerances,
}

/// Evaluates every analytic quantity for `(d, law)`; reach curves cover
/// `m = 0..=m_max`.
pub fn analyze(d: u32, law: &SurvivorLaw, m_max: u64) -> Result<BoundsReport> {
    law.validate()?;
    let phase = classify_phase(d, law)?;
    let surv = survival_bounds(d, law)?;
    let limit = survival_limit(law)?;
    let reach = Section::from_result(reach_params(d, law).and_then(|params| {
        let cdf = (0..=m_max)
            .map(|m| reach_bounds(&params, m))
            .collect::<Result<Vec<_>>>()?;
        let mean = reach_mean_bounds(&params)?;
        Ok(ReachReport { params, cdf, mean })
    }))?;
    let reach_limit = LimitReach {
        cdf: (0..=m_max)
            .map(|m| reach_limit_cdf(law, m))
            .collect::<Result<Vec<_>>>()?,
        mean: reach_limit_mean(law)?,
    };
    let colonies = Section::from_result(
        colony_count_bounds(d, law).map(|b| ColonyReport { lower: b.lower, upper: b.upper }),
    )?;
    let colony_limit = Section::from_result(colony_count_limit(law))?;
    Ok(BoundsReport {
        d,
        law: law.clone(),
        mean_survivors: law.mean(),
        phase,
        psi: surv.psi,
        rho: surv.rho,
        nu: limit.nu,
        survival_lower: surv.lower,
        survival_upper: surv.upper,
        survival_limit: limit.limit,
        reach,
        reach_limit,
        colonies,
        colony_limit,
        tolerances: Tolerances::default(),
    })
}
