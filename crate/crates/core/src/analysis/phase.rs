use crate::error::{domain, Result};
use crate::survivor::SurvivorLaw;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PhaseKind {
    ExtinctCertified,
    SurvivesCertified,
    Undetermined,
}

/// Outcome of comparing `m = E[(d/(d+1))^N]` with the two thresholds.
///
/// Extinction is certain when `m >= d/(d+1)`; survival has positive
/// probability when `m < (d-1)/d`. In between nothing is claimed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseClass {
    pub kind: PhaseKind,
    /// `E[(d/(d+1))^N]`, the side shared by both inequalities.
    pub pgf_value: f64,
    /// `d/(d+1)`.
    pub extinction_threshold: f64,
    /// `(d-1)/d`.
    pub survival_threshold: f64,
}

pub fn classify_phase(d: u32, law: &SurvivorLaw) -> Result<PhaseClass> {
    if d < 2 {
        return Err(domain(format!("phase classification needs d >= 2, got {d}")));
    }
    let df = f64::from(d);
    let m = law.pgf(df / (df + 1.0))?;
    let extinction_threshold = df / (df + 1.0);
    let survival_threshold = (df - 1.0) / df;
    let kind = if m >= extinction_threshold {
        PhaseKind::ExtinctCertified
    } else if m < survival_threshold {
        PhaseKind::SurvivesCertified
    } else {
        PhaseKind::Undetermined
    };
    Ok(PhaseClass {
        kind,
        pgf_value: m,
        extinction_threshold,
        survival_threshold,
    })
}
