use super::reach::reach_params;
use crate::error::{Error, Result};
use crate::offspring::{build, Provenance};
use crate::survivor::{Moment, SurvivorLaw};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ColonyBounds {
    pub lower: f64,
    pub upper: f64,
}

/// Bounds on `E(I_d)`, the expected number of colonies ever created.
///
/// ```text
/// Σ_{r=1}^{d+1} [1 + rθ] P(Y_R = r) + P(N = 0)  <=  E(I_d)  <=  1/(1 - β)
/// ```
///
/// with `Y_R` the root offspring count. The lower bound equals
/// `1 + θβ` because `E(Y_R) = β`, which is checked.
pub fn colony_count_bounds(d: u32, law: &SurvivorLaw) -> Result<ColonyBounds> {
    let params = reach_params(d, law)?;
    if params.beta >= 1.0 {
        return Err(Error::Hypothesis(format!(
            "upper colony bound needs β < 1, got β = {}",
            params.beta
        )));
    }
    let root = build(Provenance::URoot, d, law)?;
    let lower: f64 = root
        .probs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(r, q)| (1.0 + r as f64 * params.theta) * q)
        .sum::<f64>()
        + law.p0()?;
    let compact = 1.0 + params.theta * params.beta;
    if (lower - compact).abs() > 1e-9 * compact {
        return Err(Error::Consistency(format!(
            "colony lower bound {lower} vs 1 + θβ = {compact}"
        )));
    }
    let upper = 1.0 / (1.0 - params.beta);
    if lower > upper + 1e-12 {
        return Err(Error::Consistency(format!(
            "colony lower bound {lower} exceeds upper bound {upper}"
        )));
    }
    Ok(ColonyBounds { lower, upper })
}

/// `lim_{d→∞} E(I_d) = 1/(1 - E(N))` when `E(N) < 1`.
pub fn colony_count_limit(law: &SurvivorLaw) -> Result<f64> {
    match law.mean() {
        Moment::Finite(mu) if mu < 1.0 => Ok(1.0 / (1.0 - mu)),
        m => Err(Error::Hypothesis(format!(
            "colony-count limit needs E(N) < 1, got {}",
            m.value()
        ))),
    }
}
