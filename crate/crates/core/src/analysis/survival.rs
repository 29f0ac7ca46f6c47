use super::fixed_point::extinction_fixed_point;
use crate::error::{domain, Error, Result};
use crate::offspring::{build, Provenance};
use crate::survivor::{Moment, SurvivorLaw};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SurvivalBounds {
    pub lower: f64,
    pub upper: f64,
    /// Extinction probability of the self-avoiding process on `d + 1`
    /// forward neighbours.
    pub psi: f64,
    /// Extinction probability of the move-forward-or-die process.
    pub rho: f64,
}

/// Sandwich for the survival probability on the tree of degree `d`.
///
/// `upper = 1 - ψ`, where ψ is the smallest fixed point of the
/// self-avoiding offspring pgf with `d + 1` forward neighbours.
/// `lower = Σ_{r=1}^{d+1} (1 - ρ^r) P(Y_R = r)`, where ρ is the smallest
/// fixed point of the move-forward-or-die interior offspring pgf and `Y_R`
/// the offspring of the root.
pub fn survival_bounds(d: u32, law: &SurvivorLaw) -> Result<SurvivalBounds> {
    if d < 2 {
        return Err(domain(format!("survival bounds need d >= 2, got {d}")));
    }
    let upper_law = build(Provenance::UInterior, d + 1, law)?;
    let psi = extinction_fixed_point(|s| Ok(upper_law.pgf(s)))?.value;
    let lower_law = build(Provenance::LInterior, d, law)?;
    let rho = extinction_fixed_point(|s| Ok(lower_law.pgf(s)))?.value;
    let root = build(Provenance::URoot, d, law)?;
    let lower: f64 = root
        .probs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(r, q)| (1.0 - rho.powi(r as i32)) * q)
        .sum();
    let upper = 1.0 - psi;
    let lower = lower.clamp(0.0, 1.0);
    if lower > upper + 1e-12 {
        return Err(Error::Consistency(format!(
            "survival lower bound {lower} exceeds upper bound {upper}"
        )));
    }
    Ok(SurvivalBounds {
        lower,
        upper: upper.clamp(0.0, 1.0),
        psi,
        rho,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SurvivalLimit {
    /// `1 - ν`.
    pub limit: f64,
    /// Smallest fixed point of the survivor pgf.
    pub nu: f64,
}

/// Large-`d` limit of the survival probability, `1 - ν`.
///
/// For Poisson growth with geometric catastrophe the fixed point is also
/// available in closed form, and the two are required to agree.
pub fn survival_limit(law: &SurvivorLaw) -> Result<SurvivalLimit> {
    // A mean of at most 1 forces extinction unless N = 1 surely. Deciding
    // this up front avoids chasing hypergeometric rounding near s = 1.
    let nu = match law.mean() {
        Moment::Finite(mu) if mu <= 1.0 && law.pmf(1)? < 1.0 => 1.0,
        _ => extinction_fixed_point(|s| law.pgf(s))?.value,
    };
    let limit = 1.0 - nu;
    if let SurvivorLaw::PoissonGeometric { lambda, p } = *law {
        let closed = poisson_survival_limit_closed_form(lambda, p);
        if (closed - limit).abs() > 1e-10 {
            return Err(Error::Consistency(format!(
                "survival limit {limit} disagrees with closed form {closed}"
            )));
        }
    }
    Ok(SurvivalLimit { limit, nu })
}

/// `max{0, (p(λ²+λ+1) - 1) / (λ(1+λp))}`.
///
/// The pgf `(1-p + (λ+1)ps/(1+λ-λs))/(λp+1)` has fixed points 1 and
/// `s0 = (1-p)(λ+1)/(λ(λp+1))`, and `1 - s0` simplifies to the expression
/// above.
pub fn poisson_survival_limit_closed_form(lambda: f64, p: f64) -> f64 {
    ((p * (lambda * lambda + lambda + 1.0) - 1.0) / (lambda * (1.0 + lambda * p))).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{classify_phase, PhaseKind};
    use proptest::prelude::*;

    #[test]
    fn worked_example_d10() {
        let law = SurvivorLaw::poisson_geometric(5.0, 0.6).unwrap();
        let b = survival_bounds(10, &law).unwrap();
        assert!((b.psi - 0.12226).abs() < 1e-4, "{}", b.psi);
        assert!((b.rho - 0.143256).abs() < 1e-5, "{}", b.rho);
        assert!((b.lower - 0.8733).abs() < 1e-4, "{}", b.lower);
        assert!((b.upper - 0.8778).abs() < 1e-4, "{}", b.upper);
    }

    #[test]
    fn worked_example_limit_is_fixed_point_root() {
        // 20 s² - 22.4 s + 2.4 = 0 gives ν = 0.12
        let law = SurvivorLaw::poisson_geometric(5.0, 0.6).unwrap();
        let lim = survival_limit(&law).unwrap();
        assert!((lim.nu - 0.12).abs() < 1e-12);
        assert!((lim.limit - 0.88).abs() < 1e-12);
    }

    #[test]
    fn yule_limit_example() {
        let law = SurvivorLaw::yule_binomial(2.0, 0.5).unwrap();
        let lim = survival_limit(&law).unwrap();
        assert!((lim.limit - 0.680977).abs() < 1e-5, "{}", lim.limit);
    }

    #[test]
    fn nobody_survives() {
        for law in [
            SurvivorLaw::poisson_geometric(2.0, 0.0).unwrap(),
            SurvivorLaw::yule_binomial(2.0, 0.0).unwrap(),
        ] {
            let b = survival_bounds(4, &law).unwrap();
            assert_eq!((b.lower, b.upper), (0.0, 0.0));
            assert_eq!(b.psi, 1.0);
        }
    }

    #[test]
    fn subcritical_limit_is_zero() {
        let law = SurvivorLaw::poisson_geometric(1.0, 0.2).unwrap();
        assert_eq!(survival_limit(&law).unwrap().limit, 0.0);
        let law = SurvivorLaw::yule_binomial(0.5, 0.4).unwrap();
        assert!(law.mean().value() <= 1.0);
        assert_eq!(survival_limit(&law).unwrap().limit, 0.0);
    }

    #[test]
    fn gap_shrinks_with_degree() {
        let law = SurvivorLaw::poisson_geometric(5.0, 0.6).unwrap();
        let limit = survival_limit(&law).unwrap().limit;
        let mut prev_gap = f64::INFINITY;
        for d in [5u32, 10, 50, 200] {
            let b = survival_bounds(d, &law).unwrap();
            let gap = b.upper - b.lower;
            assert!(gap < prev_gap, "d = {d}");
            prev_gap = gap;
        }
        let b = survival_bounds(200, &law).unwrap();
        assert!((b.upper - limit).abs() < 2e-3 && (b.lower - limit).abs() < 2e-3);
    }

    fn param_law(yule: bool, lambda: f64, p: f64) -> SurvivorLaw {
        if yule {
            SurvivorLaw::yule_binomial(lambda, p).unwrap()
        } else {
            SurvivorLaw::poisson_geometric(lambda, p).unwrap()
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn sandwich_agrees_with_phase(yule in any::<bool>(), lambda in 0.05f64..6.0, p in 0.0f64..=1.0, d in 2u32..12) {
            let law = param_law(yule, lambda, p);
            let b = survival_bounds(d, &law).unwrap();
            prop_assert!(b.lower <= b.upper);
            match classify_phase(d, &law).unwrap().kind {
                PhaseKind::ExtinctCertified => prop_assert!(b.upper < 1e-9, "upper {}", b.upper),
                PhaseKind::SurvivesCertified => prop_assert!(b.lower > 0.0 && b.rho < 1.0),
                PhaseKind::Undetermined => {}
            }
        }

        #[test]
        fn monotone_in_parameters(yule in any::<bool>(), lambda in 0.05f64..5.0, p in 0.05f64..0.95, d in 2u32..8) {
            let base = param_law(yule, lambda, p);
            let more_lambda = param_law(yule, lambda * 1.2, p);
            let more_p = param_law(yule, lambda, (p + 0.05).min(1.0));
            let b0 = survival_bounds(d, &base).unwrap();
            let l0 = survival_limit(&base).unwrap().limit;
            for other in [more_lambda, more_p] {
                let b1 = survival_bounds(d, &other).unwrap();
                prop_assert!(b1.lower >= b0.lower - 1e-9);
                prop_assert!(b1.upper >= b0.upper - 1e-9);
                prop_assert!(survival_limit(&other).unwrap().limit >= l0 - 1e-9);
            }
        }
    }
}
