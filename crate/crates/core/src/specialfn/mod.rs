//! Special functions and combinatorics used by the analytic side.

mod hyp2f1;
mod qdigamma;
mod quad;
mod surjection;

pub use hyp2f1::{hyp2f1, hyp2f1_with};
pub use qdigamma::{q_digamma, q_digamma_with};
pub use quad::tanh_sinh;
pub use surjection::{
    surjection_count, surjection_log, Occupancy, ScaledSurjections, SurjectionTable,
};

use crate::error::{domain, invalid, Result};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

/// Truncation policy shared by every series evaluator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesControl {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_terms: usize,
}

impl Default for SeriesControl {
    fn default() -> Self {
        Self {
            abs_tol: 1e-14,
            rel_tol: 1e-13,
            max_terms: 1_000_000,
        }
    }
}

impl SeriesControl {
    pub fn new(abs_tol: f64, rel_tol: f64, max_terms: usize) -> Result<Self> {
        let ctl = Self {
            abs_tol,
            rel_tol,
            max_terms,
        };
        ctl.validate()?;
        Ok(ctl)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(invalid("series tolerances must be strictly positive"));
        }
        if self.max_terms == 0 {
            return Err(invalid("max_terms must be at least 1"));
        }
        Ok(())
    }

    /// Effective tolerance for a running sum.
    pub(crate) fn tol(&self, sum: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * sum.abs())
    }
}

/// `ln B(a, b)` for positive arguments.
pub fn ln_beta(a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) || !a.is_finite() || !b.is_finite() {
        return Err(domain(format!("beta needs positive finite arguments, got ({a}, {b})")));
    }
    Ok(ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b))
}

/// Euler Beta function `B(a, b) = Γ(a)Γ(b)/Γ(a+b)`.
pub fn beta_fn(a: f64, b: f64) -> Result<f64> {
    // Small integer-ish cases lose a few ulps through ln_gamma; B(1, x) is
    // common enough to special-case.
    if a == 1.0 && b > 0.0 {
        return Ok(1.0 / b);
    }
    if b == 1.0 && a > 0.0 {
        return Ok(1.0 / a);
    }
    Ok(ln_beta(a, b)?.exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn beta_values() {
        assert_eq!(beta_fn(1.0, 1.0).unwrap(), 1.0);
        assert!((beta_fn(2.0, 3.0).unwrap() - 1.0 / 12.0).abs() < 1e-15);
        assert!((beta_fn(1.0, 7.0).unwrap() - 1.0 / 7.0).abs() < 1e-16);
        // B(3.5, 2) = 1 / (3.5 * 4.5)
        let v = beta_fn(3.5, 2.0).unwrap();
        assert!((v / (1.0 / 15.75) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn beta_rejects_nonpositive() {
        assert!(beta_fn(0.0, 1.0).is_err());
        assert!(beta_fn(1.0, -2.0).is_err());
        assert!(ln_beta(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn series_control_validation() {
        assert!(SeriesControl::default().validate().is_ok());
        assert!(SeriesControl::new(0.0, 1e-3, 10).is_err());
        assert!(SeriesControl::new(1e-3, 1e-3, 0).is_err());
    }
}
