//! Reach of the process: the distance from the origin to the furthest
//! colonised vertex.

use crate::error::{domain, Error, Result};
use crate::specialfn::q_digamma;
use crate::survivor::{Moment, SurvivorLaw};
use serde::Serialize;

/// `α, β, D, B, θ` for the tree of degree `d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReachParams {
    pub alpha: f64,
    pub beta: f64,
    pub cap_d: f64,
    pub cap_b: f64,
    /// `1/(1 - α)`.
    pub theta: f64,
    /// `E[(d/(d+1))^N]`.
    pub pgf_value: f64,
}

/// Requires `E[(d/(d+1))^N] > (d-1)/d`.
pub fn reach_params(d: u32, law: &SurvivorLaw) -> Result<ReachParams> {
    if d < 2 {
        return Err(domain(format!("reach bounds need d >= 2, got {d}")));
    }
    let df = f64::from(d);
    let m = law.pgf(df / (df + 1.0))?;
    if m <= (df - 1.0) / df {
        return Err(Error::Hypothesis(format!(
            "E[(d/(d+1))^N] = {m} is not above (d-1)/d = {}",
            (df - 1.0) / df
        )));
    }
    let alpha = df * (1.0 - m);
    let beta = (df + 1.0) * (1.0 - m);
    let nonzero = 1.0 - law.p0()?;
    let cap_d = if beta == 0.0 && nonzero == 0.0 {
        2.0
    } else if (beta - nonzero).abs() <= 1e-12 * beta.max(1e-300) {
        return Err(Error::Hypothesis(format!(
            "D is undefined: β = P(N ≠ 0) = {beta} (no mass on N >= 2)"
        )));
    } else {
        (beta / (beta - nonzero)).max(2.0)
    };
    let m2 = law.pgf((df - 1.0) / (df + 1.0))?;
    let cap_b = df * (df - 1.0) * (1.0 - 2.0 * m + m2);
    let params = ReachParams {
        alpha,
        beta,
        cap_d,
        cap_b,
        theta: 1.0 / (1.0 - alpha),
        pgf_value: m,
    };
    if let SurvivorLaw::PoissonGeometric { lambda, p } = *law {
        poisson_cross_check(d, lambda, p, &params)?;
    }
    Ok(params)
}

fn poisson_cross_check(d: u32, lambda: f64, p: f64, params: &ReachParams) -> Result<()> {
    let df = f64::from(d);
    let lp1 = lambda * p + 1.0;
    let l1 = lambda + 1.0;
    let alpha = df * p * l1 * l1 / ((df + lambda + 1.0) * lp1);
    let beta = (df + 1.0) * p * l1 * l1 / ((df + lambda + 1.0) * lp1);
    let cap_b = 2.0 * df * (df - 1.0) * p * l1 * l1 * lambda
        / (lp1 * (df + 1.0 + lambda) * (df + 1.0 + 2.0 * lambda));
    let mut checks = vec![("alpha", alpha, params.alpha), ("beta", beta, params.beta), ("B", cap_b, params.cap_b)];
    if p > 0.0 {
        let cap_d = ((df + 1.0) * l1 / (df * lambda)).max(2.0);
        checks.push(("D", cap_d, params.cap_d));
    }
    for (name, closed, value) in checks {
        if (closed - value).abs() > 1e-10 * closed.abs().max(1.0) {
            return Err(Error::Consistency(format!(
                "{name}: pgf value {value} vs closed form {closed}"
            )));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReachCdfBounds {
    pub m: u64,
    pub lower: f64,
    pub upper: f64,
}

/// Bounds on `P(M_d <= m)`.
///
/// ```text
/// [1+D(1-β)][1-β^{m+1}] / (1+D(1-β)-β^{m+1})  <=  P(M_d <= m)
///     <=  [1+α(1-α)/B](1-α^{m+1}) / (1+α(1-α)/B-α^{m+1})
/// ```
///
/// With `B = 0` the upper bound is its limit `1 - α^{m+1}`.
pub fn reach_bounds(params: &ReachParams, m: u64) -> Result<ReachCdfBounds> {
    let ReachParams { alpha, beta, cap_d, cap_b, .. } = *params;
    check_sub_one(params)?;
    let e = (m + 1) as i32;
    let bm = beta.powi(e);
    let am = alpha.powi(e);
    let k = 1.0 + cap_d * (1.0 - beta);
    let lower = k * (1.0 - bm) / (k - bm);
    let upper = if cap_b == 0.0 {
        1.0 - am
    } else {
        let r = 1.0 + alpha * (1.0 - alpha) / cap_b;
        r * (1.0 - am) / (r - am)
    };
    Ok(ReachCdfBounds {
        m,
        lower: lower.clamp(0.0, 1.0),
        upper: upper.clamp(0.0, 1.0),
    })
}

fn check_sub_one(params: &ReachParams) -> Result<()> {
    if !(params.alpha < 1.0 && params.beta < 1.0) {
        return Err(Error::Hypothesis(format!(
            "reach bounds need α, β < 1 (α = {}, β = {})",
            params.alpha, params.beta
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReachMeanBounds {
    pub lower: f64,
    pub upper: f64,
    /// Set when `B = 0` and the lower bound fell back to `α²/(2α)`.
    pub degenerate_b: bool,
}

/// Bounds on `E(M_d)`.
///
/// ```text
/// α²/(2(B+α)) + α(1-α) ln[1 - αB/(B+α(1-α))] / (B ln α)  <=  E(M_d)
///     <=  Dβ/(D+1) + D(1-β) ln[1 - β/(1+D(1-β))] / ln β
/// ```
pub fn reach_mean_bounds(params: &ReachParams) -> Result<ReachMeanBounds> {
    let ReachParams { alpha, beta, cap_d, cap_b, .. } = *params;
    check_sub_one(params)?;
    let (lower, degenerate_b) = if alpha == 0.0 {
        (0.0, false)
    } else if cap_b == 0.0 {
        (alpha * alpha / (2.0 * alpha), true)
    } else {
        let ln_term = (-(alpha * cap_b) / (cap_b + alpha * (1.0 - alpha))).ln_1p();
        (
            alpha * alpha / (2.0 * (cap_b + alpha))
                + alpha * (1.0 - alpha) * ln_term / (cap_b * alpha.ln()),
            false,
        )
    };
    let upper = if beta == 0.0 {
        0.0
    } else {
        let k = 1.0 + cap_d * (1.0 - beta);
        cap_d * beta / (cap_d + 1.0) + cap_d * (1.0 - beta) * (-beta / k).ln_1p() / beta.ln()
    };
    Ok(ReachMeanBounds {
        lower,
        upper,
        degenerate_b,
    })
}

/// `P(M <= m) = g_{m+1}(0)` for the large-`d` limit, with `g` the survivor
/// pgf.
pub fn reach_limit_cdf(law: &SurvivorLaw, m: u64) -> Result<f64> {
    let mut s = 0.0;
    for _ in 0..=m {
        s = law.pgf(s)?;
    }
    Ok(s)
}

/// `E(M) = Σ_{m>=0} [1 - g_{m+1}(0)]`, infinite unless `E(N) < 1`.
pub fn reach_limit_mean(law: &SurvivorLaw) -> Result<Moment> {
    let mu = match law.mean() {
        Moment::Finite(mu) if mu < 1.0 => mu,
        _ => return Ok(Moment::Infinite),
    };
    // 1 - g(s) <= μ(1 - s), so the terms decay at least geometrically with
    // ratio μ and the remainder after a term t is at most t μ/(1-μ).
    let mut s = 0.0;
    let mut sum = 0.0;
    let mut prev = f64::INFINITY;
    for _ in 0..10_000_000u64 {
        s = law.pgf(s)?;
        let term = 1.0 - s;
        let tail = term * mu / (1.0 - mu);
        // A pgf evaluated through quadrature can stall a few ulps below 1;
        // once the iterates stop moving, close with the geometric remainder.
        if term >= prev {
            return Ok(Moment::Finite(sum + tail));
        }
        sum += term;
        prev = term;
        if tail < 1e-13 {
            return Ok(Moment::Finite(sum));
        }
    }
    Err(Error::Precision {
        what: "limit reach mean".into(),
        achieved: (1.0 - s) * mu / (1.0 - mu),
        terms: 10_000_000,
    })
}

/// Closed forms for the limit reach under Poisson growth with geometric
/// catastrophe.
///
/// The survivor pgf is fractional linear with fixed points 1 and
/// `s0 = (1-p)(λ+1)/(λ(λp+1))`, and its derivative at 1 is
/// `γ = (λ+1)²p/(λp+1)`. Iterating gives, for `γ ≠ 1`,
///
/// ```text
/// P(M <= m) = (1 - γ^{m+1}) / (1 - γ^{m+1}/s0)
/// ```
///
/// and at `γ = 1` (that is `p = 1/(λ²+λ+1)`)
/// `P(M <= m) = (m+1)λ/((m+1)λ+1)`. For `γ < 1`,
///
/// ```text
/// E(M) = (s0 - 1) [ψ_γ(1 - w) + ln(1 - γ)] / ln γ,   w = ln s0 / ln γ
/// ```
///
/// where `ψ_γ` is the q-digamma function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PoissonReachClosedForm {
    pub lambda: f64,
    pub p: f64,
    pub gamma: f64,
    pub s0: f64,
}

impl PoissonReachClosedForm {
    pub fn new(lambda: f64, p: f64) -> Result<Self> {
        SurvivorLaw::poisson_geometric(lambda, p)?;
        let gamma = (lambda + 1.0).powi(2) * p / (lambda * p + 1.0);
        let s0 = (1.0 - p) * (lambda + 1.0) / (lambda * (lambda * p + 1.0));
        Ok(Self { lambda, p, gamma, s0 })
    }

    /// Whether `p = 1/(λ²+λ+1)` up to rounding.
    pub fn is_critical(&self) -> bool {
        (self.gamma - 1.0).abs() < 1e-14
    }

    pub fn cdf(&self, m: u64) -> f64 {
        let mf = (m + 1) as f64;
        if self.is_critical() {
            return mf * self.lambda / (mf * self.lambda + 1.0);
        }
        if self.p == 0.0 {
            return 1.0;
        }
        if self.s0 == 0.0 {
            return 0.0;
        }
        let gm = self.gamma.powf(mf);
        (1.0 - gm) / (1.0 - gm / self.s0)
    }

    pub fn mean(&self) -> Result<Moment> {
        if self.gamma >= 1.0 || self.is_critical() {
            return Ok(Moment::Infinite);
        }
        if self.p == 0.0 {
            return Ok(Moment::Finite(0.0));
        }
        let ln_g = self.gamma.ln();
        let w = self.s0.ln() / ln_g;
        let psi = q_digamma(self.gamma, 1.0 - w)?;
        Ok(Moment::Finite(
            (self.s0 - 1.0) * (psi + (-self.gamma).ln_1p()) / ln_g,
        ))
    }
}

pub fn poisson_reach_closed_form(lambda: f64, p: f64) -> Result<PoissonReachClosedForm> {
    PoissonReachClosedForm::new(lambda, p)
}
