//! The law of `N`, the number of individuals left alive by a collapse.
//!
//! A colony starts from one individual, grows for an `Exp(1)` lifetime `T`
//! and is then hit by a catastrophe. Two pairings are supported:
//!
//! * Poisson growth (`X_t = 1 + Poisson(λt)`) with a geometric catastrophe
//!   (individuals are removed one by one until the first survivor, each
//!   removal attempt succeeding with probability `1 - p`);
//! * Yule growth (`X_t ~ Geom(e^{-λt})` on `{1, 2, ...}`) with a binomial
//!   catastrophe (each individual survives independently with probability
//!   `p`).
//!
//! A finite law given by an explicit pmf is also available. It is mostly
//! useful for degenerate cases such as `N ≡ 1`.

use crate::error::{domain, invalid, Result};
use crate::specialfn::{beta_fn, hyp2f1, ln_beta};
use serde::{Deserialize, Serialize, Serializer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Growth {
    Poisson,
    Yule,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Catastrophe {
    Geometric,
    Binomial,
}

/// A first moment that may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Moment {
    Finite(f64),
    Infinite,
}

impl Moment {
    pub fn is_finite(&self) -> bool {
        matches!(self, Moment::Finite(_))
    }

    /// The value as an `f64`, with `+inf` for [`Moment::Infinite`].
    pub fn value(&self) -> f64 {
        match self {
            Moment::Finite(v) => *v,
            Moment::Infinite => f64::INFINITY,
        }
    }
}

impl Serialize for Moment {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Moment::Finite(v) => s.serialize_f64(*v),
            Moment::Infinite => s.serialize_str("inf"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "snake_case")]
pub enum SurvivorLaw {
    PoissonGeometric { lambda: f64, p: f64 },
    YuleBinomial { lambda: f64, p: f64 },
    Finite { pmf: Vec<f64> },
}

impl SurvivorLaw {
    /// Builds the law for a growth/catastrophe pairing.
    ///
    /// Only Poisson with geometric and Yule with binomial have formulas.
    pub fn new(growth: Growth, catastrophe: Catastrophe, lambda: f64, p: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(invalid(format!("lambda must be positive and finite, got {lambda}")));
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(invalid(format!("p must lie in [0, 1], got {p}")));
        }
        match (growth, catastrophe) {
            (Growth::Poisson, Catastrophe::Geometric) => {
                Ok(SurvivorLaw::PoissonGeometric { lambda, p })
            }
            (Growth::Yule, Catastrophe::Binomial) => Ok(SurvivorLaw::YuleBinomial { lambda, p }),
            (g, c) => Err(invalid(format!(
                "unsupported pairing {g:?} growth with {c:?} catastrophe; \
                 use poisson/geometric or yule/binomial"
            ))),
        }
    }

    pub fn poisson_geometric(lambda: f64, p: f64) -> Result<Self> {
        Self::new(Growth::Poisson, Catastrophe::Geometric, lambda, p)
    }

    pub fn yule_binomial(lambda: f64, p: f64) -> Result<Self> {
        Self::new(Growth::Yule, Catastrophe::Binomial, lambda, p)
    }

    /// A law with finite support given by its pmf.
    pub fn finite(pmf: Vec<f64>) -> Result<Self> {
        if pmf.is_empty() || pmf.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
            return Err(invalid("finite pmf must be nonempty with nonnegative entries"));
        }
        let total: f64 = pmf.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(invalid(format!("finite pmf sums to {total}, not 1")));
        }
        Ok(SurvivorLaw::Finite { pmf })
    }

    /// `N ≡ n`.
    pub fn constant(n: usize) -> Self {
        let mut pmf = vec![0.0; n + 1];
        pmf[n] = 1.0;
        SurvivorLaw::Finite { pmf }
    }

    pub fn growth(&self) -> Option<Growth> {
        match self {
            SurvivorLaw::PoissonGeometric { .. } => Some(Growth::Poisson),
            SurvivorLaw::YuleBinomial { .. } => Some(Growth::Yule),
            SurvivorLaw::Finite { .. } => None,
        }
    }

    pub fn catastrophe(&self) -> Option<Catastrophe> {
        match self {
            SurvivorLaw::PoissonGeometric { .. } => Some(Catastrophe::Geometric),
            SurvivorLaw::YuleBinomial { .. } => Some(Catastrophe::Binomial),
            SurvivorLaw::Finite { .. } => None,
        }
    }

    /// `(λ, p)` for the parametric schemes.
    pub fn params(&self) -> Option<(f64, f64)> {
        match *self {
            SurvivorLaw::PoissonGeometric { lambda, p } | SurvivorLaw::YuleBinomial { lambda, p } => {
                Some((lambda, p))
            }
            SurvivorLaw::Finite { .. } => None,
        }
    }

    /// Checks the invariants of a law that may have been built by hand.
    pub fn validate(&self) -> Result<()> {
        match self {
            SurvivorLaw::PoissonGeometric { lambda, p } => {
                Self::poisson_geometric(*lambda, *p).map(|_| ())
            }
            SurvivorLaw::YuleBinomial { lambda, p } => Self::yule_binomial(*lambda, *p).map(|_| ()),
            SurvivorLaw::Finite { pmf } => Self::finite(pmf.clone()).map(|_| ()),
        }
    }

    /// `P(N = n)`.
    pub fn pmf(&self, n: u64) -> Result<f64> {
        match *self {
            SurvivorLaw::PoissonGeometric { lambda, p } => Ok(poisson_pmf(lambda, p, n)),
            SurvivorLaw::YuleBinomial { lambda, p } => yule_pmf(lambda, p, n),
            SurvivorLaw::Finite { ref pmf } => Ok(pmf.get(n as usize).copied().unwrap_or(0.0)),
        }
    }

    /// `P(N = 0)`.
    pub fn p0(&self) -> Result<f64> {
        self.pmf(0)
    }

    /// `E(s^N)` for `s` in `[0, 1]`.
    pub fn pgf(&self, s: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&s) {
            return Err(domain(format!("pgf argument must lie in [0, 1], got {s}")));
        }
        match *self {
            SurvivorLaw::PoissonGeometric { lambda, p } => {
                if s == 1.0 {
                    return Ok(1.0);
                }
                Ok((1.0 - p + (lambda + 1.0) * p * s / (1.0 + lambda - lambda * s))
                    / (lambda * p + 1.0))
            }
            SurvivorLaw::YuleBinomial { lambda, p } => {
                if s == 1.0 || p == 0.0 {
                    return Ok(1.0);
                }
                let u = p * s + 1.0 - p;
                // p(s - 1) + 1 written as 1 - p(1 - s) to keep it in [0, 1]
                let z = 1.0 - p * (1.0 - s);
                Ok(u / (lambda + 1.0) * hyp2f1(1.0, 1.0, 2.0 + 1.0 / lambda, z)?)
            }
            SurvivorLaw::Finite { ref pmf } => {
                Ok(pmf.iter().rev().fold(0.0, |acc, &q| acc * s + q))
            }
        }
    }

    /// `E(N)`.
    pub fn mean(&self) -> Moment {
        match *self {
            SurvivorLaw::PoissonGeometric { lambda, p } => {
                Moment::Finite(p * (lambda + 1.0).powi(2) / (lambda * p + 1.0))
            }
            SurvivorLaw::YuleBinomial { lambda, p } => {
                if p == 0.0 {
                    Moment::Finite(0.0)
                } else if lambda < 1.0 {
                    Moment::Finite(p / (1.0 - lambda))
                } else {
                    Moment::Infinite
                }
            }
            SurvivorLaw::Finite { ref pmf } => {
                Moment::Finite(pmf.iter().enumerate().map(|(n, q)| n as f64 * q).sum())
            }
        }
    }

    /// `P(N > n)`, exactly.
    pub fn tail_mass(&self, n: u64) -> Result<f64> {
        match *self {
            SurvivorLaw::PoissonGeometric { lambda, p } => Ok(poisson_tail(lambda, p, n)),
            SurvivorLaw::YuleBinomial { lambda, p } => yule_tail(lambda, p, n),
            SurvivorLaw::Finite { ref pmf } => {
                Ok(pmf.iter().skip(n as usize + 1).sum::<f64>())
            }
        }
    }

    /// A cheap upper bound on `P(N > n)`.
    ///
    /// Geometric `(λ/(λ+1))^n` envelope for Poisson growth, the `p = 1`
    /// tail `B(1/λ, n+1)/λ` for Yule growth.
    pub fn tail_bound(&self, n: u64) -> f64 {
        match *self {
            SurvivorLaw::PoissonGeometric { lambda, p } => poisson_tail(lambda, p, n),
            SurvivorLaw::YuleBinomial { lambda, p } => {
                if p == 0.0 {
                    return 0.0;
                }
                let inv = 1.0 / lambda;
                // ln_beta cannot fail for positive arguments
                (ln_beta(inv, n as f64 + 1.0).unwrap_or(0.0) - lambda.ln()).exp().min(1.0)
            }
            SurvivorLaw::Finite { ref pmf } => pmf.iter().skip(n as usize + 1).sum::<f64>(),
        }
    }

    /// Smallest `n` with `P(N > n) <= eps`, or `None` if none is found below
    /// `limit`.
    pub fn truncation_point(&self, eps: f64, limit: u64) -> Result<Option<u64>> {
        // exponential search then bisection; the tail is nonincreasing
        if self.tail_mass(0)? <= eps {
            return Ok(Some(0));
        }
        let mut hi = 1u64;
        while self.tail_mass(hi)? > eps {
            if hi >= limit {
                return Ok(None);
            }
            hi = (hi * 2).min(limit);
        }
        let mut lo = hi / 2;
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if self.tail_mass(mid)? > eps {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(Some(hi))
    }

    /// Streams `P(N = 0), P(N = 1), ...`.
    pub fn pmf_iter(&self) -> PmfIter<'_> {
        PmfIter { law: self, n: 0, geometric: None }
    }
}

/// Iterator over the pmf of a [`SurvivorLaw`]. Yields `Result` because the
/// Yule/binomial terms go through the hypergeometric evaluator.
pub struct PmfIter<'a> {
    law: &'a SurvivorLaw,
    n: u64,
    geometric: Option<(f64, f64)>,
}

impl Iterator for PmfIter<'_> {
    type Item = Result<f64>;

    fn next(&mut self) -> Option<Self::Item> {
        let n = self.n;
        self.n += 1;
        if let SurvivorLaw::PoissonGeometric { lambda, p } = *self.law {
            // geometric recursion from n = 1 onwards
            let v = match (n, self.geometric) {
                (0, _) => poisson_pmf(lambda, p, 0),
                (_, None) => {
                    let first = poisson_pmf(lambda, p, 1);
                    self.geometric = Some((first, lambda / (lambda + 1.0)));
                    first
                }
                (_, Some((prev, c))) => {
                    let v = prev * c;
                    self.geometric = Some((v, c));
                    v
                }
            };
            return Some(Ok(v));
        }
        Some(self.law.pmf(n))
    }
}

fn poisson_pmf(lambda: f64, p: f64, n: u64) -> f64 {
    if n == 0 {
        return (1.0 - p) / (1.0 + lambda * p);
    }
    let c = lambda / (lambda + 1.0);
    c.powf((n - 1) as f64) * p / (lambda * p + 1.0)
}

fn poisson_tail(lambda: f64, p: f64, n: u64) -> f64 {
    let c = lambda / (lambda + 1.0);
    (c.powf(n as f64) * p * (lambda + 1.0) / (lambda * p + 1.0)).min(1.0)
}

fn yule_pmf(lambda: f64, p: f64, n: u64) -> Result<f64> {
    if p == 0.0 {
        return Ok(if n == 0 { 1.0 } else { 0.0 });
    }
    let inv = 1.0 / lambda;
    if n == 0 {
        if p == 1.0 {
            return Ok(0.0);
        }
        return Ok((1.0 - p) / (lambda + 1.0) * hyp2f1(1.0, 1.0, 2.0 + inv, 1.0 - p)?);
    }
    // p^{1/λ}/λ · B(n, 1+1/λ) · 2F1(1/λ, 1+1/λ; n+1+1/λ; 1-p)
    let nf = n as f64;
    let scale = (inv * p.ln() - lambda.ln() + ln_beta(nf, 1.0 + inv)?).exp();
    if scale == 0.0 {
        return Ok(0.0);
    }
    Ok(scale * hyp2f1(inv, 1.0 + inv, nf + 1.0 + inv, 1.0 - p)?)
}

fn yule_tail(lambda: f64, p: f64, n: u64) -> Result<f64> {
    if p == 0.0 {
        return Ok(0.0);
    }
    let inv = 1.0 / lambda;
    // (1/λ) B(1/λ, n+1) p^{1/λ} 2F1(1/λ, 1/λ; n+1+1/λ; 1-p)
    let nf = n as f64;
    let scale = if n == 0 {
        p.powf(inv) * inv * beta_fn(inv, 1.0)?
    } else {
        (inv * p.ln() - lambda.ln() + ln_beta(inv, nf + 1.0)?).exp()
    };
    if scale == 0.0 {
        return Ok(0.0);
    }
    Ok((scale * hyp2f1(inv, inv, nf + 1.0 + inv, 1.0 - p)?).min(1.0))
}
