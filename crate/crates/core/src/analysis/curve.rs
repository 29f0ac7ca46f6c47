//! Bounds on the critical curve `λ_c(p)`.
//!
//! Below the extinction-side equality `E[(d/(d+1))^N] = d/(d+1)` extinction
//! is certain; above the survival-side equality
//! `E[(d/(d+1))^N] = (d-1)/d` survival has positive probability. Each
//! equality is solved for λ at fixed `p` or for `p` at fixed λ.

use crate::error::{domain, Error, Result};
use crate::specialfn::hyp2f1;
use crate::survivor::SurvivorLaw;
use serde::{Deserialize, Serialize};

pub const DEFAULT_LAMBDA_MAX: f64 = 1e3;
/// Rounding allowance for the gap at λ = 0, where it is a difference of
/// simple fractions.
const ZERO_GAP: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    PoissonGeometric,
    YuleBinomial,
}

impl Scheme {
    pub fn law(self, lambda: f64, p: f64) -> Result<SurvivorLaw> {
        match self {
            Scheme::PoissonGeometric => SurvivorLaw::poisson_geometric(lambda, p),
            Scheme::YuleBinomial => SurvivorLaw::yule_binomial(lambda, p),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveFor {
    LambdaGivenP,
    PGivenLambda,
}

/// Which form of the Yule/binomial inequalities to solve.
///
/// `Closed` is the hypergeometric inequality with argument
/// `(d(1-p)+1)/(d+1)`, the form from which the usual table of `λ_d*` is
/// computed. `Pgf` evaluates the survivor pgf at `d/(d+1)` directly, which
/// amounts to the argument `(d+1-p)/(d+1)`. The two agree only at `p = 0`.
/// Poisson/geometric is unaffected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveForm {
    #[default]
    Closed,
    Pgf,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveOptions {
    pub form: CurveForm,
    pub lambda_max: f64,
}

impl Default for CurveOptions {
    fn default() -> Self {
        Self {
            form: CurveForm::Closed,
            lambda_max: DEFAULT_LAMBDA_MAX,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
enum Side {
    Extinction,
    Survival,
}

/// Roots of the two equalities. Results are per side so that a failure on
/// one does not hide the other.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveBounds {
    /// Extinction-side root: extinction is certain on the near side of it.
    pub lower: std::result::Result<f64, String>,
    /// Survival-side root: survival is certain beyond it.
    pub upper: std::result::Result<f64, String>,
}

impl CurveBounds {
    pub fn both(&self) -> Result<(f64, f64)> {
        match (&self.lower, &self.upper) {
            (Ok(a), Ok(b)) => Ok((*a, *b)),
            (Err(e), _) | (_, Err(e)) => Err(Error::NoRoot(e.clone())),
        }
    }
}

pub fn critical_curve(d: u32, scheme: Scheme, solve_for: SolveFor, value: f64) -> Result<CurveBounds> {
    critical_curve_with(d, scheme, solve_for, value, &CurveOptions::default())
}

pub fn critical_curve_with(
    d: u32,
    scheme: Scheme,
    solve_for: SolveFor,
    value: f64,
    opts: &CurveOptions,
) -> Result<CurveBounds> {
    if d < 2 {
        return Err(domain(format!("critical curves need d >= 2, got {d}")));
    }
    if !(opts.lambda_max > 0.0 && opts.lambda_max.is_finite()) {
        return Err(domain("lambda_max must be positive and finite"));
    }
    match solve_for {
        SolveFor::LambdaGivenP => {
            if !(value > 0.0 && value <= 1.0) {
                return Err(domain(format!("p must lie in (0, 1], got {value}")));
            }
        }
        SolveFor::PGivenLambda => {
            if !(value > 0.0 && value.is_finite()) {
                return Err(domain(format!("lambda must be positive, got {value}")));
            }
        }
    }
    let solve = |side| -> Result<f64> {
        let root = match solve_for {
            SolveFor::LambdaGivenP => solve_lambda(d, scheme, side, value, opts)?,
            SolveFor::PGivenLambda => solve_p(d, scheme, side, value, opts)?,
        };
        if scheme == Scheme::PoissonGeometric {
            cross_check(d, side, solve_for, value, root)?;
        }
        Ok(root)
    };
    let keep = |r: Result<f64>| -> Result<std::result::Result<f64, String>> {
        match r {
            Ok(v) => Ok(Ok(v)),
            Err(Error::NoRoot(msg)) => Ok(Err(msg)),
            Err(e) => Err(e),
        }
    };
    Ok(CurveBounds {
        lower: keep(solve(Side::Extinction))?,
        upper: keep(solve(Side::Survival))?,
    })
}

fn threshold(d: f64, side: Side) -> f64 {
    match side {
        Side::Extinction => d / (d + 1.0),
        Side::Survival => (d - 1.0) / d,
    }
}

/// Signed gap of the inequality; nonnegative means "not beyond the
/// equality" (extinction still certified, or survival not yet certified).
fn gap(d: u32, scheme: Scheme, side: Side, lambda: f64, p: f64, form: CurveForm) -> Result<f64> {
    let df = f64::from(d);
    if lambda == 0.0 {
        // X = 1 at λ = 0, so N is Bernoulli(p) and the pgf is 1 - p + ps.
        return Ok(1.0 - p / (df + 1.0) - threshold(df, side));
    }
    match (scheme, form) {
        (Scheme::YuleBinomial, CurveForm::Closed) => {
            let z = (df * (1.0 - p) + 1.0) / (df + 1.0);
            let k = match side {
                Side::Extinction => df / (df + 1.0 - p),
                Side::Survival => (df * df - 1.0) / (df * (df + 1.0 - p)),
            };
            Ok(hyp2f1(1.0, 1.0, 2.0 + 1.0 / lambda, z)? - k * (lambda + 1.0))
        }
        _ => Ok(scheme.law(lambda, p)?.pgf(df / (df + 1.0))? - threshold(df, side)),
    }
}

/// Bisection on a bracket `f(lo) >= 0 > f(hi)`.
fn bisect(f: &dyn Fn(f64) -> Result<f64>, mut lo: f64, mut hi: f64) -> Result<f64> {
    for _ in 0..300 {
        let mid = lo + (hi - lo) / 2.0;
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid)? >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo + (hi - lo) / 2.0)
}

fn solve_lambda(d: u32, scheme: Scheme, side: Side, p: f64, opts: &CurveOptions) -> Result<f64> {
    let f = |lambda: f64| gap(d, scheme, side, lambda, p, opts.form);
    let at_zero = f(0.0)?;
    if at_zero < -ZERO_GAP {
        return Ok(0.0);
    }
    if at_zero.abs() <= ZERO_GAP {
        // the equality holds in the λ → 0 limit; the root is 0 if the first
        // gap that clears rounding noise is negative
        let mut probe = opts.lambda_max * 2f64.powi(-60);
        while probe < opts.lambda_max {
            let g = f(probe)?;
            if g.abs() > ZERO_GAP {
                if g < 0.0 {
                    return Ok(0.0);
                }
                break;
            }
            probe *= 2.0;
        }
    }
    // bracket expansion from tiny λ up to lambda_max
    let mut lo = 0.0;
    let mut probe = opts.lambda_max * 2f64.powi(-60);
    loop {
        if f(probe)? < 0.0 {
            return bisect(&f, lo, probe);
        }
        if probe >= opts.lambda_max {
            break;
        }
        lo = probe;
        probe = (probe * 2.0).min(opts.lambda_max);
    }
    Err(Error::NoRoot(format!(
        "{side:?}-side equality has no λ root in (0, {}] at p = {p}, d = {d}",
        opts.lambda_max
    )))
}

fn solve_p(d: u32, scheme: Scheme, side: Side, lambda: f64, opts: &CurveOptions) -> Result<f64> {
    let f = |p: f64| gap(d, scheme, side, lambda, p, opts.form);
    if f(1.0)? >= 0.0 {
        return Err(Error::NoRoot(format!(
            "{side:?}-side equality has no p root in [0, 1] at λ = {lambda}, d = {d}"
        )));
    }
    bisect(&f, 0.0, 1.0)
}

/// Nonnegative roots in λ of the two Poisson/geometric quadratics,
/// `(extinction side, survival side)`.
///
/// Extinction side: `pdλ² + (p(d+1) - 1)λ + (d+1)(p-1) = 0`.
/// Survival side: `p(d-1)λ² + (p(d-1) - 1)λ + (pd - d - 1) = 0`.
pub fn poisson_lambda_roots(d: u32, p: f64) -> (Option<f64>, Option<f64>) {
    let df = f64::from(d);
    let root = |a: f64, b: f64, c: f64| -> Option<f64> {
        if a <= 0.0 {
            return None;
        }
        let disc = b * b - 4.0 * a * c;
        if disc < 0.0 {
            return None;
        }
        // larger root; written to avoid cancellation when b > 0
        let sq = disc.sqrt();
        let r = if b > 0.0 { -2.0 * c / (b + sq) } else { (-b + sq) / (2.0 * a) };
        (r >= 0.0).then_some(r)
    };
    (
        root(p * df, p * (df + 1.0) - 1.0, (df + 1.0) * (p - 1.0)),
        root(p * (df - 1.0), p * (df - 1.0) - 1.0, p * df - df - 1.0),
    )
}

/// Roots in `p` of the same two equalities, `(extinction side, survival
/// side)`; `None` where the root falls outside `[0, 1]`.
pub fn poisson_p_roots(d: u32, lambda: f64) -> (Option<f64>, Option<f64>) {
    let df = f64::from(d);
    let l = lambda;
    let ext = (l + df + 1.0) / (l * l * df + l * df + l + df + 1.0);
    let surv = (l + df + 1.0) / (l * l * df - l * l + l * df - l + df);
    let inside = |x: f64| (0.0..=1.0).contains(&x).then_some(x);
    (inside(ext), inside(surv))
}

fn cross_check(d: u32, side: Side, solve_for: SolveFor, value: f64, root: f64) -> Result<()> {
    let (ext, surv) = match solve_for {
        SolveFor::LambdaGivenP => poisson_lambda_roots(d, value),
        SolveFor::PGivenLambda => poisson_p_roots(d, value),
    };
    let closed = match side {
        Side::Extinction => ext,
        Side::Survival => surv,
    };
    match closed {
        Some(c) if (c - root).abs() <= 1e-9 * c.abs().max(1.0) => Ok(()),
        other => Err(Error::Consistency(format!(
            "{side:?}-side root {root} disagrees with the quadratic ({other:?})"
        ))),
    }
}
