//! The containment gate: Monte Carlo estimates against analytic bounds, and
//! closed forms against iterated generating functions.

use super::config::{parse_key_values, parse_list, strictly_increasing};
use super::CliError;
use crate::analysis::{analyze, poisson_reach_closed_form, reach_limit_cdf, reach_limit_mean, Scheme};
use crate::sim::{estimate_with, Proportion, ProcessConfig, SimEstimates};
use crate::survivor::{Moment, SurvivorLaw};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Grid {
    pub d: Vec<u32>,
    pub scheme: Vec<Scheme>,
    pub lambda: Vec<f64>,
    pub p: Vec<f64>,
    pub reps: u64,
    pub seed: u64,
    pub max_alive: u64,
    pub max_events: u64,
    pub m_max: u64,
    /// λ values for the closed-form comparison; each is paired with every
    /// `closed_form_p` and with the critical `p = 1/(λ²+λ+1)`.
    pub closed_form_lambda: Vec<f64>,
    pub closed_form_p: Vec<f64>,
}

impl Default for Grid {
    fn default() -> Self {
        Self {
            d: vec![2, 4],
            scheme: vec![Scheme::PoissonGeometric, Scheme::YuleBinomial],
            lambda: vec![0.5, 3.0],
            p: vec![0.3, 0.9],
            reps: 2000,
            seed: 1,
            max_alive: 100,
            max_events: 1_000_000,
            m_max: 10,
            closed_form_lambda: vec![0.5, 1.0, 2.0],
            closed_form_p: vec![0.05, 0.2],
        }
    }
}

impl Grid {
    /// Reads `key = v1, v2, ...` lines; missing keys keep their defaults.
    pub fn parse(text: &str) -> Result<Self, String> {
        let kv = parse_key_values(text)?;
        let mut g = Grid::default();
        for (k, v) in &kv {
            match k.as_str() {
                "d" => g.d = parse_list(k, v)?,
                "scheme" => {
                    g.scheme = v
                        .split(',')
                        .map(str::trim)
                        .filter(|s| !s.is_empty())
                        .map(|s| match s {
                            "poisson_geometric" | "poisson" => Ok(Scheme::PoissonGeometric),
                            "yule_binomial" | "yule" => Ok(Scheme::YuleBinomial),
                            other => Err(format!("scheme: unknown {other:?}")),
                        })
                        .collect::<Result<_, _>>()?;
                    if g.scheme.is_empty() {
                        return Err("scheme: empty list".into());
                    }
                }
                "lambda" => g.lambda = parse_list(k, v)?,
                "p" => g.p = parse_list(k, v)?,
                "reps" => g.reps = single(k, v)?,
                "seed" => g.seed = single(k, v)?,
                "max_alive" => g.max_alive = single(k, v)?,
                "max_events" => g.max_events = single(k, v)?,
                "m_max" => g.m_max = single(k, v)?,
                "closed_form_lambda" => g.closed_form_lambda = parse_list(k, v)?,
                "closed_form_p" => g.closed_form_p = parse_list(k, v)?,
                other => return Err(format!("unknown grid key {other:?}")),
            }
        }
        let ds: Vec<f64> = g.d.iter().map(|&d| f64::from(d)).collect();
        strictly_increasing("d", &ds)?;
        strictly_increasing("lambda", &g.lambda)?;
        strictly_increasing("p", &g.p)?;
        strictly_increasing("closed_form_lambda", &g.closed_form_lambda)?;
        strictly_increasing("closed_form_p", &g.closed_form_p)?;
        if g.d.iter().any(|&d| d < 2) {
            return Err("d: every degree must be at least 2".into());
        }
        if g.lambda.iter().chain(&g.closed_form_lambda).any(|&l| !(l > 0.0 && l.is_finite())) {
            return Err("lambda: values must be positive".into());
        }
        if g.p.iter().chain(&g.closed_form_p).any(|&p| !(0.0..=1.0).contains(&p)) {
            return Err("p: values must lie in [0, 1]".into());
        }
        if g.reps == 0 || g.max_alive == 0 || g.max_events == 0 {
            return Err("reps, max_alive and max_events must be positive".into());
        }
        Ok(g)
    }
}

fn single<T: std::str::FromStr>(k: &str, v: &str) -> Result<T, String>
where
    T::Err: std::fmt::Display,
{
    v.trim().parse().map_err(|e| format!("{k}: {v:?}: {e}"))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub observed: f64,
    pub lower: f64,
    pub upper: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    fn interval(name: impl Into<String>, ci: (f64, f64), observed: f64, lower: f64, upper: f64) -> Self {
        let passed = ci.1 >= lower && ci.0 <= upper;
        Self { name: name.into(), passed, observed, lower, upper, note: None }
    }

    fn failure(name: impl Into<String>, note: String) -> Self {
        Self {
            name: name.into(),
            passed: false,
            observed: f64::NAN,
            lower: f64::NAN,
            upper: f64::NAN,
            note: Some(note),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointReport {
    pub label: String,
    pub d: u32,
    pub scheme: Scheme,
    pub lambda: f64,
    pub p: f64,
    pub checks: Vec<Check>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClosedFormRow {
    pub lambda: f64,
    pub p: f64,
    pub critical: bool,
    pub max_cdf_deviation: f64,
    pub mean_closed: Moment,
    pub mean_iterated: Moment,
    pub mean_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClosedFormSection {
    pub rows: Vec<ClosedFormRow>,
    pub max_abs_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub points: Vec<PointReport>,
    pub closed_form: ClosedFormSection,
}

impl ValidationReport {
    pub fn failures(&self) -> impl Iterator<Item = (&str, &Check)> {
        self.points
            .iter()
            .flat_map(|pt| pt.checks.iter().map(move |c| (pt.label.as_str(), c)))
            .filter(|(_, c)| !c.passed)
    }

    pub fn check_count(&self) -> usize {
        self.points.iter().map(|p| p.checks.len()).sum()
    }
}

const CLOSED_FORM_TOL: f64 = 1e-10;

fn prop_ci(p: &Proportion) -> (f64, f64) {
    (p.lower, p.upper)
}

fn point_checks(
    d: u32,
    law: &SurvivorLaw,
    grid: &Grid,
    workers: Option<usize>,
) -> Result<Vec<Check>, CliError> {
    let report = match analyze(d, law, grid.m_max) {
        Ok(r) => r,
        Err(e) => return Ok(vec![Check::failure("analysis", e.to_string())]),
    };
    let mut cfg = ProcessConfig::new(d, law.clone());
    cfg.base_seed = grid.seed;
    cfg.horizon.max_colonies_alive = grid.max_alive;
    cfg.horizon.max_events = grid.max_events;
    let est: SimEstimates = estimate_with(&cfg, grid.reps, workers)?;
    let mut checks = Vec::new();

    // censored runs count as surviving; allow three standard errors
    let s = &est.survival;
    let slack = 3.0 * s.std_error;
    checks.push(Check::interval(
        "survival_sandwich",
        prop_ci(s),
        s.estimate,
        report.survival_lower - slack,
        report.survival_upper + slack,
    ));
    if let Some(reach) = report.reach.available() {
        for b in &reach.cdf {
            let c = est.reach_cdf(b.m as usize);
            checks.push(Check::interval(format!("reach_cdf[{}]", b.m), prop_ci(&c), c.estimate, b.lower, b.upper));
        }
        let m = &est.reach_given_extinct;
        checks.push(Check::interval("reach_mean", (m.lower, m.upper), m.mean, reach.mean.lower, reach.mean.upper));
    }
    if let Some(col) = report.colonies.available() {
        let m = &est.colonies_given_extinct;
        checks.push(Check::interval("colony_mean", (m.lower, m.upper), m.mean, col.lower, col.upper));
    }
    Ok(checks)
}

fn closed_form_rows(grid: &Grid) -> Result<ClosedFormSection, CliError> {
    let mut rows = Vec::new();
    for &lambda in &grid.closed_form_lambda {
        let critical = 1.0 / (lambda * lambda + lambda + 1.0);
        let mut ps: Vec<(f64, bool)> = grid.closed_form_p.iter().map(|&p| (p, false)).collect();
        ps.push((critical, true));
        for (p, is_crit) in ps {
            let law = SurvivorLaw::poisson_geometric(lambda, p)?;
            let cf = poisson_reach_closed_form(lambda, p)?;
            let mut dev = 0.0f64;
            for m in 0..=grid.m_max {
                dev = dev.max((cf.cdf(m) - reach_limit_cdf(&law, m)?).abs());
            }
            let mean_closed = cf.mean()?;
            let mean_iterated = reach_limit_mean(&law)?;
            let mean_deviation = match (mean_closed, mean_iterated) {
                (Moment::Finite(a), Moment::Finite(b)) => (a - b).abs() / b.abs().max(1.0),
                (Moment::Infinite, Moment::Infinite) => 0.0,
                _ => f64::INFINITY,
            };
            rows.push(ClosedFormRow {
                lambda,
                p,
                critical: is_crit,
                max_cdf_deviation: dev,
                mean_closed,
                mean_iterated,
                mean_deviation,
            });
        }
    }
    let max_abs_deviation = rows
        .iter()
        .map(|r| r.max_cdf_deviation.max(r.mean_deviation))
        .fold(0.0, f64::max);
    Ok(ClosedFormSection {
        rows,
        max_abs_deviation,
        tolerance: CLOSED_FORM_TOL,
        passed: max_abs_deviation <= CLOSED_FORM_TOL,
    })
}

pub fn run(grid: &Grid, workers: Option<usize>) -> Result<ValidationReport, CliError> {
    let mut points = Vec::new();
    for &d in &grid.d {
        for &scheme in &grid.scheme {
            for &lambda in &grid.lambda {
                for &p in &grid.p {
                    let law = scheme.law(lambda, p)?;
                    let label = format!("d={d} {scheme:?} lambda={lambda} p={p}");
                    let checks = point_checks(d, &law, grid, workers)?;
                    points.push(PointReport { label, d, scheme, lambda, p, checks });
                }
            }
        }
    }
    let closed_form = closed_form_rows(grid)?;
    if !closed_form.passed {
        points.push(PointReport {
            label: "closed_form".into(),
            d: 0,
            scheme: Scheme::PoissonGeometric,
            lambda: f64::NAN,
            p: f64::NAN,
            checks: vec![Check {
                name: "closed_form_vs_iteration".into(),
                passed: false,
                observed: closed_form.max_abs_deviation,
                lower: 0.0,
                upper: CLOSED_FORM_TOL,
                note: None,
            }],
        });
    }
    Ok(ValidationReport { points, closed_form })
}
