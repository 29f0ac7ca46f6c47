use super::{run_unchecked, Horizon, ProcessConfig, SimOutcome, Termination};
use crate::error::{invalid, Result};
use rayon::prelude::*;
use serde::Serialize;

/// Two-sided 99% normal quantile.
pub const Z_99: f64 = 2.5758293035489;

/// A frequency with its Wilson 99% interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Proportion {
    pub successes: u64,
    pub trials: u64,
    pub estimate: f64,
    pub lower: f64,
    pub upper: f64,
    /// Standard error `sqrt(p(1-p)/n)` of the plain estimate.
    pub std_error: f64,
    pub degenerate: bool,
}

impl Proportion {
    pub fn wilson(successes: u64, trials: u64) -> Self {
        if trials == 0 {
            return Self {
                successes,
                trials,
                estimate: f64::NAN,
                lower: 0.0,
                upper: 1.0,
                std_error: f64::NAN,
                degenerate: true,
            };
        }
        let n = trials as f64;
        let p = successes as f64 / n;
        let z2 = Z_99 * Z_99;
        let denom = 1.0 + z2 / n;
        let center = (p + z2 / (2.0 * n)) / denom;
        let half = Z_99 / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
        Self {
            successes,
            trials,
            estimate: p,
            lower: (center - half).max(0.0),
            upper: (center + half).min(1.0),
            std_error: (p * (1.0 - p) / n).sqrt(),
            degenerate: trials < 2,
        }
    }
}

/// A sample mean with a normal 99% interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanEstimate {
    pub count: u64,
    pub mean: f64,
    pub std_error: f64,
    pub lower: f64,
    pub upper: f64,
    pub degenerate: bool,
}

impl MeanEstimate {
    fn from_sums(count: u64, sum: u128, sum_sq: u128) -> Self {
        if count == 0 {
            return Self {
                count,
                mean: f64::NAN,
                std_error: f64::NAN,
                lower: f64::NAN,
                upper: f64::NAN,
                degenerate: true,
            };
        }
        let n = count as f64;
        let mean = sum as f64 / n;
        if count < 2 {
            return Self {
                count,
                mean,
                std_error: 0.0,
                lower: mean,
                upper: mean,
                degenerate: true,
            };
        }
        // n·Σx² - (Σx)² is exact in integers when it fits
        let var = match (sum_sq.checked_mul(count as u128), sum.checked_mul(sum)) {
            (Some(a), Some(b)) => (a - b) as f64 / (n * (n - 1.0)),
            _ => (sum_sq as f64 - sum as f64 * mean) / (n - 1.0),
        };
        let se = (var.max(0.0) / n).sqrt();
        Self {
            count,
            mean,
            std_error: se,
            lower: mean - Z_99 * se,
            upper: mean + Z_99 * se,
            degenerate: false,
        }
    }
}

/// Integer tallies; merging is commutative and associative, so any split of
/// the replications gives the same totals.
#[derive(Debug, Clone, Default, PartialEq)]
struct Tally {
    reps: u64,
    censored: u64,
    extinct: u64,
    colonies_sum: u128,
    colonies_sq: u128,
    reach_sum: u128,
    reach_sq: u128,
    events: u128,
    /// `reach_hist[m]`: extinct replications with `M = m`.
    reach_hist: Vec<u64>,
}

impl Tally {
    fn add(mut self, o: &SimOutcome) -> Self {
        self.reps += 1;
        self.events += u128::from(o.events_processed);
        match o.terminated {
            Termination::CensoredAtHorizon => self.censored += 1,
            Termination::ExtinctExact => {
                self.extinct += 1;
                let (i, m) = (u128::from(o.colonies_created), u128::from(o.max_depth_reached));
                self.colonies_sum += i;
                self.colonies_sq += i * i;
                self.reach_sum += m;
                self.reach_sq += m * m;
                let m = o.max_depth_reached as usize;
                if self.reach_hist.len() <= m {
                    self.reach_hist.resize(m + 1, 0);
                }
                self.reach_hist[m] += 1;
            }
        }
        self
    }

    fn merge(mut self, other: Self) -> Self {
        self.reps += other.reps;
        self.censored += other.censored;
        self.extinct += other.extinct;
        self.colonies_sum += other.colonies_sum;
        self.colonies_sq += other.colonies_sq;
        self.reach_sum += other.reach_sum;
        self.reach_sq += other.reach_sq;
        self.events += other.events;
        if self.reach_hist.len() < other.reach_hist.len() {
            self.reach_hist.resize(other.reach_hist.len(), 0);
        }
        for (a, b) in self.reach_hist.iter_mut().zip(other.reach_hist) {
            *a += b;
        }
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimEstimates {
    pub config: ProcessConfig,
    pub replications: u64,
    pub horizon: Horizon,
    /// Fraction of replications cut off by the horizon. Censored runs count
    /// as surviving, so this overestimates the survival probability.
    pub survival: Proportion,
    pub extinct: u64,
    pub censored: u64,
    /// `E(I_d)` over the replications that died out.
    pub colonies_given_extinct: MeanEstimate,
    /// `E(M_d)` over the replications that died out.
    pub reach_given_extinct: MeanEstimate,
    /// Extinct replications by reach.
    pub reach_histogram: Vec<u64>,
    pub mean_events: f64,
}

impl SimEstimates {
    /// `P(M_d <= m)` over all replications; censored ones count as `M > m`.
    pub fn reach_cdf(&self, m: usize) -> Proportion {
        let hits = self.reach_histogram.iter().take(m + 1).sum();
        Proportion::wilson(hits, self.replications)
    }

    fn from_tally(cfg: &ProcessConfig, t: Tally) -> Self {
        Self {
            config: cfg.clone(),
            replications: t.reps,
            horizon: cfg.horizon,
            survival: Proportion::wilson(t.censored, t.reps),
            extinct: t.extinct,
            censored: t.censored,
            colonies_given_extinct: MeanEstimate::from_sums(t.extinct, t.colonies_sum, t.colonies_sq),
            reach_given_extinct: MeanEstimate::from_sums(t.extinct, t.reach_sum, t.reach_sq),
            reach_histogram: t.reach_hist,
            mean_events: t.events as f64 / t.reps as f64,
        }
    }
}

/// Runs replications `0..replications` on the global rayon pool.
pub fn estimate(cfg: &ProcessConfig, replications: u64) -> Result<SimEstimates> {
    estimate_with(cfg, replications, None)
}

/// As [`estimate`], on a dedicated pool of `workers` threads when given.
/// The result does not depend on the number of workers.
pub fn estimate_with(cfg: &ProcessConfig, replications: u64, workers: Option<usize>) -> Result<SimEstimates> {
    cfg.validate()?;
    if replications == 0 {
        return Err(invalid("replications must be at least 1"));
    }
    let run = || {
        (0..replications)
            .into_par_iter()
            .fold(Tally::default, |t, rep| t.add(&run_unchecked(cfg, rep)))
            .reduce(Tally::default, Tally::merge)
    };
    let tally = match workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .map_err(|e| invalid(format!("cannot start {w} workers: {e}")))?
            .install(run),
        None => run(),
    };
    Ok(SimEstimates::from_tally(cfg, tally))
}

/// Every outcome of replications `0..replications`, in index order.
pub fn outcomes(cfg: &ProcessConfig, replications: u64) -> Result<Vec<SimOutcome>> {
    cfg.validate()?;
    Ok((0..replications)
        .into_par_iter()
        .map(|rep| run_unchecked(cfg, rep))
        .collect())
}
