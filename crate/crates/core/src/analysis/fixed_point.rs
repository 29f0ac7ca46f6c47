use crate::error::{Error, Result};
use serde::Serialize;

const STEP_TOL: f64 = 1e-13;
const MAX_ITERATIONS: usize = 100_000;
const RESIDUAL_TOL: f64 = 1e-12;
/// `g(s) - s` must fall below this to count as a sign change; keeps rounding
/// noise near `s = 1` from faking a root for subcritical laws.
const NEGATIVE_MARGIN: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FixedPoint {
    pub value: f64,
    /// `|g(value) - value|`.
    pub residual: f64,
    pub iterations: usize,
}

/// Smallest fixed point of a generating function on `[0, 1]`.
///
/// Iterates `s_{k+1} = g(s_k)` from 0. Every iterate stays below the
/// smallest fixed point, so the last one is a lower bracket; an upper
/// bracket is then searched for by probing `g(s) - s < 0` above it and the
/// root is refined by bisection. If `g(s) > s` everywhere below 1 the answer
/// is 1.
pub fn extinction_fixed_point<G>(g: G) -> Result<FixedPoint>
where
    G: Fn(f64) -> Result<f64>,
{
    let h = |s: f64| -> Result<f64> { Ok(g(s)? - s) };
    let mut s = 0.0f64;
    let mut iterations = 0;
    while iterations < MAX_ITERATIONS {
        let next = g(s)?.clamp(0.0, 1.0);
        iterations += 1;
        let step = next - s;
        s = next.max(s);
        if step.abs() < STEP_TOL {
            break;
        }
    }
    if s >= 1.0 {
        return Ok(FixedPoint {
            value: 1.0,
            residual: h(1.0)?.abs(),
            iterations,
        });
    }

    let mut lo = s;
    let mut hi = None;
    let mut delta = 1e-12;
    while lo + delta < 1.0 {
        let cand = lo + delta;
        if h(cand)? < -NEGATIVE_MARGIN {
            hi = Some(cand);
            break;
        }
        delta *= 2.0;
    }
    if hi.is_none() {
        for j in 1..=60 {
            let cand = 1.0 - (1.0 - lo) * 0.5f64.powi(j);
            if cand >= 1.0 {
                break;
            }
            if h(cand)? < -NEGATIVE_MARGIN {
                hi = Some(cand);
                break;
            }
        }
    }
    let Some(mut hi) = hi else {
        return Ok(FixedPoint {
            value: 1.0,
            residual: h(1.0)?.abs(),
            iterations,
        });
    };
    for _ in 0..200 {
        let mid = lo + (hi - lo) / 2.0;
        if mid <= lo || mid >= hi {
            break;
        }
        if h(mid)? >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (rlo, rhi) = (h(lo)?.abs(), h(hi)?.abs());
    let (value, residual) = if rlo <= rhi { (lo, rlo) } else { (hi, rhi) };
    if residual >= RESIDUAL_TOL {
        return Err(Error::Precision {
            what: "extinction fixed point".into(),
            achieved: residual,
            terms: iterations,
        });
    }
    Ok(FixedPoint {
        value,
        residual,
        iterations,
    })
}
