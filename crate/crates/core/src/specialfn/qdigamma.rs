//! The q-digamma function
//! `ψ_a(z) = -ln(1 - a) + ln(a) Σ_{n≥0} a^{n+z} / (1 - a^{n+z})`.

use super::SeriesControl;
use crate::error::{domain, Error, Result};

pub fn q_digamma(a: f64, z: f64) -> Result<f64> {
    q_digamma_with(a, z, &SeriesControl::default())
}

pub fn q_digamma_with(a: f64, z: f64, ctl: &SeriesControl) -> Result<f64> {
    if !(a > 0.0 && a < 1.0) {
        return Err(domain(format!("q-digamma needs 0 < a < 1, got a = {a}")));
    }
    if !(z > 0.0) || !z.is_finite() {
        return Err(domain(format!("q-digamma needs z > 0, got z = {z}")));
    }
    let ln_a = a.ln();
    let mut sum = 0.0;
    let mut term = 0.0;
    for n in 0..ctl.max_terms {
        let x = (n as f64 + z) * ln_a;
        // a^{n+z} / (1 - a^{n+z})
        term = x.exp() / -x.exp_m1();
        sum += term;
        // successive terms shrink by at least a factor a
        let scaled = term * ln_a.abs();
        let tail = scaled * a / (1.0 - a);
        let tol = ctl.tol(sum * ln_a);
        if scaled < tol && tail < tol {
            return Ok(-(-a).ln_1p() + ln_a * sum);
        }
    }
    Err(Error::Precision {
        what: format!("q-digamma({a}, {z})"),
        achieved: term * ln_a.abs() * a / (1.0 - a),
        terms: ctl.max_terms,
    })
}
