//! Surjection numbers `T(n, k)`: the number of onto maps from an `n`-set to a
//! `k`-set, together with the occupancy probabilities built from them.
//!
//! Everything here runs on the additive recurrence
//! `T(n, k) = k * (T(n-1, k) + T(n-1, k-1))`. Inclusion-exclusion is never
//! evaluated in floating point.

use crate::error::{Error, Result};

/// Exact `T(n, k)`.
///
/// Returns [`Error::Overflow`] when the value does not fit in a `u128`.
pub fn surjection_count(n: u32, k: u32) -> Result<u128> {
    if k > n {
        return Ok(0);
    }
    if k == 0 {
        return Ok(u128::from(n == 0));
    }
    // Only the band of cells that can reach (n, k) is needed, and every cell
    // in it is bounded by the target value, so overflow anywhere means the
    // target itself overflows.
    let excess = (n - k) as usize;
    let k = k as usize;
    // row[j] holds T(j + i, j) for the current excess i.
    let mut row: Vec<u128> = (0..=k).map(|j| factorial_u128(j as u32)).collect::<Result<_>>()?;
    for _ in 0..excess {
        let mut next = vec![0u128; k + 1];
        for j in 1..=k {
            let sum = row[j]
                .checked_add(next[j - 1])
                .ok_or_else(|| overflow(n, k))?;
            next[j] = sum.checked_mul(j as u128).ok_or_else(|| overflow(n, k))?;
        }
        row = next;
    }
    Ok(row[k])
}

fn overflow(n: u32, k: usize) -> Error {
    Error::Overflow(format!("T({n}, {k})"))
}

fn factorial_u128(j: u32) -> Result<u128> {
    (1..=u128::from(j)).try_fold(1u128, |acc, x| {
        acc.checked_mul(x)
            .ok_or_else(|| Error::Overflow(format!("{j}!")))
    })
}

/// `ln T(n, k)`, or `-inf` when `T(n, k) = 0`.
pub fn surjection_log(n: u32, k: u32) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    if k == 0 {
        return if n == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    let excess = (n - k) as usize;
    let k = k as usize;
    let mut row: Vec<f64> = Vec::with_capacity(k + 1);
    let mut acc = 0.0;
    row.push(0.0);
    for j in 1..=k {
        acc += (j as f64).ln();
        row.push(acc);
    }
    for _ in 0..excess {
        let mut next = vec![f64::NEG_INFINITY; k + 1];
        for j in 1..=k {
            next[j] = (j as f64).ln() + log_add(row[j], next[j - 1]);
        }
        row = next;
    }
    row[k]
}

fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// Precomputed surjection numbers for all `0 <= k <= n <= max_n`.
///
/// Exact entries are `None` where they overflow `u128`; log entries are
/// always present.
#[derive(Debug, Clone)]
pub struct SurjectionTable {
    max_n: usize,
    exact: Vec<Vec<Option<u128>>>,
    log: Vec<Vec<f64>>,
}

impl SurjectionTable {
    pub fn new(max_n: u32) -> Self {
        let max_n = max_n as usize;
        let mut exact: Vec<Vec<Option<u128>>> = Vec::with_capacity(max_n + 1);
        let mut log: Vec<Vec<f64>> = Vec::with_capacity(max_n + 1);
        exact.push(vec![Some(1)]);
        log.push(vec![0.0]);
        for n in 1..=max_n {
            let mut erow = vec![Some(0u128); n + 1];
            let mut lrow = vec![f64::NEG_INFINITY; n + 1];
            for k in 1..=n {
                let prev_same = if k < n { exact[n - 1][k] } else { Some(0) };
                let prev_less = exact[n - 1][k - 1];
                erow[k] = match (prev_same, prev_less) {
                    (Some(a), Some(b)) => a
                        .checked_add(b)
                        .and_then(|s| s.checked_mul(k as u128)),
                    _ => None,
                };
                let lsame = if k < n { log[n - 1][k] } else { f64::NEG_INFINITY };
                lrow[k] = (k as f64).ln() + log_add(lsame, log[n - 1][k - 1]);
            }
            exact.push(erow);
            log.push(lrow);
        }
        Self { max_n, exact, log }
    }

    pub fn max_n(&self) -> u32 {
        self.max_n as u32
    }

    pub fn exact(&self, n: u32, k: u32) -> Result<u128> {
        let (n, k) = (n as usize, k as usize);
        if n > self.max_n {
            return Err(crate::error::domain(format!(
                "n = {n} exceeds table size {}",
                self.max_n
            )));
        }
        if k > n {
            return Ok(0);
        }
        self.exact[n][k].ok_or_else(|| Error::Overflow(format!("T({n}, {k})")))
    }

    pub fn log(&self, n: u32, k: u32) -> f64 {
        let (n, k) = (n as usize, k as usize);
        if k > n {
            return f64::NEG_INFINITY;
        }
        if n > self.max_n {
            return surjection_log(n as u32, k as u32);
        }
        self.log[n][k]
    }
}

/// Occupancy law of `n` uniform throws into `slots` boxes, watching the
/// first `targets` of them.
///
/// After `n` calls to [`Occupancy::step`], `probs()[y]` is the probability
/// that exactly `y` distinct target boxes have been hit, i.e.
///
/// ```text
/// sum_{j} C(targets, y) * C(slots - targets, j) * T(n, y + j) / slots^n
/// ```
///
/// With `targets == slots` this is `C(k, y) T(n, y) / k^n`; with one extra
/// non-target box it is `C(d, y) [T(n, y) + T(n, y + 1)] / (d + 1)^n`. The
/// weights stay in `[0, 1]`, so nothing overflows however large `n` gets.
#[derive(Debug, Clone)]
pub struct Occupancy {
    slots: usize,
    targets: usize,
    throws: u64,
    probs: Vec<f64>,
}

impl Occupancy {
    pub fn new(slots: usize, targets: usize) -> Result<Self> {
        if slots == 0 || targets > slots {
            return Err(crate::error::domain(format!(
                "occupancy needs 0 < targets <= slots, got targets = {targets}, slots = {slots}"
            )));
        }
        let mut probs = vec![0.0; targets + 1];
        probs[0] = 1.0;
        Ok(Self {
            slots,
            targets,
            throws: 0,
            probs,
        })
    }

    /// Adds one throw.
    pub fn step(&mut self) {
        let m = self.slots as f64;
        let others = (self.slots - self.targets) as f64;
        let k = self.targets;
        // Walk downwards so probs[y - 1] is still the previous value.
        for y in (0..=k).rev() {
            let stay = self.probs[y] * (others + y as f64) / m;
            let enter = if y > 0 {
                self.probs[y - 1] * (k - y + 1) as f64 / m
            } else {
                0.0
            };
            self.probs[y] = stay + enter;
        }
        self.throws += 1;
    }

    pub fn throws(&self) -> u64 {
        self.throws
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Probability that every target box has been hit.
    pub fn all_hit(&self) -> f64 {
        self.probs[self.targets]
    }
}

/// `T(n, k) / m^n` for `k = 0..=k_max`, advanced one `n` at a time.
///
/// Uses `u_k(n) = [k u_k(n-1) + k u_{k-1}(n-1)] / m`.
#[derive(Debug, Clone)]
pub struct ScaledSurjections {
    base: f64,
    n: u64,
    values: Vec<f64>,
}

impl ScaledSurjections {
    pub fn new(base: u32, k_max: usize) -> Self {
        let mut values = vec![0.0; k_max + 1];
        values[0] = 1.0;
        Self {
            base: f64::from(base),
            n: 0,
            values,
        }
    }

    pub fn step(&mut self) {
        for k in (1..self.values.len()).rev() {
            let kf = k as f64;
            self.values[k] = (kf * self.values[k] + kf * self.values[k - 1]) / self.base;
        }
        self.values[0] = 0.0;
        self.n += 1;
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn enumerate_surjections(n: u32, k: u32) -> u128 {
        // Count maps {0..n} -> {0..k} whose image is everything.
        if k == 0 {
            return u128::from(n == 0);
        }
        let total = (k as u64).pow(n);
        let mut count = 0;
        for code in 0..total {
            let mut seen = vec![false; k as usize];
            let mut c = code;
            for _ in 0..n {
                seen[(c % k as u64) as usize] = true;
                c /= k as u64;
            }
            if seen.iter().all(|&s| s) {
                count += 1;
            }
        }
        count
    }

    #[test]
    fn small_values() {
        assert_eq!(enumerate_surjections(3, 2), 6);
        assert_eq!(surjection_count(3, 2).unwrap(), 6);
        assert_eq!(surjection_count(4, 4).unwrap(), 24);
        assert_eq!(surjection_count(2, 3).unwrap(), 0);
        assert_eq!(surjection_count(5, 1).unwrap(), 1);
        assert_eq!(surjection_count(0, 0).unwrap(), 1);
        assert_eq!(surjection_count(3, 0).unwrap(), 0);
    }

    #[test]
    fn matches_enumeration() {
        for n in 0..=7 {
            for k in 0..=5 {
                assert_eq!(
                    surjection_count(n, k).unwrap(),
                    enumerate_surjections(n, k),
                    "T({n},{k})"
                );
            }
        }
    }

    #[test]
    fn overflow_is_reported() {
        assert!(matches!(surjection_count(40, 40), Err(Error::Overflow(_))));
        assert!(surjection_log(40, 40).is_finite());
    }

    #[test]
    fn table_agrees_with_direct() {
        let table = SurjectionTable::new(30);
        for n in 0..=30 {
            for k in 0..=n {
                match surjection_count(n, k) {
                    Ok(v) => assert_eq!(table.exact(n, k).unwrap(), v),
                    Err(_) => assert!(table.exact(n, k).is_err()),
                }
                let a = table.log(n, k);
                let b = surjection_log(n, k);
                if a.is_finite() {
                    assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
                } else {
                    assert_eq!(b, f64::NEG_INFINITY);
                }
            }
        }
    }

    #[test]
    fn occupancy_matches_surjection_formula() {
        // one non-target box: C(d, y)[T(n,y) + T(n,y+1)] / (d+1)^n
        let d = 3usize;
        let mut occ = Occupancy::new(d + 1, d).unwrap();
        for n in 1..=12u32 {
            occ.step();
            for y in 0..=d {
                let binom = [1.0, 3.0, 3.0, 1.0][y];
                let t = surjection_count(n, y as u32).unwrap() as f64
                    + surjection_count(n, y as u32 + 1).unwrap() as f64;
                let expected = binom * t / ((d + 1) as f64).powi(n as i32);
                assert!((occ.probs()[y] - expected).abs() < 1e-14, "n={n} y={y}");
            }
        }
    }

    #[test]
    fn scaled_recurrence_matches_exact() {
        let mut s = ScaledSurjections::new(5, 5);
        for n in 1..=20u32 {
            s.step();
            for k in 0..=5u32 {
                let exact = surjection_count(n, k).unwrap() as f64 / 5f64.powi(n as i32);
                assert!((s.values()[k as usize] - exact).abs() <= 1e-15 * exact.max(1e-300) + 1e-300);
            }
        }
    }

    fn inclusion_exclusion(n: u32, k: u32) -> num_bigint::BigInt {
        use num_bigint::BigInt;
        use num_traits::{One, Zero};
        let mut total = BigInt::zero();
        let mut binom = BigInt::one();
        for i in 0..=k {
            let term = &binom * BigInt::from(k - i).pow(n);
            if i % 2 == 0 {
                total += term;
            } else {
                total -= term;
            }
            binom = binom * BigInt::from(k - i) / BigInt::from(i + 1);
        }
        total
    }

    #[test]
    fn exact_matches_big_inclusion_exclusion() {
        for n in 1..=30 {
            for k in 1..=n {
                let oracle = inclusion_exclusion(n, k);
                match surjection_count(n, k) {
                    Ok(v) => assert_eq!(num_bigint::BigInt::from(v), oracle, "T({n},{k})"),
                    Err(_) => assert!(oracle > num_bigint::BigInt::from(u128::MAX)),
                }
            }
        }
    }

    #[test]
    fn log_variant_relative_accuracy() {
        for n in 1..=30 {
            for k in 1..=n {
                if let Ok(v) = surjection_count(n, k) {
                    let ratio = surjection_log(n, k).exp() / v as f64;
                    assert!((ratio - 1.0).abs() <= 1e-10, "T({n},{k}) ratio {ratio}");
                }
            }
        }
    }

    #[test]
    fn counting_by_image_size() {
        // sum_k C(m, k) T(n, k) = m^n
        for n in 0..=15u32 {
            for m in 1..=15u32 {
                let mut total: u128 = 0;
                let mut binom: u128 = 1;
                for k in 0..=m.min(n) {
                    total += binom * surjection_count(n, k).unwrap();
                    binom = binom * u128::from(m - k) / u128::from(k + 1);
                }
                assert_eq!(total, u128::from(m).pow(n), "n={n} m={m}");
            }
        }
    }

    #[test]
    fn table_invariants() {
        let t = SurjectionTable::new(25);
        for n in 1..=25u32 {
            assert_eq!(t.exact(n, 1).unwrap(), 1);
            for k in 1..=n {
                if let (Ok(a), Ok(b), Ok(c)) = (t.exact(n, k), t.exact(n - 1, k), t.exact(n - 1, k - 1)) {
                    assert_eq!(a, u128::from(k) * (b + c));
                }
            }
        }
        assert_eq!(t.exact(0, 0).unwrap(), 1);
        assert_eq!(t.exact(10, 10).unwrap(), 3_628_800);
    }
}
