//! Offspring laws of the two comparison processes.
//!
//! In the self-avoiding process (U) the survivors of a collapse only aim at
//! forward neighbours; in the move-forward-or-die process (L) they aim at
//! all `d + 1` neighbours and those picking the backward one die. Either
//! way the number of new colonies is the number of distinct forward
//! neighbours hit by `N` uniform throws. Conditioned on `N = n` this is an
//! occupancy count:
//!
//! | provenance   | boxes | watched | `P(Y = y \| N = n)`                      |
//! |--------------|-------|---------|------------------------------------------|
//! | `UInterior`  | `d`   | `d`     | `C(d,y) T(n,y) / d^n`                    |
//! | `LInterior`  | `d+1` | `d`     | `C(d,y) [T(n,y) + T(n,y+1)] / (d+1)^n`   |
//! | `URoot`      | `d+1` | `d+1`   | `C(d+1,y) T(n,y) / (d+1)^n`              |
//! | `LRoot`      | `d+1` | `d+1`   | same as `URoot`                          |
//!
//! where `T(n, k)` counts surjections. The root of the full tree has no
//! backward neighbour, so both processes share the root law.

use crate::error::{domain, Error, Result};
use crate::specialfn::Occupancy;
use crate::survivor::SurvivorLaw;
use serde::{Deserialize, Serialize};

/// Remainder allowed in the mixture over `N` before the rest of the tail is
/// assigned to "every neighbour hit".
const TRUNCATION_EPS: f64 = 1e-13;
const MAX_THROWS: u64 = 50_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    UInterior,
    URoot,
    LInterior,
    LRoot,
}

impl Provenance {
    pub const ALL: [Provenance; 4] = [
        Provenance::UInterior,
        Provenance::URoot,
        Provenance::LInterior,
        Provenance::LRoot,
    ];

    /// Number of neighbours the survivors choose among.
    pub fn slots(self, d: u32) -> usize {
        match self {
            Provenance::UInterior => d as usize,
            _ => d as usize + 1,
        }
    }

    /// Number of neighbours where a colony can be founded.
    pub fn targets(self, d: u32) -> usize {
        match self {
            Provenance::UInterior | Provenance::LInterior => d as usize,
            Provenance::URoot | Provenance::LRoot => d as usize + 1,
        }
    }

    pub fn is_root(self) -> bool {
        matches!(self, Provenance::URoot | Provenance::LRoot)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OffspringLaw {
    pub provenance: Provenance,
    pub d: u32,
    pub law: SurvivorLaw,
    /// `probs[y] = P(Y = y)` for `y = 0..=support_max`.
    pub probs: Vec<f64>,
    /// Largest `n` summed explicitly; the remaining `P(N > n)` was placed on
    /// the top of the support.
    pub truncated_at: u64,
}

/// Builds the offspring law for `provenance` on a tree of degree `d`.
pub fn build(provenance: Provenance, d: u32, law: &SurvivorLaw) -> Result<OffspringLaw> {
    if d < 2 {
        return Err(domain(format!("offspring laws need d >= 2, got {d}")));
    }
    let slots = provenance.slots(d);
    let targets = provenance.targets(d);
    let mut occ = Occupancy::new(slots, targets)?;
    let mut probs = vec![0.0; targets + 1];
    let mut pmf = law.pmf_iter();
    let mut n: u64 = 0;
    loop {
        let w = pmf.next().expect("pmf stream is infinite")?;
        if w > 0.0 {
            for (acc, q) in probs.iter_mut().zip(occ.probs()) {
                *acc += w * q;
            }
        }
        // Hit probabilities only grow with n, so (1 - q_full(n)) P(N > n)
        // bounds the mass that the remaining terms would put below the top.
        let missing = 1.0 - occ.all_hit();
        if missing * law.tail_bound(n) <= TRUNCATION_EPS {
            probs[targets] += law.tail_mass(n)?;
            break;
        }
        if n >= MAX_THROWS {
            return Err(Error::Precision {
                what: format!("offspring law {provenance:?} at d = {d}"),
                achieved: missing * law.tail_bound(n),
                terms: n as usize,
            });
        }
        occ.step();
        n += 1;
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > 1e-10 {
        return Err(Error::Precision {
            what: format!("offspring law {provenance:?} at d = {d} sums to {total}"),
            achieved: (total - 1.0).abs(),
            terms: n as usize,
        });
    }
    Ok(OffspringLaw {
        provenance,
        d,
        law: law.clone(),
        probs,
        truncated_at: n,
    })
}

impl OffspringLaw {
    pub fn support_max(&self) -> usize {
        self.probs.len() - 1
    }

    /// `E(s^Y)` by Horner's scheme.
    pub fn pgf(&self, s: f64) -> f64 {
        self.probs.iter().rev().fold(0.0, |acc, &q| acc * s + q)
    }

    /// `P(Y >= y)`.
    pub fn survival(&self, y: usize) -> f64 {
        self.probs.iter().skip(y).sum()
    }

    fn pmf_moment(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.probs
            .iter()
            .enumerate()
            .map(|(y, q)| f(y as f64) * q)
            .sum()
    }

    /// `E(Y) = k [1 - E((1 - 1/m)^N)]`, checked against the pmf.
    pub fn mean(&self) -> Result<f64> {
        let m = self.provenance.slots(self.d) as f64;
        let k = self.provenance.targets(self.d) as f64;
        let closed = k * (1.0 - self.law.pgf(1.0 - 1.0 / m)?);
        let direct = self.pmf_moment(|y| y);
        check_agreement("mean", closed, direct)?;
        Ok(closed)
    }

    /// `E(Y(Y-1)) = k(k-1) [1 - 2 E((1 - 1/m)^N) + E((1 - 2/m)^N)]`,
    /// checked against the pmf.
    pub fn factorial2(&self) -> Result<f64> {
        let m = self.provenance.slots(self.d) as f64;
        let k = self.provenance.targets(self.d) as f64;
        let closed = k
            * (k - 1.0)
            * (1.0 - 2.0 * self.law.pgf(1.0 - 1.0 / m)? + self.law.pgf(1.0 - 2.0 / m)?);
        let direct = self.pmf_moment(|y| y * (y - 1.0));
        check_agreement("second factorial moment", closed, direct)?;
        Ok(closed)
    }
}

fn check_agreement(what: &str, closed: f64, direct: f64) -> Result<()> {
    if (closed - direct).abs() > 1e-9 * closed.abs().max(1.0) {
        return Err(Error::Consistency(format!(
            "offspring {what}: closed form {closed} vs pmf sum {direct}"
        )));
    }
    Ok(())
}

/// `E(s^Y)`.
pub fn opgf(ol: &OffspringLaw, s: f64) -> f64 {
    ol.pgf(s)
}

/// `E(Y)`.
pub fn omean(ol: &OffspringLaw) -> Result<f64> {
    ol.mean()
}

/// `E(Y(Y-1))`.
pub fn ofact2(ol: &OffspringLaw) -> Result<f64> {
    ol.factorial2()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specialfn::surjection_count;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn pg(lambda: f64, p: f64) -> SurvivorLaw {
        SurvivorLaw::poisson_geometric(lambda, p).unwrap()
    }

    fn binom(n: usize, k: usize) -> f64 {
        (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
    }

    #[test]
    fn unit_survivor() {
        let one = SurvivorLaw::constant(1);
        let u = build(Provenance::UInterior, 3, &one).unwrap();
        assert_eq!(u.probs[1], 1.0);
        let l = build(Provenance::LInterior, 3, &one).unwrap();
        assert!((l.probs[1] - 0.75).abs() < 1e-15);
        assert!((l.probs[0] - 0.25).abs() < 1e-15);
        for d in 2..8 {
            let u = build(Provenance::UInterior, d, &one).unwrap();
            assert!((u.mean().unwrap() - 1.0).abs() < 1e-15);
        }
        let l4 = build(Provenance::LInterior, 4, &one).unwrap();
        assert!((l4.mean().unwrap() - 0.8).abs() < 1e-15);
        for prov in Provenance::ALL {
            assert!(build(prov, 4, &one).unwrap().factorial2().unwrap().abs() < 1e-14);
            let zero = build(prov, 4, &SurvivorLaw::constant(0)).unwrap();
            assert_eq!(zero.factorial2().unwrap(), 0.0);
            assert_eq!(zero.probs[0], 1.0);
        }
    }

    #[test]
    fn rejects_small_degree() {
        assert!(build(Provenance::UInterior, 1, &pg(1.0, 0.5)).is_err());
    }

    /// Mixture of the surjection-count weights, with exact integer T(n, y).
    fn surjection_oracle(prov: Provenance, d: u32, law: &SurvivorLaw, n_max: u32) -> Vec<f64> {
        let k = prov.targets(d);
        let m = prov.slots(d) as f64;
        let mut out = vec![0.0; k + 1];
        for n in 0..=n_max {
            let w = law.pmf(u64::from(n)).unwrap();
            let scale = m.powi(n as i32);
            for (y, slot) in out.iter_mut().enumerate() {
                let t = surjection_count(n, y as u32).unwrap() as f64;
                let extra = if prov == Provenance::LInterior {
                    surjection_count(n, y as u32 + 1).unwrap() as f64
                } else {
                    0.0
                };
                *slot += w * binom(k, y) * (t + extra) / scale;
            }
        }
        out
    }

    #[test]
    fn matches_surjection_weights() {
        // P(N > 30) is about 3^-30 for λ = 0.5, far below the tolerance.
        let law = pg(0.5, 0.7);
        for d in [2u32, 3, 5] {
            for prov in Provenance::ALL {
                let built = build(prov, d, &law).unwrap();
                let oracle = surjection_oracle(prov, d, &law, 30);
                for (y, (a, b)) in built.probs.iter().zip(&oracle).enumerate() {
                    assert!((a - b).abs() < 1e-12, "{prov:?} d={d} y={y}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn root_zero_mass_is_p0() {
        for law in [pg(1.0, 0.5), pg(5.0, 0.6), SurvivorLaw::yule_binomial(0.7, 0.4).unwrap()] {
            for prov in [Provenance::URoot, Provenance::LRoot] {
                let ol = build(prov, 4, &law).unwrap();
                assert!((ol.probs[0] - law.pmf(0).unwrap()).abs() < 1e-15);
            }
        }
    }

    fn sample_n(u: f64, cdf: &[f64]) -> usize {
        cdf.partition_point(|&c| c < u)
    }

    #[test]
    fn matches_urn_allocation() {
        // Throw N survivors into d + 1 urns, count distinct forward urns.
        let law = pg(1.0, 0.5);
        let d = 2usize;
        let built = build(Provenance::LInterior, d as u32, &law).unwrap();
        let mut cdf = Vec::new();
        let mut acc = 0.0;
        for q in law.pmf_iter().take(200) {
            acc += q.unwrap();
            cdf.push(acc);
        }
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let draws = 1_000_000;
        let mut counts = vec![0usize; d + 1];
        for _ in 0..draws {
            let n = sample_n(rng.random::<f64>(), &cdf);
            let mut hit = [false; 3];
            for _ in 0..n {
                hit[rng.random_range(0..=d)] = true;
            }
            counts[hit[..d].iter().filter(|&&h| h).count()] += 1;
        }
        let tv: f64 = counts
            .iter()
            .zip(&built.probs)
            .map(|(&c, &q)| (c as f64 / draws as f64 - q).abs())
            .sum::<f64>()
            / 2.0;
        assert!(tv < 2e-3, "tv = {tv}");
    }

    #[test]
    fn moments_match_pmf() {
        let law = pg(1.0, 0.5);
        let l2 = build(Provenance::LInterior, 2, &law).unwrap();
        let expected = 2.0 * (1.0 - law.pgf(2.0 / 3.0).unwrap());
        assert_eq!(l2.mean().unwrap(), expected);
        let l3 = build(Provenance::LInterior, 3, &law).unwrap();
        let direct: f64 = l3
            .probs
            .iter()
            .enumerate()
            .map(|(y, q)| (y * y.saturating_sub(1)) as f64 * q)
            .sum();
        assert!((l3.factorial2().unwrap() - direct).abs() < 1e-9);
    }

    #[test]
    fn pgf_endpoints_and_slope() {
        let law = pg(2.0, 0.4);
        for prov in Provenance::ALL {
            let ol = build(prov, 3, &law).unwrap();
            assert!((opgf(&ol, 1.0) - 1.0).abs() < 1e-12);
            assert_eq!(opgf(&ol, 0.0), ol.probs[0]);
            let h = 1e-7;
            let fd = (opgf(&ol, 1.0) - opgf(&ol, 1.0 - h)) / h;
            let m = omean(&ol).unwrap();
            assert!((fd - m).abs() < 1e-6 * m, "{prov:?}: {fd} vs {m}");
        }
    }

    #[test]
    fn approaches_survivor_law_as_d_grows() {
        let law = pg(1.0, 0.5);
        let tv_at = |d: u32| -> f64 {
            let ol = build(Provenance::UInterior, d, &law).unwrap();
            let inside: f64 = ol
                .probs
                .iter()
                .enumerate()
                .map(|(y, q)| (q - law.pmf(y as u64).unwrap()).abs())
                .sum();
            (inside + law.tail_mass(d as u64).unwrap()) / 2.0
        };
        let mut prev = f64::INFINITY;
        for d in [10u32, 100, 1000] {
            let tv = tv_at(d);
            assert!(tv < tv_at(d / 2), "d = {d}");
            assert!(tv < prev);
            prev = tv;
        }
        assert!(prev < 1e-2);
    }

    #[test]
    fn yule_heavy_tail_builds() {
        // infinite mean; the truncation still certifies through the occupancy factor
        let law = SurvivorLaw::yule_binomial(2.0, 0.9).unwrap();
        for prov in Provenance::ALL {
            let ol = build(prov, 5, &law).unwrap();
            assert!((ol.probs.iter().sum::<f64>() - 1.0).abs() < 1e-10);
            ol.mean().unwrap();
            ol.factorial2().unwrap();
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn u_on_more_neighbours_dominates_l(lambda in 0.1f64..8.0, p in 0.0f64..=1.0, d in 2u32..12, yule in any::<bool>()) {
            let law = if yule {
                SurvivorLaw::yule_binomial(lambda, p).unwrap()
            } else {
                pg(lambda, p)
            };
            let u = build(Provenance::UInterior, d + 1, &law).unwrap();
            let l = build(Provenance::LInterior, d, &law).unwrap();
            for y in 0..=(d as usize + 1) {
                prop_assert!(u.survival(y) >= l.survival(y) - 1e-12, "y = {}", y);
            }
        }

        #[test]
        fn normalized_and_consistent(lambda in 0.1f64..8.0, p in 0.0f64..=1.0, d in 2u32..20) {
            let law = pg(lambda, p);
            for prov in Provenance::ALL {
                let ol = build(prov, d, &law).unwrap();
                prop_assert!((ol.probs.iter().sum::<f64>() - 1.0).abs() < 1e-10);
                prop_assert!(ol.probs.iter().all(|&q| q >= -1e-16));
                ol.mean().unwrap();
                ol.factorial2().unwrap();
            }
        }
    }
}
