//! Random draws for one collapse: lifetime, growth, catastrophe and the
//! neighbours chosen by the survivors.

use crate::survivor::{Catastrophe, Growth, SurvivorLaw};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Exp1, Geometric, Poisson};

/// Independent random streams of one replication.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum StreamTag {
    Lifetime = 0,
    Growth = 1,
    Catastrophe = 2,
    Dispersal = 3,
}

const STREAMS_PER_REPLICATION: u64 = 4;

/// Stream `tag` of replication `rep`.
///
/// The ChaCha key is expanded from `base_seed` and the 64-bit stream id is
/// `4 * rep + tag`, so every (replication, tag) pair reads its own keystream
/// and nothing depends on the order in which replications are run.
pub fn derive_rng(base_seed: u64, rep: u64, tag: StreamTag) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(base_seed);
    rng.set_stream(rep.wrapping_mul(STREAMS_PER_REPLICATION).wrapping_add(tag as u64));
    rng
}

/// The four streams of one replication.
pub struct Streams {
    pub lifetime: ChaCha8Rng,
    pub growth: ChaCha8Rng,
    pub catastrophe: ChaCha8Rng,
    pub dispersal: ChaCha8Rng,
}

impl Streams {
    pub fn new(base_seed: u64, rep: u64) -> Self {
        Self {
            lifetime: derive_rng(base_seed, rep, StreamTag::Lifetime),
            growth: derive_rng(base_seed, rep, StreamTag::Growth),
            catastrophe: derive_rng(base_seed, rep, StreamTag::Catastrophe),
            dispersal: derive_rng(base_seed, rep, StreamTag::Dispersal),
        }
    }
}

pub fn sample_lifetime<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let t: f64 = Exp1.sample(rng);
    // Exp1 can return exactly 0 in principle; lifetimes must be positive
    if t > 0.0 { t } else { f64::MIN_POSITIVE }
}

/// Colony size after growing for time `t` from one individual.
///
/// Poisson growth gives `1 + Poisson(λt)`; Yule growth gives a geometric
/// variable on `{1, 2, ...}` with success probability `e^{-λt}`.
pub fn sample_growth<R: Rng + ?Sized>(growth: Growth, lambda: f64, t: f64, rng: &mut R) -> u64 {
    let rate = lambda * t;
    if !(rate > 0.0) {
        return 1;
    }
    match growth {
        Growth::Poisson => {
            let rate = rate.min(Poisson::<f64>::MAX_LAMBDA);
            let k: f64 = Poisson::new(rate).expect("positive finite rate").sample(rng);
            1u64.saturating_add(k as u64)
        }
        Growth::Yule => {
            let q = (-rate).exp();
            if q <= 0.0 {
                return u64::MAX;
            }
            let failures = Geometric::new(q).expect("probability in (0, 1]").sample(rng);
            1u64.saturating_add(failures)
        }
    }
}

/// Survivors of a catastrophe striking `x` individuals.
///
/// Binomial: each individual survives independently with probability `p`.
/// Geometric: individuals are struck one at a time until the first one that
/// resists, so `N = max(x - (G - 1), 0)` with `G` geometric on `{1, 2, ...}`.
pub fn sample_catastrophe<R: Rng + ?Sized>(cat: Catastrophe, x: u64, p: f64, rng: &mut R) -> u64 {
    if p <= 0.0 {
        return 0;
    }
    if p >= 1.0 {
        return x;
    }
    match cat {
        Catastrophe::Binomial => Binomial::new(x, p).expect("p in (0, 1)").sample(rng),
        Catastrophe::Geometric => {
            let struck = Geometric::new(p).expect("p in (0, 1)").sample(rng);
            x.saturating_sub(struck)
        }
    }
}

/// Number of survivors of one collapse whose colony lived for `t`.
pub fn sample_survivors(law: &SurvivorLaw, t: f64, streams: &mut Streams) -> u64 {
    match *law {
        SurvivorLaw::PoissonGeometric { lambda, p } => {
            let x = sample_growth(Growth::Poisson, lambda, t, &mut streams.growth);
            sample_catastrophe(Catastrophe::Geometric, x, p, &mut streams.catastrophe)
        }
        SurvivorLaw::YuleBinomial { lambda, p } => {
            let x = sample_growth(Growth::Yule, lambda, t, &mut streams.growth);
            sample_catastrophe(Catastrophe::Binomial, x, p, &mut streams.catastrophe)
        }
        SurvivorLaw::Finite { ref pmf } => {
            // no growth phase: N is drawn directly
            let u: f64 = streams.catastrophe.random();
            let mut acc = 0.0;
            for (n, q) in pmf.iter().enumerate() {
                acc += q;
                if u < acc {
                    return n as u64;
                }
            }
            (pmf.len() - 1) as u64
        }
    }
}

/// Indices in `0..slots` hit by `n` independent uniform throws, ascending.
///
/// Small `n` is thrown one by one. Large `n` is split multinomially slot by
/// slot with binomial draws, which is exact and costs `O(slots)`.
pub fn disperse_slots<R: Rng + ?Sized>(n: u64, slots: usize, rng: &mut R) -> Vec<usize> {
    if n == 0 || slots == 0 {
        return Vec::new();
    }
    if n <= slots as u64 {
        let mut hit = vec![false; slots];
        for _ in 0..n {
            hit[rng.random_range(0..slots)] = true;
        }
        return hit.iter().enumerate().filter(|(_, &h)| h).map(|(i, _)| i).collect();
    }
    let mut out = Vec::new();
    let mut remaining = n;
    for i in 0..slots {
        if remaining == 0 {
            break;
        }
        let left = (slots - i) as f64;
        let c = if i + 1 == slots {
            remaining
        } else {
            Binomial::new(remaining, 1.0 / left).expect("valid split").sample(rng)
        };
        if c > 0 {
            out.push(i);
            remaining -= c;
        }
    }
    out
}
