#![allow(dead_code)]

use cctree::sim::{sample_lifetime, sample_survivors, Streams};
use cctree::SurvivorLaw;

/// Total variation distance between an empirical histogram and a pmf.
pub fn total_variation(counts: &[u64], pmf: &[f64]) -> f64 {
    let n: u64 = counts.iter().sum();
    let len = counts.len().max(pmf.len());
    (0..len)
        .map(|i| {
            let c = counts.get(i).copied().unwrap_or(0) as f64 / n as f64;
            let q = pmf.get(i).copied().unwrap_or(0.0);
            (c - q).abs()
        })
        .sum::<f64>()
        / 2.0
}

/// Extinction generation of a branching process whose offspring are drawn
/// by the simulator's survivor sampler; `None` if still alive after
/// `max_gen` generations. Generation 0 is the single ancestor, so
/// `P(result <= m) = g_{m+1}(0)`.
pub fn extinction_generation(law: &SurvivorLaw, seed: u64, rep: u64, max_gen: u64) -> Option<u64> {
    let mut streams = Streams::new(seed, rep);
    let mut size: u64 = 1;
    for gen in 0..max_gen {
        let mut next: u64 = 0;
        for _ in 0..size {
            let t = sample_lifetime(&mut streams.lifetime);
            next = next.saturating_add(sample_survivors(law, t, &mut streams));
        }
        if next == 0 {
            return Some(gen);
        }
        size = next;
    }
    None
}

/// Prints one acceptance line and returns the verdict.
pub fn report(criterion: u32, passed: bool, detail: &str) -> bool {
    println!(
        "criterion {criterion}: {} | {detail}",
        if passed { "PASS" } else { "FAIL" }
    );
    passed
}
