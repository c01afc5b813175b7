#![allow(dead_code)]

use muca_core::model::{Bid, Instance};
use muca_core::rng::SplitMix64;

/// Random instance with at most `max_goods` goods, `max_bids` bids and
/// capacities up to `max_cap`; integer prices in 1..=100.
pub fn random_instance(
    rng: &mut SplitMix64,
    max_goods: u64,
    max_bids: u64,
    max_cap: u64,
) -> Instance {
    let n = rng.range_inclusive(1, max_goods) as usize;
    let caps: Vec<u64> = (0..n).map(|_| rng.range_inclusive(1, max_cap)).collect();
    let m = rng.range_inclusive(1, max_bids) as usize;
    let bids = (0..m)
        .map(|_| {
            let qty = loop {
                let q: Vec<u64> = caps
                    .iter()
                    .map(|&k| {
                        if rng.bernoulli(0.5) {
                            rng.range_inclusive(1, k)
                        } else {
                            0
                        }
                    })
                    .collect();
                if q.iter().any(|&x| x > 0) {
                    break q;
                }
            };
            Bid::new(qty, rng.range_inclusive(1, 100))
        })
        .collect();
    Instance::new(caps, bids, [], 0).expect("valid by construction")
}

/// Adds each possible exclusion pair with probability `p`.
pub fn with_random_exclusions(mut inst: Instance, rng: &mut SplitMix64, p: f64) -> Instance {
    for a in 0..inst.len() {
        for b in a + 1..inst.len() {
            if rng.bernoulli(p) {
                inst.exclusions.insert((a, b));
            }
        }
    }
    inst
}

/// Maximum independent set size by enumerating vertex subsets.
pub fn max_independent_set(vertices: usize, edges: &[(usize, usize)]) -> usize {
    (0u32..1 << vertices)
        .filter(|&mask| {
            edges
                .iter()
                .all(|&(a, b)| mask >> a & 1 == 0 || mask >> b & 1 == 0)
        })
        .map(|mask| mask.count_ones() as usize)
        .max()
        .unwrap_or(0)
}
