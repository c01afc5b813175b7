use super::BoundSkipped;

/// Default cap on `capacity × items` DP cells.
pub const KNAPSACK_WORK_LIMIT: u64 = 50_000_000;

/// Exact 0/1 knapsack optimum over `(weight, value)` items.
///
/// Zero-weight items are always taken and items heavier than `capacity` are
/// ignored. The DP runs over `min(capacity, Σ weights)` cells; if that
/// times the item count exceeds `work_limit` the bound is skipped.
pub fn knapsack_max(
    items: &[(u64, u64)],
    capacity: u64,
    work_limit: u64,
) -> Result<u64, BoundSkipped> {
    let free: u64 = items.iter().filter(|(w, _)| *w == 0).map(|(_, v)| v).sum();
    let heavy: Vec<(u64, u64)> = items
        .iter()
        .copied()
        .filter(|&(w, _)| w > 0 && w <= capacity)
        .collect();
    if heavy.is_empty() {
        return Ok(free);
    }
    let total: u128 = heavy.iter().map(|&(w, _)| w as u128).sum();
    if total <= capacity as u128 {
        return Ok(free + heavy.iter().map(|&(_, v)| v).sum::<u64>());
    }
    let cap = capacity as u128;
    let work = cap * heavy.len() as u128;
    if work > work_limit as u128 {
        return Err(BoundSkipped::KnapsackWork {
            work,
            limit: work_limit,
        });
    }
    let cap = cap as usize;
    let mut best = vec![0u64; cap + 1];
    for &(w, v) in &heavy {
        let w = w as usize;
        for c in (w..=cap).rev() {
            let with = best[c - w] + v;
            if with > best[c] {
                best[c] = with;
            }
        }
    }
    Ok(free + best[cap])
}
