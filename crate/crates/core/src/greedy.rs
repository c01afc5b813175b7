//! Greedy allocation along a static ranking.

use crate::model::{Instance, Solution};
use crate::ordering::{rank_bids, Criterion, Ranking};

#[derive(Clone, Debug, PartialEq)]
pub struct GreedyResult {
    pub solution: Solution,
    pub order_used: Ranking,
    /// Bids, in rank order, that no longer fit when their turn came.
    pub skipped: Vec<usize>,
}

/// Walks the ranking once, accepting every bid that still fits the residual
/// capacities and is not excluded by an accepted bid.
///
/// Under [`Criterion::SqrtSum`] the result is within a factor `√k` of the
/// optimum, `k` being the total number of units on sale.
pub fn greedy_allocate(inst: &Instance, c: Criterion) -> GreedyResult {
    let ranking = rank_bids(c, inst);
    let (chosen, skipped) = greedy_walk(inst, &ranking.order);
    GreedyResult {
        solution: inst.solution(chosen),
        order_used: ranking,
        skipped,
    }
}

pub(crate) fn greedy_walk(inst: &Instance, order: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let excl = inst.exclusion_lists();
    let mut residual = inst.caps.clone();
    let mut blocked = vec![false; inst.len()];
    let (mut chosen, mut skipped) = (Vec::new(), Vec::new());
    for &i in order {
        let bid = &inst.bids[i];
        let fits = bid.qty.iter().zip(&residual).all(|(q, r)| q <= r);
        if !fits || blocked[i] {
            skipped.push(i);
            continue;
        }
        for (r, q) in residual.iter_mut().zip(&bid.qty) {
            *r -= q;
        }
        for &o in &excl[i] {
            blocked[o] = true;
        }
        chosen.push(i);
    }
    (chosen, skipped)
}
