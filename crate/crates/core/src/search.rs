//! Depth-first branch and bound over a static bid ranking.
//!
//! Bids are ranked once. At each position the engine first tries to
//! include the next bid that still fits, then skips it. A node is a
//! distinct partial allocation, so the root plus every taken include
//! branch; at most `2^m` exist. Memory is linear: the open path is the
//! only state besides the incumbent.

use std::time::{Duration, Instant};

use crate::bounds::{
    avg_price_bound, lp_bound, projection_bound, BoundReport, BoundSet, Subproblem,
};
use crate::greedy::greedy_walk;
use crate::model::{Instance, Solution};
use crate::ordering::{dominance_prune, rank_bids, Criterion};

#[derive(Clone, Debug, PartialEq)]
pub struct SolveConfig {
    pub criterion: Criterion,
    pub bounds: BoundSet,
    /// Start from the greedy allocation under `criterion`.
    pub seed_incumbent: bool,
    pub node_limit: Option<u64>,
    pub time_limit: Option<Duration>,
    /// Take an integral LP optimum as the subtree's answer and backtrack.
    pub lp_integral_backtrack: bool,
    /// Remove dominated bids before searching.
    pub preprocess: bool,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            criterion: Criterion::SqrtSum,
            bounds: BoundSet::AVG,
            seed_incumbent: true,
            node_limit: None,
            time_limit: None,
            lp_integral_backtrack: true,
            preprocess: true,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct MethodStats {
    pub calls: u64,
    pub time: Duration,
}

impl MethodStats {
    fn record(&mut self, since: Instant) {
        self.calls += 1;
        self.time += since.elapsed();
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct BoundStats {
    pub avg: MethodStats,
    /// One call per good evaluated.
    pub proj: MethodStats,
    pub lp: MethodStats,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopReason {
    NodeLimit,
    TimeLimit,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveResult {
    /// Winners in original bid indices.
    pub best: Solution,
    pub proven_optimal: bool,
    pub stopped: Option<StopReason>,
    pub nodes_visited: u64,
    /// `nodes_visited / 2^m`, `m` being the bid count after preprocessing.
    pub node_fraction: f64,
    /// Nodes visited when the final incumbent value was first reached;
    /// zero when the greedy seed was already optimal.
    pub nodes_to_best: u64,
    pub time_total: Duration,
    pub time_to_best: Duration,
    pub searched_bids: usize,
    pub removed_bids: Vec<usize>,
    pub bound_stats: BoundStats,
}

/// Relative slack when rounding a floating bound down to whole price units.
const BOUND_SLACK: f64 = 1e-6;

/// Largest integer value a floating bound can certify. Solution values are
/// whole price units, so a subtree cannot beat `floor(bound)`.
fn bound_units(v: f64) -> u64 {
    if !v.is_finite() {
        return u64::MAX;
    }
    let v = v + BOUND_SLACK * v.abs().max(1.0);
    if v <= 0.0 {
        0
    } else if v >= u64::MAX as f64 {
        u64::MAX
    } else {
        v.floor() as u64
    }
}

enum Verdict {
    Prune,
    Solved,
    Branch,
}

struct Engine<'a> {
    inst: &'a Instance,
    cfg: &'a SolveConfig,
    order: Vec<usize>,
    excl: Vec<Vec<usize>>,
    residual: Vec<u64>,
    blocked: Vec<u32>,
    chosen: Vec<usize>,
    partial: u64,
    best: Vec<usize>,
    best_value: u64,
    nodes: u64,
    nodes_to_best: u64,
    time_to_best: Duration,
    stopped: Option<StopReason>,
    start: Instant,
    stats: BoundStats,
}

impl<'a> Engine<'a> {
    fn fits(&self, bid: usize) -> bool {
        self.blocked[bid] == 0
            && self.inst.bids[bid]
                .qty
                .iter()
                .zip(&self.residual)
                .all(|(q, r)| q <= r)
    }

    fn record(&mut self, chosen: Vec<usize>, value: u64) {
        self.best = chosen;
        self.best_value = value;
        self.nodes_to_best = self.nodes;
        self.time_to_best = self.start.elapsed();
    }

    fn push(&mut self, bid: usize) {
        let b = &self.inst.bids[bid];
        for (r, q) in self.residual.iter_mut().zip(&b.qty) {
            *r -= q;
        }
        for &o in &self.excl[bid] {
            self.blocked[o] += 1;
        }
        self.partial += b.price;
        self.chosen.push(bid);
    }

    fn pop(&mut self, bid: usize) {
        let b = &self.inst.bids[bid];
        for (r, q) in self.residual.iter_mut().zip(&b.qty) {
            *r += q;
        }
        for &o in &self.excl[bid] {
            self.blocked[o] -= 1;
        }
        self.partial -= b.price;
        self.chosen.pop();
    }

    /// Enters a new partial allocation; the next candidates start at rank `next`.
    fn visit(&mut self, next: usize) {
        if self.cfg.node_limit.is_some_and(|l| self.nodes >= l) {
            self.stopped = Some(StopReason::NodeLimit);
            return;
        }
        self.nodes += 1;
        if self.nodes % 256 == 0
            && self.cfg.time_limit.is_some_and(|t| self.start.elapsed() >= t)
        {
            self.stopped = Some(StopReason::TimeLimit);
            return;
        }
        if self.partial > self.best_value {
            self.record(self.chosen.clone(), self.partial);
        }
        self.explore(next);
    }

    /// Branches on every remaining rank position: include, then exclude.
    fn explore(&mut self, mut from: usize) {
        let m = self.order.len();
        loop {
            let Some(pos) = (from..m).find(|&p| self.fits(self.order[p])) else {
                return;
            };
            if !self.cfg.bounds.is_empty() {
                match self.check_bounds(pos) {
                    Verdict::Prune | Verdict::Solved => return,
                    Verdict::Branch => {}
                }
            }
            let bid = self.order[pos];
            self.push(bid);
            self.visit(pos + 1);
            self.pop(bid);
            if self.stopped.is_some() {
                return;
            }
            from = pos + 1;
        }
    }

    /// Cheapest bound first; stops at the first one that prunes.
    fn check_bounds(&mut self, from: usize) -> Verdict {
        let inst = self.inst;
        let sub = Subproblem {
            residual_caps: self.residual.clone(),
            live: (from..self.order.len())
                .map(|p| self.order[p])
                .filter(|&b| self.fits(b))
                .collect(),
        };
        // partial ≤ best_value always holds once visit() has run
        let need = self.best_value - self.partial;

        if self.cfg.bounds.avg {
            let t = Instant::now();
            let r = avg_price_bound(inst, &sub);
            self.stats.avg.record(t);
            if bound_units(r.value) <= need {
                return Verdict::Prune;
            }
        }
        if self.cfg.bounds.proj {
            for good in 0..inst.goods() {
                let t = Instant::now();
                let r = projection_bound(inst, &sub, good);
                self.stats.proj.record(t);
                if r.is_ok_and(|r| bound_units(r.value) <= need) {
                    return Verdict::Prune;
                }
            }
        }
        if self.cfg.bounds.lp {
            let t = Instant::now();
            let r = lp_bound(inst, &sub);
            self.stats.lp.record(t);
            if let Ok(r) = r {
                if bound_units(r.value) <= need {
                    return Verdict::Prune;
                }
                if self.cfg.lp_integral_backtrack && self.lift(&r, &sub) {
                    return Verdict::Solved;
                }
            }
        }
        Verdict::Branch
    }

    /// Adopts an integral LP optimum as the best completion of the current
    /// node. Fails if rounding does not give a feasible allocation worth
    /// the LP value, e.g. when it breaks an exclusion the LP cannot see.
    fn lift(&mut self, r: &BoundReport, sub: &Subproblem) -> bool {
        let Some(extra) = r.integral_bids(sub) else {
            return false;
        };
        let inst = self.inst;
        let mut used = vec![0u64; inst.goods()];
        for &i in &extra {
            for (u, q) in used.iter_mut().zip(&inst.bids[i].qty) {
                *u += q;
            }
        }
        if used.iter().zip(&self.residual).any(|(u, r)| u > r) {
            return false;
        }
        if extra
            .iter()
            .enumerate()
            .any(|(k, &a)| extra[k + 1..].iter().any(|&b| inst.is_excluded(a, b)))
        {
            return false;
        }
        let value = inst.value_of(&extra);
        if (value as f64 - r.value).abs() > 1e-6 * r.value.abs().max(1.0) {
            return false;
        }
        let total = self.partial + value;
        if total > self.best_value {
            let mut all = self.chosen.clone();
            all.extend(extra);
            self.record(all, total);
        }
        true
    }
}

/// Finds an optimal allocation, or the best one found before a limit hit.
pub fn solve(inst: &Instance, cfg: &SolveConfig) -> SolveResult {
    let start = Instant::now();
    let pruned = if cfg.preprocess {
        dominance_prune(inst)
    } else {
        crate::ordering::Pruned {
            instance: inst.clone(),
            kept: (0..inst.len()).collect(),
            removed: Vec::new(),
        }
    };
    let work = &pruned.instance;
    let order = rank_bids(cfg.criterion, work).order;
    let mut engine = Engine {
        inst: work,
        cfg,
        excl: work.exclusion_lists(),
        residual: work.caps.clone(),
        blocked: vec![0; work.len()],
        chosen: Vec::new(),
        partial: 0,
        best: Vec::new(),
        best_value: 0,
        nodes: 0,
        nodes_to_best: 0,
        time_to_best: Duration::ZERO,
        stopped: None,
        start,
        stats: BoundStats::default(),
        order,
    };
    if cfg.seed_incumbent {
        let (seed, _) = greedy_walk(work, &engine.order);
        let value = work.value_of(&seed);
        engine.record(seed, value);
    }
    engine.visit(0);

    let m = work.len();
    let best = Solution {
        chosen: pruned.to_original(&engine.best),
        value: engine.best_value,
    };
    SolveResult {
        best,
        proven_optimal: engine.stopped.is_none(),
        stopped: engine.stopped,
        nodes_visited: engine.nodes,
        node_fraction: engine.nodes as f64 / 2f64.powi(m as i32),
        nodes_to_best: engine.nodes_to_best,
        time_total: start.elapsed(),
        time_to_best: engine.time_to_best,
        searched_bids: m,
        removed_bids: pruned.removed,
        bound_stats: engine.stats,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::e1;
    use crate::model::Bid;

    #[test]
    fn e1_defaults() {
        let r = solve(&e1(), &SolveConfig::default());
        assert_eq!(r.best.value, 9);
        assert_eq!(r.best.chosen, vec![1, 3]);
        assert!(r.proven_optimal);
        assert!(r.node_fraction > 0.0 && r.node_fraction <= 1.0);
    }

    #[test]
    fn unperturbed_problem_two_is_solved() {
        let mut bids = vec![Bid::new(vec![4], 2)];
        bids.extend((0..4).map(|_| Bid::new(vec![1], 1)));
        let x = Instance::new(vec![4], bids, [], 0).unwrap();
        for bounds in BoundSet::all_subsets() {
            let r = solve(&x, &SolveConfig { bounds, ..Default::default() });
            assert_eq!(r.best.value, 4, "{bounds}");
            assert_eq!(r.best.chosen, vec![1, 2, 3, 4]);
            assert!(r.proven_optimal);
        }
    }

    #[test]
    fn single_bid() {
        let x = Instance::new(vec![2], vec![Bid::new(vec![1], 3)], [], 0).unwrap();
        let r = solve(&x, &SolveConfig::default());
        assert_eq!(r.best.chosen, vec![0]);
        assert!(r.nodes_visited <= 3);
    }

    #[test]
    fn empty_instance() {
        let x = Instance::new(vec![2], vec![], [], 0).unwrap();
        let r = solve(&x, &SolveConfig::default());
        assert_eq!(r.best, Solution::empty());
        assert_eq!(r.nodes_visited, 1);
        assert_eq!(r.node_fraction, 1.0);
    }

    #[test]
    fn node_limit_stops_early() {
        let cfg = SolveConfig {
            bounds: BoundSet::NONE,
            seed_incumbent: false,
            node_limit: Some(2),
            ..Default::default()
        };
        let r = solve(&e1(), &cfg);
        assert!(!r.proven_optimal);
        assert_eq!(r.stopped, Some(StopReason::NodeLimit));
        assert_eq!(r.nodes_visited, 2);
        assert!(e1().is_feasible(&r.best.chosen));
    }

    #[test]
    fn winners_map_back_through_preprocessing() {
        // bid 1 is dominated by bid 0 and removed; bid 2 keeps its index
        let x = Instance::new(
            vec![1, 1],
            vec![
                Bid::new(vec![1, 0], 5),
                Bid::new(vec![1, 0], 4),
                Bid::new(vec![0, 1], 3),
            ],
            [],
            0,
        )
        .unwrap();
        let r = solve(&x, &SolveConfig::default());
        assert_eq!(r.removed_bids, vec![1]);
        assert_eq!(r.searched_bids, 2);
        assert_eq!(r.best.chosen, vec![0, 2]);
        assert_eq!(r.best.value, 8);
    }

    #[test]
    fn lp_integral_lift_respects_exclusions() {
        let mut x = e1();
        x.exclusions.insert((1, 3));
        let cfg = SolveConfig {
            bounds: BoundSet {
                lp: true,
                ..BoundSet::NONE
            },
            seed_incumbent: false,
            ..Default::default()
        };
        let r = solve(&x, &cfg);
        assert_eq!(r.best.value, 7);
        assert!(x.is_feasible(&r.best.chosen));
    }

    #[test]
    fn integral_root_lp_ends_the_search() {
        let cfg = SolveConfig {
            bounds: BoundSet {
                lp: true,
                ..BoundSet::NONE
            },
            seed_incumbent: false,
            ..Default::default()
        };
        let r = solve(&e1(), &cfg);
        assert_eq!(r.best.chosen, vec![1, 3]);
        assert_eq!(r.nodes_visited, 1);
        assert_eq!(r.bound_stats.lp.calls, 1);
    }

    #[test]
    fn bound_units_rounding() {
        assert_eq!(bound_units(9.0), 9);
        assert_eq!(bound_units(8.999_999_999), 9);
        assert_eq!(bound_units(9.4), 9);
        assert_eq!(bound_units(-1.0), 0);
        assert_eq!(bound_units(f64::INFINITY), u64::MAX);
    }
}
