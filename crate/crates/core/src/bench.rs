//! Batch experiments over generated instances, reported as CSV.

use std::fmt::Write as _;
use std::time::Duration;

use rayon::prelude::*;

use crate::instances::{gen_random, GenError, GenParams};
use crate::rng::stream_value;
use crate::search::{solve, SolveConfig};

#[derive(Clone, Debug, PartialEq)]
pub struct BenchConfig {
    pub goods_list: Vec<usize>,
    pub bids_list: Vec<usize>,
    pub trials: usize,
    pub base_seed: u64,
    pub solver: SolveConfig,
    /// Distribution template; `goods`, `bids` and `seed` are set per cell.
    pub generator: GenParams,
    /// Per-solve budget, overriding `solver.time_limit` when set.
    pub time_limit: Option<Duration>,
    /// Run cells on the rayon pool. Row order is unaffected; time columns
    /// then reflect contended wall clock.
    pub parallel: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            goods_list: vec![6],
            bids_list: vec![10, 20],
            trials: 10,
            base_seed: 0,
            solver: SolveConfig::default(),
            generator: GenParams::default(),
            time_limit: None,
            parallel: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RowKind {
    Trial { trial: usize, seed: u64 },
    /// Mean over the trials of one `(goods, bids)` pair.
    Mean,
}

/// One solve, or the mean of a group of solves.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub goods: usize,
    pub bids: usize,
    pub kind: RowKind,
    pub opt_value: f64,
    /// For mean rows: every trial was proven optimal.
    pub proven_optimal: bool,
    pub nodes_visited: f64,
    pub node_fraction: f64,
    pub time_ms: f64,
    pub time_to_best_ms: f64,
    pub nodes_to_best: f64,
    pub avg_calls: f64,
    pub avg_ms: f64,
    pub proj_calls: f64,
    pub proj_ms: f64,
    pub lp_calls: f64,
    pub lp_ms: f64,
}

pub const CSV_HEADER: &str = "goods,bids,trial,seed,opt_value,proven_optimal,nodes_visited,node_fraction,time_ms,time_to_best_ms,nodes_to_best,avg_calls,avg_ms,proj_calls,proj_ms,lp_calls,lp_ms";

/// Columns that depend on wall-clock time.
pub const TIME_COLUMNS: [&str; 5] = ["time_ms", "time_to_best_ms", "avg_ms", "proj_ms", "lp_ms"];

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

impl BenchConfig {
    pub fn validate(&self) -> Result<(), GenError> {
        if self.trials == 0 || self.goods_list.is_empty() || self.bids_list.is_empty() {
            return Err(GenError::Params(
                "trials must be ≥ 1 and the goods/bids lists nonempty".into(),
            ));
        }
        Ok(())
    }

    fn cells(&self) -> Vec<(usize, usize, usize)> {
        let mut cells = Vec::new();
        for &g in &self.goods_list {
            for &b in &self.bids_list {
                for t in 0..self.trials {
                    cells.push((g, b, t));
                }
            }
        }
        cells
    }
}

fn run_cell(
    cfg: &BenchConfig,
    index: usize,
    (goods, bids, trial): (usize, usize, usize),
) -> Result<BenchRow, GenError> {
    let seed = stream_value(cfg.base_seed, index as u64);
    let inst = gen_random(&GenParams {
        goods,
        bids,
        seed,
        ..cfg.generator.clone()
    })?;
    let mut solver = cfg.solver.clone();
    if cfg.time_limit.is_some() {
        solver.time_limit = cfg.time_limit;
    }
    let r = solve(&inst, &solver);
    let s = r.bound_stats;
    Ok(BenchRow {
        goods,
        bids,
        kind: RowKind::Trial { trial, seed },
        opt_value: inst.to_real(r.best.value),
        proven_optimal: r.proven_optimal,
        nodes_visited: r.nodes_visited as f64,
        node_fraction: r.node_fraction,
        time_ms: ms(r.time_total),
        time_to_best_ms: ms(r.time_to_best),
        nodes_to_best: r.nodes_to_best as f64,
        avg_calls: s.avg.calls as f64,
        avg_ms: ms(s.avg.time),
        proj_calls: s.proj.calls as f64,
        proj_ms: ms(s.proj.time),
        lp_calls: s.lp.calls as f64,
        lp_ms: ms(s.lp.time),
    })
}

fn mean_row(group: &[BenchRow]) -> BenchRow {
    let n = group.len() as f64;
    let mean = |f: fn(&BenchRow) -> f64| group.iter().map(f).sum::<f64>() / n;
    BenchRow {
        goods: group[0].goods,
        bids: group[0].bids,
        kind: RowKind::Mean,
        opt_value: mean(|r| r.opt_value),
        proven_optimal: group.iter().all(|r| r.proven_optimal),
        nodes_visited: mean(|r| r.nodes_visited),
        node_fraction: mean(|r| r.node_fraction),
        time_ms: mean(|r| r.time_ms),
        time_to_best_ms: mean(|r| r.time_to_best_ms),
        nodes_to_best: mean(|r| r.nodes_to_best),
        avg_calls: mean(|r| r.avg_calls),
        avg_ms: mean(|r| r.avg_ms),
        proj_calls: mean(|r| r.proj_calls),
        proj_ms: mean(|r| r.proj_ms),
        lp_calls: mean(|r| r.lp_calls),
        lp_ms: mean(|r| r.lp_ms),
    }
}

/// Solves one generated instance per `(goods, bids, trial)` cell, then
/// appends one mean row per `(goods, bids)` pair.
///
/// Cell `i` (goods-major, then bids, then trial) uses output `i` of the
/// SplitMix64 stream seeded with `base_seed` as its generator seed.
/// A solve that runs out of time is kept with `proven_optimal = false`.
pub fn run_bench(cfg: &BenchConfig) -> Result<Vec<BenchRow>, GenError> {
    cfg.validate()?;
    let cells = cfg.cells();
    let rows: Vec<BenchRow> = if cfg.parallel {
        cells
            .par_iter()
            .enumerate()
            .map(|(i, &c)| run_cell(cfg, i, c))
            .collect::<Result<_, _>>()?
    } else {
        cells
            .iter()
            .enumerate()
            .map(|(i, &c)| run_cell(cfg, i, c))
            .collect::<Result<_, _>>()?
    };
    let mut out = rows.clone();
    out.extend(rows.chunks(cfg.trials).map(mean_row));
    Ok(out)
}

/// CSV with a fixed header. Mean rows have `trial = mean` and an empty seed.
pub fn emit_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let (trial, seed) = match r.kind {
            RowKind::Trial { trial, seed } => (trial.to_string(), seed.to_string()),
            RowKind::Mean => ("mean".to_string(), String::new()),
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.goods,
            r.bids,
            trial,
            seed,
            r.opt_value,
            r.proven_optimal,
            r.nodes_visited,
            r.node_fraction,
            r.time_ms,
            r.time_to_best_ms,
            r.nodes_to_best,
            r.avg_calls,
            r.avg_ms,
            r.proj_calls,
            r.proj_ms,
            r.lp_calls,
            r.lp_ms
        );
    }
    out
}
