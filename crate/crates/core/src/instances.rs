//! Instance generators: a random multi-unit distribution, the independent
//! set reduction, and the two hand-built worst cases for greedy orderings.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::model::{Bid, Instance};
use crate::ordering::{rank_bids, Criterion};
use crate::rng::SplitMix64;

/// Decimal digits used for irrational prices such as `√k`.
pub const IRRATIONAL_SCALE: u32 = 6;

/// Price nudge, in units at [`IRRATIONAL_SCALE`], that makes ties strict.
pub const PERTURBATION_UNITS: u64 = 1;

#[derive(Debug, Error, PartialEq)]
pub enum GenError {
    #[error("invalid generator parameters: {0}")]
    Params(String),
    #[error("invalid graph: {0}")]
    Graph(String),
}

/// Parameters of the random distribution.
///
/// Every bid asks for each good independently with probability `req_prob`
/// (a bid asking for nothing is redrawn), a uniform quantity in
/// `1..=qty_max` clamped to the capacity, and pays its unit count times a
/// uniform factor from `unit_value_range`.
#[derive(Clone, Debug, PartialEq)]
pub struct GenParams {
    pub goods: usize,
    pub bids: usize,
    pub cap_range: (u64, u64),
    pub req_prob: f64,
    pub qty_max: u64,
    pub unit_value_range: (f64, f64),
    pub price_scale: u32,
    pub seed: u64,
}

impl Default for GenParams {
    fn default() -> Self {
        Self {
            goods: 6,
            bids: 20,
            cap_range: (1, 5),
            req_prob: 0.2,
            qty_max: 3,
            unit_value_range: (0.5, 1.5),
            price_scale: 2,
            seed: 0,
        }
    }
}

impl GenParams {
    pub fn validate(&self) -> Result<(), GenError> {
        let bad = |m: &str| Err(GenError::Params(m.to_string()));
        if self.goods == 0 {
            return bad("goods must be ≥ 1");
        }
        if self.cap_range.0 == 0 || self.cap_range.0 > self.cap_range.1 {
            return bad("cap_range must be a nonempty range of positive integers");
        }
        if !(self.req_prob > 0.0 && self.req_prob <= 1.0) {
            return bad("req_prob must lie in (0, 1]");
        }
        if self.qty_max == 0 {
            return bad("qty_max must be ≥ 1");
        }
        let (lo, hi) = self.unit_value_range;
        if !(lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo <= hi) {
            return bad("unit_value_range must be a finite nonnegative range");
        }
        if self.price_scale > 9 {
            return bad("price_scale must be ≤ 9");
        }
        Ok(())
    }
}

fn round_price(value: f64, scale: u32) -> u64 {
    (value * 10f64.powi(scale as i32)).round() as u64
}

/// Draws an instance; identical parameters give identical instances.
pub fn gen_random(params: &GenParams) -> Result<Instance, GenError> {
    params.validate()?;
    let mut rng = SplitMix64::new(params.seed);
    let caps: Vec<u64> = (0..params.goods)
        .map(|_| rng.range_inclusive(params.cap_range.0, params.cap_range.1))
        .collect();
    let bids = (0..params.bids)
        .map(|_| {
            let qty = loop {
                let qty: Vec<u64> = caps
                    .iter()
                    .map(|&k| {
                        if rng.bernoulli(params.req_prob) {
                            rng.range_inclusive(1, params.qty_max).min(k)
                        } else {
                            0
                        }
                    })
                    .collect();
                if qty.iter().any(|&q| q > 0) {
                    break qty;
                }
            };
            let units: u64 = qty.iter().sum();
            let (lo, hi) = params.unit_value_range;
            let price = round_price(units as f64 * rng.uniform(lo, hi), params.price_scale);
            Bid::new(qty, price)
        })
        .collect();
    Instance::new(caps, bids, [], params.price_scale)
        .map_err(|v| GenError::Params(format!("generated an invalid instance: {v:?}")))
}

/// A simple undirected graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    pub vertices: usize,
    pub edges: Vec<(usize, usize)>,
}

impl Graph {
    /// Rejects self-loops, duplicate edges and out-of-range endpoints.
    pub fn new(vertices: usize, edges: Vec<(usize, usize)>) -> Result<Self, GenError> {
        let mut seen = BTreeSet::new();
        for &(a, b) in &edges {
            if a >= vertices || b >= vertices {
                return Err(GenError::Graph(format!(
                    "edge ({a}, {b}) leaves the {vertices} vertices"
                )));
            }
            if a == b {
                return Err(GenError::Graph(format!("self-loop at vertex {a}")));
            }
            if !seen.insert((a.min(b), a.max(b))) {
                return Err(GenError::Graph(format!("duplicate edge ({a}, {b})")));
            }
        }
        Ok(Self { vertices, edges })
    }

    /// Erdős–Rényi graph: each pair becomes an edge with probability `p`.
    pub fn random(vertices: usize, p: f64, rng: &mut SplitMix64) -> Self {
        let mut edges = Vec::new();
        for a in 0..vertices {
            for b in a + 1..vertices {
                if rng.bernoulli(p) {
                    edges.push((a, b));
                }
            }
        }
        Self { vertices, edges }
    }

    /// Parses an edge list: one `u v` pair per line, `#` comments allowed.
    pub fn parse_edge_list(text: &str) -> Result<Self, GenError> {
        let mut edges = Vec::new();
        let mut vertices = 0;
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            let parse = |t: &str| {
                t.parse::<usize>()
                    .map_err(|_| GenError::Graph(format!("line {}: bad vertex '{t}'", n + 1)))
            };
            if toks.len() != 2 {
                return Err(GenError::Graph(format!(
                    "line {}: expected 'u v'",
                    n + 1
                )));
            }
            let (a, b) = (parse(toks[0])?, parse(toks[1])?);
            vertices = vertices.max(a + 1).max(b + 1);
            edges.push((a, b));
        }
        Self::new(vertices, edges)
    }
}

/// Turns a graph into an auction whose optimum is its maximum independent
/// set size.
///
/// Every edge is a good with capacity `edge_caps[e]`; vertex `i` bids 1 for
/// the full capacity of each incident edge, so adjacent vertices conflict.
/// An isolated vertex gets a private good of capacity 1 to keep its bid
/// nonempty; those goods follow the edge goods.
pub fn from_graph(g: &Graph, edge_caps: &[u64]) -> Result<Instance, GenError> {
    let g = Graph::new(g.vertices, g.edges.clone())?;
    if edge_caps.len() != g.edges.len() {
        return Err(GenError::Params(format!(
            "{} capacities for {} edges",
            edge_caps.len(),
            g.edges.len()
        )));
    }
    if edge_caps.contains(&0) {
        return Err(GenError::Params("edge capacities must be ≥ 1".into()));
    }
    let mut degree = vec![0usize; g.vertices];
    for &(a, b) in &g.edges {
        degree[a] += 1;
        degree[b] += 1;
    }
    let isolated: Vec<usize> = (0..g.vertices).filter(|&v| degree[v] == 0).collect();
    let goods = g.edges.len() + isolated.len();
    let mut caps = edge_caps.to_vec();
    caps.resize(goods, 1);
    let mut qty = vec![vec![0u64; goods]; g.vertices];
    for (e, &(a, b)) in g.edges.iter().enumerate() {
        qty[a][e] = edge_caps[e];
        qty[b][e] = edge_caps[e];
    }
    for (k, &v) in isolated.iter().enumerate() {
        qty[v][g.edges.len() + k] = 1;
    }
    if goods == 0 {
        // no vertices at all: one unused good keeps the instance valid
        caps.push(1);
    }
    let bids = qty.into_iter().map(|q| Bid::new(q, 1)).collect();
    Instance::new(caps, bids, [], 0)
        .map_err(|v| GenError::Params(format!("reduction produced an invalid instance: {v:?}")))
}

fn unit_bid(goods: usize, good: usize, price: u64) -> Bid {
    let mut qty = vec![0; goods];
    qty[good] = 1;
    Bid::new(qty, price)
}

/// The two auctions on which a greedy ordering is off by `√k`.
///
/// Both contain `A`, a bid for every unit at price `√k`. Problem I adds
/// one unit bid for good 0; problem II adds `k_j` unit bids for each good
/// `j`. Unit bids pay `1 + 10^-6` so no criterion can tie them with `A`.
/// Prices use six decimals.
///
/// Good 0 is the right choice whenever all unit bids rank alike. Use
/// [`adversarial_pair_for`] for normalized criteria with unequal capacities.
pub fn adversarial_pair(caps: &[u64]) -> Result<(Instance, Instance), GenError> {
    adversarial_pair_with_unit(caps, 0)
}

/// As [`adversarial_pair`], with problem I's unit bid on the good whose
/// unit bid `criterion` ranks first.
pub fn adversarial_pair_for(
    caps: &[u64],
    criterion: Criterion,
) -> Result<(Instance, Instance), GenError> {
    check_adversarial_caps(caps)?;
    let n = caps.len();
    let units = (0..n).map(|j| unit_bid(n, j, unit_price())).collect();
    let probe = Instance::new(caps.to_vec(), units, [], IRRATIONAL_SCALE)
        .map_err(|v| GenError::Params(format!("{v:?}")))?;
    adversarial_pair_with_unit(caps, rank_bids(criterion, &probe).order[0])
}

fn check_adversarial_caps(caps: &[u64]) -> Result<(), GenError> {
    if caps.is_empty() || caps.contains(&0) {
        return Err(GenError::Params("capacities must be nonempty and ≥ 1".into()));
    }
    Ok(())
}

fn unit_price() -> u64 {
    10u64.pow(IRRATIONAL_SCALE) + PERTURBATION_UNITS
}

fn adversarial_pair_with_unit(
    caps: &[u64],
    unit_good: usize,
) -> Result<(Instance, Instance), GenError> {
    check_adversarial_caps(caps)?;
    let n = caps.len();
    let k: u64 = caps.iter().sum();
    let scale = IRRATIONAL_SCALE;
    let all = Bid::new(caps.to_vec(), round_price((k as f64).sqrt(), scale));

    let first = vec![all.clone(), unit_bid(n, unit_good, unit_price())];
    let mut second = vec![all];
    for (j, &kj) in caps.iter().enumerate() {
        second.extend((0..kj).map(|_| unit_bid(n, j, unit_price())));
    }
    let build = |bids| {
        Instance::new(caps.to_vec(), bids, [], scale)
            .map_err(|v| GenError::Params(format!("{v:?}")))
    };
    Ok((build(first)?, build(second)?))
}

/// Two goods with `k` and 1 units; `A = ⟨k, 1⟩` at `√2` and `⟨1, 0⟩` at
/// `1/√k` tie under the normalized square-root criterion. The small bid is
/// nudged up by `10^-6` so it wins, while the optimum is `A` alone.
pub fn normalized_counterexample(k: u64) -> Result<Instance, GenError> {
    if k < 2 {
        return Err(GenError::Params("k must be ≥ 2".into()));
    }
    let scale = IRRATIONAL_SCALE;
    let bids = vec![
        Bid::new(vec![k, 1], round_price(2f64.sqrt(), scale)),
        Bid::new(
            vec![1, 0],
            round_price(1.0 / (k as f64).sqrt(), scale) + PERTURBATION_UNITS,
        ),
    ];
    Instance::new(vec![k, 1], bids, [], scale).map_err(|v| GenError::Params(format!("{v:?}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ordering::{score, Criterion};

    #[test]
    fn random_is_deterministic_and_valid() {
        let p = GenParams {
            seed: 99,
            ..Default::default()
        };
        let a = gen_random(&p).unwrap();
        let b = gen_random(&p).unwrap();
        assert_eq!(a, b);
        assert!(a.validate().is_empty());
        assert!(a.bids.iter().all(|b| !b.is_empty()));
        let c = gen_random(&GenParams { seed: 100, ..p }).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn figure_three_shape() {
        let p = GenParams {
            goods: 14,
            bids: 50,
            seed: 3,
            ..Default::default()
        };
        let x = gen_random(&p).unwrap();
        assert_eq!((x.goods(), x.len()), (14, 50));
    }

    #[test]
    fn bad_params() {
        for p in [
            GenParams { goods: 0, ..Default::default() },
            GenParams { cap_range: (0, 3), ..Default::default() },
            GenParams { cap_range: (4, 3), ..Default::default() },
            GenParams { req_prob: 0.0, ..Default::default() },
            GenParams { req_prob: 1.5, ..Default::default() },
            GenParams { qty_max: 0, ..Default::default() },
            GenParams { unit_value_range: (2.0, 1.0), ..Default::default() },
        ] {
            assert!(gen_random(&p).is_err(), "{p:?}");
        }
    }

    #[test]
    fn triangle_reduction() {
        let g = Graph::new(3, vec![(0, 1), (1, 2), (0, 2)]).unwrap();
        let x = from_graph(&g, &[1, 1, 1]).unwrap();
        assert_eq!((x.goods(), x.len()), (3, 3));
        assert_eq!(x.bids[0].qty, vec![1, 0, 1]);
    }

    #[test]
    fn isolated_vertices_get_private_goods() {
        let g = Graph::new(4, vec![]).unwrap();
        let x = from_graph(&g, &[]).unwrap();
        assert_eq!(x.goods(), 4);
        for (i, b) in x.bids.iter().enumerate() {
            assert_eq!(b.qty.iter().sum::<u64>(), 1);
            assert_eq!(b.qty[i], 1);
        }
    }

    #[test]
    fn graph_validation() {
        assert!(Graph::new(2, vec![(0, 0)]).is_err());
        assert!(Graph::new(2, vec![(0, 1), (1, 0)]).is_err());
        assert!(Graph::new(2, vec![(0, 2)]).is_err());
        let g = Graph::parse_edge_list("# path\n0 1\n1 2\n").unwrap();
        assert_eq!(g, Graph::new(3, vec![(0, 1), (1, 2)]).unwrap());
        assert!(Graph::parse_edge_list("0 1 2\n").is_err());
        assert!(from_graph(&g, &[1]).is_err());
    }

    #[test]
    fn adversarial_caps_four() {
        let (one, two) = adversarial_pair(&[4]).unwrap();
        assert_eq!(one.scale, 6);
        assert_eq!(one.bids, vec![Bid::new(vec![4], 2_000_000), Bid::new(vec![1], 1_000_001)]);
        assert_eq!(two.len(), 5);
        assert!(two.bids[1..].iter().all(|b| *b == Bid::new(vec![1], 1_000_001)));
    }

    #[test]
    fn adversarial_two_goods() {
        let (one, two) = adversarial_pair(&[2, 2]).unwrap();
        assert_eq!(one.bids[0], Bid::new(vec![2, 2], 2_000_000));
        assert_eq!(one.bids[1].qty, vec![1, 0]);
        assert_eq!(two.len(), 5);
        assert_eq!(two.bids.iter().filter(|b| b.qty == vec![0, 1]).count(), 2);
        assert!(adversarial_pair(&[]).is_err());
    }

    #[test]
    fn adversarial_unit_follows_ranking() {
        let (one, _) = adversarial_pair_for(&[1, 3], Criterion::EuclidNorm).unwrap();
        assert_eq!(one.bids[1].qty, vec![0, 1]);
        let (one, _) = adversarial_pair_for(&[1, 3], Criterion::Euclid).unwrap();
        assert_eq!(one.bids[1].qty, vec![1, 0]);
        assert_eq!(
            adversarial_pair_for(&[2, 2], Criterion::SqrtSumNorm).unwrap(),
            adversarial_pair(&[2, 2]).unwrap()
        );
    }

    #[test]
    fn counterexample_k4() {
        let x = normalized_counterexample(4).unwrap();
        assert_eq!(x.bids[0], Bid::new(vec![4, 1], 1_414_214));
        assert_eq!(x.bids[1], Bid::new(vec![1, 0], 500_001));
        let norm: Vec<f64> = x.bids.iter().map(|b| score(Criterion::SqrtSumNorm, b, &x)).collect();
        assert!((norm[0] - 1.0).abs() < 1e-6 && (norm[1] - 1.000002).abs() < 1e-6);
        assert!(norm[1] > norm[0]);
        let plain: Vec<f64> = x.bids.iter().map(|b| score(Criterion::SqrtSum, b, &x)).collect();
        assert!((plain[0] - 0.632456).abs() < 1e-6);
        assert!((plain[1] - 0.500001).abs() < 1e-9);
        assert!(x.conflicts(0, 1));
        assert!(normalized_counterexample(1).is_err());
    }
}
