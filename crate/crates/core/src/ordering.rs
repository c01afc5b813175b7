//! Per-bid ranking criteria, static rankings, and dominated-bid removal.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::model::{Bid, Instance};

/// A positive rational exponent `num / den`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Exponent {
    pub num: u32,
    pub den: u32,
}

impl Exponent {
    pub const ONE: Exponent = Exponent { num: 1, den: 1 };
    pub const HALF: Exponent = Exponent { num: 1, den: 2 };

    pub fn value(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

/// How attractive a bid looks on its own, `r(a)`.
///
/// Every criterion divides the price by a size measure of the quantity
/// vector. The `*Norm` kinds first divide each `q_j` by the capacity `k_j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Criterion {
    /// `p`
    Price,
    /// `p / Σ q_j`
    AvgUnit,
    /// `p / Σ (q_j / k_j)`
    AvgUnitNorm,
    /// `p / sqrt(Σ q_j²)`
    Euclid,
    /// `p / sqrt(Σ (q_j / k_j)²)`
    EuclidNorm,
    /// `p / sqrt(Σ q_j)`: the criterion with the `√k` greedy guarantee.
    #[default]
    SqrtSum,
    /// `p / sqrt(Σ q_j / k_j)`
    SqrtSumNorm,
    /// `p / (Σ q_j^l)^m`, or with `q_j / k_j` in place of `q_j` when normalized.
    Family {
        l: u32,
        m: Exponent,
        normalized: bool,
    },
}

impl Criterion {
    /// The seven named criteria.
    pub const NAMED: [Criterion; 7] = [
        Criterion::Price,
        Criterion::AvgUnit,
        Criterion::AvgUnitNorm,
        Criterion::Euclid,
        Criterion::EuclidNorm,
        Criterion::SqrtSum,
        Criterion::SqrtSumNorm,
    ];

    /// Whether the score depends on the capacities.
    pub fn is_normalized(self) -> bool {
        matches!(
            self,
            Criterion::AvgUnitNorm
                | Criterion::EuclidNorm
                | Criterion::SqrtSumNorm
                | Criterion::Family {
                    normalized: true,
                    ..
                }
        )
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Criterion::Price => f.write_str("price"),
            Criterion::AvgUnit => f.write_str("avg"),
            Criterion::AvgUnitNorm => f.write_str("avg-norm"),
            Criterion::Euclid => f.write_str("euclid"),
            Criterion::EuclidNorm => f.write_str("euclid-norm"),
            Criterion::SqrtSum => f.write_str("sqrt"),
            Criterion::SqrtSumNorm => f.write_str("sqrt-norm"),
            Criterion::Family { l, m, normalized } => {
                write!(f, "family:l={l},m={m}")?;
                if *normalized {
                    f.write_str(",norm")?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("unknown criterion '{0}': expected price, avg, avg-norm, euclid, euclid-norm, sqrt, sqrt-norm or family:l=<int>,m=<rat>[,norm]")]
pub struct CriterionParseError(pub String);

impl FromStr for Criterion {
    type Err = CriterionParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || CriterionParseError(s.to_string());
        Ok(match s {
            "price" => Criterion::Price,
            "avg" => Criterion::AvgUnit,
            "avg-norm" => Criterion::AvgUnitNorm,
            "euclid" => Criterion::Euclid,
            "euclid-norm" => Criterion::EuclidNorm,
            "sqrt" => Criterion::SqrtSum,
            "sqrt-norm" => Criterion::SqrtSumNorm,
            _ => {
                let params = s.strip_prefix("family:").ok_or_else(bad)?;
                let (mut l, mut m, mut normalized) = (None, None, false);
                for part in params.split(',') {
                    if part == "norm" {
                        normalized = true;
                    } else if let Some(v) = part.strip_prefix("l=") {
                        l = Some(v.parse::<u32>().map_err(|_| bad())?);
                    } else if let Some(v) = part.strip_prefix("m=") {
                        let (num, den) = v.split_once('/').unwrap_or((v, "1"));
                        m = Some(Exponent {
                            num: num.parse().map_err(|_| bad())?,
                            den: den.parse().map_err(|_| bad())?,
                        });
                    } else {
                        return Err(bad());
                    }
                }
                let (l, m) = (l.ok_or_else(bad)?, m.ok_or_else(bad)?);
                if l == 0 || m.num == 0 || m.den == 0 {
                    return Err(bad());
                }
                Criterion::Family { l, m, normalized }
            }
        })
    }
}

/// Scores a bid of `inst` under `c`. The bid must request at least one unit.
pub fn score(c: Criterion, bid: &Bid, inst: &Instance) -> f64 {
    let p = inst.to_real(bid.price);
    let terms = || {
        bid.qty
            .iter()
            .zip(&inst.caps)
            .filter(|(&q, _)| q > 0)
    };
    let plain = |pow: fn(f64) -> f64| terms().map(|(&q, _)| pow(q as f64)).sum::<f64>();
    let norm =
        |pow: fn(f64) -> f64| terms().map(|(&q, &k)| pow(q as f64 / k as f64)).sum::<f64>();
    let id: fn(f64) -> f64 = |x| x;
    let sq: fn(f64) -> f64 = |x| x * x;
    match c {
        Criterion::Price => p,
        Criterion::AvgUnit => p / plain(id),
        Criterion::AvgUnitNorm => p / norm(id),
        Criterion::Euclid => p / plain(sq).sqrt(),
        Criterion::EuclidNorm => p / norm(sq).sqrt(),
        Criterion::SqrtSum => p / plain(id).sqrt(),
        Criterion::SqrtSumNorm => p / norm(id).sqrt(),
        Criterion::Family { l, m, normalized } => {
            let sum: f64 = terms()
                .map(|(&q, &k)| {
                    let x = if normalized { q as f64 / k as f64 } else { q as f64 };
                    x.powi(l as i32)
                })
                .sum();
            p / sum.powf(m.value())
        }
    }
}

/// A static bid order: descending score, ties by ascending bid index.
#[derive(Clone, Debug, PartialEq)]
pub struct Ranking {
    pub order: Vec<usize>,
    /// Indexed by bid, not by rank.
    pub scores: Vec<f64>,
}

pub fn rank_bids(c: Criterion, inst: &Instance) -> Ranking {
    let scores: Vec<f64> = inst.bids.iter().map(|b| score(c, b, inst)).collect();
    let mut order: Vec<usize> = (0..inst.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    Ranking { order, scores }
}

/// Result of [`dominance_prune`].
#[derive(Clone, Debug, PartialEq)]
pub struct Pruned {
    pub instance: Instance,
    /// `kept[new_index]` is the original bid index.
    pub kept: Vec<usize>,
    /// Original indices of removed bids, ascending.
    pub removed: Vec<usize>,
}

impl Pruned {
    pub fn to_original(&self, chosen: &[usize]) -> Vec<usize> {
        let mut out: Vec<usize> = chosen.iter().map(|&i| self.kept[i]).collect();
        out.sort_unstable();
        out
    }
}

fn dominates(a: &Bid, b: &Bid) -> bool {
    let same_qty = a.qty == b.qty;
    (same_qty && a.price > b.price)
        || (a.price == b.price
            && !same_qty
            && a.qty.iter().zip(&b.qty).all(|(x, y)| x <= y))
}

/// Removes every bid `b` beaten by some conflicting bid `a`: same quantities
/// at a higher price, or the same price for componentwise no more units.
///
/// With exclusions present `a` must also be excluded by no bid outside
/// `b`'s own exclusion list, otherwise swapping `b` for `a` could break an
/// allocation. The optimal value is unchanged.
pub fn dominance_prune(inst: &Instance) -> Pruned {
    let m = inst.len();
    let excl = inst.exclusion_lists();
    let excl_ok = |a: usize, b: usize| {
        excl[a]
            .iter()
            .all(|&o| o == b || inst.is_excluded(o, b))
    };
    let removed: Vec<usize> = (0..m)
        .filter(|&b| {
            (0..m).any(|a| {
                a != b
                    && dominates(&inst.bids[a], &inst.bids[b])
                    && inst.conflicts(a, b)
                    && excl_ok(a, b)
            })
        })
        .collect();
    if removed.is_empty() {
        return Pruned {
            instance: inst.clone(),
            kept: (0..m).collect(),
            removed,
        };
    }
    let kept: Vec<usize> = (0..m).filter(|i| removed.binary_search(i).is_err()).collect();
    let mut new_index = vec![usize::MAX; m];
    for (ni, &oi) in kept.iter().enumerate() {
        new_index[oi] = ni;
    }
    let instance = Instance {
        caps: inst.caps.clone(),
        bids: kept.iter().map(|&i| inst.bids[i].clone()).collect(),
        exclusions: inst
            .exclusions
            .iter()
            .filter_map(|&(a, b)| {
                let (na, nb) = (new_index[a], new_index[b]);
                (na != usize::MAX && nb != usize::MAX).then_some((na.min(nb), na.max(nb)))
            })
            .collect(),
        scale: inst.scale,
    };
    Pruned {
        instance,
        kept,
        removed,
    }
}
