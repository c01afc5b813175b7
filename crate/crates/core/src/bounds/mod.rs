//! Upper bounds on the optimum of a residual auction.
//!
//! All values are in the instance's price units (integer units scaled by
//! `10^-scale`). Exclusion pairs are ignored here, which can only loosen a
//! bound.

mod knapsack;
pub mod simplex;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub use knapsack::{knapsack_max, KNAPSACK_WORK_LIMIT};

use crate::model::Instance;

/// Values within this distance of 0 or 1 count as integral.
pub const INTEGRALITY_TOL: f64 = 1e-6;

/// Why a bound was not computed. A skipped bound never prunes.
#[derive(Clone, Debug, Error, PartialEq)]
pub enum BoundSkipped {
    #[error("knapsack needs {work} DP cells, limit is {limit}")]
    KnapsackWork { work: u128, limit: u64 },
    #[error("simplex exceeded {limit} iterations")]
    PivotLimit { limit: usize },
    #[error("simplex lost numerical feasibility")]
    Numerical,
}

/// The auction left over after fixing a partial allocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subproblem {
    pub residual_caps: Vec<u64>,
    /// Bids of the parent instance that still fit `residual_caps`.
    pub live: Vec<usize>,
}

impl Subproblem {
    /// The whole instance: full capacities, every bid live.
    pub fn root(inst: &Instance) -> Self {
        Self {
            residual_caps: inst.caps.clone(),
            live: (0..inst.len()).collect(),
        }
    }

    /// Keeps the candidates that individually fit `residual_caps`.
    pub fn new(
        inst: &Instance,
        residual_caps: Vec<u64>,
        candidates: impl IntoIterator<Item = usize>,
    ) -> Self {
        let live = candidates
            .into_iter()
            .filter(|&i| {
                inst.bids[i]
                    .qty
                    .iter()
                    .zip(&residual_caps)
                    .all(|(q, r)| q <= r)
            })
            .collect();
        Self {
            residual_caps,
            live,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BoundMethod {
    AvgPrice,
    Projection(usize),
    Lp,
    /// No enabled method produced a value.
    Min,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport {
    pub value: f64,
    pub method: BoundMethod,
    /// LP only: `x` for each entry of `Subproblem::live`, in that order.
    pub lp_x: Option<Vec<f64>>,
    pub lp_integral: Option<bool>,
    /// Simplex iterations, LP only.
    pub lp_iterations: Option<usize>,
}

impl BoundReport {
    fn plain(value: f64, method: BoundMethod) -> Self {
        Self {
            value,
            method,
            lp_x: None,
            lp_integral: None,
            lp_iterations: None,
        }
    }

    /// The winning live bids when the LP optimum is integral.
    pub fn integral_bids(&self, sub: &Subproblem) -> Option<Vec<usize>> {
        match (&self.lp_x, self.lp_integral) {
            (Some(x), Some(true)) => Some(
                sub.live
                    .iter()
                    .zip(x)
                    .filter(|(_, &xi)| xi > 0.5)
                    .map(|(&i, _)| i)
                    .collect(),
            ),
            _ => None,
        }
    }
}

/// Which bound families to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct BoundSet {
    pub avg: bool,
    pub proj: bool,
    pub lp: bool,
}

impl BoundSet {
    pub const NONE: BoundSet = BoundSet {
        avg: false,
        proj: false,
        lp: false,
    };
    pub const AVG: BoundSet = BoundSet {
        avg: true,
        proj: false,
        lp: false,
    };
    pub const ALL: BoundSet = BoundSet {
        avg: true,
        proj: true,
        lp: true,
    };

    /// All eight subsets, in bit order avg=1, proj=2, lp=4.
    pub fn all_subsets() -> impl Iterator<Item = BoundSet> {
        (0u8..8).map(|bits| BoundSet {
            avg: bits & 1 != 0,
            proj: bits & 2 != 0,
            lp: bits & 4 != 0,
        })
    }

    pub fn is_empty(self) -> bool {
        !(self.avg || self.proj || self.lp)
    }
}

impl fmt::Display for BoundSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = [(self.avg, "avg"), (self.proj, "proj"), (self.lp, "lp")]
            .into_iter()
            .filter_map(|(on, n)| on.then_some(n))
            .collect();
        if names.is_empty() {
            f.write_str("none")
        } else {
            f.write_str(&names.join(","))
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("unknown bound method '{0}': expected a comma list of avg, proj, lp, or none")]
pub struct BoundSetParseError(pub String);

impl FromStr for BoundSet {
    type Err = BoundSetParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut set = BoundSet::NONE;
        if s == "none" {
            return Ok(set);
        }
        for part in s.split(',') {
            match part.trim() {
                "avg" => set.avg = true,
                "proj" => set.proj = true,
                "lp" => set.lp = true,
                other => return Err(BoundSetParseError(other.to_string())),
            }
        }
        Ok(set)
    }
}

/// `max_i p(i)/Σ_j q(i,j)` times the number of units left.
pub fn avg_price_bound(inst: &Instance, sub: &Subproblem) -> BoundReport {
    let best = sub
        .live
        .iter()
        .map(|&i| (inst.bids[i].price as u128, inst.bids[i].total_units()))
        .max_by(|&(p1, u1), &(p2, u2)| (p1 * u2).cmp(&(p2 * u1)));
    let value = match best {
        None => 0.0,
        Some((p, u)) => {
            let units: u128 = sub.residual_caps.iter().map(|&k| k as u128).sum();
            p as f64 * units as f64 / u as f64
        }
    };
    BoundReport::plain(value, BoundMethod::AvgPrice)
}

/// Exact knapsack optimum of the live bids projected onto good `good`.
pub fn projection_bound(
    inst: &Instance,
    sub: &Subproblem,
    good: usize,
) -> Result<BoundReport, BoundSkipped> {
    projection_bound_with_limit(inst, sub, good, KNAPSACK_WORK_LIMIT)
}

pub fn projection_bound_with_limit(
    inst: &Instance,
    sub: &Subproblem,
    good: usize,
    work_limit: u64,
) -> Result<BoundReport, BoundSkipped> {
    let items: Vec<(u64, u64)> = sub
        .live
        .iter()
        .map(|&i| (inst.bids[i].qty[good], inst.bids[i].price))
        .collect();
    let v = knapsack_max(&items, sub.residual_caps[good], work_limit)?;
    Ok(BoundReport::plain(v as f64, BoundMethod::Projection(good)))
}

/// The smallest non-skipped projection bound over all goods.
pub fn min_projection_bound(inst: &Instance, sub: &Subproblem) -> Option<BoundReport> {
    (0..inst.goods())
        .filter_map(|j| projection_bound(inst, sub, j).ok())
        .min_by(|a, b| a.value.total_cmp(&b.value))
}

/// Optimum of the relaxation with `x_i ∈ [0, 1]` over the live bids.
pub fn lp_bound(inst: &Instance, sub: &Subproblem) -> Result<BoundReport, BoundSkipped> {
    let m = sub.live.len();
    if m == 0 {
        return Ok(BoundReport {
            value: 0.0,
            method: BoundMethod::Lp,
            lp_x: Some(Vec::new()),
            lp_integral: Some(true),
            lp_iterations: Some(0),
        });
    }
    // Rows for goods no live bid touches are redundant.
    let goods: Vec<usize> = (0..inst.goods())
        .filter(|&j| sub.live.iter().any(|&i| inst.bids[i].qty[j] > 0))
        .collect();
    let c: Vec<f64> = sub.live.iter().map(|&i| inst.bids[i].price as f64).collect();
    let a: Vec<Vec<f64>> = goods
        .iter()
        .map(|&j| sub.live.iter().map(|&i| inst.bids[i].qty[j] as f64).collect())
        .collect();
    let b: Vec<f64> = goods.iter().map(|&j| sub.residual_caps[j] as f64).collect();
    let upper = vec![1.0; m];
    let limit = simplex::default_iteration_limit(m, goods.len());
    let sol = simplex::maximize(&c, &a, &b, &upper, limit)?;
    let integral = sol
        .x
        .iter()
        .all(|&x| x.abs() <= INTEGRALITY_TOL || (x - 1.0).abs() <= INTEGRALITY_TOL);
    Ok(BoundReport {
        value: sol.value,
        method: BoundMethod::Lp,
        lp_x: Some(sol.x),
        lp_integral: Some(integral),
        lp_iterations: Some(sol.iterations),
    })
}

/// The smallest bound among the enabled, non-skipped methods.
///
/// When nothing produced a value the report is `+∞` with method `Min`.
pub fn best_bound(inst: &Instance, sub: &Subproblem, enabled: BoundSet) -> BoundReport {
    let mut reports = Vec::new();
    if enabled.avg {
        reports.push(avg_price_bound(inst, sub));
    }
    if enabled.proj {
        reports.extend(min_projection_bound(inst, sub));
    }
    if enabled.lp {
        reports.extend(lp_bound(inst, sub).ok());
    }
    // Ties go to the LP so its integrality flag surfaces.
    reports
        .into_iter()
        .min_by(|a, b| {
            a.value
                .total_cmp(&b.value)
                .then_with(|| (b.method == BoundMethod::Lp).cmp(&(a.method == BoundMethod::Lp)))
        })
        .unwrap_or_else(|| BoundReport::plain(f64::INFINITY, BoundMethod::Min))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::e1;
    use crate::model::Bid;

    #[test]
    fn avg_price_examples() {
        let x = e1();
        let r = avg_price_bound(&x, &Subproblem::root(&x));
        assert_eq!(r.value, 9.0);
        assert_eq!(r.method, BoundMethod::AvgPrice);

        let single = Instance::new(vec![2, 1], vec![Bid::new(vec![1, 1], 5)], [], 0).unwrap();
        assert_eq!(avg_price_bound(&single, &Subproblem::root(&single)).value, 7.5);

        let empty = Subproblem {
            residual_caps: vec![2, 1],
            live: vec![],
        };
        assert_eq!(avg_price_bound(&x, &empty).value, 0.0);
    }

    #[test]
    fn projection_examples() {
        let x = e1();
        let root = Subproblem::root(&x);
        assert_eq!(projection_bound(&x, &root, 0).unwrap().value, 10.0);
        assert_eq!(projection_bound(&x, &root, 1).unwrap().value, 13.0);
        let r = min_projection_bound(&x, &root).unwrap();
        assert_eq!((r.value, r.method), (10.0, BoundMethod::Projection(0)));
    }

    #[test]
    fn projection_skips_past_work_limit() {
        let x = e1();
        let r = projection_bound_with_limit(&x, &Subproblem::root(&x), 0, 1);
        assert!(matches!(r, Err(BoundSkipped::KnapsackWork { .. })));
    }

    #[test]
    fn lp_on_e1_is_integral() {
        let x = e1();
        let r = lp_bound(&x, &Subproblem::root(&x)).unwrap();
        assert!((r.value - 9.0).abs() < 1e-9);
        let lp_x = r.lp_x.as_ref().unwrap();
        for (got, want) in lp_x.iter().zip([0.0, 1.0, 0.0, 1.0]) {
            assert!((got - want).abs() < 1e-9, "{lp_x:?}");
        }
        assert_eq!(r.lp_integral, Some(true));
        assert_eq!(r.integral_bids(&Subproblem::root(&x)), Some(vec![1, 3]));
    }

    #[test]
    fn lp_fractional_example() {
        let x = Instance::new(
            vec![2],
            vec![Bid::new(vec![1], 3), Bid::new(vec![2], 4)],
            [],
            0,
        )
        .unwrap();
        let r = lp_bound(&x, &Subproblem::root(&x)).unwrap();
        assert!((r.value - 5.0).abs() < 1e-9);
        let lp_x = r.lp_x.unwrap();
        assert!((lp_x[0] - 1.0).abs() < 1e-9 && (lp_x[1] - 0.5).abs() < 1e-9);
        assert_eq!(r.lp_integral, Some(false));
    }

    #[test]
    fn lp_empty_live_set() {
        let x = e1();
        let sub = Subproblem {
            residual_caps: vec![0, 0],
            live: vec![],
        };
        let r = lp_bound(&x, &sub).unwrap();
        assert_eq!((r.value, r.lp_integral), (0.0, Some(true)));
    }

    #[test]
    fn best_bound_examples() {
        let x = e1();
        let root = Subproblem::root(&x);
        let all = best_bound(&x, &root, BoundSet::ALL);
        assert!((all.value - 9.0).abs() < 1e-9);
        assert_eq!(all.method, BoundMethod::Lp);
        assert_eq!(all.lp_integral, Some(true));

        let proj = best_bound(
            &x,
            &root,
            BoundSet {
                proj: true,
                ..BoundSet::NONE
            },
        );
        assert_eq!(proj.value, 10.0);

        let empty = Subproblem {
            residual_caps: vec![2, 1],
            live: vec![],
        };
        assert_eq!(best_bound(&x, &empty, BoundSet::AVG).value, 0.0);

        let none = best_bound(&x, &root, BoundSet::NONE);
        assert_eq!((none.value, none.method), (f64::INFINITY, BoundMethod::Min));
    }

    #[test]
    fn subproblem_filters_bids_that_do_not_fit() {
        let x = e1();
        let sub = Subproblem::new(&x, vec![1, 1], 0..4);
        assert_eq!(sub.live, vec![0, 2, 3]);
    }

    #[test]
    fn bound_set_names() {
        assert_eq!("avg,proj,lp".parse::<BoundSet>(), Ok(BoundSet::ALL));
        assert_eq!("none".parse::<BoundSet>(), Ok(BoundSet::NONE));
        assert_eq!("avg".parse::<BoundSet>(), Ok(BoundSet::AVG));
        assert!("avg,foo".parse::<BoundSet>().is_err());
        assert_eq!(BoundSet::ALL.to_string(), "avg,proj,lp");
        assert_eq!(BoundSet::NONE.to_string(), "none");
        assert_eq!(BoundSet::all_subsets().count(), 8);
    }
}
