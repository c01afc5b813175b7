//! Auction data: commodities with unit capacities, bids over quantity
//! vectors, optional pairwise exclusions, and allocations.

use std::collections::BTreeSet;
use std::fmt;

/// A single bid: `qty[j]` units of every commodity `j` for a total of `price`.
///
/// `price` is an integer count of price units; the owning [`Instance`]
/// carries the decimal scale that turns units into a value.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Bid {
    pub qty: Vec<u64>,
    pub price: u64,
}

impl Bid {
    pub fn new(qty: Vec<u64>, price: u64) -> Self {
        Self { qty, price }
    }

    /// Total number of units requested over all commodities.
    pub fn total_units(&self) -> u128 {
        self.qty.iter().map(|&q| q as u128).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.qty.iter().all(|&q| q == 0)
    }
}

/// A winner-determination problem.
///
/// Prices are exact decimals: a bid's value is `price * 10^-scale`.
/// Exclusions are unordered bid pairs stored as `(low, high)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub caps: Vec<u64>,
    pub bids: Vec<Bid>,
    pub exclusions: BTreeSet<(usize, usize)>,
    pub scale: u32,
}

/// Largest supported price scale; `10^18` still fits in a `u64`.
pub const MAX_SCALE: u32 = 18;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    NoGoods,
    ZeroCapacity { good: usize },
    CapacityOverflow,
    WrongArity { bid: usize, expected: usize, found: usize },
    QuantityExceedsCapacity { bid: usize, good: usize, qty: u64, cap: u64 },
    EmptyBid { bid: usize },
    PriceOverflow,
    ExclusionOutOfRange { pair: (usize, usize) },
    SelfExclusion { bid: usize },
    ScaleTooLarge { scale: u32 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoGoods => write!(f, "instance must have at least one good"),
            Violation::ZeroCapacity { good } => {
                write!(f, "capacity must be ≥ 1 (good {good})")
            }
            Violation::CapacityOverflow => write!(f, "sum of capacities overflows"),
            Violation::WrongArity {
                bid,
                expected,
                found,
            } => write!(
                f,
                "bid {bid} has {found} quantities, expected {expected}"
            ),
            Violation::QuantityExceedsCapacity {
                bid,
                good,
                qty,
                cap,
            } => write!(
                f,
                "quantity exceeds capacity (bid {bid}, good {good}: {qty} > {cap})"
            ),
            Violation::EmptyBid { bid } => write!(f, "empty bid (bid {bid})"),
            Violation::PriceOverflow => write!(f, "sum of prices overflows"),
            Violation::ExclusionOutOfRange { pair } => {
                write!(f, "exclusion ({}, {}) references a missing bid", pair.0, pair.1)
            }
            Violation::SelfExclusion { bid } => {
                write!(f, "exclusion pairs bid {bid} with itself")
            }
            Violation::ScaleTooLarge { scale } => {
                write!(f, "scale {scale} exceeds the maximum of {MAX_SCALE}")
            }
        }
    }
}

impl Instance {
    /// Builds an instance and rejects it unless every invariant holds.
    pub fn new(
        caps: Vec<u64>,
        bids: Vec<Bid>,
        exclusions: impl IntoIterator<Item = (usize, usize)>,
        scale: u32,
    ) -> Result<Self, Vec<Violation>> {
        let inst = Self {
            caps,
            bids,
            exclusions: exclusions
                .into_iter()
                .map(|(a, b)| (a.min(b), a.max(b)))
                .collect(),
            scale,
        };
        let violations = inst.validate();
        if violations.is_empty() {
            Ok(inst)
        } else {
            Err(violations)
        }
    }

    pub fn goods(&self) -> usize {
        self.caps.len()
    }

    pub fn len(&self) -> usize {
        self.bids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bids.is_empty()
    }

    /// Total number of units on sale, `k = Σ k_j`.
    pub fn total_units(&self) -> u128 {
        self.caps.iter().map(|&k| k as u128).sum()
    }

    /// Every invariant violation; empty means the instance is valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let n = self.caps.len();
        if self.scale > MAX_SCALE {
            out.push(Violation::ScaleTooLarge { scale: self.scale });
        }
        if n == 0 {
            out.push(Violation::NoGoods);
        }
        for (good, &k) in self.caps.iter().enumerate() {
            if k == 0 {
                out.push(Violation::ZeroCapacity { good });
            }
        }
        if self
            .caps
            .iter()
            .try_fold(0u64, |acc, &k| acc.checked_add(k))
            .is_none()
        {
            out.push(Violation::CapacityOverflow);
        }
        for (bid, b) in self.bids.iter().enumerate() {
            if b.qty.len() != n {
                out.push(Violation::WrongArity {
                    bid,
                    expected: n,
                    found: b.qty.len(),
                });
                continue;
            }
            for (good, (&qty, &cap)) in b.qty.iter().zip(&self.caps).enumerate() {
                if qty > cap {
                    out.push(Violation::QuantityExceedsCapacity {
                        bid,
                        good,
                        qty,
                        cap,
                    });
                }
            }
            if b.is_empty() {
                out.push(Violation::EmptyBid { bid });
            }
        }
        if self
            .bids
            .iter()
            .try_fold(0u64, |acc, b| acc.checked_add(b.price))
            .is_none()
        {
            out.push(Violation::PriceOverflow);
        }
        for &(a, b) in &self.exclusions {
            if a >= self.bids.len() || b >= self.bids.len() {
                out.push(Violation::ExclusionOutOfRange { pair: (a, b) });
            } else if a == b {
                out.push(Violation::SelfExclusion { bid: a });
            }
        }
        out
    }

    pub fn is_excluded(&self, a: usize, b: usize) -> bool {
        self.exclusions.contains(&(a.min(b), a.max(b)))
    }

    /// Per-bid lists of excluded partners.
    pub fn exclusion_lists(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.bids.len()];
        for &(a, b) in &self.exclusions {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }

    /// Whether two bids cannot both win: they overrun some capacity together
    /// or are an exclusion pair.
    pub fn conflicts(&self, a: usize, b: usize) -> bool {
        let (qa, qb) = (&self.bids[a].qty, &self.bids[b].qty);
        self.is_excluded(a, b)
            || self
                .caps
                .iter()
                .enumerate()
                .any(|(j, &k)| qa[j] as u128 + qb[j] as u128 > k as u128)
    }

    /// Checks capacity and exclusion feasibility of a set of bid indices.
    pub fn is_feasible(&self, chosen: &[usize]) -> bool {
        let mut used = vec![0u128; self.caps.len()];
        for (pos, &i) in chosen.iter().enumerate() {
            let Some(bid) = self.bids.get(i) else {
                return false;
            };
            if chosen[..pos].contains(&i) {
                return false;
            }
            for (u, &q) in used.iter_mut().zip(&bid.qty) {
                *u += q as u128;
            }
            if chosen[..pos].iter().any(|&o| self.is_excluded(o, i)) {
                return false;
            }
        }
        used.iter().zip(&self.caps).all(|(&u, &k)| u <= k as u128)
    }

    /// Exact total price, in units, of a set of bids.
    pub fn value_of(&self, chosen: &[usize]) -> u64 {
        chosen.iter().map(|&i| self.bids[i].price).sum()
    }

    /// A price in units converted to its real value.
    pub fn to_real(&self, units: u64) -> f64 {
        units as f64 / 10f64.powi(self.scale as i32)
    }

    pub fn to_real_f(&self, units: f64) -> f64 {
        units / 10f64.powi(self.scale as i32)
    }

    pub fn price_of(&self, bid: usize) -> f64 {
        self.to_real(self.bids[bid].price)
    }

    /// Renders a unit count as a decimal with exactly `scale` fraction digits.
    pub fn format_price(&self, units: u64) -> String {
        format_decimal(units, self.scale)
    }

    pub fn solution(&self, mut chosen: Vec<usize>) -> Solution {
        chosen.sort_unstable();
        let value = self.value_of(&chosen);
        Solution { chosen, value }
    }
}

/// A set of winning bids with its exact value in price units.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Solution {
    /// Ascending bid indices.
    pub chosen: Vec<usize>,
    pub value: u64,
}

impl Solution {
    pub fn empty() -> Self {
        Self::default()
    }
}

pub(crate) fn format_decimal(units: u64, scale: u32) -> String {
    if scale == 0 {
        return units.to_string();
    }
    let div = 10u64.pow(scale);
    format!(
        "{}.{:0width$}",
        units / div,
        units % div,
        width = scale as usize
    )
}

/// Parses a nonnegative decimal with at most `scale` fraction digits into
/// price units.
pub(crate) fn parse_decimal(text: &str, scale: u32) -> Result<u64, String> {
    let (int_part, frac_part) = match text.split_once('.') {
        Some((i, f)) => (i, f),
        None => (text, ""),
    };
    let digits = |s: &str| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit());
    if text.starts_with('-') {
        return Err(format!("negative price '{text}'"));
    }
    if !digits(int_part) || (text.contains('.') && !digits(frac_part)) {
        return Err(format!("malformed price '{text}'"));
    }
    if frac_part.len() > scale as usize {
        return Err(format!(
            "price '{text}' has more than {scale} fraction digits"
        ));
    }
    let overflow = || format!("price '{text}' overflows");
    let whole: u64 = int_part.parse().map_err(|_| overflow())?;
    let frac: u64 = if frac_part.is_empty() {
        0
    } else {
        frac_part.parse::<u64>().map_err(|_| overflow())?
            * 10u64.pow(scale - frac_part.len() as u32)
    };
    whole
        .checked_mul(10u64.pow(scale))
        .and_then(|w| w.checked_add(frac))
        .ok_or_else(overflow)
}
