//! Exhaustive reference solver.

use thiserror::Error;

use crate::model::{Instance, Solution};

/// Largest bid count [`brute_force`] accepts.
pub const ORACLE_MAX_BIDS: usize = 25;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("brute force refuses {bids} bids (limit {limit})")]
    TooManyBids { bids: usize, limit: usize },
}

/// Enumerates every feasible subset of bids and returns the best one.
///
/// Subsets are visited in lexicographic order of their sorted index lists
/// and only a strictly better value replaces the incumbent, so among
/// optimal sets the lexicographically smallest is returned.
pub fn brute_force(inst: &Instance) -> Result<Solution, OracleError> {
    if inst.len() > ORACLE_MAX_BIDS {
        return Err(OracleError::TooManyBids {
            bids: inst.len(),
            limit: ORACLE_MAX_BIDS,
        });
    }
    let mut e = Enumerator {
        inst,
        residual: inst.caps.clone(),
        chosen: Vec::new(),
        value: 0,
        best: Solution::empty(),
    };
    e.extend(0);
    Ok(e.best)
}

struct Enumerator<'a> {
    inst: &'a Instance,
    residual: Vec<u64>,
    chosen: Vec<usize>,
    value: u64,
    best: Solution,
}

impl Enumerator<'_> {
    fn extend(&mut self, from: usize) {
        let inst = self.inst;
        for i in from..inst.len() {
            let bid = &inst.bids[i];
            if bid.qty.iter().zip(&self.residual).any(|(q, r)| q > r)
                || self.chosen.iter().any(|&c| inst.is_excluded(c, i))
            {
                continue;
            }
            for (r, q) in self.residual.iter_mut().zip(&bid.qty) {
                *r -= q;
            }
            self.chosen.push(i);
            self.value += bid.price;
            if self.value > self.best.value {
                self.best = Solution {
                    chosen: self.chosen.clone(),
                    value: self.value,
                };
            }
            self.extend(i + 1);
            self.value -= bid.price;
            self.chosen.pop();
            for (r, q) in self.residual.iter_mut().zip(&bid.qty) {
                *r += q;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::e1;
    use crate::model::Bid;

    /// Plain bitmask enumeration to cross-check the recursive walk.
    fn by_mask(inst: &Instance) -> Solution {
        let mut best = Solution::empty();
        for mask in 0u32..1 << inst.len() {
            let chosen: Vec<usize> = (0..inst.len()).filter(|i| mask >> i & 1 == 1).collect();
            if !inst.is_feasible(&chosen) {
                continue;
            }
            let value = inst.value_of(&chosen);
            if value > best.value || (value == best.value && chosen < best.chosen) {
                best = Solution { chosen, value };
            }
        }
        best
    }

    #[test]
    fn e1_optimum() {
        let s = brute_force(&e1()).unwrap();
        assert_eq!(s, Solution { chosen: vec![1, 3], value: 9 });
        assert_eq!(s, by_mask(&e1()));
    }

    #[test]
    fn conflicting_pair() {
        let x = Instance::new(vec![1], vec![Bid::new(vec![1], 1), Bid::new(vec![1], 2)], [], 0)
            .unwrap();
        assert_eq!(brute_force(&x).unwrap(), Solution { chosen: vec![1], value: 2 });
    }

    #[test]
    fn triangle_graph() {
        let bids = vec![
            Bid::new(vec![1, 0, 1], 1),
            Bid::new(vec![1, 1, 0], 1),
            Bid::new(vec![0, 1, 1], 1),
        ];
        let x = Instance::new(vec![1, 1, 1], bids, [], 0).unwrap();
        assert_eq!(brute_force(&x).unwrap().value, 1);
    }

    #[test]
    fn lexicographic_tie_break() {
        // {0,1} and {2} are both worth 4
        let x = Instance::new(
            vec![2],
            vec![Bid::new(vec![1], 2), Bid::new(vec![1], 2), Bid::new(vec![2], 4)],
            [],
            0,
        )
        .unwrap();
        assert_eq!(brute_force(&x).unwrap().chosen, vec![0, 1]);
        assert_eq!(brute_force(&x).unwrap(), by_mask(&x));
    }

    #[test]
    fn exclusions() {
        let mut x = e1();
        x.exclusions.insert((1, 3));
        let s = brute_force(&x).unwrap();
        assert_eq!(s, by_mask(&x));
        assert_eq!(s.value, 7);
    }

    #[test]
    fn refuses_large_instances() {
        let bids = (0..26).map(|_| Bid::new(vec![1], 1)).collect();
        let x = Instance::new(vec![30], bids, [], 0).unwrap();
        assert_eq!(
            brute_force(&x),
            Err(OracleError::TooManyBids { bids: 26, limit: 25 })
        );
    }
}
