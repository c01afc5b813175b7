//! Winner determination for multi-unit combinatorial auctions.
//!
//! Given `k_j` units of each of `n` goods and bids of the form
//! `⟨q_1, …, q_n, p⟩`, find a set of bids that together request no more
//! than the available units and maximizes the total price.
//!
//! * [`search::solve`]: exact depth-first branch and bound.
//! * [`bounds`]: average-price, per-good knapsack projection and LP upper bounds.
//! * [`ordering`]: per-bid ranking criteria and dominated-bid removal.
//! * [`greedy::greedy_allocate`]: one-pass greedy allocation; under
//!   [`ordering::Criterion::SqrtSum`] it is a `√k`-approximation.
//! * [`instances`]: random and adversarial instance generators.
//! * [`oracle::brute_force`]: exhaustive reference solver.
//! * [`bench`]: batch experiments emitting CSV.

pub mod bench;
pub mod bounds;
pub mod fixtures;
pub mod format;
pub mod greedy;
pub mod instances;
pub mod model;
pub mod oracle;
pub mod ordering;
pub mod rng;
pub mod search;

pub use format::{parse_instance, serialize_instance, ParseError};
pub use greedy::{greedy_allocate, GreedyResult};
pub use model::{Bid, Instance, Solution, Violation};
pub use oracle::brute_force;
pub use ordering::{rank_bids, Criterion, Ranking};
pub use search::{solve, SolveConfig, SolveResult};
