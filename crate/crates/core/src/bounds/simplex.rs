//! Dense bounded-variable primal simplex for
//! `max c·x  s.t.  A x ≤ b,  0 ≤ x ≤ u` with `b ≥ 0`.
//!
//! The all-slack basis is feasible, so there is no phase one. Nonbasic
//! structural variables sit at either bound; a step that reaches the
//! entering variable's opposite bound flips it without a pivot.

use super::BoundSkipped;

const COST_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-9;
const FEAS_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub value: f64,
    /// Pivots plus bound flips.
    pub iterations: usize,
}

/// Default iteration budget for a problem with `vars` columns and `rows` rows.
pub fn default_iteration_limit(vars: usize, rows: usize) -> usize {
    50 * (vars + rows) + 1000
}

struct Tableau {
    vars: usize,
    cols: usize,
    rows: usize,
    /// `B⁻¹ [A I]`, row-major.
    t: Vec<f64>,
    basis: Vec<usize>,
    is_basic: Vec<bool>,
    at_upper: Vec<bool>,
    beta: Vec<f64>,
    /// Reduced costs `c - c_B B⁻¹ [A I]`.
    d: Vec<f64>,
    upper: Vec<f64>,
}

impl Tableau {
    fn entering(&self, bland: bool) -> Option<usize> {
        let mut pick = None;
        let mut best = 0.0;
        for j in 0..self.cols {
            if self.is_basic[j] {
                continue;
            }
            let dj = self.d[j];
            let improving = if self.at_upper[j] {
                dj < -COST_TOL
            } else {
                dj > COST_TOL
            };
            if !improving {
                continue;
            }
            if bland {
                return Some(j);
            }
            if dj.abs() > best {
                best = dj.abs();
                pick = Some(j);
            }
        }
        pick
    }

    fn pivot(&mut self, p: usize, j: usize) {
        let cols = self.cols;
        let piv = self.t[p * cols + j];
        for c in 0..cols {
            self.t[p * cols + c] /= piv;
        }
        let (before, rest) = self.t.split_at_mut(p * cols);
        let (prow, after) = rest.split_at_mut(cols);
        for row in before.chunks_exact_mut(cols).chain(after.chunks_exact_mut(cols)) {
            let f = row[j];
            if f != 0.0 {
                for (x, &pr) in row.iter_mut().zip(prow.iter()) {
                    *x -= f * pr;
                }
                row[j] = 0.0;
            }
        }
        let f = self.d[j];
        if f != 0.0 {
            for (x, &pr) in self.d.iter_mut().zip(prow.iter()) {
                *x -= f * pr;
            }
            self.d[j] = 0.0;
        }
    }
}

/// Solves the LP. `a` is row-major with one row per constraint.
///
/// Dantzig pricing until more than `2 (vars + rows)` consecutive degenerate
/// steps, then Bland's rule for the remainder.
pub fn maximize(
    c: &[f64],
    a: &[Vec<f64>],
    b: &[f64],
    upper: &[f64],
    max_iterations: usize,
) -> Result<LpSolution, BoundSkipped> {
    let vars = c.len();
    let rows = b.len();
    let cols = vars + rows;
    debug_assert_eq!(a.len(), rows);
    debug_assert_eq!(upper.len(), vars);

    let mut t = vec![0.0; rows * cols];
    for (i, row) in a.iter().enumerate() {
        t[i * cols..i * cols + vars].copy_from_slice(row);
        t[i * cols + vars + i] = 1.0;
    }
    let mut d = c.to_vec();
    d.resize(cols, 0.0);
    let mut ub = upper.to_vec();
    ub.resize(cols, f64::INFINITY);
    let mut tab = Tableau {
        vars,
        cols,
        rows,
        t,
        basis: (vars..cols).collect(),
        is_basic: (0..cols).map(|j| j >= vars).collect(),
        at_upper: vec![false; cols],
        beta: b.to_vec(),
        d,
        upper: ub,
    };

    let degeneracy_threshold = 2 * (vars + rows);
    let mut degenerate_run = 0;
    let mut bland = false;
    let mut iterations = 0;

    while let Some(j) = tab.entering(bland) {
        if iterations >= max_iterations {
            return Err(BoundSkipped::PivotLimit {
                limit: max_iterations,
            });
        }
        iterations += 1;
        let dir = if tab.at_upper[j] { -1.0 } else { 1.0 };

        let mut theta = f64::INFINITY;
        for i in 0..tab.rows {
            let alpha = dir * tab.t[i * cols + j];
            let bv = tab.basis[i];
            let lim = if alpha > PIVOT_TOL {
                tab.beta[i].max(0.0) / alpha
            } else if alpha < -PIVOT_TOL && tab.upper[bv].is_finite() {
                (tab.upper[bv] - tab.beta[i]).max(0.0) / -alpha
            } else {
                continue;
            };
            theta = theta.min(lim);
        }

        let flip = tab.upper[j];
        if flip.is_finite() && flip <= theta {
            for i in 0..tab.rows {
                tab.beta[i] -= dir * tab.t[i * cols + j] * flip;
            }
            tab.at_upper[j] = !tab.at_upper[j];
            degenerate_run = 0;
            continue;
        }
        if !theta.is_finite() {
            return Err(BoundSkipped::Numerical);
        }

        // Among rows attaining the minimum ratio: smallest basic index under
        // Bland, largest pivot magnitude otherwise.
        let mut leave: Option<(usize, bool, f64)> = None;
        for i in 0..tab.rows {
            let alpha = dir * tab.t[i * cols + j];
            let bv = tab.basis[i];
            let (lim, to_upper) = if alpha > PIVOT_TOL {
                (tab.beta[i].max(0.0) / alpha, false)
            } else if alpha < -PIVOT_TOL && tab.upper[bv].is_finite() {
                ((tab.upper[bv] - tab.beta[i]).max(0.0) / -alpha, true)
            } else {
                continue;
            };
            if lim > theta + FEAS_TOL {
                continue;
            }
            let better = match leave {
                None => true,
                Some((li, _, la)) => {
                    if bland {
                        bv < tab.basis[li]
                    } else {
                        alpha.abs() > la
                    }
                }
            };
            if better {
                leave = Some((i, to_upper, alpha.abs()));
            }
        }
        let (p, to_upper, _) = leave.ok_or(BoundSkipped::Numerical)?;

        let start = if tab.at_upper[j] { tab.upper[j] } else { 0.0 };
        for i in 0..tab.rows {
            tab.beta[i] -= dir * tab.t[i * cols + j] * theta;
        }
        let leaving = tab.basis[p];
        tab.is_basic[leaving] = false;
        tab.at_upper[leaving] = to_upper;
        tab.basis[p] = j;
        tab.is_basic[j] = true;
        tab.at_upper[j] = false;
        tab.beta[p] = start + dir * theta;
        tab.pivot(p, j);

        if theta <= FEAS_TOL {
            degenerate_run += 1;
            if degenerate_run > degeneracy_threshold {
                bland = true;
            }
        } else {
            degenerate_run = 0;
        }
    }

    let mut x: Vec<f64> = (0..tab.vars)
        .map(|j| if tab.at_upper[j] { tab.upper[j] } else { 0.0 })
        .collect();
    for (i, &bv) in tab.basis.iter().enumerate() {
        if bv < tab.vars {
            x[bv] = tab.beta[i].clamp(0.0, tab.upper[bv]);
        }
    }
    let value = x.iter().zip(c).map(|(xi, ci)| xi * ci).sum();
    Ok(LpSolution {
        x,
        value,
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn solve(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> LpSolution {
        let upper = vec![1.0; c.len()];
        maximize(c, a, b, &upper, 10_000).unwrap()
    }

    #[test]
    fn fractional_knapsack() {
        // caps (2), bids ⟨1,3⟩ ⟨2,4⟩: x = (1, 1/2), value 5
        let s = solve(&[3.0, 4.0], &[vec![1.0, 2.0]], &[2.0]);
        assert!((s.value - 5.0).abs() < 1e-9);
        assert!((s.x[0] - 1.0).abs() < 1e-9);
        assert!((s.x[1] - 0.5).abs() < 1e-9);
    }

    #[test]
    fn upper_bounds_bind() {
        let s = solve(&[1.0, 1.0], &[vec![1.0, 1.0]], &[5.0]);
        assert!((s.value - 2.0).abs() < 1e-12);
        assert_eq!(s.x, vec![1.0, 1.0]);
    }

    #[test]
    fn no_columns() {
        let s = solve(&[], &[vec![]], &[3.0]);
        assert_eq!(s.value, 0.0);
    }

    #[test]
    fn zero_rhs_is_degenerate_but_terminates() {
        let s = solve(
            &[1.0, 2.0, 3.0],
            &[vec![1.0, 1.0, 0.0], vec![0.0, 1.0, 1.0]],
            &[0.0, 0.0],
        );
        assert_eq!(s.value, 0.0);
    }

    #[test]
    fn iteration_limit_skips() {
        let r = maximize(&[3.0, 4.0], &[vec![1.0, 2.0]], &[2.0], &[1.0, 1.0], 0);
        assert_eq!(r, Err(BoundSkipped::PivotLimit { limit: 0 }));
    }
}
