//! Dense two-phase simplex over exact rationals with Bland's rule.
//!
//! Solves `maximize c.p subject to A p = b, p >= 0`. Sized for the 36-variable
//! nonsignaling LP; no sparsity, no scaling, guaranteed termination.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

type Rat = BigRational;

/// An equality-constrained LP in standard form.
pub struct ExactLp {
    num_vars: usize,
    rows: Vec<Vec<Rat>>,
    rhs: Vec<Rat>,
}

impl ExactLp {
    pub fn new(num_vars: usize) -> Self {
        Self {
            num_vars,
            rows: Vec::new(),
            rhs: Vec::new(),
        }
    }

    /// Adds the constraint `coeffs . p = rhs`.
    pub fn add_equality(&mut self, coeffs: Vec<Rat>, rhs: Rat) {
        assert_eq!(coeffs.len(), self.num_vars);
        if rhs.is_negative() {
            self.rows.push(coeffs.into_iter().map(|c| -c).collect());
            self.rhs.push(-rhs);
        } else {
            self.rows.push(coeffs);
            self.rhs.push(rhs);
        }
    }

    /// Maximizes `objective . p`, returning the optimum and an optimal point.
    pub fn maximize(&self, objective: &[Rat]) -> Result<(Rat, Vec<Rat>)> {
        assert_eq!(objective.len(), self.num_vars);
        let n = self.num_vars;
        let m = self.rows.len();
        let total = n + m; // structural + artificial columns

        // Tableau rows carry the artificial identity block and the rhs.
        let mut t: Vec<Vec<Rat>> = Vec::with_capacity(m);
        for i in 0..m {
            let mut row: Vec<Rat> = Vec::with_capacity(total + 1);
            row.extend(self.rows[i].iter().cloned());
            for k in 0..m {
                row.push(if k == i { Rat::one() } else { Rat::zero() });
            }
            row.push(self.rhs[i].clone());
            t.push(row);
        }
        let mut basis: Vec<usize> = (n..total).collect();
        let mut alive: Vec<bool> = vec![true; m];

        // Phase 1: maximize -sum(artificials). Artificial columns start
        // basic and are barred from re-entering; any point with all
        // artificials at zero stays feasible under that restriction, so the
        // restricted optimum is zero exactly when the LP is feasible.
        let mut cost1: Vec<Rat> = vec![Rat::zero(); total];
        for c in cost1.iter_mut().skip(n) {
            *c = -Rat::one();
        }
        Self::run(&mut t, &mut basis, &cost1, &alive, n)?;
        let residual: Rat = basis
            .iter()
            .zip(t.iter())
            .map(|(&b, row)| {
                if b >= n {
                    row[total].clone()
                } else {
                    Rat::zero()
                }
            })
            .sum();
        if !residual.is_zero() {
            return Err(Error::LpInfeasible(format!(
                "artificial variables sum to {residual} after phase 1"
            )));
        }

        // Drive remaining zero-level artificials out of the basis; rows that
        // cannot pivot are redundant constraints and get disabled.
        for i in 0..m {
            if basis[i] < n {
                continue;
            }
            match (0..n).find(|&j| !t[i][j].is_zero()) {
                Some(j) => Self::pivot(&mut t, &mut basis, i, j),
                None => alive[i] = false,
            }
        }

        // Phase 2 with the real objective.
        let mut cost2: Vec<Rat> = vec![Rat::zero(); total];
        cost2[..n].clone_from_slice(objective);
        Self::run(&mut t, &mut basis, &cost2, &alive, n)?;

        let mut point = vec![Rat::zero(); n];
        for (i, &b) in basis.iter().enumerate() {
            if alive[i] && b < n {
                point[b] = t[i][total].clone();
            }
        }
        let value = objective
            .iter()
            .zip(point.iter())
            .map(|(c, p)| c * p)
            .sum();
        Ok((value, point))
    }

    /// Simplex iterations with Bland's rule until optimality. Only the first
    /// `n_structural` columns may enter the basis.
    fn run(
        t: &mut [Vec<Rat>],
        basis: &mut [usize],
        cost: &[Rat],
        alive: &[bool],
        n_structural: usize,
    ) -> Result<()> {
        let m = t.len();
        if m == 0 {
            return Ok(());
        }
        let total = t[0].len() - 1;
        loop {
            // Entering column: smallest index with positive reduced cost.
            let mut entering = None;
            for j in 0..n_structural {
                if basis.contains(&j) {
                    continue;
                }
                let z: Rat = (0..m)
                    .filter(|&i| alive[i])
                    .map(|i| &cost[basis[i]] * &t[i][j])
                    .sum();
                if cost[j].clone() - z > Rat::zero() {
                    entering = Some(j);
                    break;
                }
            }
            let Some(j) = entering else {
                return Ok(());
            };

            // Leaving row: minimum ratio, ties by smallest basis index.
            let mut leave: Option<usize> = None;
            let mut best_ratio: Option<Rat> = None;
            for i in 0..m {
                if !alive[i] || !t[i][j].is_positive() {
                    continue;
                }
                let ratio = &t[i][total] / &t[i][j];
                let better = match &best_ratio {
                    None => true,
                    Some(r) => ratio < *r || (ratio == *r && basis[i] < basis[leave.unwrap()]),
                };
                if better {
                    best_ratio = Some(ratio);
                    leave = Some(i);
                }
            }
            let Some(i) = leave else {
                return Err(Error::LpInfeasible(
                    "unbounded objective over the feasible region".into(),
                ));
            };
            Self::pivot(t, basis, i, j);
        }
    }

    fn pivot(t: &mut [Vec<Rat>], basis: &mut [usize], row: usize, col: usize) {
        let width = t[row].len();
        let pivot = t[row][col].clone();
        for v in t[row].iter_mut() {
            *v = v.clone() / pivot.clone();
        }
        for i in 0..t.len() {
            if i == row || t[i][col].is_zero() {
                continue;
            }
            let factor = t[i][col].clone();
            for j in 0..width {
                let delta = &factor * &t[row][j];
                t[i][j] = t[i][j].clone() - delta;
            }
        }
        basis[row] = col;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rat {
        Rat::new(n.into(), d.into())
    }

    #[test]
    fn solves_a_tiny_lp_exactly() {
        // max x0 + 2 x1 s.t. x0 + x1 + s = 1 written with explicit slack.
        let mut lp = ExactLp::new(3);
        lp.add_equality(vec![r(1, 1), r(1, 1), r(1, 1)], r(1, 1));
        let (value, point) = lp.maximize(&[r(1, 1), r(2, 1), r(0, 1)]).unwrap();
        assert_eq!(value, r(2, 1));
        assert_eq!(point[1], r(1, 1));
    }

    #[test]
    fn tolerates_redundant_rows() {
        let mut lp = ExactLp::new(2);
        lp.add_equality(vec![r(1, 1), r(1, 1)], r(1, 1));
        lp.add_equality(vec![r(2, 1), r(2, 1)], r(2, 1));
        let (value, _) = lp.maximize(&[r(3, 1), r(1, 1)]).unwrap();
        assert_eq!(value, r(3, 1));
    }

    #[test]
    fn reports_infeasibility() {
        let mut lp = ExactLp::new(1);
        lp.add_equality(vec![r(1, 1)], r(1, 1));
        lp.add_equality(vec![r(1, 1)], r(2, 1));
        assert!(lp.maximize(&[r(1, 1)]).is_err());
    }
}
