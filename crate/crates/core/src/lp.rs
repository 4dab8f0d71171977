//! A small exact linear-programming solver: dense two-phase simplex over the
//! rationals with Bland's anti-cycling rule.

use num_traits::{Signed, Zero};

use crate::rational::{q, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub coeffs: Vec<Q>,
    pub relation: Relation,
    pub rhs: Q,
}

impl Constraint {
    pub fn new(coeffs: Vec<Q>, relation: Relation, rhs: Q) -> Self {
        Self {
            coeffs,
            relation,
            rhs,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal { value: Q, x: Vec<Q> },
    Infeasible,
    Unbounded,
}

struct Tableau {
    rows: Vec<Vec<Q>>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> &Q {
        &self.rows[i][self.cols]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.rows[r][c].recip();
        for x in self.rows[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    if !y.is_zero() {
                        *x -= &f * y;
                    }
                }
            }
        }
        self.basis[r] = c;
    }

    /// Maximizes `cost · x` over the columns allowed by `allowed`.
    /// Returns `false` when unbounded.
    fn optimize(&mut self, cost: &[Q], allowed: &dyn Fn(usize) -> bool) -> bool {
        loop {
            let entering = (0..self.cols).filter(|&j| allowed(j)).find(|&j| {
                let z: Q = self
                    .rows
                    .iter()
                    .zip(&self.basis)
                    .map(|(row, &b)| &cost[b] * &row[j])
                    .sum();
                &cost[j] - z > Q::zero()
            });
            let Some(c) = entering else { return true };
            let mut best: Option<(usize, Q)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][c];
                if a.is_positive() {
                    let ratio = self.rhs(i) / a;
                    let better = match &best {
                        None => true,
                        Some((bi, br)) => {
                            ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi])
                        }
                    };
                    if better {
                        best = Some((i, ratio));
                    }
                }
            }
            let Some((r, _)) = best else { return false };
            self.pivot(r, c);
        }
    }
}

/// Maximizes `objective · x` subject to the constraints and `x ≥ 0`.
pub fn maximize(objective: &[Q], constraints: &[Constraint]) -> LpOutcome {
    let n = objective.len();
    let rows = constraints.len();
    let slack_count = constraints
        .iter()
        .filter(|c| c.relation != Relation::Eq)
        .count();
    // normalized constraints have rhs ≥ 0; record which need an artificial
    let mut normalized = Vec::with_capacity(rows);
    for c in constraints {
        assert_eq!(c.coeffs.len(), n, "constraint width");
        let flip = c.rhs.is_negative();
        let sign = if flip { q(-1) } else { q(1) };
        let relation = match (c.relation, flip) {
            (Relation::Le, true) => Relation::Ge,
            (Relation::Ge, true) => Relation::Le,
            (r, _) => r,
        };
        normalized.push((
            c.coeffs.iter().map(|x| x * &sign).collect::<Vec<_>>(),
            c.relation,
            relation,
            &c.rhs * &sign,
        ));
    }
    let art_count = normalized
        .iter()
        .filter(|(_, _, rel, _)| *rel != Relation::Le)
        .count();
    let cols = n + slack_count + art_count;
    let mut t = Tableau {
        rows: Vec::with_capacity(rows),
        basis: Vec::with_capacity(rows),
        cols,
    };
    let (mut slack, mut art) = (n, n + slack_count);
    for (coeffs, original, rel, rhs) in normalized {
        let mut row = vec![Q::zero(); cols + 1];
        row[..n].clone_from_slice(&coeffs);
        row[cols] = rhs;
        if original != Relation::Eq {
            // the slack sign flips together with the row
            row[slack] = if rel == Relation::Le { q(1) } else { q(-1) };
            if rel == Relation::Le {
                t.basis.push(slack);
            }
            slack += 1;
        }
        if rel != Relation::Le {
            row[art] = q(1);
            t.basis.push(art);
            art += 1;
        }
        t.rows.push(row);
    }

    let first_art = n + slack_count;
    if art_count > 0 {
        let cost: Vec<Q> = (0..cols)
            .map(|j| if j >= first_art { q(-1) } else { Q::zero() })
            .collect();
        t.optimize(&cost, &|_| true);
        let infeasible = t
            .basis
            .iter()
            .enumerate()
            .any(|(i, &b)| b >= first_art && !t.rhs(i).is_zero());
        if infeasible {
            return LpOutcome::Infeasible;
        }
        // drive zero-valued artificials out of the basis
        let mut i = 0;
        while i < t.rows.len() {
            if t.basis[i] >= first_art {
                match (0..first_art).find(|&j| !t.rows[i][j].is_zero()) {
                    Some(j) => t.pivot(i, j),
                    None => {
                        t.rows.remove(i);
                        t.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
    }

    let mut cost = vec![Q::zero(); cols];
    cost[..n].clone_from_slice(objective);
    if !t.optimize(&cost, &|j| j < first_art) {
        return LpOutcome::Unbounded;
    }
    let mut x = vec![Q::zero(); n];
    for (i, &b) in t.basis.iter().enumerate() {
        if b < n {
            x[b] = t.rhs(i).clone();
        }
    }
    let value = x.iter().zip(objective).map(|(a, b)| a * b).sum();
    LpOutcome::Optimal { value, x }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;

    fn qs(xs: &[i64]) -> Vec<Q> {
        xs.iter().map(|&x| q(x)).collect()
    }

    #[test]
    fn textbook_problem() {
        // max 3x + 5y, x ≤ 4, 2y ≤ 12, 3x + 2y ≤ 18 → 36 at (2, 6)
        let cons = vec![
            Constraint::new(qs(&[1, 0]), Relation::Le, q(4)),
            Constraint::new(qs(&[0, 2]), Relation::Le, q(12)),
            Constraint::new(qs(&[3, 2]), Relation::Le, q(18)),
        ];
        assert_eq!(
            maximize(&qs(&[3, 5]), &cons),
            LpOutcome::Optimal { value: q(36), x: qs(&[2, 6]) }
        );
    }

    #[test]
    fn phase_one_and_equalities() {
        // max x + y, x + y = 1, x ≥ 1/3, y ≥ 1/4 → 1
        let cons = vec![
            Constraint::new(qs(&[1, 1]), Relation::Eq, q(1)),
            Constraint::new(qs(&[1, 0]), Relation::Ge, frac(1, 3)),
            Constraint::new(qs(&[0, 1]), Relation::Ge, frac(1, 4)),
        ];
        match maximize(&qs(&[1, 1]), &cons) {
            LpOutcome::Optimal { value, x } => {
                assert_eq!(value, q(1));
                assert!(x[0] >= frac(1, 3) && x[1] >= frac(1, 4));
            }
            other => panic!("{other:?}"),
        }
        // min x via max -x with -x ≤ -2 (x ≥ 2)
        let cons = vec![Constraint::new(qs(&[-1]), Relation::Le, q(-2))];
        assert_eq!(
            maximize(&qs(&[-1]), &cons),
            LpOutcome::Optimal { value: q(-2), x: qs(&[2]) }
        );
    }

    #[test]
    fn infeasible_and_unbounded() {
        let cons = vec![
            Constraint::new(qs(&[1]), Relation::Le, q(1)),
            Constraint::new(qs(&[1]), Relation::Ge, q(2)),
        ];
        assert_eq!(maximize(&qs(&[1]), &cons), LpOutcome::Infeasible);
        let cons = vec![Constraint::new(qs(&[1, -1]), Relation::Le, q(1))];
        assert_eq!(maximize(&qs(&[1, 0]), &cons), LpOutcome::Unbounded);
    }

    #[test]
    fn degenerate_cycling_example() {
        // Beale's example cycles under the textbook rule; Bland's rule terminates.
        let cons = vec![
            Constraint::new(vec![frac(1, 4), q(-60), frac(-1, 25), q(9)], Relation::Le, q(0)),
            Constraint::new(vec![frac(1, 2), q(-90), frac(-1, 50), q(3)], Relation::Le, q(0)),
            Constraint::new(qs(&[0, 0, 1, 0]), Relation::Le, q(1)),
        ];
        let obj = vec![frac(3, 4), q(-150), frac(1, 50), q(-6)];
        match maximize(&obj, &cons) {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, frac(1, 20)),
            other => panic!("{other:?}"),
        }
    }
}
