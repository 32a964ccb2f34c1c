//! Dense two-phase simplex over exact rationals with Bland's rule.
//!
//! Problems are given in standard form: maximize `c·x` subject to `A x = b`,
//! `x >= 0`. Rows with a negative right-hand side are negated internally.

use num_traits::{One, Signed, Zero};

use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StandardLp {
    /// Row-major `m × k` constraint matrix.
    pub a: Vec<Vec<Rational>>,
    pub b: Vec<Rational>,
    pub c: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal {
        x: Vec<Rational>,
        value: Rational,
        /// Multipliers `y` with `yᵀA >= c` and `yᵀb = value`.
        duals: Vec<Rational>,
    },
    Infeasible,
    Unbounded,
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    /// Index of the right-hand-side column.
    rhs: usize,
}

impl Tableau {
    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.rows[row][col].clone();
        for v in self.rows[row].iter_mut() {
            *v /= &p;
        }
        let pivot_row = self.rows[row].clone();
        for (r, other) in self.rows.iter_mut().enumerate() {
            if r == row || other[col].is_zero() {
                continue;
            }
            let f = other[col].clone();
            for (v, pv) in other.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
        }
        self.basis[row] = col;
    }

    fn reduced_cost(&self, cost: &[Rational], col: usize) -> Rational {
        let mut r = cost[col].clone();
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            if !row[col].is_zero() && !cost[b].is_zero() {
                r -= &cost[b] * &row[col];
            }
        }
        r
    }

    /// Maximizes `cost` over columns `0..allowed`. Returns false if unbounded.
    fn optimize(&mut self, cost: &[Rational], allowed: usize) -> bool {
        loop {
            // Bland: lowest-index improving column.
            let entering = (0..allowed)
                .filter(|c| !self.basis.contains(c))
                .find(|&c| self.reduced_cost(cost, c).is_positive());
            let Some(col) = entering else {
                return true;
            };
            let mut leave: Option<(usize, Rational)> = None;
            for (r, row) in self.rows.iter().enumerate() {
                if !row[col].is_positive() {
                    continue;
                }
                let ratio = &row[self.rhs] / &row[col];
                let better = match &leave {
                    None => true,
                    Some((lr, best)) => ratio < *best || (ratio == *best && self.basis[r] < self.basis[*lr]),
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
            let Some((row, _)) = leave else {
                return false;
            };
            self.pivot(row, col);
        }
    }
}

pub fn maximize(lp: &StandardLp) -> LpOutcome {
    let m = lp.b.len();
    let k = lp.c.len();
    assert_eq!(lp.a.len(), m, "row count");
    assert!(lp.a.iter().all(|r| r.len() == k), "column count");

    // Columns: k originals, m artificials, rhs.
    let rhs = k + m;
    let mut flipped = vec![false; m];
    let rows: Vec<Vec<Rational>> = (0..m)
        .map(|i| {
            let neg = lp.b[i].is_negative();
            flipped[i] = neg;
            let sign = if neg { -Rational::one() } else { Rational::one() };
            let mut row: Vec<Rational> = lp.a[i].iter().map(|v| v * &sign).collect();
            row.extend((0..m).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            row.push(&lp.b[i] * &sign);
            row
        })
        .collect();
    let mut t = Tableau {
        rows,
        basis: (k..k + m).collect(),
        rhs,
    };

    let mut phase_one = vec![Rational::zero(); k + m];
    for c in phase_one.iter_mut().skip(k) {
        *c = -Rational::one();
    }
    t.optimize(&phase_one, k + m);
    let infeasibility: Rational = t
        .rows
        .iter()
        .zip(&t.basis)
        .filter(|(_, &b)| b >= k)
        .map(|(row, _)| row[rhs].clone())
        .sum();
    if infeasibility.is_positive() {
        return LpOutcome::Infeasible;
    }
    // Drive zero-level artificials out where an original column allows it.
    for r in 0..m {
        if t.basis[r] >= k {
            if let Some(col) = (0..k).find(|&c| !t.rows[r][c].is_zero() && !t.basis.contains(&c)) {
                t.pivot(r, col);
            }
        }
    }

    let mut cost = lp.c.clone();
    cost.extend((0..m).map(|_| Rational::zero()));
    if !t.optimize(&cost, k) {
        return LpOutcome::Unbounded;
    }

    let mut x = vec![Rational::zero(); k];
    for (row, &b) in t.rows.iter().zip(&t.basis) {
        if b < k {
            x[b] = row[rhs].clone();
        }
    }
    let value = x.iter().zip(&lp.c).map(|(xi, ci)| xi * ci).sum();
    // y = c_B B⁻¹; B⁻¹ sits in the artificial columns.
    let duals = (0..m)
        .map(|i| {
            let mut y = Rational::zero();
            for (row, &b) in t.rows.iter().zip(&t.basis) {
                if !cost[b].is_zero() {
                    y += &cost[b] * &row[k + i];
                }
            }
            if flipped[i] {
                -y
            } else {
                y
            }
        })
        .collect();
    LpOutcome::Optimal { x, value, duals }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn lp(a: Vec<Vec<i64>>, b: Vec<i64>, c: Vec<i64>) -> StandardLp {
        StandardLp {
            a: a.into_iter().map(|r| r.into_iter().map(int).collect()).collect(),
            b: b.into_iter().map(int).collect(),
            c: c.into_iter().map(int).collect(),
        }
    }

    #[test]
    fn small_optimum_with_duals() {
        // max 3x + 2y, x + y + s1 = 4, x + 3y + s2 = 6
        let p = lp(vec![vec![1, 1, 1, 0], vec![1, 3, 0, 1]], vec![4, 6], vec![3, 2, 0, 0]);
        let LpOutcome::Optimal { x, value, duals } = maximize(&p) else {
            panic!()
        };
        assert_eq!(value, int(12));
        assert_eq!(x[0], int(4));
        assert_eq!(duals, vec![int(3), int(0)]);
    }

    #[test]
    fn detects_infeasible_and_unbounded() {
        // x + y = -1 with x, y >= 0.
        assert_eq!(
            maximize(&lp(vec![vec![1, 1]], vec![-1], vec![0, 0])),
            LpOutcome::Infeasible
        );
        // max x with x - y = 1.
        assert_eq!(
            maximize(&lp(vec![vec![1, -1]], vec![1], vec![1, 0])),
            LpOutcome::Unbounded
        );
    }

    #[test]
    fn redundant_rows_are_harmless() {
        let p = lp(vec![vec![1, 1], vec![2, 2]], vec![1, 2], vec![1, 2]);
        let LpOutcome::Optimal { value, duals, .. } = maximize(&p) else {
            panic!()
        };
        assert_eq!(value, int(2));
        // Duals certify: yᵀA >= c and yᵀb = value.
        let y_b = &duals[0] * int(1) + &duals[1] * int(2);
        assert_eq!(y_b, int(2));
        assert!(&duals[0] + &duals[1] * int(2) >= int(1));
        assert!(&duals[0] + &duals[1] * int(2) >= int(2));
    }

    #[test]
    fn degenerate_problem_terminates() {
        // Classic cycling example (Beale) in standard form.
        let p = StandardLp {
            a: vec![
                vec![ratio(1, 4), int(-60), ratio(-1, 25), int(9), int(1), int(0), int(0)],
                vec![ratio(1, 2), int(-90), ratio(-1, 50), int(3), int(0), int(1), int(0)],
                vec![int(0), int(0), int(1), int(0), int(0), int(0), int(1)],
            ],
            b: vec![int(0), int(0), int(1)],
            c: vec![ratio(3, 4), int(-150), ratio(1, 50), int(-6), int(0), int(0), int(0)],
        };
        let LpOutcome::Optimal { value, .. } = maximize(&p) else {
            panic!()
        };
        assert_eq!(value, ratio(1, 20));
    }
}
