//! A small exact simplex method: `max c·x` subject to `A x = b`, `x >= 0`.
//!
//! Two phases with Bland's rule, so it terminates on degenerate problems.
//! Sized for envelopes of point clouds: a handful of rows, many columns.

use num_traits::{One, Signed, Zero};

use crate::rat::Rat;

struct Tableau {
    /// `rows x (cols + 1)`, right-hand side last.
    t: Vec<Vec<Rat>>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let inv = Rat::one() / &self.t[r][c];
        for x in self.t[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = self.t[r].clone();
        for (i, row) in self.t.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *x -= &f * p;
                }
            }
        }
        self.basis[r] = c;
    }

    fn objective(&self, cost: &[Rat]) -> Rat {
        self.basis
            .iter()
            .zip(&self.t)
            .map(|(&j, row)| &cost[j] * &row[self.cols])
            .sum()
    }

    /// Maximize `cost` over columns where `allowed` holds. `false` when unbounded.
    fn run(&mut self, cost: &[Rat], allowed: &dyn Fn(usize) -> bool) -> bool {
        loop {
            let entering = (0..self.cols).filter(|&j| allowed(j)).find(|&j| {
                let reduced: Rat = &cost[j]
                    - self
                        .basis
                        .iter()
                        .zip(&self.t)
                        .map(|(&b, row)| &cost[b] * &row[j])
                        .sum::<Rat>();
                reduced.is_positive()
            });
            let Some(c) = entering else {
                return true;
            };
            let leaving = (0..self.t.len())
                .filter(|&i| self.t[i][c].is_positive())
                .map(|i| (&self.t[i][self.cols] / &self.t[i][c], self.basis[i], i))
                .min();
            let Some((_, _, r)) = leaving else {
                return false;
            };
            self.pivot(r, c);
        }
    }
}

/// `max c·x` over `{x >= 0 : A x = b}`; `None` when infeasible.
/// Panics on unbounded problems, which callers rule out by construction.
pub(crate) fn maximize(a: &[Vec<Rat>], b: &[Rat], c: &[Rat]) -> Option<Rat> {
    let m = a.len();
    let n = c.len();
    let mut t = Vec::with_capacity(m);
    for (row, rhs) in a.iter().zip(b) {
        let flip = rhs.is_negative();
        let sign = |x: &Rat| if flip { -x } else { x.clone() };
        let mut r: Vec<Rat> = row.iter().map(sign).collect();
        r.extend((0..m).map(|_| Rat::zero()));
        r.push(sign(rhs));
        t.push(r);
    }
    for (i, row) in t.iter_mut().enumerate() {
        row[n + i] = Rat::one();
    }
    let mut tab = Tableau {
        t,
        basis: (n..n + m).collect(),
        cols: n + m,
    };
    let phase1: Vec<Rat> = (0..n + m)
        .map(|j| if j < n { Rat::zero() } else { -Rat::one() })
        .collect();
    tab.run(&phase1, &|_| true);
    if !tab.objective(&phase1).is_zero() {
        return None;
    }
    // Move remaining artificial variables out of the basis where possible.
    for i in 0..m {
        if tab.basis[i] >= n {
            if let Some(j) = (0..n).find(|&j| !tab.t[i][j].is_zero()) {
                tab.pivot(i, j);
            }
        }
    }
    let cost: Vec<Rat> = c
        .iter()
        .cloned()
        .chain((0..m).map(|_| Rat::zero()))
        .collect();
    assert!(tab.run(&cost, &|j| j < n), "unbounded linear program");
    Some(tab.objective(&cost))
}
