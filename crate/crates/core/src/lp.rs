//! Dense two-phase simplex over exact rationals with Bland's anti-cycling
//! rule. Meant for small problems; every pivot is exact.

use num_traits::{One, Signed, Zero};

use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone)]
pub struct Constraint {
    pub coefficients: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

/// minimize `objective . x` subject to the constraints and `x >= 0`.
#[derive(Debug, Clone, Default)]
pub struct LinearProgram {
    pub objective: Vec<Rational>,
    pub constraints: Vec<Constraint>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal { value: Rational, x: Vec<Rational> },
    Infeasible,
    Unbounded,
}

impl LinearProgram {
    pub fn minimize(objective: Vec<Rational>) -> Self {
        LinearProgram { objective, constraints: Vec::new() }
    }

    pub fn subject_to(mut self, coefficients: Vec<Rational>, relation: Relation, rhs: Rational) -> Self {
        self.constraints.push(Constraint { coefficients, relation, rhs });
        self
    }

    pub fn solve(&self) -> LpOutcome {
        Tableau::build(self).run(&self.objective)
    }
}

struct Tableau {
    /// constraint rows; last entry is the right-hand side
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    n_orig: usize,
    /// first artificial column
    art_start: usize,
    n_cols: usize,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Self {
        let n_orig = lp.objective.len();
        let n_slack = lp
            .constraints
            .iter()
            .filter(|c| c.relation != Relation::Eq)
            .count();
        let m = lp.constraints.len();
        let art_start = n_orig + n_slack;
        let n_cols = art_start + m;

        let mut rows = Vec::with_capacity(m);
        let mut slack = n_orig;
        for (i, c) in lp.constraints.iter().enumerate() {
            assert_eq!(c.coefficients.len(), n_orig, "constraint {i} has the wrong width");
            let mut row = vec![Rational::zero(); n_cols + 1];
            row[..n_orig].clone_from_slice(&c.coefficients);
            match c.relation {
                Relation::Le => {
                    row[slack] = Rational::one();
                    slack += 1;
                }
                Relation::Ge => {
                    row[slack] = -Rational::one();
                    slack += 1;
                }
                Relation::Eq => {}
            }
            row[n_cols] = c.rhs.clone();
            if row[n_cols].is_negative() {
                for x in row.iter_mut() {
                    *x = -x.clone();
                }
            }
            row[art_start + i] = Rational::one();
            rows.push(row);
        }
        let basis = (0..m).map(|i| art_start + i).collect();
        Tableau { rows, basis, n_orig, art_start, n_cols }
    }

    fn pivot(&mut self, r: usize, col: usize, obj: &mut [Rational]) {
        let inv = Rational::one() / &self.rows[r][col];
        for x in self.rows[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r && !row[col].is_zero() {
                let f = row[col].clone();
                for (x, p) in row.iter_mut().zip(&pivot_row) {
                    *x -= &f * p;
                }
            }
        }
        if !obj[col].is_zero() {
            let f = obj[col].clone();
            for (x, p) in obj.iter_mut().zip(&pivot_row) {
                *x -= &f * p;
            }
        }
        self.basis[r] = col;
    }

    /// Reduced-cost row for costs `c` (length n_cols) under the current basis;
    /// the last entry holds minus the objective value.
    fn objective_row(&self, c: &[Rational]) -> Vec<Rational> {
        let mut obj: Vec<Rational> = c.to_vec();
        obj.push(Rational::zero());
        for (i, row) in self.rows.iter().enumerate() {
            let cb = &c[self.basis[i]];
            if cb.is_zero() {
                continue;
            }
            for (x, a) in obj.iter_mut().zip(row) {
                *x -= cb * a;
            }
        }
        obj
    }

    /// Bland's rule iterations; columns at or beyond `allowed` never enter.
    /// Returns false when unbounded.
    fn iterate(&mut self, obj: &mut [Rational], allowed: usize) -> bool {
        loop {
            let Some(col) = (0..allowed).find(|&j| obj[j].is_negative()) else {
                return true;
            };
            let mut best: Option<(usize, Rational)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if !row[col].is_positive() {
                    continue;
                }
                let ratio = &row[self.n_cols] / &row[col];
                let better = match &best {
                    None => true,
                    Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            let Some((r, _)) = best else {
                return false;
            };
            self.pivot(r, col, obj);
        }
    }

    fn run(mut self, objective: &[Rational]) -> LpOutcome {
        // phase one: minimize the sum of artificials
        let mut c1 = vec![Rational::zero(); self.n_cols];
        for c in c1.iter_mut().skip(self.art_start) {
            *c = Rational::one();
        }
        let mut obj = self.objective_row(&c1);
        self.iterate(&mut obj, self.n_cols);
        if !obj[self.n_cols].is_zero() {
            return LpOutcome::Infeasible;
        }

        // drive zero-level artificials out of the basis, dropping redundant rows
        let mut r = 0;
        while r < self.rows.len() {
            if self.basis[r] < self.art_start {
                r += 1;
                continue;
            }
            match (0..self.art_start).find(|&j| !self.rows[r][j].is_zero()) {
                Some(col) => {
                    self.pivot(r, col, &mut obj);
                    r += 1;
                }
                None => {
                    self.rows.remove(r);
                    self.basis.remove(r);
                }
            }
        }

        let mut c2 = vec![Rational::zero(); self.n_cols];
        c2[..self.n_orig].clone_from_slice(objective);
        let mut obj = self.objective_row(&c2);
        if !self.iterate(&mut obj, self.art_start) {
            return LpOutcome::Unbounded;
        }

        let mut x = vec![Rational::zero(); self.n_orig];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < self.n_orig {
                x[b] = self.rows[i][self.n_cols].clone();
            }
        }
        let value = -obj[self.n_cols].clone();
        LpOutcome::Optimal { value, x }
    }
}
