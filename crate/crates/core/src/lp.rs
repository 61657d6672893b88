//! Exact-rational linear programming: two-phase dense simplex with Bland's rule.
//!
//! Problems are in standard form `min c·x  s.t.  A x = b, x >= 0`. The sizes met
//! here are small (tens of variables), so a dense tableau is adequate.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearProgram {
    pub objective: Vec<Rational>,
    pub constraints: Matrix,
    pub rhs: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpSolution {
    pub optimum: Rational,
    /// A basic feasible solution attaining the optimum.
    pub argmin: Vec<Rational>,
}

impl LinearProgram {
    pub fn new(objective: Vec<Rational>, constraints: Matrix, rhs: Vec<Rational>) -> Result<Self> {
        let n = objective.len();
        if constraints.len() != rhs.len() {
            return Err(Error::DimensionMismatch {
                expected: constraints.len(),
                actual: rhs.len(),
            });
        }
        if let Some(row) = constraints.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: row.len(),
            });
        }
        Ok(Self {
            objective,
            constraints,
            rhs,
        })
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }
}

struct Tableau {
    /// Rows of `B^-1 [A | b]`; the last column is the right-hand side.
    rows: Matrix,
    basis: Vec<usize>,
    /// Reduced costs per column and (last entry) minus the current objective value.
    cost: Vec<Rational>,
    width: usize,
}

enum Step {
    Optimal,
    Unbounded,
    Pivoted,
}

impl Tableau {
    fn rhs(&self, r: usize) -> &Rational {
        &self.rows[r][self.width]
    }

    fn set_objective(&mut self, c: &[Rational]) {
        let mut cost: Vec<Rational> = (0..=self.width)
            .map(|j| if j < c.len() { c[j].clone() } else { Rational::zero() })
            .collect();
        for (r, &b) in self.basis.iter().enumerate() {
            let cb = if b < c.len() { c[b].clone() } else { Rational::zero() };
            if cb.is_zero() {
                continue;
            }
            for (j, v) in self.rows[r].iter().enumerate() {
                if !v.is_zero() {
                    cost[j] -= &cb * v;
                }
            }
        }
        self.cost = cost;
    }

    fn pivot(&mut self, r: usize, col: usize) {
        let inv = Rational::one() / &self.rows[r][col];
        for v in self.rows[r].iter_mut() {
            *v *= &inv;
        }
        let prow = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for (v, p) in row.iter_mut().zip(&prow) {
                if !p.is_zero() {
                    *v -= &f * p;
                }
            }
        }
        if !self.cost[col].is_zero() {
            let f = self.cost[col].clone();
            for (v, p) in self.cost.iter_mut().zip(&prow) {
                if !p.is_zero() {
                    *v -= &f * p;
                }
            }
        }
        self.basis[r] = col;
    }

    /// One Bland's-rule iteration restricted to columns `< allowed`.
    fn step(&mut self, allowed: usize) -> Step {
        let Some(col) = (0..allowed).find(|&j| self.cost[j].is_negative()) else {
            return Step::Optimal;
        };
        let mut best: Option<(usize, Rational)> = None;
        for r in 0..self.rows.len() {
            let a = &self.rows[r][col];
            if !a.is_positive() {
                continue;
            }
            let ratio = self.rhs(r) / a;
            let better = match &best {
                None => true,
                Some((br, bv)) => ratio < *bv || (ratio == *bv && self.basis[r] < self.basis[*br]),
            };
            if better {
                best = Some((r, ratio));
            }
        }
        match best {
            None => Step::Unbounded,
            Some((r, _)) => {
                self.pivot(r, col);
                Step::Pivoted
            }
        }
    }

    fn run(&mut self, allowed: usize) -> Result<()> {
        loop {
            match self.step(allowed) {
                Step::Optimal => return Ok(()),
                Step::Unbounded => return Err(Error::Unbounded),
                Step::Pivoted => {}
            }
        }
    }
}

/// Builds a tableau holding a basic feasible solution of `A x = b, x >= 0` (phase 1).
fn phase_one(lp: &LinearProgram) -> Result<Tableau> {
    let n = lp.num_vars();
    let m = lp.constraints.len();
    let width = n + m;
    let mut rows = Vec::with_capacity(m);
    for (r, (row, b)) in lp.constraints.iter().zip(&lp.rhs).enumerate() {
        let flip = b.is_negative();
        let mut line: Vec<Rational> = row
            .iter()
            .map(|v| if flip { -v.clone() } else { v.clone() })
            .collect();
        line.extend((0..m).map(|k| if k == r { Rational::one() } else { Rational::zero() }));
        line.push(if flip { -b.clone() } else { b.clone() });
        rows.push(line);
    }
    let mut t = Tableau {
        rows,
        basis: (n..n + m).collect(),
        cost: Vec::new(),
        width,
    };
    let phase_cost: Vec<Rational> = (0..width)
        .map(|j| if j >= n { Rational::one() } else { Rational::zero() })
        .collect();
    t.set_objective(&phase_cost);
    t.run(width)?;
    if !t.cost[width].is_zero() {
        return Err(Error::Infeasible);
    }

    // drive artificial variables out of the basis, dropping redundant rows
    let mut r = 0;
    while r < t.rows.len() {
        if t.basis[r] >= n {
            match (0..n).find(|&j| !t.rows[r][j].is_zero()) {
                Some(j) => t.pivot(r, j),
                None => {
                    t.rows.remove(r);
                    t.basis.remove(r);
                    continue;
                }
            }
        }
        r += 1;
    }
    Ok(t)
}

fn extract(t: &Tableau, n: usize) -> Vec<Rational> {
    let mut x = vec![Rational::zero(); n];
    for (r, &b) in t.basis.iter().enumerate() {
        if b < n {
            x[b] = t.rhs(r).clone();
        }
    }
    x
}

/// Minimizes `lp.objective · x` exactly. Errors with [`Error::Infeasible`] or [`Error::Unbounded`].
pub fn solve_lp_min(lp: &LinearProgram) -> Result<LpSolution> {
    let n = lp.num_vars();
    let mut t = phase_one(lp)?;
    t.set_objective(&lp.objective);
    t.run(n)?;
    let argmin = extract(&t, n);
    let optimum = -t.cost[t.width].clone();
    debug_assert_eq!(
        optimum,
        lp.objective
            .iter()
            .zip(&argmin)
            .fold(Rational::zero(), |a, (c, x)| a + c * x)
    );
    Ok(LpSolution { optimum, argmin })
}

/// Any basic feasible point of `A x = b, x >= 0`, or `None` when the system is infeasible.
pub fn feasible_point(constraints: &Matrix, rhs: &[Rational], num_vars: usize) -> Result<Option<Vec<Rational>>> {
    let lp = LinearProgram::new(vec![Rational::zero(); num_vars], constraints.clone(), rhs.to_vec())?;
    match phase_one(&lp) {
        Ok(t) => Ok(Some(extract(&t, num_vars))),
        Err(Error::Infeasible) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Whether `target` is a convex combination of `points` (exact LP feasibility).
pub fn in_convex_hull(points: &[Vec<Rational>], target: &[Rational]) -> Result<bool> {
    if points.is_empty() {
        return Ok(false);
    }
    let k = points.len();
    let mut a: Matrix = (0..target.len())
        .map(|c| points.iter().map(|p| p[c].clone()).collect())
        .collect();
    a.push(vec![Rational::one(); k]);
    let mut b = target.to_vec();
    b.push(Rational::one());
    Ok(feasible_point(&a, &b, k)?.is_some())
}
