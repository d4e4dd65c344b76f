//! Dense linear programming: maximize `c . x` subject to `A x {<=,=,>=} b`
//! and `x >= 0`, solved with a two-phase revised primal simplex.
//!
//! The solver keeps an explicit basis inverse, prices with Dantzig's rule,
//! and falls back to Bland's rule once it sees `2 * (rows + columns)`
//! consecutive degenerate pivots, which rules out cycling. The basis inverse
//! is refactorized from scratch periodically and at every phase transition,
//! so round-off cannot accumulate across many pivots. Everything is
//! deterministic: equal inputs take equal pivot sequences.
//!
//! The shape this crate cares about is a few rows against very many columns
//! (posterior-grid programs), which the revised form handles in
//! `O(rows^2 + rows * columns)` per iteration.

use thiserror::Error;

use crate::scalar::{lit, Scalar};

/// Reduced costs and pivot candidates below this are treated as zero.
pub const PIVOT_TOL: f64 = 1e-9;
/// Feasibility slack allowed in the final solution and in phase-1 cleanup.
pub const FEAS_TOL: f64 = 1e-7;

const REFACTOR_EVERY: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint<T> {
    pub coeffs: Vec<T>,
    pub relation: Relation,
    pub rhs: T,
}

/// A linear program in the fixed orientation `maximize c . x`, `x >= 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram<T> {
    objective: Vec<T>,
    constraints: Vec<Constraint<T>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Solver result. `x` and `value` are meaningful only when `status` is
/// `Optimal`; otherwise `x` is empty and `value` is 0.
#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution<T> {
    pub status: LpStatus,
    pub x: Vec<T>,
    pub value: T,
}

#[derive(Debug, Error, PartialEq)]
pub enum LpError {
    #[error("program has no variables")]
    EmptyProgram,
    #[error("constraint {row} has {got} coefficients for {vars} variables")]
    ShapeMismatch { row: usize, vars: usize, got: usize },
    #[error("non-finite coefficient in the program")]
    NonFinite,
    #[error("pivot limit reached after {iterations} iterations")]
    IterationLimit { iterations: usize },
    #[error("basis became numerically singular")]
    SingularBasis,
    #[error("claimed optimum violates a constraint by {residual}")]
    ResidualCheck { residual: f64 },
}

impl<T: Scalar> LinearProgram<T> {
    pub fn maximize(objective: Vec<T>) -> Self {
        LinearProgram {
            objective,
            constraints: Vec::new(),
        }
    }

    pub fn constrain(&mut self, coeffs: Vec<T>, relation: Relation, rhs: T) {
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn solve(&self) -> Result<LpSolution<T>, LpError> {
        let n = self.num_vars();
        if n == 0 {
            return Err(LpError::EmptyProgram);
        }
        if !self.objective.iter().all(|c| c.is_finite()) {
            return Err(LpError::NonFinite);
        }
        for (i, c) in self.constraints.iter().enumerate() {
            if c.coeffs.len() != n {
                return Err(LpError::ShapeMismatch {
                    row: i,
                    vars: n,
                    got: c.coeffs.len(),
                });
            }
            if !c.rhs.is_finite() || !c.coeffs.iter().all(|a| a.is_finite()) {
                return Err(LpError::NonFinite);
            }
        }
        Tableau::build(self).solve(self)
    }
}

/// Revised-simplex working state over the standard-form program.
struct Tableau<T> {
    m: usize,
    /// Column-major constraint matrix including slack and artificial columns.
    cols: Vec<Vec<T>>,
    b: Vec<T>,
    /// Phase-2 objective per column (zero on slack and artificial columns).
    cost: Vec<T>,
    /// First artificial column; pricing never scans past this.
    n_struct: usize,
    basis: Vec<usize>,
    in_basis: Vec<bool>,
    binv: Vec<Vec<T>>,
    xb: Vec<T>,
    pivots_since_refactor: usize,
}

enum Step {
    Optimal,
    Unbounded,
}

impl<T: Scalar> Tableau<T> {
    fn build(lp: &LinearProgram<T>) -> Self {
        let n = lp.num_vars();
        let m = lp.num_constraints();

        // Orient every row so its right-hand side is non-negative, then give
        // each row a slack (<=), a surplus (>=), or nothing (=).
        let mut cols: Vec<Vec<T>> = (0..n)
            .map(|j| lp.constraints.iter().map(|c| c.coeffs[j]).collect())
            .collect();
        let mut b = Vec::with_capacity(m);
        let mut relations = Vec::with_capacity(m);
        for (i, c) in lp.constraints.iter().enumerate() {
            if c.rhs < T::zero() {
                for col in cols.iter_mut() {
                    col[i] = -col[i];
                }
                b.push(-c.rhs);
                relations.push(match c.relation {
                    Relation::Le => Relation::Ge,
                    Relation::Ge => Relation::Le,
                    Relation::Eq => Relation::Eq,
                });
            } else {
                b.push(c.rhs);
                relations.push(c.relation);
            }
        }

        let mut cost: Vec<T> = lp.objective.clone();
        let mut basis = vec![usize::MAX; m];
        for (i, rel) in relations.iter().enumerate() {
            match rel {
                Relation::Le | Relation::Ge => {
                    let sign = if *rel == Relation::Le { T::one() } else { -T::one() };
                    let mut col = vec![T::zero(); m];
                    col[i] = sign;
                    if *rel == Relation::Le {
                        basis[i] = cols.len();
                    }
                    cols.push(col);
                    cost.push(T::zero());
                }
                Relation::Eq => {}
            }
        }
        let n_struct = cols.len();
        for (i, slot) in basis.iter_mut().enumerate() {
            if *slot == usize::MAX {
                let mut col = vec![T::zero(); m];
                col[i] = T::one();
                *slot = cols.len();
                cols.push(col);
                cost.push(T::zero());
            }
        }

        let mut in_basis = vec![false; cols.len()];
        for &j in &basis {
            in_basis[j] = true;
        }
        let binv = identity(m);
        let xb = b.clone();
        Tableau {
            m,
            cols,
            b,
            cost,
            n_struct,
            basis,
            in_basis,
            binv,
            xb,
            pivots_since_refactor: 0,
        }
    }

    fn solve(mut self, lp: &LinearProgram<T>) -> Result<LpSolution<T>, LpError> {
        if self.cols.len() > self.n_struct {
            // Phase 1: drive the artificial variables to zero.
            let phase1: Vec<T> = (0..self.cols.len())
                .map(|j| {
                    if j >= self.n_struct {
                        -T::one()
                    } else {
                        T::zero()
                    }
                })
                .collect();
            match self.run(&phase1)? {
                // The phase-1 objective is bounded above by zero, so an
                // unbounded ray can only mean the arithmetic broke down.
                Step::Unbounded => return Err(LpError::SingularBasis),
                Step::Optimal => {}
            }
            let infeas: T = (0..self.m)
                .filter(|&i| self.basis[i] >= self.n_struct)
                .map(|i| self.xb[i])
                .sum();
            if infeas > lit(FEAS_TOL) {
                return Ok(LpSolution {
                    status: LpStatus::Infeasible,
                    x: Vec::new(),
                    value: T::zero(),
                });
            }
            self.evict_artificials()?;
            self.refactor()?;
        }

        let phase2 = self.cost.clone();
        match self.run(&phase2)? {
            Step::Unbounded => {
                return Ok(LpSolution {
                    status: LpStatus::Unbounded,
                    x: Vec::new(),
                    value: T::zero(),
                })
            }
            Step::Optimal => {}
        }

        let mut x = vec![T::zero(); lp.num_vars()];
        for i in 0..self.m {
            if self.basis[i] < lp.num_vars() {
                x[self.basis[i]] = self.xb[i].max(T::zero());
            }
        }
        let mut value = T::zero();
        for (c, xi) in lp.objective.iter().zip(&x) {
            value = value + *c * *xi;
        }
        check_residuals(lp, &x)?;
        Ok(LpSolution {
            status: LpStatus::Optimal,
            x,
            value,
        })
    }

    /// Iterates to optimality (or unboundedness) for the given column costs.
    fn run(&mut self, cost: &[T]) -> Result<Step, LpError> {
        let pivot_tol = lit::<T>(PIVOT_TOL);
        let degen_tol = lit::<T>(1e-12);
        let switch_after = 2 * (self.m + self.cols.len());
        let max_iters = 10_000 + 400 * (self.m + 1);
        let mut bland = false;
        let mut degenerate_run = 0usize;

        for iteration in 0.. {
            if iteration >= max_iters {
                return Err(LpError::IterationLimit {
                    iterations: iteration,
                });
            }

            // Pricing: reduced cost of column j is cost[j] - y . col_j where
            // y = cost_B . binv.
            let mut y = vec![T::zero(); self.m];
            for i in 0..self.m {
                let cb = cost[self.basis[i]];
                if cb != T::zero() {
                    for k in 0..self.m {
                        y[k] = y[k] + cb * self.binv[i][k];
                    }
                }
            }
            let mut entering = None;
            let mut best_rc = pivot_tol;
            for j in 0..self.n_struct {
                if self.in_basis[j] {
                    continue;
                }
                let mut rc = cost[j];
                for (yi, aij) in y.iter().zip(&self.cols[j]) {
                    rc = rc - *yi * *aij;
                }
                if rc > best_rc {
                    entering = Some(j);
                    if bland {
                        break;
                    }
                    best_rc = rc;
                }
            }
            let Some(e) = entering else {
                return Ok(Step::Optimal);
            };

            let w = self.apply_binv(&self.cols[e]);
            let mut leave = None;
            let mut best_ratio = T::infinity();
            for i in 0..self.m {
                if w[i] > pivot_tol {
                    let ratio = self.xb[i].max(T::zero()) / w[i];
                    let better = match leave {
                        None => true,
                        Some(l) => {
                            let tie = (ratio - best_ratio).abs() <= degen_tol;
                            if tie && bland {
                                self.basis[i] < self.basis[l]
                            } else {
                                ratio < best_ratio - degen_tol
                            }
                        }
                    };
                    if better {
                        leave = Some(i);
                        best_ratio = ratio;
                    }
                }
            }
            let Some(l) = leave else {
                return Ok(Step::Unbounded);
            };

            if best_ratio <= degen_tol {
                degenerate_run += 1;
                if degenerate_run > switch_after {
                    bland = true;
                }
            } else {
                degenerate_run = 0;
            }

            self.pivot(l, e, &w)?;
        }
        unreachable!()
    }

    fn pivot(&mut self, l: usize, e: usize, w: &[T]) -> Result<(), LpError> {
        let piv = w[l];
        if piv.abs() < lit(1e-11) {
            return Err(LpError::SingularBasis);
        }
        let inv = T::one() / piv;
        for k in 0..self.m {
            self.binv[l][k] = self.binv[l][k] * inv;
        }
        self.xb[l] = self.xb[l] * inv;
        for i in 0..self.m {
            if i != l && w[i] != T::zero() {
                let f = w[i];
                for k in 0..self.m {
                    self.binv[i][k] = self.binv[i][k] - f * self.binv[l][k];
                }
                self.xb[i] = self.xb[i] - f * self.xb[l];
            }
        }
        self.in_basis[self.basis[l]] = false;
        self.in_basis[e] = true;
        self.basis[l] = e;

        self.pivots_since_refactor += 1;
        if self.pivots_since_refactor >= REFACTOR_EVERY {
            self.refactor()?;
        }
        Ok(())
    }

    /// Replaces basic artificials with structural columns where possible and
    /// deletes the rows where it is not (those rows are linearly dependent).
    fn evict_artificials(&mut self) -> Result<(), LpError> {
        let pivot_tol = lit::<T>(PIVOT_TOL);
        let mut dead_rows = Vec::new();
        for i in 0..self.m {
            if self.basis[i] < self.n_struct {
                continue;
            }
            let mut replacement = None;
            for j in 0..self.n_struct {
                if self.in_basis[j] {
                    continue;
                }
                let mut wi = T::zero();
                for (bik, ak) in self.binv[i].iter().zip(&self.cols[j]) {
                    wi = wi + *bik * *ak;
                }
                if wi.abs() > pivot_tol {
                    replacement = Some(j);
                    break;
                }
            }
            match replacement {
                Some(j) => {
                    let w = self.apply_binv(&self.cols[j]);
                    self.pivot(i, j, &w)?;
                }
                None => dead_rows.push(i),
            }
        }

        if !dead_rows.is_empty() {
            let keep: Vec<usize> = (0..self.m).filter(|i| !dead_rows.contains(i)).collect();
            for col in self.cols.iter_mut() {
                *col = keep.iter().map(|&i| col[i]).collect();
            }
            self.b = keep.iter().map(|&i| self.b[i]).collect();
            self.basis = keep.iter().map(|&i| self.basis[i]).collect();
            self.m = keep.len();
        }
        self.cols.truncate(self.n_struct);
        self.cost.truncate(self.n_struct);
        self.in_basis = vec![false; self.n_struct];
        for &j in &self.basis {
            self.in_basis[j] = true;
        }
        Ok(())
    }

    fn apply_binv(&self, col: &[T]) -> Vec<T> {
        (0..self.m)
            .map(|i| {
                let mut v = T::zero();
                for (bik, ak) in self.binv[i].iter().zip(col) {
                    v = v + *bik * *ak;
                }
                v
            })
            .collect()
    }

    /// Recomputes the basis inverse from scratch by Gauss-Jordan with partial
    /// pivoting, then refreshes the basic values.
    fn refactor(&mut self) -> Result<(), LpError> {
        let m = self.m;
        let mut a: Vec<Vec<T>> = (0..m)
            .map(|i| (0..m).map(|k| self.cols[self.basis[k]][i]).collect())
            .collect();
        let mut inv = identity(m);
        for col in 0..m {
            let mut piv_row = col;
            for r in col + 1..m {
                if a[r][col].abs() > a[piv_row][col].abs() {
                    piv_row = r;
                }
            }
            if a[piv_row][col].abs() < lit(1e-11) {
                return Err(LpError::SingularBasis);
            }
            a.swap(col, piv_row);
            inv.swap(col, piv_row);
            let scale = T::one() / a[col][col];
            for k in 0..m {
                a[col][k] = a[col][k] * scale;
                inv[col][k] = inv[col][k] * scale;
            }
            for r in 0..m {
                if r != col && a[r][col] != T::zero() {
                    let f = a[r][col];
                    for k in 0..m {
                        a[r][k] = a[r][k] - f * a[col][k];
                        inv[r][k] = inv[r][k] - f * inv[col][k];
                    }
                }
            }
        }
        self.binv = inv;
        self.xb = self.apply_binv(&self.b.clone());
        self.pivots_since_refactor = 0;
        Ok(())
    }
}

fn identity<T: Scalar>(m: usize) -> Vec<Vec<T>> {
    (0..m)
        .map(|i| {
            (0..m)
                .map(|k| if i == k { T::one() } else { T::zero() })
                .collect()
        })
        .collect()
}

fn check_residuals<T: Scalar>(lp: &LinearProgram<T>, x: &[T]) -> Result<(), LpError> {
    let tol = lit::<T>(FEAS_TOL);
    let mut worst = T::zero();
    for c in &lp.constraints {
        let mut lhs = T::zero();
        for (a, xi) in c.coeffs.iter().zip(x) {
            lhs = lhs + *a * *xi;
        }
        let viol = match c.relation {
            Relation::Le => lhs - c.rhs,
            Relation::Ge => c.rhs - lhs,
            Relation::Eq => (lhs - c.rhs).abs(),
        };
        worst = worst.max(viol);
    }
    let scale = T::one() + lp
        .constraints
        .iter()
        .map(|c| c.rhs.abs())
        .fold(T::zero(), T::max);
    if worst > tol * scale {
        return Err(LpError::ResidualCheck {
            residual: worst.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(())
}
