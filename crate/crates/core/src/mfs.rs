//! Maximum feasible subsystem over the simplex: given a margin matrix `A`,
//! find a mixture `x` satisfying `(A x)_i >= 0` for as many rows as
//! possible. Binary voting reduces to this with one row per receiver and one
//! column per state, which is how the grid solver's support counting is
//! validated.
//!
//! The approximate solver sweeps the k-uniform grid and keeps the mixture
//! with the most rows within `-eps`; concentration gives a resolution at
//! which it never counts fewer rows than the exact optimum at zero slack.
//! The exact optimum itself comes from brute force over row subsets, one
//! feasibility program each, so it is only for small row counts.

use thiserror::Error;

use crate::grid::{enumerate_k_uniform, GridError};
use crate::instance::Instance;
use crate::lp::{LinearProgram, LpError, LpStatus, Relation};
use crate::scalar::{lit, Scalar};
use crate::TIE_TOL;

/// Row counts above this make subset brute force unreasonable.
pub const MAX_ORACLE_ROWS: usize = 20;

#[derive(Debug, Error, PartialEq)]
pub enum MfsError {
    #[error("margin matrix must have at least one row and one column")]
    Empty,
    #[error("margin matrix row {row} has {got} entries, expected {cols}")]
    Ragged { row: usize, cols: usize, got: usize },
    #[error("declared range [{lo}, {hi}] is not a finite interval")]
    BadRange { lo: f64, hi: f64 },
    #[error("entry {value} falls outside the declared range [{lo}, {hi}]")]
    OutOfRange { value: f64, lo: f64, hi: f64 },
    #[error("eps must be positive to derive a grid resolution, got {value}")]
    NonPositiveEps { value: f64 },
    #[error("tolerance {value} is negative")]
    NegativeTolerance { value: f64 },
    #[error("derived grid resolution does not fit in u64")]
    ResolutionOverflow,
    #[error("{rows} rows is over the brute-force limit of {limit}")]
    TooManyRows { rows: usize, limit: usize },
    #[error("receiver `{receiver}` has {actions} actions, the margin view needs exactly 2")]
    NotBinary { receiver: String, actions: usize },
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error("lp solver failed: {0}")]
    Lp(#[from] LpError),
}

/// A margin matrix together with the interval its entries are declared to
/// live in; the interval width drives the grid resolution.
#[derive(Debug, Clone, PartialEq)]
pub struct MfsInstance<T> {
    rows: Vec<Vec<T>>,
    lo: T,
    hi: T,
}

impl<T: Scalar> MfsInstance<T> {
    pub fn new(rows: Vec<Vec<T>>, lo: T, hi: T) -> Result<Self, MfsError> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(MfsError::Empty);
        }
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(MfsError::BadRange {
                lo: lo.to_f64().unwrap_or(f64::NAN),
                hi: hi.to_f64().unwrap_or(f64::NAN),
            });
        }
        let cols = rows[0].len();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(MfsError::Ragged {
                    row: i,
                    cols,
                    got: row.len(),
                });
            }
            for &v in row {
                if !v.is_finite() || v < lo || v > hi {
                    return Err(MfsError::OutOfRange {
                        value: v.to_f64().unwrap_or(f64::NAN),
                        lo: lo.to_f64().unwrap_or(f64::NAN),
                        hi: hi.to_f64().unwrap_or(f64::NAN),
                    });
                }
            }
        }
        Ok(MfsInstance { rows, lo, hi })
    }

    pub fn rows(&self) -> &[Vec<T>] {
        &self.rows
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn num_cols(&self) -> usize {
        self.rows[0].len()
    }

    pub fn lo(&self) -> T {
        self.lo
    }

    pub fn hi(&self) -> T {
        self.hi
    }

    pub fn range(&self) -> T {
        self.hi - self.lo
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MfsSolution<T> {
    pub x: Vec<T>,
    pub satisfied: usize,
    /// Grid resolution actually swept.
    pub k: u64,
}

/// Number of rows `i` with `(A x)_i >= -eps`, up to the tie tolerance.
///
/// Accumulates each row product left to right, exactly like the voting
/// support count, so the two agree bit for bit on matrices built by
/// [`voting_to_mfs`].
pub fn count_satisfied<T: Scalar>(m: &MfsInstance<T>, x: &[T], eps: T) -> Result<usize, MfsError> {
    if !(eps >= T::zero()) {
        return Err(MfsError::NegativeTolerance {
            value: eps.to_f64().unwrap_or(f64::NAN),
        });
    }
    debug_assert_eq!(x.len(), m.num_cols());
    let cutoff = -eps - lit::<T>(TIE_TOL);
    let mut count = 0;
    for row in &m.rows {
        let mut margin = T::zero();
        for (xi, aij) in x.iter().zip(row) {
            margin = margin + *xi * *aij;
        }
        if margin >= cutoff {
            count += 1;
        }
    }
    Ok(count)
}

/// Grid resolution at which the sweep's best `eps`-count provably reaches
/// the zero-slack optimum: `max(1, ceil(range^2 ln(rows) / (2 eps^2)))`.
pub fn grid_resolution<T: Scalar>(m: &MfsInstance<T>, eps: T) -> Result<u64, MfsError> {
    if !(eps > T::zero()) || !eps.is_finite() {
        return Err(MfsError::NonPositiveEps {
            value: eps.to_f64().unwrap_or(f64::NAN),
        });
    }
    let rows = T::from_usize(m.num_rows()).unwrap();
    let r = m.range();
    let k = (r * r * rows.ln() / (lit::<T>(2.0) * eps * eps)).ceil();
    k.to_u64().map(|k| k.max(1)).ok_or(MfsError::ResolutionOverflow)
}

/// Sweeps the k-uniform grid and returns the first mixture maximizing the
/// `eps`-relaxed satisfied-row count. Resolution comes from
/// [`grid_resolution`] unless overridden.
pub fn solve_mfs_kuniform<T: Scalar>(
    m: &MfsInstance<T>,
    eps: T,
    k_override: Option<u64>,
    budget: u128,
) -> Result<MfsSolution<T>, MfsError> {
    let k = match k_override {
        Some(k) if k >= 1 => k,
        Some(_) => return Err(MfsError::Grid(GridError::ZeroResolution)),
        None => grid_resolution(m, eps)?,
    };
    if !(eps >= T::zero()) {
        return Err(MfsError::NegativeTolerance {
            value: eps.to_f64().unwrap_or(f64::NAN),
        });
    }
    let mut best: Option<MfsSolution<T>> = None;
    for p in enumerate_k_uniform::<T>(m.num_cols(), k, budget)? {
        let satisfied = count_satisfied(m, p.as_slice(), eps)?;
        let better = match &best {
            None => true,
            Some(b) => satisfied > b.satisfied,
        };
        if better {
            let done = satisfied == m.num_rows();
            best = Some(MfsSolution {
                x: p.as_slice().to_vec(),
                satisfied,
                k,
            });
            if done {
                break;
            }
        }
    }
    Ok(best.expect("grid is never empty"))
}

/// Exact maximum number of simultaneously satisfiable rows at zero slack,
/// by brute force over row subsets (largest first, so typical instances
/// exit early). Limited to [`MAX_ORACLE_ROWS`] rows.
pub fn kstar_bruteforce<T: Scalar>(m: &MfsInstance<T>) -> Result<usize, MfsError> {
    let n = m.num_rows();
    if n > MAX_ORACLE_ROWS {
        return Err(MfsError::TooManyRows {
            rows: n,
            limit: MAX_ORACLE_ROWS,
        });
    }
    for size in (1..=n).rev() {
        let mut mask: u64 = (1 << size) - 1;
        while mask < (1u64 << n) {
            if subset_feasible(m, mask)? {
                return Ok(size);
            }
            // Gosper's hack: next larger integer with the same popcount.
            let c = mask & mask.wrapping_neg();
            let r = mask + c;
            mask = (((r ^ mask) >> 2) / c) | r;
        }
    }
    Ok(0)
}

fn subset_feasible<T: Scalar>(m: &MfsInstance<T>, mask: u64) -> Result<bool, MfsError> {
    let cols = m.num_cols();
    let mut lp = LinearProgram::maximize(vec![T::zero(); cols]);
    for (i, row) in m.rows.iter().enumerate() {
        if mask & (1 << i) != 0 {
            lp.constrain(row.clone(), Relation::Ge, T::zero());
        }
    }
    lp.constrain(vec![T::one(); cols], Relation::Eq, T::one());
    Ok(lp.solve()?.status == LpStatus::Optimal)
}

/// Margin matrix of a binary-action voting instance: entry `(r, state)` is
/// receiver `r`'s utility for its first listed action minus the second, so
/// `count_satisfied` at a posterior equals the number of supporting
/// receivers. The declared range is the tightest interval containing the
/// entries.
pub fn voting_to_mfs<T: Scalar>(instance: &Instance<T>) -> Result<MfsInstance<T>, MfsError> {
    let mut rows = Vec::with_capacity(instance.num_receivers());
    let mut lo = T::infinity();
    let mut hi = T::neg_infinity();
    for recv in instance.receivers() {
        if recv.num_actions() != 2 {
            return Err(MfsError::NotBinary {
                receiver: recv.name().to_string(),
                actions: recv.num_actions(),
            });
        }
        let row: Vec<T> = (0..instance.num_states())
            .map(|state| recv.utility(state, 0) - recv.utility(state, 1))
            .collect();
        for &v in &row {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        rows.push(row);
    }
    MfsInstance::new(rows, lo, hi)
}
