//! k-uniform posterior grids: distributions whose coordinates are integer
//! multiples of `1/k`. Coarse grids cover the simplex with
//! `C(k + d - 1, d - 1)` points, which is polynomial for fixed `d`.

use thiserror::Error;

use crate::instance::Posterior;
use crate::scalar::Scalar;

/// Default cap on the number of grid points a solver may enumerate.
pub const DEFAULT_ENUM_BUDGET: u128 = 10_000_000;

#[derive(Debug, Error, PartialEq)]
pub enum GridError {
    #[error("grid needs at least one coordinate")]
    NoCoordinates,
    #[error("grid resolution must be at least 1")]
    ZeroResolution,
    #[error("grid has {count} points, over the budget of {budget}")]
    BudgetExceeded { count: u128, budget: u128 },
}

/// `C(n, r)`, saturating at `u128::MAX`.
pub fn binomial(n: u64, r: u64) -> u128 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 1..=r {
        // Multiply before dividing; the running product of i consecutive
        // binomial prefixes is always divisible by i.
        acc = match acc.checked_mul((n - r + i) as u128) {
            Some(v) => v / i as u128,
            None => return u128::MAX,
        };
    }
    acc
}

/// The grid of `d`-coordinate distributions with denominators dividing `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KUniformGrid {
    d: usize,
    k: u64,
}

impl KUniformGrid {
    pub fn new(d: usize, k: u64) -> Self {
        assert!(d >= 1 && k >= 1);
        KUniformGrid { d, k }
    }

    pub fn dimension(&self) -> usize {
        self.d
    }

    pub fn resolution(&self) -> u64 {
        self.k
    }

    /// Number of grid points, saturating at `u128::MAX`.
    pub fn count(&self) -> u128 {
        binomial(self.k + self.d as u64 - 1, self.d as u64 - 1)
    }

    /// Numerator vectors (summing to `k`) in ascending lexicographic order.
    pub fn numerators(&self) -> Numerators {
        let mut first = vec![0u64; self.d];
        first[self.d - 1] = self.k;
        Numerators {
            next: Some(first),
        }
    }

    /// Grid points as posteriors, in the same order as [`Self::numerators`].
    pub fn posteriors<T: Scalar>(&self) -> impl Iterator<Item = Posterior<T>> {
        let k = self.k;
        self.numerators()
            .map(move |nums| Posterior::from_ratios(&nums, k))
    }
}

/// Budget-checked grid enumeration.
pub fn enumerate_k_uniform<T: Scalar>(
    d: usize,
    k: u64,
    budget: u128,
) -> Result<impl Iterator<Item = Posterior<T>>, GridError> {
    if d == 0 {
        return Err(GridError::NoCoordinates);
    }
    if k == 0 {
        return Err(GridError::ZeroResolution);
    }
    let grid = KUniformGrid::new(d, k);
    let count = grid.count();
    if count > budget {
        return Err(GridError::BudgetExceeded { count, budget });
    }
    Ok(grid.posteriors())
}

pub struct Numerators {
    next: Option<Vec<u64>>,
}

impl Iterator for Numerators {
    type Item = Vec<u64>;

    fn next(&mut self) -> Option<Vec<u64>> {
        let current = self.next.take()?;
        self.next = successor(&current);
        Some(current)
    }
}

/// Next composition in lexicographic order: bump the rightmost position that
/// has mass anywhere to its right, then push the leftover mass to the end.
fn successor(v: &[u64]) -> Option<Vec<u64>> {
    let d = v.len();
    let mut tail = 0u64;
    for j in (0..d.saturating_sub(1)).rev() {
        tail += v[j + 1];
        if tail > 0 {
            let mut next = v.to_vec();
            next[j] += 1;
            for slot in next.iter_mut().skip(j + 1) {
                *slot = 0;
            }
            next[d - 1] = tail - 1;
            return Some(next);
        }
    }
    None
}
