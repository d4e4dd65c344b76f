//! Exact optimal signaling via one linear program over all action profiles.
//!
//! Variables are the signaling probabilities `phi_state(profile)`, one per
//! (state, profile) pair. Obedience is enforced by one constraint per
//! (receiver, profile, deviation): conditioned on a profile being
//! recommended, the recommended action must be within `eps` of any
//! alternative in prior-weighted expectation. Optimal value and scheme are
//! exact up to LP tolerances, at the price of enumerating every profile, so
//! this scales only to small receiver counts.

use thiserror::Error;

use crate::instance::Instance;
use crate::lp::{LinearProgram, LpError, LpStatus, Relation};
use crate::objective::SenderObjective;
use crate::scalar::{lit, Scalar};
use crate::scheme::{ActionProfile, DirectScheme, SchemeError};

/// Default cap on the number of LP variables (`states * profiles`).
pub const DEFAULT_LP_BUDGET: u128 = 1_000_000;

/// Signal probabilities below this are dropped from extracted schemes.
pub(crate) const SUPPORT_TOL: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum ExactError {
    #[error("program needs {vars} variables, over the budget of {budget}")]
    BudgetExceeded { vars: u128, budget: u128 },
    #[error("persuasiveness slack {value} is negative")]
    NegativeEps { value: f64 },
    #[error("lp solver failed: {0}")]
    Lp(#[from] LpError),
    #[error("solver reported {status:?} for a program that always has an optimum")]
    NoOptimum { status: LpStatus },
    #[error("extracted scheme is malformed: {0}")]
    Scheme(#[from] SchemeError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactSolution<T> {
    pub scheme: DirectScheme<T>,
    pub value: T,
}

/// All action profiles of the instance in lexicographic order (first
/// receiver most significant).
pub(crate) fn enumerate_profiles<T: Scalar>(instance: &Instance<T>) -> Vec<ActionProfile> {
    let sizes: Vec<usize> = instance
        .receivers()
        .iter()
        .map(|r| r.num_actions())
        .collect();
    let total = instance.profile_count() as usize;
    let mut out = Vec::with_capacity(total);
    let mut current = vec![0usize; sizes.len()];
    loop {
        out.push(current.clone());
        // Odometer increment from the least significant (last) receiver.
        let mut pos = sizes.len();
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            current[pos] += 1;
            if current[pos] < sizes[pos] {
                break;
            }
            current[pos] = 0;
        }
    }
}

/// Builds the full obedience program. Variables are laid out state-major:
/// `phi_state(profile)` sits at `state * num_profiles + profile_rank`.
pub fn build_exact_lp<T: Scalar>(
    instance: &Instance<T>,
    objective: &impl SenderObjective<T>,
    eps: T,
    budget: u128,
) -> Result<LinearProgram<T>, ExactError> {
    if !(eps >= T::zero()) {
        return Err(ExactError::NegativeEps {
            value: eps.to_f64().unwrap_or(f64::NAN),
        });
    }
    let d = instance.num_states();
    let vars = (d as u128).saturating_mul(instance.profile_count());
    if vars > budget {
        return Err(ExactError::BudgetExceeded { vars, budget });
    }

    let profiles = enumerate_profiles(instance);
    let p = profiles.len();
    let n_vars = d * p;

    let mut c = vec![T::zero(); n_vars];
    for state in 0..d {
        for (rank, profile) in profiles.iter().enumerate() {
            c[state * p + rank] = instance.prior()[state] * objective.value(state, profile);
        }
    }
    let mut lp = LinearProgram::maximize(c);

    for r in 0..instance.num_receivers() {
        let actions = instance.receiver(r).num_actions();
        for (rank, profile) in profiles.iter().enumerate() {
            let rec = profile[r];
            for dev in 0..actions {
                if dev == rec {
                    continue;
                }
                let mut row = vec![T::zero(); n_vars];
                for state in 0..d {
                    row[state * p + rank] = instance.prior()[state]
                        * (instance.utility(r, state, rec) - instance.utility(r, state, dev));
                }
                lp.constrain(row, Relation::Ge, -eps);
            }
        }
    }
    for state in 0..d {
        let mut row = vec![T::zero(); n_vars];
        for rank in 0..p {
            row[state * p + rank] = T::one();
        }
        lp.constrain(row, Relation::Eq, T::one());
    }
    Ok(lp)
}

/// Solves the obedience program and extracts the optimal scheme.
pub fn solve_optimal_scheme<T: Scalar>(
    instance: &Instance<T>,
    objective: &impl SenderObjective<T>,
    eps: T,
    budget: u128,
) -> Result<ExactSolution<T>, ExactError> {
    let lp = build_exact_lp(instance, objective, eps, budget)?;
    let sol = lp.solve()?;
    if sol.status != LpStatus::Optimal {
        // Uninformative signaling is always feasible at eps >= 0 and the
        // objective is bounded, so anything else is a solver defect.
        return Err(ExactError::NoOptimum { status: sol.status });
    }

    let profiles = enumerate_profiles(instance);
    let p = profiles.len();
    let d = instance.num_states();
    let tol = lit::<T>(SUPPORT_TOL);
    let support: Vec<usize> = (0..p)
        .filter(|rank| (0..d).any(|state| sol.x[state * p + rank] > tol))
        .collect();

    let mut signals = Vec::with_capacity(support.len());
    for &rank in &support {
        signals.push((profiles[rank].clone(), vec![T::zero(); d]));
    }
    for state in 0..d {
        let mut mass = T::zero();
        for &rank in &support {
            mass = mass + sol.x[state * p + rank].max(T::zero());
        }
        for (slot, &rank) in signals.iter_mut().zip(&support) {
            slot.1[state] = sol.x[state * p + rank].max(T::zero()) / mass;
        }
    }

    let scheme = DirectScheme::new(instance, signals)?;
    Ok(ExactSolution {
        scheme,
        value: sol.value,
    })
}
