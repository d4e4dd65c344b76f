//! Problem data: states with a common prior, receivers with action-dependent
//! utilities, and the posterior/best-response machinery everything else is
//! built on.
//!
//! A sender observes one of `d` states drawn from a publicly known prior and
//! commits to a signaling policy. Every receiver sees the same signal, updates
//! to the induced posterior, and independently picks an action maximizing its
//! own expected utility. Utilities never depend on other receivers' actions,
//! so best responses factor per receiver.

use thiserror::Error;

use crate::scalar::{lit, ratio, Scalar};
use crate::{PROB_TOL, TIE_TOL};

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("instance needs at least one state")]
    NoStates,
    #[error("instance needs at least one receiver")]
    NoReceivers,
    #[error("prior has {prior} entries for {states} states")]
    PriorShape { states: usize, prior: usize },
    #[error("prior entry for state `{state}` is {value}, every state needs positive mass")]
    PriorNotPositive { state: String, value: f64 },
    #[error("prior sums to {sum}, expected 1")]
    PriorSum { sum: f64 },
    #[error("receiver `{receiver}` has no actions")]
    NoActions { receiver: String },
    #[error("receiver `{receiver}` utilities must be a {states} x {actions} matrix")]
    UtilityShape {
        receiver: String,
        states: usize,
        actions: usize,
    },
    #[error("non-finite utility for receiver `{receiver}`")]
    NonFiniteUtility { receiver: String },
    #[error("duplicate {kind} name `{name}`")]
    DuplicateName { kind: &'static str, name: String },
    #[error("posterior entry {value} is negative")]
    NegativeMass { value: f64 },
    #[error("posterior sums to {sum}, expected 1")]
    PosteriorSum { sum: f64 },
    #[error("non-finite posterior entry")]
    NonFinitePosterior,
    #[error("tolerance {value} is negative")]
    NegativeTolerance { value: f64 },
}

/// One receiver: a named agent with a finite action set and a
/// state-by-action utility matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Receiver<T> {
    name: String,
    actions: Vec<String>,
    /// `utilities[state][action]`
    utilities: Vec<Vec<T>>,
}

impl<T: Scalar> Receiver<T> {
    pub fn new(
        name: impl Into<String>,
        actions: Vec<String>,
        utilities: Vec<Vec<T>>,
    ) -> Self {
        Receiver {
            name: name.into(),
            actions,
            utilities,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn actions(&self) -> &[String] {
        &self.actions
    }

    pub fn num_actions(&self) -> usize {
        self.actions.len()
    }

    pub fn utility(&self, state: usize, action: usize) -> T {
        self.utilities[state][action]
    }
}

/// A persuasion instance shared by all solvers in this crate.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance<T> {
    states: Vec<String>,
    prior: Vec<T>,
    receivers: Vec<Receiver<T>>,
}

impl<T: Scalar> Instance<T> {
    /// Builds and validates an instance. The prior must have full support and
    /// sum to 1 within the probability tolerance; utility matrices must be
    /// finite and shaped `states x actions`; names must not repeat.
    pub fn new(
        states: Vec<String>,
        prior: Vec<T>,
        receivers: Vec<Receiver<T>>,
    ) -> Result<Self, ModelError> {
        if states.is_empty() {
            return Err(ModelError::NoStates);
        }
        if receivers.is_empty() {
            return Err(ModelError::NoReceivers);
        }
        if prior.len() != states.len() {
            return Err(ModelError::PriorShape {
                states: states.len(),
                prior: prior.len(),
            });
        }
        check_unique("state", states.iter())?;
        check_unique("receiver", receivers.iter().map(|r| &r.name))?;

        let mut sum = T::zero();
        for (name, &mass) in states.iter().zip(&prior) {
            if !(mass > T::zero()) || !mass.is_finite() {
                return Err(ModelError::PriorNotPositive {
                    state: name.clone(),
                    value: mass.to_f64().unwrap_or(f64::NAN),
                });
            }
            sum = sum + mass;
        }
        if (sum - T::one()).abs() > lit(PROB_TOL) {
            return Err(ModelError::PriorSum {
                sum: sum.to_f64().unwrap_or(f64::NAN),
            });
        }

        for recv in &receivers {
            if recv.actions.is_empty() {
                return Err(ModelError::NoActions {
                    receiver: recv.name.clone(),
                });
            }
            check_unique("action", recv.actions.iter())?;
            let ok_shape = recv.utilities.len() == states.len()
                && recv.utilities.iter().all(|row| row.len() == recv.actions.len());
            if !ok_shape {
                return Err(ModelError::UtilityShape {
                    receiver: recv.name.clone(),
                    states: states.len(),
                    actions: recv.actions.len(),
                });
            }
            if recv.utilities.iter().flatten().any(|u| !u.is_finite()) {
                return Err(ModelError::NonFiniteUtility {
                    receiver: recv.name.clone(),
                });
            }
        }

        Ok(Instance {
            states,
            prior,
            receivers,
        })
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_receivers(&self) -> usize {
        self.receivers.len()
    }

    pub fn state_names(&self) -> &[String] {
        &self.states
    }

    pub fn prior(&self) -> &[T] {
        &self.prior
    }

    pub fn receivers(&self) -> &[Receiver<T>] {
        &self.receivers
    }

    pub fn receiver(&self, r: usize) -> &Receiver<T> {
        &self.receivers[r]
    }

    /// `u^r_state(action)`
    pub fn utility(&self, r: usize, state: usize, action: usize) -> T {
        self.receivers[r].utility(state, action)
    }

    /// Largest action-set size across receivers.
    pub fn max_actions(&self) -> usize {
        self.receivers.iter().map(|r| r.num_actions()).max().unwrap_or(0)
    }

    /// Number of action profiles, saturating at `u128::MAX`.
    pub fn profile_count(&self) -> u128 {
        self.receivers.iter().fold(1u128, |acc, r| {
            acc.saturating_mul(r.num_actions() as u128)
        })
    }

    /// Expected utility of every action of receiver `r` under posterior `p`.
    pub fn action_values(&self, r: usize, p: &Posterior<T>) -> Vec<T> {
        debug_assert_eq!(p.len(), self.num_states());
        let recv = &self.receivers[r];
        (0..recv.num_actions())
            .map(|a| {
                let mut e = T::zero();
                for state in 0..self.num_states() {
                    e = e + p[state] * recv.utility(state, a);
                }
                e
            })
            .collect()
    }

    /// Best-response sets under posterior `p`: per receiver, every action
    /// whose expected utility is within the tie tolerance of the maximum.
    pub fn best_responses(&self, p: &Posterior<T>) -> BrSet {
        self.eps_best_responses(p, T::zero())
            .expect("zero tolerance is valid")
    }

    /// Relaxed best-response sets: actions whose expected utility is within
    /// `eps` of the receiver's maximum (plus the tie tolerance).
    pub fn eps_best_responses(&self, p: &Posterior<T>, eps: T) -> Result<BrSet, ModelError> {
        if !(eps >= T::zero()) {
            return Err(ModelError::NegativeTolerance {
                value: eps.to_f64().unwrap_or(f64::NAN),
            });
        }
        let slack = eps + lit(TIE_TOL);
        let per_receiver = (0..self.num_receivers())
            .map(|r| {
                let values = self.action_values(r, p);
                let best = values.iter().cloned().fold(T::neg_infinity(), T::max);
                values
                    .iter()
                    .enumerate()
                    .filter(|(_, &v)| v >= best - slack)
                    .map(|(a, _)| a)
                    .collect()
            })
            .collect();
        Ok(BrSet { per_receiver })
    }
}

fn check_unique<'a>(
    kind: &'static str,
    names: impl Iterator<Item = &'a String>,
) -> Result<(), ModelError> {
    let mut seen = std::collections::HashSet::new();
    for name in names {
        if !seen.insert(name.as_str()) {
            return Err(ModelError::DuplicateName {
                kind,
                name: name.clone(),
            });
        }
    }
    Ok(())
}

/// A distribution over states. Entries are non-negative and sum to 1 within
/// the probability tolerance; tiny negative round-off is clamped to zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Posterior<T>(Vec<T>);

impl<T: Scalar> Posterior<T> {
    pub fn new(mass: Vec<T>) -> Result<Self, ModelError> {
        if mass.iter().any(|m| !m.is_finite()) {
            return Err(ModelError::NonFinitePosterior);
        }
        let tol = lit::<T>(PROB_TOL);
        if let Some(&bad) = mass.iter().find(|&&m| m < -tol) {
            return Err(ModelError::NegativeMass {
                value: bad.to_f64().unwrap_or(f64::NAN),
            });
        }
        let sum: T = mass.iter().cloned().sum();
        if (sum - T::one()).abs() > tol {
            return Err(ModelError::PosteriorSum {
                sum: sum.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(Posterior(
            mass.into_iter().map(|m| m.max(T::zero())).collect(),
        ))
    }

    pub fn uniform(d: usize) -> Self {
        assert!(d > 0);
        Posterior(vec![T::one() / T::from_usize(d).unwrap(); d])
    }

    pub fn point_mass(d: usize, state: usize) -> Self {
        assert!(state < d);
        let mut mass = vec![T::zero(); d];
        mass[state] = T::one();
        Posterior(mass)
    }

    /// Grid point with exact coordinates `nums[i] / k`.
    pub fn from_ratios(nums: &[u64], k: u64) -> Self {
        debug_assert_eq!(nums.iter().sum::<u64>(), k);
        Posterior(nums.iter().map(|&n| ratio(n, k)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.0
    }
}

impl<T> std::ops::Index<usize> for Posterior<T> {
    type Output = T;

    fn index(&self, i: usize) -> &T {
        &self.0[i]
    }
}

/// Per-receiver sets of (approximately) optimal actions, sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BrSet {
    per_receiver: Vec<Vec<usize>>,
}

impl BrSet {
    pub fn num_receivers(&self) -> usize {
        self.per_receiver.len()
    }

    pub fn actions(&self, r: usize) -> &[usize] {
        &self.per_receiver[r]
    }

    pub fn contains(&self, r: usize, action: usize) -> bool {
        self.per_receiver[r].binary_search(&action).is_ok()
    }

    /// Number of distinct action profiles that can be assembled from the sets.
    pub fn profile_count(&self) -> u128 {
        self.per_receiver
            .iter()
            .fold(1u128, |acc, s| acc.saturating_mul(s.len() as u128))
    }
}
