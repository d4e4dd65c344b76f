//! Direct signaling schemes: the signal space is the set of action profiles,
//! and a signal is read as "each receiver is recommended its coordinate".
//!
//! Restricting to direct schemes loses nothing for the problems solved here,
//! and it makes persuasiveness a finite set of linear inequalities: on every
//! recommended profile, following the recommendation must beat any unilateral
//! deviation in expectation over the induced posterior.

use thiserror::Error;

use crate::instance::{Instance, Posterior};
use crate::objective::SenderObjective;
use crate::scalar::{lit, Scalar};
use crate::PROB_TOL;

/// One action index per receiver.
pub type ActionProfile = Vec<usize>;

#[derive(Debug, Error, PartialEq)]
pub enum SchemeError {
    #[error("signal profile has {got} entries for {receivers} receivers")]
    ProfileShape { receivers: usize, got: usize },
    #[error("signal recommends action {action} to receiver `{receiver}` which has {actions} actions")]
    UnknownAction {
        receiver: String,
        action: usize,
        actions: usize,
    },
    #[error("signal profile listed twice")]
    DuplicateSignal,
    #[error("signal needs one probability per state, got {got} for {states} states")]
    ProbShape { states: usize, got: usize },
    #[error("signaling probabilities for state `{state}` sum to {sum}, expected 1")]
    RowSum { state: String, sum: f64 },
    #[error("negative signaling probability {value}")]
    NegativeProb { value: f64 },
    #[error("non-finite signaling probability")]
    NonFiniteProb,
    #[error("profile is not in the scheme's support")]
    UnknownSignal,
    #[error("signal has zero probability under the prior, no posterior exists")]
    DeadSignal,
}

/// A direct scheme: a finite support of recommended profiles and, for each
/// state, a distribution over that support.
///
/// The support is kept sorted so that equal schemes compare equal and all
/// iteration orders are deterministic.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectScheme<T> {
    support: Vec<ActionProfile>,
    /// `probs[state][signal_index]`
    probs: Vec<Vec<T>>,
}

impl<T: Scalar> DirectScheme<T> {
    /// Builds a scheme from `(profile, probability per state)` pairs and
    /// checks it against the instance shape: every profile must be valid and
    /// distinct, and every state's probabilities must form a distribution.
    pub fn new(
        instance: &Instance<T>,
        signals: Vec<(ActionProfile, Vec<T>)>,
    ) -> Result<Self, SchemeError> {
        let d = instance.num_states();
        let mut signals = signals;
        signals.sort_by(|a, b| a.0.cmp(&b.0));
        for pair in signals.windows(2) {
            if pair[0].0 == pair[1].0 {
                return Err(SchemeError::DuplicateSignal);
            }
        }

        let mut support = Vec::with_capacity(signals.len());
        let mut probs = vec![vec![T::zero(); signals.len()]; d];
        let tol = lit::<T>(PROB_TOL);
        for (idx, (profile, per_state)) in signals.into_iter().enumerate() {
            if profile.len() != instance.num_receivers() {
                return Err(SchemeError::ProfileShape {
                    receivers: instance.num_receivers(),
                    got: profile.len(),
                });
            }
            for (r, &a) in profile.iter().enumerate() {
                let actions = instance.receiver(r).num_actions();
                if a >= actions {
                    return Err(SchemeError::UnknownAction {
                        receiver: instance.receiver(r).name().to_string(),
                        action: a,
                        actions,
                    });
                }
            }
            if per_state.len() != d {
                return Err(SchemeError::ProbShape {
                    states: d,
                    got: per_state.len(),
                });
            }
            for (state, p) in per_state.into_iter().enumerate() {
                if !p.is_finite() {
                    return Err(SchemeError::NonFiniteProb);
                }
                if p < -tol {
                    return Err(SchemeError::NegativeProb {
                        value: p.to_f64().unwrap_or(f64::NAN),
                    });
                }
                probs[state][idx] = p.max(T::zero());
            }
            support.push(profile);
        }

        for (state, row) in probs.iter().enumerate() {
            let sum: T = row.iter().cloned().sum();
            if (sum - T::one()).abs() > tol {
                return Err(SchemeError::RowSum {
                    state: instance.state_names()[state].clone(),
                    sum: sum.to_f64().unwrap_or(f64::NAN),
                });
            }
        }

        Ok(DirectScheme { support, probs })
    }

    /// The scheme that reveals nothing and always recommends `profile`.
    pub fn uninformative(
        instance: &Instance<T>,
        profile: ActionProfile,
    ) -> Result<Self, SchemeError> {
        let ones = vec![T::one(); instance.num_states()];
        DirectScheme::new(instance, vec![(profile, ones)])
    }

    pub fn num_signals(&self) -> usize {
        self.support.len()
    }

    /// Recommended profiles, sorted lexicographically.
    pub fn support(&self) -> &[ActionProfile] {
        &self.support
    }

    /// `P(signal index | state)`
    pub fn prob(&self, state: usize, signal: usize) -> T {
        self.probs[state][signal]
    }

    pub fn signal_index(&self, profile: &[usize]) -> Option<usize> {
        self.support
            .binary_search_by(|s| s.as_slice().cmp(profile))
            .ok()
    }
}

impl<T: Scalar> Instance<T> {
    /// Posterior a receiver holds after seeing `profile` recommended.
    pub fn bayes_posterior(
        &self,
        scheme: &DirectScheme<T>,
        profile: &[usize],
    ) -> Result<Posterior<T>, SchemeError> {
        let idx = scheme
            .signal_index(profile)
            .ok_or(SchemeError::UnknownSignal)?;
        let d = self.num_states();
        debug_assert_eq!(scheme.probs.len(), d);
        let mut joint = vec![T::zero(); d];
        let mut marginal = T::zero();
        for state in 0..d {
            joint[state] = self.prior()[state] * scheme.prob(state, idx);
            marginal = marginal + joint[state];
        }
        if !(marginal > T::zero()) {
            return Err(SchemeError::DeadSignal);
        }
        let mass: Vec<T> = joint.into_iter().map(|j| j / marginal).collect();
        Ok(Posterior::new(mass).expect("normalized joint mass is a distribution"))
    }

    /// Worst persuasiveness margin of the scheme: the minimum over receivers,
    /// recommended profiles, and unilateral deviations of the expected gain
    /// from obedience. Non-negative means every recommendation is
    /// self-enforcing; `+inf` when no receiver has an alternative action.
    pub fn persuasiveness_slack(&self, scheme: &DirectScheme<T>) -> T {
        let mut worst = T::infinity();
        for r in 0..self.num_receivers() {
            let actions = self.receiver(r).num_actions();
            for (idx, profile) in scheme.support.iter().enumerate() {
                let rec = profile[r];
                for dev in 0..actions {
                    if dev == rec {
                        continue;
                    }
                    let mut margin = T::zero();
                    for state in 0..self.num_states() {
                        let w = self.prior()[state] * scheme.prob(state, idx);
                        margin = margin
                            + w * (self.utility(r, state, rec) - self.utility(r, state, dev));
                    }
                    worst = worst.min(margin);
                }
            }
        }
        worst
    }

    /// Expected objective value when every receiver obeys its recommendation.
    pub fn expected_sender_utility(
        &self,
        objective: &impl SenderObjective<T>,
        scheme: &DirectScheme<T>,
    ) -> T {
        let mut total = T::zero();
        for state in 0..self.num_states() {
            let mut inner = T::zero();
            for (idx, profile) in scheme.support.iter().enumerate() {
                let p = scheme.prob(state, idx);
                if p > T::zero() {
                    inner = inner + p * objective.value(state, profile);
                }
            }
            total = total + self.prior()[state] * inner;
        }
        total
    }
}
