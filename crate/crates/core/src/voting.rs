//! Threshold voting objective: the sender wants at least `threshold`
//! receivers to play their designated action.
//!
//! The value of a profile does not depend on the state, only on how many
//! receivers play the designated action, which makes the objective's
//! selector exact: putting the designated action everywhere the receiver's
//! acceptable set allows it maximizes the count, so `alpha = 1`.

use thiserror::Error;

use crate::instance::{BrSet, Instance, Posterior};
use crate::objective::SenderObjective;
use crate::scalar::{lit, Scalar};
use crate::scheme::ActionProfile;
use crate::TIE_TOL;

#[derive(Debug, Error, PartialEq)]
pub enum VotingError {
    #[error("threshold {threshold} must be between 1 and {receivers}")]
    BadThreshold { threshold: usize, receivers: usize },
    #[error("receiver `{receiver}` has no action named `{name}`")]
    UnknownAction { receiver: String, name: String },
    #[error("receiver `{receiver}` has {actions} actions, support counting needs exactly 2")]
    NotBinary { receiver: String, actions: usize },
    #[error("tolerance {value} is negative")]
    NegativeTolerance { value: f64 },
}

/// Sender gets 1 when at least `threshold` receivers play their designated
/// action, 0 otherwise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KVotingObjective {
    threshold: usize,
    /// Designated action index per receiver.
    designated: Vec<usize>,
}

impl KVotingObjective {
    /// `action` names the designated action, resolved per receiver; `None`
    /// designates each receiver's first listed action.
    pub fn new<T: Scalar>(
        instance: &Instance<T>,
        threshold: usize,
        action: Option<&str>,
    ) -> Result<Self, VotingError> {
        let n = instance.num_receivers();
        if threshold == 0 || threshold > n {
            return Err(VotingError::BadThreshold {
                threshold,
                receivers: n,
            });
        }
        let designated = instance
            .receivers()
            .iter()
            .map(|recv| match action {
                None => Ok(0),
                Some(name) => recv
                    .actions()
                    .iter()
                    .position(|a| a == name)
                    .ok_or_else(|| VotingError::UnknownAction {
                        receiver: recv.name().to_string(),
                        name: name.to_string(),
                    }),
            })
            .collect::<Result<_, _>>()?;
        Ok(KVotingObjective {
            threshold,
            designated,
        })
    }

    /// Simple majority of the receivers.
    pub fn majority<T: Scalar>(instance: &Instance<T>) -> Result<Self, VotingError> {
        KVotingObjective::new(instance, instance.num_receivers() / 2 + 1, None)
    }

    pub fn threshold(&self) -> usize {
        self.threshold
    }

    pub fn designated(&self, r: usize) -> usize {
        self.designated[r]
    }

    pub fn supporters(&self, profile: &[usize]) -> usize {
        debug_assert_eq!(profile.len(), self.designated.len());
        profile
            .iter()
            .zip(&self.designated)
            .filter(|(a, d)| a == d)
            .count()
    }

    /// Number of receivers that weakly prefer their designated action over
    /// the alternative at posterior `p`, counting anyone within `eps`.
    ///
    /// Needs binary action sets. This is the quantity the margin-matrix view
    /// in [`crate::mfs`] counts, and the two code paths accumulate sums in
    /// the same order so they agree exactly.
    pub fn count_support<T: Scalar>(
        &self,
        instance: &Instance<T>,
        p: &Posterior<T>,
        eps: T,
    ) -> Result<usize, VotingError> {
        if !(eps >= T::zero()) {
            return Err(VotingError::NegativeTolerance {
                value: eps.to_f64().unwrap_or(f64::NAN),
            });
        }
        let cutoff = -eps - lit::<T>(TIE_TOL);
        let mut count = 0;
        for (r, recv) in instance.receivers().iter().enumerate() {
            if recv.num_actions() != 2 {
                return Err(VotingError::NotBinary {
                    receiver: recv.name().to_string(),
                    actions: recv.num_actions(),
                });
            }
            let yes = self.designated[r];
            let no = 1 - yes;
            let mut margin = T::zero();
            for state in 0..instance.num_states() {
                margin = margin
                    + p[state] * (recv.utility(state, yes) - recv.utility(state, no));
            }
            if margin >= cutoff {
                count += 1;
            }
        }
        Ok(count)
    }
}

impl<T: Scalar> SenderObjective<T> for KVotingObjective {
    fn value(&self, _state: usize, profile: &[usize]) -> T {
        if self.supporters(profile) >= self.threshold {
            T::one()
        } else {
            T::zero()
        }
    }

    fn select(&self, _posterior: &Posterior<T>, choices: &BrSet) -> ActionProfile {
        debug_assert_eq!(choices.num_receivers(), self.designated.len());
        (0..choices.num_receivers())
            .map(|r| {
                if choices.contains(r, self.designated[r]) {
                    self.designated[r]
                } else {
                    choices.actions(r)[0]
                }
            })
            .collect()
    }

    fn alpha(&self) -> T {
        T::one()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::example_instance;
    use crate::instance::Receiver;

    #[test]
    fn values_count_supporters() {
        let inst = example_instance();
        let obj = KVotingObjective::majority(&inst).unwrap();
        assert_eq!(obj.threshold(), 2);
        let f = |state, profile: &[usize]| -> f64 { obj.value(state, profile) };
        assert_eq!(f(0, &[0, 1, 0]), 1.0);
        assert_eq!(f(0, &[1, 1, 0]), 0.0);
        assert_eq!(f(2, &[0, 0, 0]), 1.0);
        assert_eq!(obj.supporters(&[1, 1, 1]), 0);
    }

    #[test]
    fn selector_prefers_designated_votes() {
        let inst = example_instance();
        let obj = KVotingObjective::majority(&inst).unwrap();
        let p = Posterior::new(vec![0.5, 0.0, 0.5]).unwrap();
        let choices = inst.best_responses(&p);
        assert_eq!(obj.select(&p, &choices), vec![0, 1, 0]);
        let relaxed = inst.eps_best_responses(&p, 0.75).unwrap();
        assert_eq!(obj.select(&p, &relaxed), vec![0, 0, 0]);
    }

    #[test]
    fn support_counts_on_example() {
        let inst = example_instance();
        let obj = KVotingObjective::majority(&inst).unwrap();
        let half = Posterior::new(vec![0.5, 0.0, 0.5]).unwrap();
        assert_eq!(obj.count_support(&inst, &half, 0.0).unwrap(), 2);
        let prior = Posterior::uniform(3);
        assert_eq!(obj.count_support(&inst, &prior, 0.0).unwrap(), 0);
        // Every voter's margin at the prior is exactly -1/12.
        assert_eq!(obj.count_support(&inst, &prior, 1.0 / 12.0).unwrap(), 3);
        assert_eq!(obj.count_support(&inst, &prior, 0.08).unwrap(), 0);
        assert!(obj.count_support(&inst, &prior, -0.5).is_err());
    }

    #[test]
    fn construction_checks_inputs() {
        let inst = example_instance();
        assert!(matches!(
            KVotingObjective::new(&inst, 0, None),
            Err(VotingError::BadThreshold { .. })
        ));
        assert!(matches!(
            KVotingObjective::new(&inst, 4, None),
            Err(VotingError::BadThreshold { .. })
        ));
        assert!(matches!(
            KVotingObjective::new(&inst, 2, Some("maybe")),
            Err(VotingError::UnknownAction { .. })
        ));
        let named = KVotingObjective::new(&inst, 2, Some("no")).unwrap();
        assert_eq!(named.designated(0), 1);
    }

    #[test]
    fn support_counting_needs_binary_actions() {
        let recv = Receiver::new(
            "r",
            vec!["x".into(), "y".into(), "z".into()],
            vec![vec![0.0, 1.0, 2.0], vec![2.0, 1.0, 0.0]],
        );
        let inst = Instance::new(
            vec!["s0".into(), "s1".into()],
            vec![0.5, 0.5],
            vec![recv],
        )
        .unwrap();
        let obj = KVotingObjective::new(&inst, 1, None).unwrap();
        assert!(matches!(
            obj.count_support(&inst, &Posterior::uniform(2), 0.0),
            Err(VotingError::NotBinary { .. })
        ));
    }
}
