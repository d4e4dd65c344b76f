//! Sender objectives.
//!
//! A sender objective assigns a value to every (state, action profile) pair.
//! For the grid solver it must also come with a cheap deterministic selector:
//! given a posterior and per-receiver sets of acceptable actions, pick one
//! profile from those sets whose posterior-expected value is within a factor
//! `alpha` of the best profile assembled from the sets. The selector is what
//! lets the solver avoid enumerating the product of the sets.

use crate::instance::{BrSet, Posterior};
use crate::scalar::Scalar;
use crate::scheme::ActionProfile;

pub trait SenderObjective<T: Scalar> {
    /// Value of `profile` in `state` when every receiver plays its coordinate.
    fn value(&self, state: usize, profile: &[usize]) -> T;

    /// Deterministic selector: a profile with `profile[r]` drawn from
    /// `choices.actions(r)` for every `r`, guaranteeing at least `alpha()`
    /// times the best such profile's expected value under `posterior`.
    fn select(&self, posterior: &Posterior<T>, choices: &BrSet) -> ActionProfile;

    /// Approximation factor of `select`, in `(0, 1]`.
    fn alpha(&self) -> T;

    /// Expected value of `profile` under `posterior`.
    fn expected_value(&self, posterior: &Posterior<T>, profile: &[usize]) -> T {
        let mut total = T::zero();
        for state in 0..posterior.len() {
            total = total + posterior[state] * self.value(state, profile);
        }
        total
    }
}
