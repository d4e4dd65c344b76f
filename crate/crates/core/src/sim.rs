//! Monte Carlo audit of a scheme against boundedly rational receivers, plus
//! small search utilities used when eyeballing instances.
//!
//! The simulator draws a state from the prior and a recommendation from the
//! scheme, then lets every receiver either obey (when the recommendation is
//! within `eps` of its best response at the signal's posterior) or defect to
//! its actual best response. It reports the realized objective and, per
//! receiver, the best gain any fixed deviation rule would have earned, which
//! should hover at or below zero for a persuasive scheme.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::grid::{enumerate_k_uniform, GridError, DEFAULT_ENUM_BUDGET};
use crate::instance::{Instance, ModelError, Posterior};
use crate::objective::SenderObjective;
use crate::scalar::Scalar;
use crate::scheme::{ActionProfile, DirectScheme, SchemeError};

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error("at least one trial is required")]
    NoTrials,
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error(transparent)]
    Grid(#[from] GridError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimReport<T> {
    pub trials: u64,
    pub seed: u64,
    /// Mean realized objective over the trials.
    pub value: T,
    /// Per receiver: the largest mean gain available from deviating to a
    /// fixed action whenever a particular signal was shown. Values at or
    /// below zero mean obedience was empirically optimal.
    pub deviation_gain: Vec<T>,
}

/// Runs `trials` independent draws of (state, signal) and reports what the
/// receivers actually played. Each trial uses its own stream of the seeded
/// generator, so reports are reproducible and insensitive to trial order.
pub fn simulate<T: Scalar>(
    instance: &Instance<T>,
    objective: &impl SenderObjective<T>,
    scheme: &DirectScheme<T>,
    eps: T,
    trials: u64,
    seed: u64,
) -> Result<SimReport<T>, SimError> {
    if trials == 0 {
        return Err(SimError::NoTrials);
    }
    let d = instance.num_states();
    let n = instance.num_receivers();
    let signals = scheme.num_signals();

    // A receiver's play depends only on the signal, so everything about
    // behavior is precomputable per signal.
    let mut played: Vec<Option<ActionProfile>> = vec![None; signals];
    for (idx, profile) in scheme.support().iter().enumerate() {
        let mut shown = T::zero();
        for state in 0..d {
            shown = shown + instance.prior()[state] * scheme.prob(state, idx);
        }
        if !(shown > T::zero()) {
            continue; // never drawn
        }
        let posterior = instance.bayes_posterior(scheme, profile)?;
        let relaxed = instance.eps_best_responses(&posterior, eps)?;
        let exact = instance.best_responses(&posterior);
        let profile_played = (0..n)
            .map(|r| {
                if relaxed.contains(r, profile[r]) {
                    profile[r]
                } else {
                    exact.actions(r)[0]
                }
            })
            .collect();
        played[idx] = Some(profile_played);
    }

    // Utility sums per (receiver, signal, action), to score deviation rules
    // against what was actually played on exactly the same draws.
    let max_actions = instance.max_actions();
    let mut seen = vec![0u64; signals];
    let mut sums = vec![vec![vec![T::zero(); max_actions]; signals]; n];
    let mut total_value = T::zero();

    for trial in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trial);
        let state = draw(&mut rng, d, |s| instance.prior()[s]);
        let idx = draw(&mut rng, signals, |i| scheme.prob(state, i));
        let profile = played[idx].as_ref().expect("drawn signals have mass");
        total_value = total_value + objective.value(state, profile);
        seen[idx] += 1;
        for r in 0..n {
            for a in 0..instance.receiver(r).num_actions() {
                sums[r][idx][a] = sums[r][idx][a] + instance.utility(r, state, a);
            }
        }
    }

    let t = T::from_u64(trials).unwrap();
    let deviation_gain = (0..n)
        .map(|r| {
            let mut best = T::neg_infinity();
            for idx in 0..signals {
                if seen[idx] == 0 {
                    continue;
                }
                let rec = played[idx].as_ref().expect("signal was drawn")[r];
                for a in 0..instance.receiver(r).num_actions() {
                    if a != rec {
                        best = best.max((sums[r][idx][a] - sums[r][idx][rec]) / t);
                    }
                }
            }
            if best.is_finite() {
                best
            } else {
                T::zero() // single-action receivers have nothing to deviate to
            }
        })
        .collect();

    Ok(SimReport {
        trials,
        seed,
        value: total_value / t,
        deviation_gain,
    })
}

/// Inverse-CDF draw over `0..len` with unnormalized weights; rounding
/// residue falls on the last positive-weight index.
fn draw<T: Scalar>(rng: &mut ChaCha8Rng, len: usize, weight: impl Fn(usize) -> T) -> usize {
    let u: T = T::from_f64(rng.random::<f64>()).unwrap();
    let mut acc = T::zero();
    let mut last_positive = 0;
    for i in 0..len {
        let w = weight(i);
        if w > T::zero() {
            last_positive = i;
            acc = acc + w;
            if u < acc {
                return i;
            }
        }
    }
    last_positive
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridScan<T> {
    /// Best single-posterior objective value found.
    pub value: T,
    pub posterior: Posterior<T>,
    pub profile: ActionProfile,
}

/// Scans the `resolution`-uniform grid for the posterior maximizing the
/// objective under exact best responses. This is the value the sender could
/// get if it were allowed to move the prior to one grid point; it is a quick
/// reference point, not a bound.
pub fn posterior_grid_opt<T: Scalar>(
    instance: &Instance<T>,
    objective: &impl SenderObjective<T>,
    resolution: u64,
) -> Result<GridScan<T>, SimError> {
    let grid = enumerate_k_uniform::<T>(instance.num_states(), resolution, DEFAULT_ENUM_BUDGET)?;
    let mut best: Option<GridScan<T>> = None;
    for p in grid {
        let choices = instance.best_responses(&p);
        let profile = objective.select(&p, &choices);
        let value = objective.expected_value(&p, &profile);
        if best.as_ref().map_or(true, |b| value > b.value) {
            best = Some(GridScan {
                value,
                posterior: p,
                profile,
            });
        }
    }
    Ok(best.expect("grid is never empty"))
}

/// The scheme that announces the state outright; receivers best-respond to
/// point masses and ties break through the objective's selector. Full
/// revelation is always persuasive, making it a handy baseline.
pub fn fully_informative_scheme<T: Scalar>(
    instance: &Instance<T>,
    objective: &impl SenderObjective<T>,
) -> DirectScheme<T> {
    let d = instance.num_states();
    let mut signals: Vec<(ActionProfile, Vec<T>)> = Vec::new();
    for state in 0..d {
        let p = Posterior::point_mass(d, state);
        let profile = objective.select(&p, &instance.best_responses(&p));
        match signals.iter_mut().find(|(existing, _)| *existing == profile) {
            Some((_, probs)) => probs[state] = T::one(),
            None => {
                let mut probs = vec![T::zero(); d];
                probs[state] = T::one();
                signals.push((profile, probs));
            }
        }
    }
    DirectScheme::new(instance, signals).expect("revelation scheme is valid")
}
