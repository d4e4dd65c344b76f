//! Near-optimal signaling in polynomial time for constantly many states.
//!
//! Instead of one variable per (state, action profile), optimize a mixture
//! `gamma` over the k-uniform posterior grid: pick a grid point `p` with the
//! objective's selector applied to the eps-relaxed best-response sets at `p`,
//! subject only to the mixture averaging back to the prior. Concentration
//! over k i.i.d. state draws makes a fine enough grid lose at most a
//! `(1 - delta) * alpha` factor against the unrelaxed optimum, while the
//! extracted scheme stays eps-persuasive by construction: every signal's
//! posterior is its grid point, where the recommended profile is an
//! eps-best response.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::grid::{enumerate_k_uniform, GridError};
use crate::instance::{Instance, ModelError, Posterior};
use crate::lp::{LinearProgram, LpError, LpStatus, Relation};
use crate::objective::SenderObjective;
use crate::scalar::{lit, Scalar};
use crate::scheme::{ActionProfile, DirectScheme, SchemeError};

#[derive(Debug, Error, PartialEq)]
pub enum BicriteriaError {
    #[error("eps must be positive to derive a grid resolution, got {value}")]
    NonPositiveEps { value: f64 },
    #[error("delta must lie strictly between 0 and 1, got {value}")]
    BadDelta { value: f64 },
    #[error("overridden grid resolution must be at least 1")]
    ZeroK,
    #[error("derived grid resolution does not fit in u64")]
    ResolutionOverflow,
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("lp solver failed: {0}")]
    Lp(#[from] LpError),
    #[error("solver reported {status:?} for a mixture program that always has an optimum")]
    NoOptimum { status: LpStatus },
    #[error("extracted scheme is malformed: {0}")]
    Scheme(#[from] SchemeError),
}

/// Grid resolution sufficient for the additive-eps, multiplicative
/// `(1 - delta) * alpha` guarantee: `ceil(32 ln(4 n rho / delta) / eps^2)`
/// where `n` is the receiver count and `rho` the largest action count.
pub fn compute_k<T: Scalar>(
    receivers: usize,
    max_actions: usize,
    eps: T,
    delta: T,
) -> Result<u64, BicriteriaError> {
    assert!(receivers >= 1 && max_actions >= 1);
    if !(eps > T::zero()) || !eps.is_finite() {
        return Err(BicriteriaError::NonPositiveEps {
            value: eps.to_f64().unwrap_or(f64::NAN),
        });
    }
    if !(delta > T::zero() && delta < T::one()) {
        return Err(BicriteriaError::BadDelta {
            value: delta.to_f64().unwrap_or(f64::NAN),
        });
    }
    let n = T::from_usize(receivers).unwrap();
    let rho = T::from_usize(max_actions).unwrap();
    let inside = lit::<T>(4.0) * n * rho / delta;
    let k = (lit::<T>(32.0) * inside.ln() / (eps * eps)).ceil();
    k.to_u64()
        .filter(|&k| k >= 1)
        .ok_or(BicriteriaError::ResolutionOverflow)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BicriteriaSolution<T> {
    pub scheme: DirectScheme<T>,
    pub value: T,
    /// Grid resolution actually used.
    pub k: u64,
    /// Mixture support: grid posteriors with positive weight, with the
    /// profile the selector picked there.
    pub support: Vec<(Posterior<T>, T, ActionProfile)>,
}

/// Solves the grid mixture program at resolution `k_override`, or at
/// [`compute_k`] when absent, and extracts an eps-persuasive scheme.
pub fn solve_bicriteria<T: Scalar>(
    instance: &Instance<T>,
    objective: &impl SenderObjective<T>,
    eps: T,
    delta: T,
    k_override: Option<u64>,
    budget: u128,
) -> Result<BicriteriaSolution<T>, BicriteriaError> {
    if !(eps >= T::zero()) || !eps.is_finite() {
        return Err(BicriteriaError::NonPositiveEps {
            value: eps.to_f64().unwrap_or(f64::NAN),
        });
    }
    let k = match k_override {
        Some(0) => return Err(BicriteriaError::ZeroK),
        Some(k) => k,
        None => compute_k(instance.num_receivers(), instance.max_actions(), eps, delta)?,
    };
    let d = instance.num_states();

    let mut points: Vec<Posterior<T>> = Vec::new();
    let mut picks: Vec<ActionProfile> = Vec::new();
    let mut payoff: Vec<T> = Vec::new();
    for p in enumerate_k_uniform::<T>(d, k, budget)? {
        let choices = instance.eps_best_responses(&p, eps)?;
        let profile = objective.select(&p, &choices);
        payoff.push(objective.expected_value(&p, &profile));
        picks.push(profile);
        points.push(p);
    }

    // One equality row per state plus the (redundant) total-mass row; the
    // solver drops whichever row phase 1 finds dependent.
    let mut lp = LinearProgram::maximize(payoff);
    for state in 0..d {
        let coeffs = points.iter().map(|p| p[state]).collect();
        lp.constrain(coeffs, Relation::Eq, instance.prior()[state]);
    }
    lp.constrain(vec![T::one(); points.len()], Relation::Eq, T::one());
    let sol = lp.solve()?;
    if sol.status != LpStatus::Optimal {
        // The grid contains every vertex of the simplex, so the prior is
        // always inside the grid's convex hull.
        return Err(BicriteriaError::NoOptimum { status: sol.status });
    }

    let support_tol = lit::<T>(crate::exact::SUPPORT_TOL);
    let mut support = Vec::new();
    let mut by_profile: BTreeMap<&ActionProfile, Vec<T>> = BTreeMap::new();
    for (j, &gamma) in sol.x.iter().enumerate() {
        if gamma <= support_tol {
            continue;
        }
        support.push((points[j].clone(), gamma, picks[j].clone()));
        let row = by_profile
            .entry(&picks[j])
            .or_insert_with(|| vec![T::zero(); d]);
        for state in 0..d {
            row[state] = row[state] + gamma * points[j][state];
        }
    }

    // Per state, signal masses sum to the prior mass reproduced by the
    // mixture; normalizing by that sum (rather than the prior itself) keeps
    // each row an exact distribution despite LP round-off.
    let mut mass = vec![T::zero(); d];
    for row in by_profile.values() {
        for state in 0..d {
            mass[state] = mass[state] + row[state];
        }
    }
    let signals = by_profile
        .into_iter()
        .map(|(profile, row)| {
            let probs = row
                .into_iter()
                .zip(&mass)
                .map(|(v, &m)| v / m)
                .collect();
            (profile.clone(), probs)
        })
        .collect();
    let scheme = DirectScheme::new(instance, signals)?;

    Ok(BicriteriaSolution {
        scheme,
        value: sol.value,
        k,
        support,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{example_instance, example_scheme};
    use crate::grid::DEFAULT_ENUM_BUDGET;
    use crate::voting::KVotingObjective;
    use approx::assert_abs_diff_eq;

    #[test]
    fn resolution_formula() {
        assert_eq!(compute_k(3, 2, 0.5, 0.5).unwrap(), 496);
        assert_eq!(compute_k(2, 2, 1.0, 0.5).unwrap(), 111);
        assert!(matches!(
            compute_k(3, 2, 0.0, 0.5),
            Err(BicriteriaError::NonPositiveEps { .. })
        ));
        assert!(matches!(
            compute_k(3, 2, 0.5, 1.0),
            Err(BicriteriaError::BadDelta { .. })
        ));
        assert!(matches!(
            compute_k(3, 2, 1e-12, 0.5),
            Err(BicriteriaError::ResolutionOverflow)
        ));
    }

    #[test]
    fn coarse_grid_recovers_the_example_optimum() {
        // The three posteriors that rule out one candidate each are 2-uniform,
        // so resolution 2 already finds the optimal scheme.
        let inst = example_instance();
        let obj = KVotingObjective::majority(&inst).unwrap();
        let sol = solve_bicriteria(&inst, &obj, 0.0, 0.5, Some(2), DEFAULT_ENUM_BUDGET).unwrap();
        assert_eq!(sol.k, 2);
        assert_abs_diff_eq!(sol.value, 1.0, epsilon = 1e-9);
        assert_eq!(sol.support.len(), 3);
        for (_, weight, _) in &sol.support {
            assert_abs_diff_eq!(*weight, 1.0 / 3.0, epsilon = 1e-9);
        }
        let reference = example_scheme(&inst);
        assert_eq!(sol.scheme.support(), reference.support());
        for state in 0..3 {
            for idx in 0..3 {
                assert_abs_diff_eq!(
                    sol.scheme.prob(state, idx),
                    reference.prob(state, idx),
                    epsilon = 1e-9
                );
            }
        }
        assert!(inst.persuasiveness_slack(&sol.scheme) >= -1e-9);
    }

    #[test]
    fn point_mass_grid_means_full_revelation() {
        let inst = example_instance();
        let obj = KVotingObjective::majority(&inst).unwrap();
        let sol = solve_bicriteria(&inst, &obj, 0.0, 0.5, Some(1), DEFAULT_ENUM_BUDGET).unwrap();
        assert_abs_diff_eq!(sol.value, 0.0, epsilon = 1e-9);
        assert_eq!(sol.scheme.num_signals(), 3);
    }

    #[test]
    fn mixture_reproduces_the_prior() {
        let inst = crate::fixtures::random_voting_instance(11, 4, 3);
        let obj = KVotingObjective::majority(&inst).unwrap();
        let sol = solve_bicriteria(&inst, &obj, 0.4, 0.3, Some(25), DEFAULT_ENUM_BUDGET).unwrap();
        let mut mix = vec![0.0; 3];
        for (p, w, _) in &sol.support {
            for state in 0..3 {
                mix[state] += w * p[state];
            }
        }
        for state in 0..3 {
            assert_abs_diff_eq!(mix[state], inst.prior()[state], epsilon = 1e-6);
        }
        // Every signal posterior is a grid point where the recommendation is
        // an eps-best response, so the scheme is eps-persuasive.
        assert!(inst.persuasiveness_slack(&sol.scheme) >= -0.4 - 1e-6);
    }

    #[test]
    fn budget_and_domain_errors() {
        let inst = example_instance();
        let obj = KVotingObjective::majority(&inst).unwrap();
        assert!(matches!(
            solve_bicriteria(&inst, &obj, 0.5, 0.5, None, 1000),
            Err(BicriteriaError::Grid(GridError::BudgetExceeded { .. }))
        ));
        assert!(matches!(
            solve_bicriteria(&inst, &obj, 0.5, 0.5, Some(0), DEFAULT_ENUM_BUDGET),
            Err(BicriteriaError::ZeroK)
        ));
        assert!(matches!(
            solve_bicriteria(&inst, &obj, -1.0, 0.5, Some(5), DEFAULT_ENUM_BUDGET),
            Err(BicriteriaError::NonPositiveEps { .. })
        ));
    }
}
