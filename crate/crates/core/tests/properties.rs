//! Randomized invariants: whatever the data, distributions stay
//! distributions, tolerance relaxations only widen sets, the grid enumerator
//! is exact, and the simplex never loses to a feasible point it can see.

use proptest::prelude::*;

use persuasion::grid::{binomial, KUniformGrid};
use persuasion::lp::{LinearProgram, LpStatus, Relation};
use persuasion::mfs::{count_satisfied, voting_to_mfs};
use persuasion::fixtures::random_voting_instance;
use persuasion::voting::KVotingObjective;
use persuasion::{DirectScheme, Instance, Posterior, Receiver};

fn normalized(raw: Vec<f64>) -> Vec<f64> {
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / total).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

proptest! {
    /// Bayes plausibility: averaging the per-signal posteriors by the signal
    /// marginals always returns the prior, no matter the scheme.
    #[test]
    fn posterior_mixture_reconstructs_the_prior(
        (prior_raw, weight_rows) in (2usize..=4).prop_flat_map(|d| (
            prop::collection::vec(0.05f64..1.0, d),
            prop::collection::vec(prop::collection::vec(0.01f64..1.0, 4), d),
        )),
    ) {
        let d = prior_raw.len();
        let states = (0..d).map(|s| format!("s{s}")).collect();
        let actions = vec!["a".to_string(), "b".to_string()];
        let receivers = vec![
            Receiver::new("r0", actions.clone(), vec![vec![0.0; 2]; d]),
            Receiver::new("r1", actions, vec![vec![0.0; 2]; d]),
        ];
        let instance = Instance::new(states, normalized(prior_raw), receivers).unwrap();

        let profiles: Vec<Vec<usize>> =
            (0..4usize).map(|m| vec![m >> 1 & 1, m & 1]).collect();
        let mut signals: Vec<(Vec<usize>, Vec<f64>)> =
            profiles.iter().map(|p| (p.clone(), Vec::new())).collect();
        for row in &weight_rows {
            for (signal, w) in signals.iter_mut().zip(normalized(row.clone())) {
                signal.1.push(w);
            }
        }
        let scheme = DirectScheme::new(&instance, signals).unwrap();

        let mut mix = vec![0.0; d];
        for profile in &profiles {
            let idx = scheme.signal_index(profile).unwrap();
            let marginal: f64 = (0..d)
                .map(|s| instance.prior()[s] * scheme.prob(s, idx))
                .sum();
            let p = instance.bayes_posterior(&scheme, profile).unwrap();
            for s in 0..d {
                mix[s] += marginal * p[s];
            }
        }
        for s in 0..d {
            prop_assert!((mix[s] - instance.prior()[s]).abs() <= 1e-6);
        }
    }

    /// Widening the tolerance can only widen a receiver's set of acceptable
    /// actions, and the exact best response is always in it.
    #[test]
    fn tolerant_response_sets_nest(
        utilities in prop::collection::vec(prop::collection::vec(-1.0f64..1.0, 4), 3),
        posterior_raw in prop::collection::vec(0.01f64..1.0, 3),
        eps in 0.0f64..0.5,
        extra in 0.0f64..0.5,
    ) {
        let states = vec!["x".into(), "y".into(), "z".into()];
        let actions = (0..4).map(|a| format!("a{a}")).collect();
        let receiver = Receiver::new("r", actions, utilities);
        let instance = Instance::new(states, vec![1.0 / 3.0; 3], vec![receiver]).unwrap();
        let p = Posterior::new(normalized(posterior_raw)).unwrap();

        let tight = instance.eps_best_responses(&p, eps).unwrap();
        let loose = instance.eps_best_responses(&p, eps + extra).unwrap();
        let exact = instance.best_responses(&p);
        prop_assert!(exact.actions(0).iter().all(|&a| tight.contains(0, a)));
        prop_assert!(tight.actions(0).iter().all(|&a| loose.contains(0, a)));
    }

    /// The grid enumerator emits exactly the closed-form number of points,
    /// in strictly increasing lexicographic order, each summing to the
    /// resolution.
    #[test]
    fn grid_enumeration_is_exact(d in 1usize..=4, k in 1u64..=8) {
        let grid = KUniformGrid::new(d, k);
        let mut seen: u128 = 0;
        let mut previous: Option<Vec<u64>> = None;
        for nums in grid.numerators() {
            prop_assert_eq!(nums.iter().sum::<u64>(), k);
            if let Some(prev) = &previous {
                prop_assert!(prev < &nums);
            }
            previous = Some(nums);
            seen += 1;
        }
        prop_assert_eq!(seen, binomial(k + d as u64 - 1, d as u64 - 1));
        prop_assert_eq!(seen, grid.count());
    }

    /// Grid posteriors are genuine distributions with entries on the 1/k
    /// lattice.
    #[test]
    fn grid_posteriors_are_lattice_distributions(d in 1usize..=4, k in 1u64..=8) {
        for p in KUniformGrid::new(d, k).posteriors::<f64>() {
            let total: f64 = p.as_slice().iter().sum();
            prop_assert!((total - 1.0).abs() <= 1e-9);
            for &entry in p.as_slice() {
                prop_assert!((0.0..=1.0).contains(&entry));
                let scaled = entry * k as f64;
                prop_assert!((scaled - scaled.round()).abs() <= 1e-9);
            }
        }
    }

    /// Support counting is monotone in the slack, and the margin-matrix view
    /// counts the same voters bit for bit.
    #[test]
    fn support_counts_grow_with_slack_and_match_the_margin_matrix(
        (seed, n, d, posterior_raw, eps, extra) in (1usize..=4, 2usize..=3).prop_flat_map(
            |(n, d)| (
                any::<u64>(),
                Just(n),
                Just(d),
                prop::collection::vec(0.01f64..1.0, d),
                0.0f64..0.6,
                0.0f64..0.6,
            ),
        ),
    ) {
        let instance = random_voting_instance(seed, n, d);
        let objective = KVotingObjective::new(&instance, 1, None).unwrap();
        let p = Posterior::new(normalized(posterior_raw)).unwrap();

        let tight = objective.count_support(&instance, &p, eps).unwrap();
        let loose = objective.count_support(&instance, &p, eps + extra).unwrap();
        prop_assert!(tight <= loose);

        let m = voting_to_mfs(&instance).unwrap();
        prop_assert_eq!(count_satisfied(&m, p.as_slice(), eps).unwrap(), tight);
        prop_assert_eq!(count_satisfied(&m, p.as_slice(), eps + extra).unwrap(), loose);
    }

    /// On programs that are feasible and bounded by construction, the
    /// simplex returns an optimum that is consistent, feasible, and at least
    /// as good as an arbitrary feasible point.
    #[test]
    fn simplex_optimum_dominates_sampled_feasible_points(
        (c, rows, direction) in (1usize..=5, 1usize..=5).prop_flat_map(|(n, m)| (
            prop::collection::vec(-2.0f64..2.0, n),
            prop::collection::vec((prop::collection::vec(-2.0f64..2.0, n), 0.5f64..4.0), m),
            prop::collection::vec(0.0f64..1.0, n),
        )),
    ) {
        let n = c.len();
        let mut lp = LinearProgram::maximize(c.clone());
        for (coeffs, rhs) in &rows {
            lp.constrain(coeffs.clone(), Relation::Le, *rhs);
        }
        lp.constrain(vec![1.0; n], Relation::Le, 6.0);
        let sol = lp.solve().unwrap();
        prop_assert_eq!(sol.status, LpStatus::Optimal);
        prop_assert!((sol.value - dot(&c, &sol.x)).abs() <= 1e-6);
        for (coeffs, rhs) in &rows {
            prop_assert!(dot(coeffs, &sol.x) <= rhs + 1e-6);
        }
        prop_assert!(sol.x.iter().all(|&v| v >= -1e-9));

        // Scale the sampled direction until it hits the first constraint.
        let mut t = f64::INFINITY;
        for (coeffs, rhs) in rows.iter().chain(std::iter::once(&(vec![1.0; n], 6.0))) {
            let along = dot(coeffs, &direction);
            if along > 1e-9 {
                t = t.min(rhs / along);
            }
        }
        if t.is_finite() {
            let x: Vec<f64> = direction.iter().map(|&u| t * u).collect();
            prop_assert!(sol.value >= dot(&c, &x) - 1e-6);
        }
    }
}
