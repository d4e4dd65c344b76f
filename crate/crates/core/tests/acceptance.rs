//! End-to-end acceptance checks, one test per numbered criterion. Each test
//! prints a single `criterion N: PASS` line on success (visible with
//! `--nocapture`); a failed criterion shows up as an ordinary failing test.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use persuasion::bicriteria::{compute_k, solve_bicriteria};
use persuasion::exact::{solve_optimal_scheme, DEFAULT_LP_BUDGET};
use persuasion::fixtures::{example_instance, random_mfs_matrix, random_voting_instance};
use persuasion::grid::{binomial, enumerate_k_uniform, DEFAULT_ENUM_BUDGET};
use persuasion::lp::{LinearProgram, LpStatus, Relation};
use persuasion::mfs::{count_satisfied, kstar_bruteforce, solve_mfs_kuniform, voting_to_mfs};
use persuasion::sim::{fully_informative_scheme, simulate};
use persuasion::voting::KVotingObjective;
use persuasion::{ActionProfile, BrSet, Instance, Posterior, SenderObjective};

const VALUE_TOL: f64 = 1e-6;

fn election() -> (Instance<f64>, KVotingObjective) {
    let instance = example_instance();
    let objective = KVotingObjective::new(&instance, 2, None).expect("threshold 2 of 3 is valid");
    (instance, objective)
}

/// Criterion 1: the exact solver recovers the known optimum of the election
/// example. The sender can guarantee value 1, the optimal scheme uses three
/// signals, it is persuasive, and every signal's posterior convinces exactly
/// two voters.
#[test]
fn criterion_1_exact_optimum_on_the_election() {
    let started = Instant::now();
    let (instance, objective) = election();
    let sol = solve_optimal_scheme(&instance, &objective, 0.0, DEFAULT_LP_BUDGET).unwrap();

    assert!(
        (sol.value - 1.0).abs() <= VALUE_TOL,
        "optimal value should be 1, got {}",
        sol.value
    );
    let slack = instance.persuasiveness_slack(&sol.scheme);
    assert!(slack >= -VALUE_TOL, "scheme must be persuasive, slack {slack}");
    assert_eq!(sol.scheme.num_signals(), 3);
    for profile in sol.scheme.support() {
        let p = instance.bayes_posterior(&sol.scheme, profile).unwrap();
        let support = objective.count_support(&instance, &p, 0.0).unwrap();
        assert_eq!(support, 2, "posterior {:?} should convince two voters", p);
    }
    assert!(started.elapsed() < Duration::from_secs(1));
    println!("criterion 1 (exact optimum on the election): PASS");
}

/// Criterion 2: without information design the sender gets nothing. At the
/// prior no voter supports their candidate, and announcing the state
/// outright scores zero as well.
#[test]
fn criterion_2_prior_and_full_revelation_score_zero() {
    let (instance, objective) = election();
    let prior = Posterior::new(instance.prior().to_vec()).unwrap();
    assert_eq!(objective.count_support(&instance, &prior, 0.0).unwrap(), 0);

    let full = fully_informative_scheme(&instance, &objective);
    assert!(instance.persuasiveness_slack(&full) >= 0.0);
    assert_eq!(instance.expected_sender_utility(&objective, &full), 0.0);
    println!("criterion 2 (prior and full revelation score zero): PASS");
}

/// Criterion 3: the grid solver at resolution 2 recovers the election
/// optimum exactly, and its mixture of grid posteriors averages back to the
/// prior.
#[test]
fn criterion_3_grid_solver_recovers_the_election_optimum() {
    let started = Instant::now();
    let (instance, objective) = election();
    let sol =
        solve_bicriteria(&instance, &objective, 0.0, 0.5, Some(2), DEFAULT_ENUM_BUDGET).unwrap();

    assert_eq!(sol.k, 2);
    assert!(
        (sol.value - 1.0).abs() <= VALUE_TOL,
        "grid value should be 1, got {}",
        sol.value
    );
    let d = instance.num_states();
    let mut mix = vec![0.0; d];
    for (p, w, _) in &sol.support {
        for state in 0..d {
            mix[state] += w * p[state];
        }
    }
    for state in 0..d {
        assert!(
            (mix[state] - instance.prior()[state]).abs() <= VALUE_TOL,
            "mixture misses the prior in state {state}: {} vs {}",
            mix[state],
            instance.prior()[state]
        );
    }
    assert!(started.elapsed() < Duration::from_secs(1));
    println!("criterion 3 (grid solver recovers the election optimum): PASS");
}

/// Criterion 4: at the resolution the accuracy formula prescribes for
/// eps = delta = 1/2 the grid solver keeps at least half the optimal value,
/// stays eps-persuasive, and finishes well inside five minutes.
#[test]
fn criterion_4_grid_guarantee_at_the_prescribed_resolution() {
    let started = Instant::now();
    let (instance, objective) = election();
    let eps = 0.5;
    let delta = 0.5;
    assert_eq!(compute_k::<f64>(3, 2, eps, delta).unwrap(), 496);

    let sol = solve_bicriteria(&instance, &objective, eps, delta, None, DEFAULT_ENUM_BUDGET)
        .unwrap();
    assert_eq!(sol.k, 496);
    assert!(
        sol.value >= 0.5 - VALUE_TOL,
        "guarantee is value >= 0.5, got {}",
        sol.value
    );
    let slack = instance.persuasiveness_slack(&sol.scheme);
    assert!(slack >= -eps - VALUE_TOL, "slack {slack} breaches -eps");
    assert!(started.elapsed() < Duration::from_secs(300));
    println!("criterion 4 (grid guarantee at the prescribed resolution): PASS");
}

/// Criterion 5: on seeded random instances the grid solver's value is
/// sandwiched: never above the eps-relaxed exact optimum (any resolution),
/// and at the prescribed resolution never below (1 - delta) times the exact
/// optimum.
#[test]
fn criterion_5_grid_value_is_sandwiched_on_random_instances() {
    let eps = 0.5;
    let delta = 0.5;
    for seed in 0..50u64 {
        let n = 2 + (seed % 3) as usize;
        let d = 2 + (seed % 2) as usize;
        let instance = random_voting_instance(seed, n, d);
        let threshold = 1 + (seed as usize % n);
        let objective = KVotingObjective::new(&instance, threshold, None).unwrap();

        let exact = solve_optimal_scheme(&instance, &objective, 0.0, DEFAULT_LP_BUDGET).unwrap();
        let relaxed = solve_optimal_scheme(&instance, &objective, eps, DEFAULT_LP_BUDGET).unwrap();
        assert!(relaxed.value >= exact.value - VALUE_TOL);

        // Any resolution yields an eps-persuasive scheme, so the value can
        // never beat the eps-relaxed optimum.
        let coarse =
            solve_bicriteria(&instance, &objective, eps, delta, Some(8), DEFAULT_ENUM_BUDGET)
                .unwrap();
        assert!(
            coarse.value <= relaxed.value + VALUE_TOL,
            "seed {seed}: coarse grid value {} beats the relaxed optimum {}",
            coarse.value,
            relaxed.value
        );

        let fine = solve_bicriteria(&instance, &objective, eps, delta, None, DEFAULT_ENUM_BUDGET)
            .unwrap();
        assert!(
            fine.value <= relaxed.value + VALUE_TOL,
            "seed {seed}: grid value {} beats the relaxed optimum {}",
            fine.value,
            relaxed.value
        );
        let alpha: f64 = objective.alpha();
        let floor = alpha * (1.0 - delta) * exact.value;
        assert!(
            fine.value >= floor - VALUE_TOL,
            "seed {seed}: grid value {} under the guarantee {}",
            fine.value,
            floor
        );
    }
    println!("criterion 5 (grid value sandwiched on 50 random instances): PASS");
}

/// Criterion 6: with a slack of eps the grid sweep for the satisfied-rows
/// problem matches or beats the exact zero-slack optimum on random matrices.
#[test]
fn criterion_6_row_sweep_dominates_the_exact_oracle() {
    let started = Instant::now();
    for seed in 0..200u64 {
        let rows = 2 + (seed % 5) as usize;
        let cols = 2 + (seed % 3) as usize;
        let m = random_mfs_matrix(seed, rows, cols);
        let exact = kstar_bruteforce(&m).unwrap();
        for &eps in &[0.25, 0.5] {
            let sol = solve_mfs_kuniform(&m, eps, None, DEFAULT_ENUM_BUDGET).unwrap();
            assert!(
                sol.satisfied >= exact,
                "seed {seed} eps {eps}: sweep found {} rows, oracle {}",
                sol.satisfied,
                exact
            );
        }
    }
    assert!(started.elapsed() < Duration::from_secs(120));
    println!("criterion 6 (row sweep dominates the exact oracle): PASS");
}

/// Criterion 7: the margin-matrix view of a voting instance counts exactly
/// the supporting voters, bit for bit, across posteriors and slacks.
#[test]
fn criterion_7_margin_matrix_counts_match_voter_support() {
    let (instance, objective) = election();
    let m = voting_to_mfs(&instance).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let raw: Vec<f64> = (0..3).map(|_| rng.random_range(0.01..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let p = Posterior::new(raw.into_iter().map(|x| x / total).collect()).unwrap();
        for &eps in &[0.0, 0.1, 0.5] {
            assert_eq!(
                count_satisfied(&m, p.as_slice(), eps).unwrap(),
                objective.count_support(&instance, &p, eps).unwrap(),
                "counts disagree at {:?} eps {eps}",
                p
            );
        }
    }
    println!("criterion 7 (margin-matrix counts match voter support): PASS");
}

/// Criterion 8: the simplex implementation agrees with brute-force vertex
/// enumeration on 500 random small programs, both on status and on value.
#[test]
fn criterion_8_simplex_matches_vertex_enumeration() {
    for seed in 0..500u64 {
        let (c, rows) = random_small_lp(seed);
        let mut lp = LinearProgram::maximize(c.clone());
        for (coeffs, relation, rhs) in &rows {
            lp.constrain(coeffs.clone(), *relation, *rhs);
        }
        let sol = lp.solve().unwrap_or_else(|e| panic!("seed {seed}: {e}"));

        match best_vertex_value(&c, &rows) {
            None => assert_eq!(
                sol.status,
                LpStatus::Infeasible,
                "seed {seed}: no feasible vertex but solver says {:?}",
                sol.status
            ),
            Some(best) => {
                assert_eq!(
                    sol.status,
                    LpStatus::Optimal,
                    "seed {seed}: feasible program reported {:?}",
                    sol.status
                );
                assert!(
                    (sol.value - best).abs() <= VALUE_TOL,
                    "seed {seed}: simplex {} vs enumeration {}",
                    sol.value,
                    best
                );
            }
        }
    }
    println!("criterion 8 (simplex matches vertex enumeration on 500 programs): PASS");
}

/// Criterion 9: structural invariants. Bayes-consistent schemes mix back to
/// the prior; the grid enumerator's cardinality matches the closed form; the
/// voting selector is exactly optimal within the best-response sets; and
/// simulation reports are bit-identical under a fixed seed.
#[test]
fn criterion_9_structural_invariants() {
    mixing_reconstructs_the_prior();
    grid_counts_match_the_closed_form();
    selector_is_exactly_optimal();
    simulation_is_reproducible();
    println!("criterion 9 (structural invariants): PASS");
}

fn mixing_reconstructs_the_prior() {
    for seed in 0..20u64 {
        let instance = random_voting_instance(seed, 3, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(!seed);
        let profiles: Vec<ActionProfile> =
            (0..8usize).map(|m| vec![m >> 2 & 1, m >> 1 & 1, m & 1]).collect();
        let mut signals = Vec::new();
        for profile in &profiles {
            signals.push((profile.clone(), Vec::new()));
        }
        for _state in 0..3 {
            let raw: Vec<f64> = (0..8).map(|_| rng.random_range(0.01..1.0)).collect();
            let total: f64 = raw.iter().sum();
            for (signal, weight) in signals.iter_mut().zip(raw) {
                signal.1.push(weight / total);
            }
        }
        let scheme = persuasion::DirectScheme::new(&instance, signals).unwrap();

        let mut mix = vec![0.0; 3];
        for profile in &profiles {
            let idx = scheme.signal_index(profile).unwrap();
            let mut marginal = 0.0;
            for state in 0..3 {
                marginal += instance.prior()[state] * scheme.prob(state, idx);
            }
            let p = instance.bayes_posterior(&scheme, profile).unwrap();
            for state in 0..3 {
                mix[state] += marginal * p[state];
            }
        }
        for state in 0..3 {
            assert!(
                (mix[state] - instance.prior()[state]).abs() <= VALUE_TOL,
                "seed {seed}: posterior mixture misses the prior"
            );
        }
    }
}

fn grid_counts_match_the_closed_form() {
    for d in 1..=4usize {
        for k in 1..=10u64 {
            let enumerated = enumerate_k_uniform::<f64>(d, k, DEFAULT_ENUM_BUDGET)
                .unwrap()
                .count() as u128;
            assert_eq!(enumerated, binomial(k + d as u64 - 1, d as u64 - 1));
        }
    }
}

fn selector_is_exactly_optimal() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for seed in 0..60u64 {
        let n = 1 + (seed % 4) as usize;
        let instance = random_voting_instance(seed, n, 3);
        let threshold = 1 + (seed as usize % n);
        let objective = KVotingObjective::new(&instance, threshold, None).unwrap();
        let raw: Vec<f64> = (0..3).map(|_| rng.random_range(0.01..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let p = Posterior::new(raw.into_iter().map(|x| x / total).collect()).unwrap();
        for &eps in &[0.0, 0.3] {
            let choices = instance.eps_best_responses(&p, eps).unwrap();
            let picked = objective.select(&p, &choices);
            for r in 0..n {
                assert!(choices.contains(r, picked[r]));
            }
            let best = all_profiles(&choices)
                .into_iter()
                .map(|profile| objective.expected_value(&p, &profile))
                .fold(f64::NEG_INFINITY, f64::max);
            assert_eq!(objective.expected_value(&p, &picked), best);
        }
    }
}

fn simulation_is_reproducible() {
    let (instance, objective) = election();
    let scheme = persuasion::fixtures::example_scheme(&instance);
    let a = simulate(&instance, &objective, &scheme, 0.0, 2000, 42).unwrap();
    let b = simulate(&instance, &objective, &scheme, 0.0, 2000, 42).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.value, 1.0);
}

/// Every profile in the cartesian product of the per-receiver choice sets.
fn all_profiles(choices: &BrSet) -> Vec<ActionProfile> {
    let mut out: Vec<ActionProfile> = vec![Vec::new()];
    for r in 0..choices.num_receivers() {
        let mut next = Vec::new();
        for partial in &out {
            for &action in choices.actions(r) {
                let mut profile = partial.clone();
                profile.push(action);
                next.push(profile);
            }
        }
        out = next;
    }
    out
}

/// Random program on up to 4 variables and 4 rows with small integer data,
/// plus a box row that keeps the feasible region bounded. Integer data keeps
/// vertex coordinates well separated from the feasibility tolerance.
fn random_small_lp(seed: u64) -> (Vec<f64>, Vec<(Vec<f64>, Relation, f64)>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(1..=4usize);
    let m = rng.random_range(1..=4usize);
    let c: Vec<f64> = (0..n).map(|_| rng.random_range(-3..=3i32) as f64).collect();
    let mut rows = Vec::with_capacity(m + 1);
    for _ in 0..m {
        let coeffs: Vec<f64> = (0..n).map(|_| rng.random_range(-3..=3i32) as f64).collect();
        let relation = match rng.random_range(0..10u32) {
            0..=5 => Relation::Le,
            6..=8 => Relation::Ge,
            _ => Relation::Eq,
        };
        let rhs = rng.random_range(0..=4i32) as f64;
        rows.push((coeffs, relation, rhs));
    }
    rows.push((vec![1.0; n], Relation::Le, (5 + seed % 3) as f64));
    (c, rows)
}

/// Maximum objective over all vertices of the feasible region, or None when
/// no vertex is feasible. The region is bounded and pointed (x >= 0), so a
/// feasible program always has an optimal vertex and an infeasible one has
/// none.
fn best_vertex_value(c: &[f64], rows: &[(Vec<f64>, Relation, f64)]) -> Option<f64> {
    let n = c.len();
    let mut planes: Vec<(Vec<f64>, f64)> = rows.iter().map(|(a, _, b)| (a.clone(), *b)).collect();
    for j in 0..n {
        let mut unit = vec![0.0; n];
        unit[j] = 1.0;
        planes.push((unit, 0.0));
    }

    let mut best: Option<f64> = None;
    for mask in 0u32..(1 << planes.len()) {
        if mask.count_ones() as usize != n {
            continue;
        }
        let chosen: Vec<&(Vec<f64>, f64)> = (0..planes.len())
            .filter(|&i| mask >> i & 1 == 1)
            .map(|i| &planes[i])
            .collect();
        let Some(x) = solve_square(&chosen) else {
            continue;
        };
        if is_feasible(&x, rows) {
            let value = dot(c, &x);
            best = Some(best.map_or(value, |b: f64| b.max(value)));
        }
    }
    best
}

fn is_feasible(x: &[f64], rows: &[(Vec<f64>, Relation, f64)]) -> bool {
    const TOL: f64 = 1e-7;
    if x.iter().any(|&v| v < -TOL) {
        return false;
    }
    rows.iter().all(|(a, relation, b)| {
        let lhs = dot(a, x);
        match relation {
            Relation::Le => lhs <= b + TOL,
            Relation::Ge => lhs >= b - TOL,
            Relation::Eq => (lhs - b).abs() <= TOL,
        }
    })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Gaussian elimination with partial pivoting; None when the system is
/// (near-)singular.
fn solve_square(planes: &[&(Vec<f64>, f64)]) -> Option<Vec<f64>> {
    let n = planes.len();
    let mut a: Vec<Vec<f64>> = planes.iter().map(|(row, _)| row.clone()).collect();
    let mut b: Vec<f64> = planes.iter().map(|(_, rhs)| *rhs).collect();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-8 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in 0..n {
            if row == col {
                continue;
            }
            let factor = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= factor * a[col][k];
            }
            b[row] -= factor * b[col];
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}
