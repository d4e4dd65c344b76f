//! Ready-made instances: a small election that exercises every solver, plus
//! seeded random generators backing the CLI's `gen` command and the
//! randomized tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::instance::{Instance, Receiver};
use crate::mfs::MfsInstance;
use crate::scheme::DirectScheme;

/// Three equally likely candidates A, B, C, one of which is "good"; three
/// voters, each backing one candidate. Voting for the good candidate pays 1,
/// for a bad one -1, and not voting pays -1/4 regardless. The sender wants a
/// majority of votes; action 0 is "yes", action 1 is "no".
pub fn example_instance() -> Instance<f64> {
    let states = vec!["A".to_string(), "B".to_string(), "C".to_string()];
    let prior = vec![1.0 / 3.0; 3];
    let actions = || vec!["yes".to_string(), "no".to_string()];
    let utilities = |good: usize| {
        (0..3)
            .map(|state| vec![if state == good { 1.0 } else { -1.0 }, -0.25])
            .collect()
    };
    let receivers = vec![
        Receiver::new("voter1", actions(), utilities(0)),
        Receiver::new("voter2", actions(), utilities(1)),
        Receiver::new("voter3", actions(), utilities(2)),
    ];
    Instance::new(states, prior, receivers).expect("example instance is valid")
}

/// Hand-built optimal scheme for [`example_instance`]: each signal rules out
/// one candidate, telling the other two voters to vote yes. Always elects a
/// candidate and is strictly persuasive.
pub fn example_scheme(instance: &Instance<f64>) -> DirectScheme<f64> {
    let signals = vec![
        // "not A": probability 1/2 in states B and C, never in A.
        (vec![1, 0, 0], vec![0.0, 0.5, 0.5]),
        (vec![0, 1, 0], vec![0.5, 0.0, 0.5]),
        (vec![0, 0, 1], vec![0.5, 0.5, 0.0]),
    ];
    DirectScheme::new(instance, signals).expect("example scheme is valid")
}

/// Random voting instance: binary actions, utilities uniform in [-1, 1],
/// a full-support random prior. Deterministic in `seed`.
pub fn random_voting_instance(seed: u64, receivers: usize, states: usize) -> Instance<f64> {
    assert!(receivers > 0 && states > 0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw: Vec<f64> = (0..states).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let prior: Vec<f64> = raw.into_iter().map(|x| x / total).collect();
    let state_names = (0..states).map(|s| format!("s{s}")).collect();
    let recvs = (0..receivers)
        .map(|r| {
            let utilities = (0..states)
                .map(|_| {
                    vec![
                        rng.random_range(-1.0..=1.0),
                        rng.random_range(-1.0..=1.0),
                    ]
                })
                .collect();
            Receiver::new(
                format!("r{r}"),
                vec!["yes".to_string(), "no".to_string()],
                utilities,
            )
        })
        .collect();
    Instance::new(state_names, prior, recvs).expect("generated instance is valid")
}

/// Random margin matrix with entries uniform in the declared range [-1, 1].
/// Deterministic in `seed`.
pub fn random_mfs_matrix(seed: u64, rows: usize, cols: usize) -> MfsInstance<f64> {
    assert!(rows > 0 && cols > 0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let matrix = (0..rows)
        .map(|_| (0..cols).map(|_| rng.random_range(-1.0..=1.0)).collect())
        .collect();
    MfsInstance::new(matrix, -1.0, 1.0).expect("generated matrix is valid")
}
