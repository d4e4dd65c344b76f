//! Public signaling for many receivers with no inter-agent externalities.
//!
//! A sender privately observes a state drawn from a common-knowledge prior
//! and publicly commits to a signaling scheme; every receiver sees the same
//! signal, forms a posterior, and best-responds on its own, since no
//! receiver's utility depends on what the others do. The crate solves for
//! sender-optimal schemes two ways:
//!
//! * [`exact`]: one linear program over every action profile. Exact, but the
//!   profile count is exponential in the receiver count.
//! * [`bicriteria`]: a mixture over the k-uniform posterior grid, polynomial
//!   for constantly many states. Its schemes are `eps`-persuasive (receivers
//!   lose at most `eps` by obeying) and within a `(1 - delta) * alpha`
//!   factor of the unrelaxed optimum, where `alpha` is the objective
//!   selector's approximation factor.
//!
//! [`voting`] supplies the flagship objective (get `threshold` receivers to
//! play a designated action), [`mfs`] the equivalent maximum-feasible-
//! subsystem view used to cross-check it, [`lp`] the self-contained simplex
//! solver underneath, and [`sim`] a Monte Carlo audit harness. Solvers are
//! generic over the floating-point [`scalar::Scalar`]; the `*64` aliases
//! below cover the common case.
//!
//! ```
//! use persuasion::fixtures::example_instance;
//! use persuasion::voting::KVotingObjective;
//! use persuasion::exact::{solve_optimal_scheme, DEFAULT_LP_BUDGET};
//!
//! let instance = example_instance();
//! let objective = KVotingObjective::majority(&instance).unwrap();
//! let best = solve_optimal_scheme(&instance, &objective, 0.0, DEFAULT_LP_BUDGET).unwrap();
//! assert!((best.value - 1.0).abs() < 1e-9);
//! assert!(instance.persuasiveness_slack(&best.scheme) >= -1e-9);
//! ```

pub mod bicriteria;
pub mod exact;
pub mod fixtures;
pub mod grid;
pub mod instance;
pub mod lp;
pub mod mfs;
pub mod objective;
pub mod scalar;
pub mod scheme;
pub mod sim;
pub mod voting;

/// Absolute tolerance for checking that probability vectors sum to 1.
pub const PROB_TOL: f64 = 1e-9;
/// Absolute tolerance for argmax membership (best-response ties).
pub const TIE_TOL: f64 = 1e-9;

pub use instance::{BrSet, Instance, Posterior, Receiver};
pub use objective::SenderObjective;
pub use scalar::Scalar;
pub use scheme::{ActionProfile, DirectScheme};

pub type Instance64 = Instance<f64>;
pub type Posterior64 = Posterior<f64>;
pub type DirectScheme64 = DirectScheme<f64>;
pub type LinearProgram64 = lp::LinearProgram<f64>;
pub type MfsInstance64 = mfs::MfsInstance<f64>;
