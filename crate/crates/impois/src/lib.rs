//! Guaranteed lower and upper conditional expectations of functions of a
//! counting process whose event rate is only known to lie in an interval.
//!
//! Given a rate interval `[lower, upper]`, two sets of processes are
//! described by it: the Poisson processes whose rate lies in the interval,
//! and the strictly larger family of *all* counting processes whose
//! instantaneous rates stay inside the interval at every history. This
//! crate computes
//!
//! ```text
//! inf / sup over the set of  E( f(X_s) | X_t = x )
//! ```
//!
//! for both sets, with an a-priori error bound on every answer. The Poisson
//! set reduces to a one-parameter optimization over the rate; the larger
//! consistent set is handled by a backward Euler recursion for the lower
//! transition operator on a finite count window, with the grid chosen from
//! the operator-norm error bound. Declared-monotone functions collapse to a
//! single precise Poisson expectation at an interval endpoint for either
//! set.
//!
//! # Quick start
//!
//! ```
//! use impois::{
//!     lower_expectation, FunctionSpec, RateInterval, SetKind,
//! };
//!
//! let rates = RateInterval::new(1.0, 2.0).unwrap();
//! let no_event = FunctionSpec::indicator_eq(0);
//! let r = lower_expectation(
//!     SetKind::ConsistentSet, &rates, 0.0, 1.0, 0, &no_event, 1e-6,
//! )
//! .unwrap();
//! // probability of seeing no event over one unit of time
//! assert!((r.lower - (-2.0f64).exp()).abs() < 1e-6);
//! assert!((r.upper - (-1.0f64).exp()).abs() < 1e-6);
//! ```
//!
//! # Examples
//!
//! Each major capability has a runnable example:
//!
//! - **`exact_poisson`** - pmf, transition probabilities and series
//!   expectations of the precise process
//! - **`expected_counts`** - closed-form bounds on the expected count
//! - **`indicator_bounds`** - lower/upper probabilities for both sets,
//!   including the gap between them
//! - **`transition_probability_curves`** - the no-event and one-event
//!   probability curves over a time range, as CSV
//! - **`monotone_shortcut`** - declared-monotone functions collapse to the
//!   interval endpoints
//! - **`growth_functions`** - unbounded functions under a growth envelope
//! - **`oracle_check`** - randomized brute-force verification of the engine
//!
//! ```bash
//! cargo run --release -p impois --example exact_poisson
//! cargo run --release -p impois --example indicator_bounds
//! ```
//!
//! The same functionality is scriptable through the `impois` binary
//! (`bounds`, `sweep`, `exact`, `oracle-check` subcommands).

pub mod api;
pub mod cli;
mod error;
pub mod exact;
pub mod function;
pub mod generator;
pub mod oracle;
pub mod semigroup;

/// Number of occurred events; the state of the counting process.
pub type Count = u64;

pub use api::{expected_count_bounds, lower_expectation, upper_expectation, SetKind};
pub use error::{Error, Result};
pub use exact::{
    pmf, poisson_expectation, poisson_tail_cutoff, transition_probability, PoissonMean,
};
pub use function::{FunctionSpec, GrowthEnvelope, Monotonicity};
pub use generator::{
    apply_lower_generator, apply_selected_generator, RateInterval, RateSelection, WindowFunction,
};
pub use oracle::{brute_force_phi, series_expectation_oracle, OracleBudget};
pub use semigroup::{
    a_priori_error, approx_lower_transition, choose_grid, euler_step, lower_prevision_bounded,
    lower_prevision_ev_const, lower_prevision_growth, phi_apply, upper_prevision, ApproxResult,
    BoundResult, TimeGrid,
};
