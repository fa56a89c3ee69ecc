//! Ranking with submodular valuations.
//!
//! Given `m` elements, `n` monotone submodular functions `f^1..f^n` and
//! weights `w`, find an ordering of the elements minimizing `sum_i w_i c_i`,
//! where the cover time `c_i` is the first prefix length at which `f^i`
//! reaches 1.
//!
//! The crate provides:
//!
//! * value oracles for modular, coverage and explicit-table functions
//!   ([`valuation`]) and property checkers for them ([`properties`]),
//! * the adaptive residual updates algorithm, the cumulative greedy baseline
//!   and an exact brute-force search ([`solvers`]),
//! * instance generators, including the set cover reduction and the family
//!   on which cumulative greedy fails ([`generators`]),
//! * runtime audits of the approximation guarantee ([`analysis`]),
//! * the JSON instance format ([`document`]) and the `subrank` CLI ([`cli`]).
//!
//! Elements and functions are 0-based in the Rust API and 1-based in every
//! external format.

pub mod analysis;
pub mod cli;
pub mod document;
pub mod error;
pub mod generators;
pub mod instance;
pub mod properties;
pub mod solvers;
pub mod valuation;

/// Default slack for threshold comparisons: `f >= 1` is tested as `f >= 1 - 1e-9`.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

pub use error::{Error, Result};
pub use instance::{cover_times, validate_instance, CoverReport, Instance, LinearOrdering, Producer, RawInstance};
pub use solvers::{adaptive_residual_updates, brute_force_optimal, cumulative_greedy, PotentialRule, RunTrace};
pub use valuation::{SetFunction, Valuation};
