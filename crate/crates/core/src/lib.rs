//! Stochastic monotone submodular maximization with queries.
//!
//! Elements of a ground set carry hidden active/inactive states drawn
//! independently; only active elements contribute objective value, and a
//! query reveals one element's state. This crate implements the adaptive
//! query strategies for that model, the exchange-map machinery used to
//! certify their guarantees, and a reproducible experiment harness that
//! measures realized approximation ratios against brute-force omniscient
//! optima at desk scale.

pub mod domain;
pub mod error;
pub mod exchange;
pub mod experiment;
pub mod objective;
pub mod rng;
pub mod scenario;
pub mod set;
pub mod solver;
pub mod strategy;

pub use error::{Error, Result};
pub use rng::RandomSource;
pub use set::{GroundSet, Subset};
