//! Exact Pareto maxima, reference points and truthful mechanisms for agents
//! with vector-valued (multi-criteria) valuations.
//!
//! All arithmetic is exact. Vectors hold arbitrary precision rationals, so
//! dominance tests never suffer from rounding.

pub mod bench;
pub mod error;
pub mod io;
pub mod lab;
pub mod mechanism;
pub mod pareto;
pub mod rational;
pub mod refpoints;
pub mod vector;

pub use error::{Error, Result};
pub use mechanism::{
    run_mechanism, run_mechanism_m, run_mechanism_m_prime, AgentId, Instance, MechanismKind,
    MechanismOutcome, PaymentPolicy,
};
pub use pareto::{max_set, max_set_fast, min_set, wmax_set};
pub use rational::Rational;
pub use refpoints::{reference_points, reference_points_fast, ReferencePointSet};
pub use vector::{Dominance, Vector, VectorSet};
