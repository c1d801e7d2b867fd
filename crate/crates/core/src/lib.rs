//! Constrained real-parameter optimization with a unified adaptive
//! differential-evolution engine.
//!
//! The engine evolves a population under a function-evaluation budget using
//! three trial-vector generation strategies (DE/rand/1, DE/current-to-rand/1,
//! DE/current-to-pbest/1). Each generation the population is sorted by the
//! superiority-of-feasible rule and split into a top sub-population, where
//! every strategy runs on every target, and a bottom sub-population, where a
//! single strategy is drawn from win/loss statistics collected over a sliding
//! learning window. Control parameters F and CR are adapted from
//! success-history memories, constraints are handled by a shrinking epsilon
//! threshold combined with feasibility rules, and long-stagnated individuals
//! are replaced from an archive of previously rejected trial vectors.
//!
//! The core is generic over the scalar type (`f32` or `f64`) through the
//! [`Real`] trait; the aliases at the crate root pin the common
//! double-precision instantiation.

pub mod adaptation;
pub mod config;
pub mod constraints;
pub mod engine;
pub mod error;
pub mod num;
pub mod problem;
pub mod problems;
pub mod rng;
pub mod strategies;

pub use config::{EngineConfig, Mode};
pub use engine::{run, run_traced, EngineState, GenTrace, RunReport};
pub use error::{Error, Result};
pub use num::Real;
pub use problem::{
    compute_violation, init_population, repair_bounds, Candidate, ProblemSpec, RawEval,
};
pub use rng::RngStream;

pub type Problem64 = problem::ProblemSpec<f64>;
pub type Candidate64 = problem::Candidate<f64>;
pub type Report64 = engine::RunReport<f64>;

pub type Problem32 = problem::ProblemSpec<f32>;
pub type Candidate32 = problem::Candidate<f32>;
pub type Report32 = engine::RunReport<f32>;
