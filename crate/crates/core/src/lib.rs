//! Bayesian nonparametric inference for discrete-time semi-Markov processes.
//!
//! A semi-Markov process moves through a finite state space, spending a
//! random holding time in each state before jumping according to a
//! transition matrix with zero diagonal. This crate places a conjugate
//! nonparametric prior on the pair (transition matrix, holding-time
//! distributions): independent Dirichlet processes on the rows and
//! independent beta-Stacy processes on the holding times. Observed paths
//! update every component in closed form, one-step-ahead predictions are
//! available exactly, and multi-step forecasts come from Monte Carlo
//! simulation of the reinforced predictive process. The same predictive law
//! is realized by a random walk over a system of reinforced urns, which the
//! [`urns`] module implements directly.
//!
//! The [`app`] module provides the configuration format, file I/O, and the
//! simulation-study commands behind the `smbs` command-line tool.

pub mod app;
pub mod betastacy;
pub mod dirichlet;
pub mod error;
pub mod model;
pub mod predictive;
pub mod smbs;
pub mod urns;

pub use betastacy::{
    discrete_weibull_cdf, BetaStacyParams, CenteringDistribution, PrecisionFunction,
    SampledSurvival,
};
pub use dirichlet::DirichletParams;
pub use error::{Result, SmbsError};
pub use model::{
    CountingStats, LengthHistogram, PathDecomposition, State, StateSequence, StateSpace,
};
pub use predictive::{
    h_step_predictive, predictive_kernel, rsm_extend_path, update_stats_incremental,
    PredictiveMatrix, PredictiveState,
};
pub use smbs::{CharacteristicCouple, HoldingLaw, SmbsParams, StatePrior, TimeIndexedJumpParams};
pub use urns::{BsSystem, DirUrn, RecurrenceDiagnostics, UrnModelKind, UrnProcessState};
