//! Configuration, file formats, and the command implementations behind the
//! `smbs` CLI.

pub mod commands;
pub mod config;
pub mod simstudy;

pub use crate::betastacy::discrete_weibull_cdf;
pub use config::RunConfig;
pub use simstudy::SimStudyTruth;
