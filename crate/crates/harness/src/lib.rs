//! Experiment orchestration for the hcns solvers: initial data, manufactured
//! solutions, parameter sweeps and artifact output.

pub mod config;
pub mod error;
pub mod experiments;
pub mod initial;
pub mod io;
pub mod mms;
pub mod report;
pub mod svg;
pub mod verdict;

pub use error::HarnessError;
pub use verdict::Verdict;
