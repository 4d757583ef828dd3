//! Simulation and estimation of autologistic actor attribute models.

pub mod cli;
pub mod covariates;
pub mod diagnostics;
pub mod effects;
pub mod error;
pub mod estimation;
pub mod experiments;
pub mod fixtures;
pub mod graph;
pub mod moments;
pub mod oracle;
pub mod outcome;
pub mod sampler;

pub use covariates::CovariateTable;
pub use effects::{BoundModel, EffectSpec, Model};
pub use error::{Error, Result};
pub use graph::Graph;
pub use outcome::{MissingPolicy, OutcomeVector};
