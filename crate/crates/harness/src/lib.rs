//! Monte-Carlo benchmark harness, dataset ingestion and command-line front end
//! for the [`aoa_nlos`] estimators.
//!
//! All tabular output is CSV with the header `method,p,n,trials,failures,rmse_m`.
//! Results depend only on the configuration and its seed: every trial draws
//! from its own random stream, and aggregation runs in trial order whatever
//! the worker count.

pub mod cli;
pub mod config;
pub mod dataset;
mod error;
pub mod metrics;
pub mod records;
pub mod sim;
pub mod streams;

pub use config::{AsaParams, Preset, ScenarioConfig};
pub use error::{Error, Result};
pub use metrics::rmse;
pub use records::RmseRecord;
