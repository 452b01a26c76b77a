//! Angle-of-arrival (AOA) single-source localization in 3-D under mixed
//! line-of-sight (LOS) and non-line-of-sight (NLOS) propagation.
//!
//! The crate is `no_std` and needs only `alloc`. It provides:
//!
//! - [`geometry`]: points, azimuth/elevation pairs, direction vectors of arrival.
//! - [`noise`]: the Gaussian-uniform mixture error model and a measurement generator.
//! - [`wlls`]: the stacked linear system and the two-stage weighted linear LS solve.
//! - [`select`]: residual cost over measurement subsets and identify-and-discard selection.
//! - [`asa`]: l1-minimization by adaptive simulated annealing.
//! - [`baselines`]: plain linear LS and residual weighting, for comparison.
//!
//! Every stochastic routine takes an explicit `rand::Rng`, so results are
//! reproducible from whatever seeded generator the caller supplies.
#![no_std]
#![warn(missing_docs)]

extern crate alloc;

pub mod asa;
pub mod baselines;
mod error;
pub mod geometry;
mod lstsq;
pub mod noise;
mod report;
pub mod select;
pub mod wlls;

pub use error::{Error, Result};
pub use geometry::{AnglePair, Dvoa, Point3};
pub use report::{EstimateReport, Method};
