use thiserror::Error;

/// Errors raised by the estimators and model routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The geometry leaves the problem undefined or rank deficient.
    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(&'static str),
    /// A direction vector of arrival is not unit norm.
    #[error("direction vector has norm {norm}, expected 1")]
    InvalidDvoa {
        /// Euclidean norm of the rejected vector.
        norm: f64,
    },
    /// Measurement and sensor lists differ in length.
    #[error("{measurements} measurements but {sensors} sensors")]
    LengthMismatch {
        /// Number of measurements supplied.
        measurements: usize,
        /// Number of sensors supplied.
        sensors: usize,
    },
    /// Fewer than two measurements.
    #[error("at least 2 measurements required, got {0}")]
    TooFewMeasurements(usize),
    /// Subset cardinality outside `2..=L`.
    #[error("subset size {n} outside 2..={l}")]
    SubsetSize {
        /// Requested cardinality.
        n: usize,
        /// Number of available measurements.
        l: usize,
    },
    /// Exhaustive enumeration would exceed the configured cap.
    #[error("{count} subsets exceed the enumeration cap of {cap}")]
    EnumerationCap {
        /// Number of subsets the search would visit.
        count: u128,
        /// Configured cap.
        cap: u64,
    },
    /// Every candidate subset was degenerate.
    #[error("estimation failed: every candidate subset was degenerate")]
    EstimationFailure,
    /// Noise parameters out of range.
    #[error("invalid noise spec: {0}")]
    InvalidNoise(&'static str),
    /// Annealing configuration out of range.
    #[error("invalid annealing config: {0}")]
    InvalidConfig(&'static str),
    /// Scenario violates its invariants.
    #[error("invalid scenario: {0}")]
    InvalidScenario(&'static str),
}

/// Result alias for this crate.
pub type Result<T> = core::result::Result<T, Error>;
