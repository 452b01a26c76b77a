use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::Point3;

/// Estimator identifiers, with the short ids used in reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    /// Identify-and-discard data selection over weighted linear LS (`alg1`).
    IadSelect,
    /// l1-minimization by adaptive simulated annealing (`alg2`).
    AsaL1,
    /// Unweighted linear LS (`lls`).
    Lls,
    /// Two-stage weighted linear LS (`wlls`).
    Wlls,
    /// Residual weighting over all subsets (`rwgh`).
    Rwgh,
}

impl Method {
    /// All methods in report order.
    pub const ALL: [Method; 5] = [
        Method::IadSelect,
        Method::AsaL1,
        Method::Lls,
        Method::Wlls,
        Method::Rwgh,
    ];

    /// Short id: `alg1`, `alg2`, `lls`, `wlls` or `rwgh`.
    pub fn id(&self) -> &'static str {
        match self {
            Method::IadSelect => "alg1",
            Method::AsaL1 => "alg2",
            Method::Lls => "lls",
            Method::Wlls => "wlls",
            Method::Rwgh => "rwgh",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// Error for an unknown method id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownMethod;

impl fmt::Display for UnknownMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("unknown method (expected alg1, alg2, lls, wlls or rwgh)")
    }
}

impl FromStr for Method {
    type Err = UnknownMethod;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|m| m.id().eq_ignore_ascii_case(s.trim()))
            .ok_or(UnknownMethod)
    }
}

/// Position estimate plus method metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateReport {
    /// Which estimator produced this report.
    pub method: Method,
    /// Estimated source position.
    pub position: Point3,
    /// Method-specific fit value:
    /// weighted LS residual (`wlls`), subset residual cost (`lls`, `alg1`, `rwgh`),
    /// or best l1 objective (`alg2`).
    pub residual: f64,
    /// Sensor indices the estimate was computed from, when a subset was selected.
    pub subset: Option<Vec<usize>>,
    /// Accepted annealing iterations, or subsets evaluated for the combinatorial methods.
    pub iterations: usize,
    /// Total annealing proposals (zero for closed-form methods).
    pub proposals: usize,
    /// Annealing stopped on the proposal cap before its iteration budget.
    pub truncated: bool,
}

impl EstimateReport {
    pub(crate) fn closed_form(method: Method, position: Point3, residual: f64) -> Self {
        Self {
            method,
            position,
            residual,
            subset: None,
            iterations: 0,
            proposals: 0,
            truncated: false,
        }
    }
}

impl core::error::Error for UnknownMethod {}
