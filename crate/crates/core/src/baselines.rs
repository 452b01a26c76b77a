//! Comparison estimators: plain linear LS and residual weighting (Rwgh).

use alloc::vec::Vec;

use crate::geometry::{AnglePair, Point3};
use crate::report::{EstimateReport, Method};
use crate::select::{binomial, enumerate_subsets, residual_cost, DEFAULT_ENUMERATION_CAP};
use crate::wlls::{build_linear_system, fit_wlls, solve_lls, solve_subset};
use crate::{Error, Result};

/// Residuals are floored here before inversion.
pub const RESIDUAL_FLOOR: f64 = 1e-12;

/// Unweighted linear LS; the report carries the residual cost over all measurements.
pub fn solve_lls_baseline(measurements: &[AnglePair], sensors: &[Point3]) -> Result<EstimateReport> {
    let sys = build_linear_system(measurements, sensors)?;
    let x = solve_lls(&sys)?;
    let all: Vec<usize> = (0..sys.measurement_count()).collect();
    Ok(EstimateReport::closed_form(
        Method::Lls,
        x,
        residual_cost(&sys, &all, x),
    ))
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if libm::fabs(self.sum) >= libm::fabs(v) {
            self.carry += (self.sum - t) + v;
        } else {
            self.carry += (v - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Running sums `z = Σ x̃ / R` and `ρ = Σ 1 / R`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RwghAccumulator {
    z: [CompensatedSum; 3],
    rho: CompensatedSum,
    terms: usize,
}

impl RwghAccumulator {
    /// Empty accumulator.
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds one subset estimate with residual `r` (floored at [`RESIDUAL_FLOOR`]).
    pub fn add(&mut self, estimate: Point3, r: f64) {
        let inv = 1.0 / r.max(RESIDUAL_FLOOR);
        for (z, v) in self.z.iter_mut().zip(estimate.to_array()) {
            z.add(v * inv);
        }
        self.rho.add(inv);
        self.terms += 1;
    }

    /// Weighted position sum `z`.
    pub fn z(&self) -> Point3 {
        Point3::new(self.z[0].value(), self.z[1].value(), self.z[2].value())
    }

    /// Weight sum `ρ`.
    pub fn rho(&self) -> f64 {
        self.rho.value()
    }

    /// Number of subsets accumulated.
    pub fn terms(&self) -> usize {
        self.terms
    }

    /// `z / ρ`, or `None` before any term was added.
    pub fn estimate(&self) -> Option<Point3> {
        (self.terms > 0).then(|| self.z() * (1.0 / self.rho()))
    }
}

/// Residual weighting over every subset of two or more measurements, using
/// [`DEFAULT_ENUMERATION_CAP`].
pub fn rwgh(measurements: &[AnglePair], sensors: &[Point3]) -> Result<EstimateReport> {
    rwgh_capped(measurements, sensors, DEFAULT_ENUMERATION_CAP)
}

/// Residual weighting with an explicit cap on the number of subsets.
///
/// Each subset is solved with the weighted linear LS estimator restricted to
/// its rows; degenerate subsets are skipped.
pub fn rwgh_capped(
    measurements: &[AnglePair],
    sensors: &[Point3],
    enumeration_cap: u64,
) -> Result<EstimateReport> {
    let l = measurements.len();
    let total: u128 = (2..=l).map(|j| binomial(l, j)).fold(0, u128::saturating_add);
    if total > enumeration_cap as u128 {
        return Err(Error::EnumerationCap {
            count: total,
            cap: enumeration_cap,
        });
    }
    let fit = fit_wlls(measurements, sensors)?;
    let weights = fit.weights.as_slice();
    let mut acc = RwghAccumulator::new();
    for j in 2..=l {
        let mut combos = enumerate_subsets(l, j)?;
        while let Some(subset) = combos.advance() {
            if let Ok(x) = solve_subset(&fit.system, subset, weights) {
                acc.add(x, residual_cost(&fit.system, subset, x));
            }
        }
    }
    let position = acc.estimate().ok_or(Error::EstimationFailure)?;
    let all: Vec<usize> = (0..l).collect();
    Ok(EstimateReport {
        method: Method::Rwgh,
        position,
        residual: residual_cost(&fit.system, &all, position),
        subset: None,
        iterations: acc.terms(),
        proposals: 0,
        truncated: false,
    })
}
