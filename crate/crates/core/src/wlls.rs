//! Linearized AOA equations and the closed-form (weighted) linear LS estimator.
//!
//! For sensor `i` with measured azimuth θ̂ and elevation φ̂ the source `x`
//! approximately satisfies two linear equations:
//!
//! ```text
//! cᵀ (x - xᵢ) ≈ 0            c = [-sin θ̂, cos θ̂, 0]
//! (k - û sin φ̂)ᵀ (x - xᵢ) ≈ 0   k = [0, 0, 1], û the measured DVOA
//! ```
//!
//! Stacking all azimuth rows and then all elevation rows gives `A x ≈ b` with
//! `b` the rows applied to the sensor positions. The weighted estimate
//! minimizes `(Ax - b)ᵀ W (Ax - b)` where both rows of sensor `i` carry weight
//! `wᵢ = 1 - dᵢ / Σⱼ dⱼ`, `dᵢ` being the distance from an unweighted first
//! estimate to sensor `i`.

use alloc::vec::Vec;

use crate::geometry::{dvoa_from_angles, AnglePair, Point3};
use crate::lstsq::Lstsq3;
use crate::report::{EstimateReport, Method};
use crate::{Error, Result};

/// The stacked `2L × 3` system `A x ≈ b`: `L` azimuth rows, then `L` elevation rows.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSystem {
    rows: Vec<[f64; 3]>,
    rhs: Vec<f64>,
    sensor_index: Vec<usize>,
}

impl LinearSystem {
    /// Number of measurements `L` (half the row count).
    pub fn measurement_count(&self) -> usize {
        self.sensor_index.len() / 2
    }

    /// Rows of `A`.
    pub fn rows(&self) -> &[[f64; 3]] {
        &self.rows
    }

    /// Entries of `b`.
    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    /// Sensor id of every row.
    pub fn sensor_index(&self) -> &[usize] {
        &self.sensor_index
    }

    /// `(row, rhs)` of the azimuth equation of sensor `i`.
    pub fn azimuth_row(&self, i: usize) -> ([f64; 3], f64) {
        (self.rows[i], self.rhs[i])
    }

    /// `(row, rhs)` of the elevation equation of sensor `i`.
    pub fn elevation_row(&self, i: usize) -> ([f64; 3], f64) {
        let r = self.measurement_count() + i;
        (self.rows[r], self.rhs[r])
    }

    /// Azimuth and elevation equation residuals of sensor `i` at `x`.
    pub fn residuals(&self, i: usize, x: Point3) -> (f64, f64) {
        let eval = |(row, rhs): ([f64; 3], f64)| Point3::from_array(row).dot(&x) - rhs;
        (eval(self.azimuth_row(i)), eval(self.elevation_row(i)))
    }
}

/// Builds the stacked system from per-sensor angle measurements.
pub fn build_linear_system(measurements: &[AnglePair], sensors: &[Point3]) -> Result<LinearSystem> {
    if measurements.len() != sensors.len() {
        return Err(Error::LengthMismatch {
            measurements: measurements.len(),
            sensors: sensors.len(),
        });
    }
    let l = measurements.len();
    if l < 2 {
        return Err(Error::TooFewMeasurements(l));
    }
    let mut rows = Vec::with_capacity(2 * l);
    let mut rhs = Vec::with_capacity(2 * l);
    for (a, s) in measurements.iter().zip(sensors) {
        let (sin_t, cos_t) = libm::sincos(a.azimuth());
        let c = Point3::new(-sin_t, cos_t, 0.0);
        rows.push(c.to_array());
        rhs.push(c.dot(s));
    }
    for (a, s) in measurements.iter().zip(sensors) {
        let u = Point3::from_array(dvoa_from_angles(*a).components());
        let e = Point3::new(0.0, 0.0, 1.0) - u * libm::sin(a.elevation());
        rows.push(e.to_array());
        rhs.push(e.dot(s));
    }
    let sensor_index = (0..2 * l).map(|r| r % l).collect();
    Ok(LinearSystem {
        rows,
        rhs,
        sensor_index,
    })
}

/// Per-sensor weights; both rows of a sensor share its weight.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    /// Unit weights for `l` sensors.
    pub fn ones(l: usize) -> Self {
        Self(alloc::vec![1.0; l])
    }

    /// Wraps explicit weights.
    pub fn from_vec(w: Vec<f64>) -> Self {
        Self(w)
    }

    /// Weights as a slice.
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// Sum of weights.
    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }
}

/// `wᵢ = 1 - ‖x̄ - xᵢ‖ / Σⱼ ‖x̄ - xⱼ‖`, favouring sensors near the initial estimate.
///
/// The weights sum to `L - 1`.
pub fn compute_weights(x_init: Point3, sensors: &[Point3]) -> WeightVector {
    let d: Vec<f64> = sensors.iter().map(|s| x_init.distance(s)).collect();
    let total: f64 = d.iter().sum();
    if !(total > 0.0) {
        let l = sensors.len() as f64;
        return WeightVector(alloc::vec![1.0 - 1.0 / l; sensors.len()]);
    }
    WeightVector(d.iter().map(|di| 1.0 - di / total).collect())
}

/// Weighted solve restricted to the sensors in `subset`.
///
/// `weights` is indexed by sensor id; rows of sensors outside the subset are dropped.
pub fn solve_subset(sys: &LinearSystem, subset: &[usize], weights: &[f64]) -> Result<Point3> {
    let mut ls = Lstsq3::with_capacity(2 * subset.len());
    for &i in subset {
        let (row, rhs) = sys.azimuth_row(i);
        ls.push(row, rhs, weights[i]);
        let (row, rhs) = sys.elevation_row(i);
        ls.push(row, rhs, weights[i]);
    }
    ls.solve().map(Point3::from_array)
}

/// Minimizer of `(Ax - b)ᵀ W (Ax - b)` over all measurements.
pub fn solve_weighted(sys: &LinearSystem, weights: &WeightVector) -> Result<Point3> {
    let all: Vec<usize> = (0..sys.measurement_count()).collect();
    solve_subset(sys, &all, weights.as_slice())
}

/// Unweighted minimizer of `‖Ax - b‖²`.
pub fn solve_lls(sys: &LinearSystem) -> Result<Point3> {
    solve_weighted(sys, &WeightVector::ones(sys.measurement_count()))
}

/// `‖W^{1/2}(Ax - b)‖²`.
pub fn weighted_residual(sys: &LinearSystem, weights: &WeightVector, x: Point3) -> f64 {
    weights
        .as_slice()
        .iter()
        .enumerate()
        .map(|(i, w)| {
            let (ra, re) = sys.residuals(i, x);
            w * (ra * ra + re * re)
        })
        .sum()
}

/// Intermediate and final quantities of the two-stage weighted solve.
#[derive(Debug, Clone, PartialEq)]
pub struct WllsFit {
    /// The stacked system over all measurements.
    pub system: LinearSystem,
    /// Unweighted first-stage estimate.
    pub initial: Point3,
    /// Weights computed from `initial`.
    pub weights: WeightVector,
    /// Weighted estimate.
    pub estimate: Point3,
}

/// Unweighted solve, distance weights, then the weighted solve.
pub fn fit_wlls(measurements: &[AnglePair], sensors: &[Point3]) -> Result<WllsFit> {
    let system = build_linear_system(measurements, sensors)?;
    let initial = solve_lls(&system)?;
    let weights = compute_weights(initial, sensors);
    let estimate = solve_weighted(&system, &weights)?;
    Ok(WllsFit {
        system,
        initial,
        weights,
        estimate,
    })
}

/// Two-stage weighted linear LS estimate, reporting the final weighted residual.
pub fn solve_wlls(measurements: &[AnglePair], sensors: &[Point3]) -> Result<EstimateReport> {
    let fit = fit_wlls(measurements, sensors)?;
    let residual = weighted_residual(&fit.system, &fit.weights, fit.estimate);
    Ok(EstimateReport::closed_form(Method::Wlls, fit.estimate, residual))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::true_angles;
    use alloc::vec;

    fn noiseless(source: Point3, sensors: &[Point3]) -> Vec<AnglePair> {
        sensors.iter().map(|&s| true_angles(source, s).unwrap()).collect()
    }

    fn dist(a: Point3, b: Point3) -> f64 {
        a.distance(&b)
    }

    #[test]
    fn row_shapes() {
        let sensors = [Point3::ORIGIN, Point3::new(1.0, 0.0, 0.0)];
        let meas = [AnglePair::new(0.0, 0.0), AnglePair::new(0.3, 0.2)];
        let sys = build_linear_system(&meas, &sensors).unwrap();
        assert_eq!(sys.rows().len(), 4);
        assert_eq!(sys.azimuth_row(0).0, [-0.0, 1.0, 0.0]);
        assert_eq!(sys.elevation_row(0).0, [0.0, 0.0, 1.0]);
        assert!(sys.rows()[..2].iter().all(|r| r[2] == 0.0));
        assert_eq!(sys.sensor_index(), &[0, 1, 0, 1]);
    }

    #[test]
    fn input_errors() {
        let s = [Point3::ORIGIN, Point3::new(1.0, 0.0, 0.0)];
        let m = [AnglePair::new(0.0, 0.0)];
        assert_eq!(
            build_linear_system(&m, &s),
            Err(Error::LengthMismatch {
                measurements: 1,
                sensors: 2
            })
        );
        assert_eq!(
            build_linear_system(&m, &s[..1]),
            Err(Error::TooFewMeasurements(1))
        );
    }

    #[test]
    fn noiseless_rows_are_consistent() {
        let sensors = [
            Point3::new(-3.0, 2.0, 1.0),
            Point3::new(4.0, -1.0, 0.0),
            Point3::new(0.5, 6.0, -2.0),
        ];
        let src = Point3::new(1.0, 1.5, 2.5);
        let sys = build_linear_system(&noiseless(src, &sensors), &sensors).unwrap();
        for i in 0..3 {
            let (a, e) = sys.residuals(i, src);
            assert!(libm::fabs(a) < 1e-10 && libm::fabs(e) < 1e-10);
        }
    }

    #[test]
    fn two_sensor_recovery() {
        let sensors = [Point3::ORIGIN, Point3::new(10.0, 0.0, 0.0)];
        let src = Point3::new(5.0, 5.0, 2.0);
        let sys = build_linear_system(&noiseless(src, &sensors), &sensors).unwrap();
        assert!(dist(solve_lls(&sys).unwrap(), src) < 1e-6);
    }

    #[test]
    fn duplicated_rows_give_same_solution() {
        let sensors = [
            Point3::new(-3.0, 2.0, 1.0),
            Point3::new(4.0, -1.0, 0.0),
            Point3::new(0.5, 6.0, -2.0),
        ];
        let meas = [
            AnglePair::new(0.3, 0.1),
            AnglePair::new(2.5, 0.4),
            AnglePair::new(-1.2, 0.3),
        ];
        let x = solve_lls(&build_linear_system(&meas, &sensors).unwrap()).unwrap();
        let s2: Vec<_> = sensors.iter().chain(&sensors).copied().collect();
        let m2: Vec<_> = meas.iter().chain(&meas).copied().collect();
        let x2 = solve_lls(&build_linear_system(&m2, &s2).unwrap()).unwrap();
        assert!(dist(x, x2) < 1e-10);
    }

    #[test]
    fn weight_examples() {
        let x = Point3::ORIGIN;
        let w = compute_weights(x, &[Point3::new(1.0, 0.0, 0.0), Point3::new(-3.0, 0.0, 0.0)]);
        assert_eq!(w.as_slice(), &[0.75, 0.25]);

        let eq = [
            Point3::new(2.0, 0.0, 0.0),
            Point3::new(0.0, 2.0, 0.0),
            Point3::new(0.0, 0.0, -2.0),
            Point3::new(-2.0, 0.0, 0.0),
        ];
        let w = compute_weights(x, &eq);
        assert!(w.as_slice().iter().all(|&wi| wi == 0.75));
        assert!(libm::fabs(w.sum() - 3.0) < 1e-12);
    }

    #[test]
    fn weight_at_sensor_is_one() {
        let s = [Point3::ORIGIN, Point3::new(1.0, 0.0, 0.0)];
        let w = compute_weights(Point3::ORIGIN, &s);
        assert_eq!(w.as_slice(), &[1.0, 0.0]);
    }

    #[test]
    fn unit_weights_reproduce_lls() {
        let sensors = [
            Point3::new(-3.0, 2.0, 1.0),
            Point3::new(4.0, -1.0, 0.0),
            Point3::new(0.5, 6.0, -2.0),
            Point3::new(2.0, 2.0, 5.0),
        ];
        let meas = [
            AnglePair::new(0.3, 0.1),
            AnglePair::new(2.5, 0.4),
            AnglePair::new(-1.2, 0.3),
            AnglePair::new(-2.0, -0.7),
        ];
        let sys = build_linear_system(&meas, &sensors).unwrap();
        assert_eq!(
            solve_weighted(&sys, &WeightVector::ones(4)).unwrap(),
            solve_lls(&sys).unwrap()
        );
    }

    #[test]
    fn wlls_recovers_noiseless_source() {
        let sensors = vec![
            Point3::new(-8.0, 3.0, 1.0),
            Point3::new(7.0, -6.0, 4.0),
            Point3::new(0.0, 9.0, -5.0),
            Point3::new(5.0, 5.0, 8.0),
        ];
        let src = Point3::new(1.0, -2.0, 3.0);
        let rep = solve_wlls(&noiseless(src, &sensors), &sensors).unwrap();
        assert!(dist(rep.position, src) < 1e-6);
        assert!(rep.residual >= 0.0 && rep.residual < 1e-18);
        assert_eq!(rep.method, Method::Wlls);
    }
}
