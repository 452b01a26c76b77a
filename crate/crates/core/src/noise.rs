//! Gaussian-uniform mixture angle errors and synthetic measurement generation.

use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::geometry::{true_angles, AnglePair, Point3};
use crate::{Error, Result};

/// Per-sensor error model: with probability `1 - p_nlos` an angle error is
/// `N(0, sigma²)`, otherwise it is `U(-π, π)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    sigma: f64,
    p_nlos: f64,
}

impl NoiseSpec {
    /// Creates a spec; `sigma` must be positive and `p_nlos` in `[0, 1]`.
    pub fn new(sigma: f64, p_nlos: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidNoise("sigma must be positive and finite"));
        }
        if !(0.0..=1.0).contains(&p_nlos) {
            return Err(Error::InvalidNoise("p_nlos must lie in [0, 1]"));
        }
        Ok(Self { sigma, p_nlos })
    }

    /// Pure Gaussian (LOS) errors.
    pub fn los(sigma: f64) -> Result<Self> {
        Self::new(sigma, 0.0)
    }

    /// Gaussian standard deviation in radians.
    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Probability that an error is drawn from the uniform component.
    pub fn p_nlos(&self) -> f64 {
        self.p_nlos
    }

    /// True for an NLOS path (`p_nlos > 0`).
    pub fn is_nlos(&self) -> bool {
        self.p_nlos > 0.0
    }
}

/// Sensors, source and per-sensor noise for one localization problem.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    sensors: Vec<Point3>,
    source: Point3,
    noise: Vec<NoiseSpec>,
}

impl Scenario {
    /// Validates `L >= 2` pairwise-distinct finite sensors, one noise spec
    /// per sensor, and a finite source.
    pub fn new(sensors: Vec<Point3>, source: Point3, noise: Vec<NoiseSpec>) -> Result<Self> {
        if sensors.len() < 2 {
            return Err(Error::InvalidScenario("at least 2 sensors required"));
        }
        if noise.len() != sensors.len() {
            return Err(Error::InvalidScenario("one noise spec per sensor required"));
        }
        if !source.is_finite() || sensors.iter().any(|s| !s.is_finite()) {
            return Err(Error::InvalidScenario("non-finite coordinate"));
        }
        for (i, a) in sensors.iter().enumerate() {
            if sensors[i + 1..].contains(a) {
                return Err(Error::InvalidScenario("sensors must be pairwise distinct"));
            }
        }
        Ok(Self {
            sensors,
            source,
            noise,
        })
    }

    /// Sensor positions.
    pub fn sensors(&self) -> &[Point3] {
        &self.sensors
    }

    /// Source position.
    pub fn source(&self) -> Point3 {
        self.source
    }

    /// Per-sensor noise specs.
    pub fn noise(&self) -> &[NoiseSpec] {
        &self.noise
    }

    /// Noise-free angles from every sensor.
    pub fn true_angles(&self) -> Result<Vec<AnglePair>> {
        self.sensors
            .iter()
            .map(|&s| true_angles(self.source, s))
            .collect()
    }
}

fn draw_one<R: Rng + ?Sized>(spec: &NoiseSpec, rng: &mut R) -> f64 {
    if spec.p_nlos > 0.0 && rng.random_bool(spec.p_nlos) {
        rng.random_range(-PI..PI)
    } else {
        spec.sigma * rng.sample::<f64, _>(StandardNormal)
    }
}

/// Draws independent azimuth and elevation errors `(m, n)` in radians.
pub fn sample_noise<R: Rng + ?Sized>(spec: &NoiseSpec, rng: &mut R) -> (f64, f64) {
    let m = draw_one(spec, rng);
    let n = draw_one(spec, rng);
    (m, n)
}

/// Noisy angle pairs for every sensor, wrapped back into `[-π, π]`.
pub fn generate_measurements<R: Rng + ?Sized>(
    scenario: &Scenario,
    rng: &mut R,
) -> Result<Vec<AnglePair>> {
    let truth = scenario.true_angles()?;
    Ok(truth
        .iter()
        .zip(&scenario.noise)
        .map(|(a, spec)| {
            let (m, n) = sample_noise(spec, rng);
            AnglePair::new(a.azimuth() + m, a.elevation() + n)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::wrapped_diff;
    use alloc::vec;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn grid_scenario(noise: NoiseSpec) -> Scenario {
        let sensors: Vec<_> = (0..10)
            .map(|i| {
                let f = i as f64;
                Point3::new(-9.0 + 2.0 * f, 7.0 * libm::sin(f), 5.0 * libm::cos(1.3 * f))
            })
            .collect();
        let n = sensors.len();
        Scenario::new(sensors, Point3::new(1.0, -2.0, 0.5), vec![noise; n]).unwrap()
    }

    #[test]
    fn spec_validation() {
        assert!(NoiseSpec::new(0.0, 0.0).is_err());
        assert!(NoiseSpec::new(0.1, 1.5).is_err());
        assert!(NoiseSpec::new(0.1, -0.1).is_err());
        let s = NoiseSpec::new(0.1, 0.3).unwrap();
        assert!(s.is_nlos());
        assert!(!NoiseSpec::los(0.1).unwrap().is_nlos());
    }

    #[test]
    fn scenario_validation() {
        let spec = NoiseSpec::los(0.01).unwrap();
        let p = Point3::new(1.0, 1.0, 1.0);
        assert!(Scenario::new(vec![p], Point3::ORIGIN, vec![spec]).is_err());
        assert!(Scenario::new(vec![p, p], Point3::ORIGIN, vec![spec; 2]).is_err());
        assert!(Scenario::new(vec![p, -p], Point3::ORIGIN, vec![spec]).is_err());
        assert!(Scenario::new(vec![p, -p], Point3::ORIGIN, vec![spec; 2]).is_ok());
    }

    #[test]
    fn tiny_sigma_gives_exact_angles() {
        let spec = NoiseSpec::los(1e-12).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let (m, n) = sample_noise(&spec, &mut rng);
            assert!(libm::fabs(m) < 1e-9 && libm::fabs(n) < 1e-9);
        }
        let sc = grid_scenario(NoiseSpec::los(1e-300).unwrap());
        let meas = generate_measurements(&sc, &mut rng).unwrap();
        assert_eq!(meas, sc.true_angles().unwrap());
    }

    #[test]
    fn one_degree_errors_stay_small_on_fixed_seed() {
        let sc = grid_scenario(NoiseSpec::los(1f64.to_radians()).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let meas = generate_measurements(&sc, &mut rng).unwrap();
        for (m, t) in meas.iter().zip(sc.true_angles().unwrap()) {
            assert!(libm::fabs(wrapped_diff(m.azimuth(), t.azimuth())) < 0.2);
            assert!(libm::fabs(wrapped_diff(m.elevation(), t.elevation())) < 0.2);
        }
    }

    #[test]
    fn same_seed_same_draws() {
        let spec = NoiseSpec::new(0.02, 0.4).unwrap();
        let a: Vec<_> = {
            let mut rng = ChaCha8Rng::seed_from_u64(9);
            (0..50).map(|_| sample_noise(&spec, &mut rng)).collect()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let b: Vec<_> = (0..50).map(|_| sample_noise(&spec, &mut rng)).collect();
        assert_eq!(a, b);
    }
}
