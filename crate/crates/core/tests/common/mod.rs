//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use aoa_nlos::geometry::true_angles;
use aoa_nlos::{AnglePair, Point3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn point_in<R: Rng>(rng: &mut R, half: f64) -> Point3 {
    Point3::new(
        rng.random_range(-half..half),
        rng.random_range(-half..half),
        rng.random_range(-half..half),
    )
}

pub fn noiseless(source: Point3, sensors: &[Point3]) -> Vec<AnglePair> {
    sensors.iter().map(|&s| true_angles(source, s).unwrap()).collect()
}

/// The two linear equations of one sensor, written out from the angles.
pub fn sensor_rows(a: AnglePair, s: Point3) -> [([f64; 3], f64); 2] {
    let (t, p) = (a.azimuth(), a.elevation());
    let c = [-t.sin(), t.cos(), 0.0];
    let u = [p.cos() * t.cos(), p.cos() * t.sin(), p.sin()];
    let e = [-u[0] * p.sin(), -u[1] * p.sin(), 1.0 - u[2] * p.sin()];
    let dot = |r: [f64; 3]| r[0] * s.x + r[1] * s.y + r[2] * s.z;
    [(c, dot(c)), (e, dot(e))]
}

/// Weighted LS via the 3×3 normal equations and a cofactor inverse.
pub fn normal_equations(meas: &[AnglePair], sensors: &[Point3], subset: &[usize], w: &[f64]) -> Option<Point3> {
    let mut m = [[0.0; 3]; 3];
    let mut v = [0.0; 3];
    for &i in subset {
        for (row, rhs) in sensor_rows(meas[i], sensors[i]) {
            for r in 0..3 {
                v[r] += w[i] * row[r] * rhs;
                for c in 0..3 {
                    m[r][c] += w[i] * row[r] * row[c];
                }
            }
        }
    }
    let cof = |r: usize, c: usize| {
        let (r1, r2) = ((r + 1) % 3, (r + 2) % 3);
        let (c1, c2) = ((c + 1) % 3, (c + 2) % 3);
        m[r1][c1] * m[r2][c2] - m[r1][c2] * m[r2][c1]
    };
    let det = m[0][0] * cof(0, 0) + m[0][1] * cof(0, 1) + m[0][2] * cof(0, 2);
    let scale = m.iter().flatten().map(|x| x.abs()).fold(0.0, f64::max);
    if det.abs() <= 1e-12 * scale.powi(3) {
        return None;
    }
    let x: Vec<f64> = (0..3)
        .map(|r| (0..3).map(|c| cof(c, r) * v[c]).sum::<f64>() / det)
        .collect();
    Some(Point3::new(x[0], x[1], x[2]))
}

pub fn oracle_weights(x: Point3, sensors: &[Point3]) -> Vec<f64> {
    let d: Vec<f64> = sensors.iter().map(|s| (*s - x).norm()).collect();
    let total: f64 = d.iter().sum();
    d.iter().map(|di| 1.0 - di / total).collect()
}

/// Two-stage weighted estimate and its weights.
pub fn oracle_wlls(meas: &[AnglePair], sensors: &[Point3]) -> (Point3, Vec<f64>) {
    let all: Vec<usize> = (0..sensors.len()).collect();
    let x0 = normal_equations(meas, sensors, &all, &vec![1.0; sensors.len()]).unwrap();
    let w = oracle_weights(x0, sensors);
    (normal_equations(meas, sensors, &all, &w).unwrap(), w)
}

/// Mean over the subset of both squared equation residuals.
pub fn oracle_cost(meas: &[AnglePair], sensors: &[Point3], subset: &[usize], x: Point3) -> f64 {
    let sum: f64 = subset
        .iter()
        .flat_map(|&i| sensor_rows(meas[i], sensors[i]))
        .map(|(row, rhs)| {
            let r = row[0] * x.x + row[1] * x.y + row[2] * x.z - rhs;
            r * r
        })
        .sum();
    sum / subset.len() as f64
}

/// All `n`-subsets of `0..l` by bitmask, sorted lexicographically.
pub fn subsets(l: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = (0u32..1 << l)
        .filter(|m| m.count_ones() as usize == n)
        .map(|m| (0..l).filter(|i| m >> i & 1 == 1).collect())
        .collect();
    out.sort();
    out
}

pub fn close(a: Point3, b: Point3, tol: f64) -> bool {
    (a - b).norm() <= tol
}
