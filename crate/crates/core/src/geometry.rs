//! Points, angle conventions and direction vectors of arrival (DVOA).
//!
//! Azimuth is measured in the xy-plane from the +x axis. Elevation is the
//! four-quadrant arctangent of the vertical offset against the horizontal
//! range, so for physical directions it lies in `[-pi/2, pi/2]`.

use core::f64::consts::{PI, TAU};
use core::ops::{Add, Mul, Neg, Sub};

use crate::{Error, Result};

/// Tolerance on `|‖u‖ - 1|` accepted by [`Dvoa::new`].
pub const UNIT_NORM_TOL: f64 = 1e-12;

/// A 3-D Cartesian position in meters.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point3 {
    /// x coordinate (m).
    pub x: f64,
    /// y coordinate (m).
    pub y: f64,
    /// z coordinate (m).
    pub z: f64,
}

impl Point3 {
    /// The origin.
    pub const ORIGIN: Self = Self::new(0.0, 0.0, 0.0);

    /// Creates a point.
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    /// Creates a point from an `[x, y, z]` array.
    pub const fn from_array(v: [f64; 3]) -> Self {
        Self::new(v[0], v[1], v[2])
    }

    /// Returns `[x, y, z]`.
    pub const fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    /// True when every component is finite.
    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Dot product with another vector.
    pub fn dot(&self, other: &Self) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    /// Euclidean norm.
    pub fn norm(&self) -> f64 {
        libm::sqrt(self.dot(self))
    }

    /// Euclidean distance to `other`.
    pub fn distance(&self, other: &Self) -> f64 {
        (*self - *other).norm()
    }
}

impl Add for Point3 {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

impl Sub for Point3 {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

impl Mul<f64> for Point3 {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        Self::new(self.x * rhs, self.y * rhs, self.z * rhs)
    }
}

impl Neg for Point3 {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y, -self.z)
    }
}

/// Reduces `a - b` modulo 2π into `(-π, π]`.
///
/// The magnitude of the result is the geodesic distance on the circle.
pub fn wrapped_diff(a: f64, b: f64) -> f64 {
    let d = a - b;
    if d > -PI && d <= PI {
        return d;
    }
    let mut r = libm::fmod(d + PI, TAU);
    if r < 0.0 {
        r += TAU;
    }
    let r = r - PI;
    if r <= -PI {
        r + TAU
    } else {
        r
    }
}

/// Wraps an angle into `(-π, π]`.
pub fn wrap_angle(a: f64) -> f64 {
    wrapped_diff(a, 0.0)
}

/// An azimuth/elevation pair in radians, each wrapped into `[-π, π]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnglePair {
    azimuth: f64,
    elevation: f64,
}

impl AnglePair {
    /// Creates a pair, wrapping both angles into `(-π, π]`.
    pub fn new(azimuth: f64, elevation: f64) -> Self {
        Self {
            azimuth: wrap_angle(azimuth),
            elevation: wrap_angle(elevation),
        }
    }

    /// Azimuth θ in radians.
    pub fn azimuth(&self) -> f64 {
        self.azimuth
    }

    /// Elevation φ in radians.
    pub fn elevation(&self) -> f64 {
        self.elevation
    }
}

/// Direction vector of arrival: unit vector pointing from a sensor to the source.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dvoa([f64; 3]);

impl Dvoa {
    /// Accepts `u` only if it is unit norm within [`UNIT_NORM_TOL`].
    pub fn new(u: [f64; 3]) -> Result<Self> {
        Self::normalized(u, UNIT_NORM_TOL)
    }

    /// Accepts `u` if its norm is within `tol` of one and rescales it to unit norm.
    pub fn normalized(u: [f64; 3], tol: f64) -> Result<Self> {
        let norm = Point3::from_array(u).norm();
        if !norm.is_finite() || libm::fabs(norm - 1.0) > tol {
            return Err(Error::InvalidDvoa { norm });
        }
        Ok(Self([u[0] / norm, u[1] / norm, u[2] / norm]))
    }

    /// Components `[ux, uy, uz]`.
    pub fn components(&self) -> [f64; 3] {
        self.0
    }
}

/// True azimuth and elevation of `source` as seen from `sensor`.
///
/// Directly above or below the sensor the azimuth is 0 and the elevation ±π/2.
pub fn true_angles(source: Point3, sensor: Point3) -> Result<AnglePair> {
    let d = source - sensor;
    if d.x == 0.0 && d.y == 0.0 && d.z == 0.0 {
        return Err(Error::DegenerateGeometry("source coincides with sensor"));
    }
    let azimuth = libm::atan2(d.y, d.x);
    let elevation = libm::atan2(d.z, libm::hypot(d.x, d.y));
    Ok(AnglePair { azimuth, elevation })
}

/// `u = [cos φ cos θ, cos φ sin θ, sin φ]`.
pub fn dvoa_from_angles(a: AnglePair) -> Dvoa {
    let (st, ct) = libm::sincos(a.azimuth);
    let (sp, cp) = libm::sincos(a.elevation);
    Dvoa([cp * ct, cp * st, sp])
}

/// Inverse of [`dvoa_from_angles`], returning elevation in `[-π/2, π/2]`.
pub fn angles_from_dvoa(u: Dvoa) -> AnglePair {
    let [x, y, z] = u.0;
    let horizontal = libm::hypot(x, y);
    if horizontal == 0.0 {
        return AnglePair {
            azimuth: 0.0,
            elevation: libm::copysign(PI / 2.0, z),
        };
    }
    AnglePair {
        azimuth: libm::atan2(y, x),
        elevation: libm::atan2(z, horizontal),
    }
}
