//! l1-minimization of angle residuals by adaptive simulated annealing.
//!
//! The objective is `ψ(x) = Σᵢ |θ̂ᵢ - θᵢ(x)| + |φ̂ᵢ - φᵢ(x)|` with circular
//! angle differences. The chain uses
//!
//! - temperature `T(k) = T₀ exp(-c k^{1/D})`, `k` counting accepted moves;
//! - proposals `x + s ∘ r`, each `rⱼ ∈ [-1, 1]` with CDF
//!   `F(r) = 1/2 + sgn(r)/2 · ln(1 + |r|/T) / ln(1 + 1/T)`, sampled by
//!   inverse transform;
//! - acceptance `1` when not worsening and `1 / (1 + exp(Δψ / T))` otherwise.
//!
//! The chain stops after `n_max + 1` acceptances, when the current objective
//! drops to `gamma`, or when `proposal_cap` proposals have been made.

use alloc::vec::Vec;

use rand::distr::Open01;
use rand::Rng;

use crate::geometry::{AnglePair, Point3};
use crate::report::{EstimateReport, Method};
use crate::{Error, Result};

/// Axis-aligned search box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    /// Lower corner.
    pub lo: Point3,
    /// Upper corner.
    pub hi: Point3,
}

impl Bounds {
    /// Bounding box of `points`, grown on every side by `margin` times its
    /// widest side length.
    pub fn around(points: &[Point3], margin: f64) -> Result<Self> {
        let first = points
            .first()
            .ok_or(Error::InvalidConfig("no points to bound"))?;
        let (mut lo, mut hi) = (*first, *first);
        for p in &points[1..] {
            lo = Point3::new(lo.x.min(p.x), lo.y.min(p.y), lo.z.min(p.z));
            hi = Point3::new(hi.x.max(p.x), hi.y.max(p.y), hi.z.max(p.z));
        }
        let side = hi - lo;
        let widest = side.x.max(side.y).max(side.z);
        if !(widest > 0.0) || !widest.is_finite() {
            return Err(Error::InvalidConfig("points span no volume"));
        }
        let pad = Point3::new(1.0, 1.0, 1.0) * (margin * widest);
        Ok(Self {
            lo: lo - pad,
            hi: hi + pad,
        })
    }

    /// Side lengths.
    pub fn extent(&self) -> Point3 {
        self.hi - self.lo
    }

    /// Clamps `p` into the box.
    pub fn clamp(&self, p: Point3) -> Point3 {
        Point3::new(
            p.x.clamp(self.lo.x, self.hi.x),
            p.y.clamp(self.lo.y, self.hi.y),
            p.z.clamp(self.lo.z, self.hi.z),
        )
    }

    fn is_valid(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite() && {
            let e = self.extent();
            e.x > 0.0 && e.y > 0.0 && e.z > 0.0
        }
    }
}

/// Annealing parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct AsaConfig {
    /// Initial temperature `T₀`.
    pub t0: f64,
    /// Iteration budget `N_max` (accepted moves).
    pub n_max: usize,
    /// Stop once the current objective is at or below this value.
    pub gamma: f64,
    /// Cooling constant `c`.
    pub cooling_c: f64,
    /// Parameter-space dimension `D` in the schedule exponent.
    pub dim: usize,
    /// Search box; initial point and candidates stay inside it.
    pub bounds: Bounds,
    /// Per-coordinate step scale `s` (m).
    pub scale: Point3,
    /// Maximum number of proposals, accepted or not.
    pub proposal_cap: usize,
}

impl AsaConfig {
    /// Default initial temperature.
    pub const DEFAULT_T0: f64 = 100.0;
    /// Default iteration budget.
    pub const DEFAULT_N_MAX: usize = 3000;
    /// Default objective threshold.
    pub const DEFAULT_GAMMA: f64 = 1e-6;
    /// Default cooling constant.
    pub const DEFAULT_COOLING_C: f64 = 1.0;
    /// Proposal cap as a multiple of `n_max`.
    pub const PROPOSALS_PER_ITERATION: usize = 50;

    /// Defaults over the given search box, with `s` equal to half its side lengths.
    pub fn new(bounds: Bounds) -> Self {
        Self {
            t0: Self::DEFAULT_T0,
            n_max: Self::DEFAULT_N_MAX,
            gamma: Self::DEFAULT_GAMMA,
            cooling_c: Self::DEFAULT_COOLING_C,
            dim: 3,
            scale: bounds.extent() * 0.5,
            bounds,
            proposal_cap: Self::PROPOSALS_PER_ITERATION * Self::DEFAULT_N_MAX,
        }
    }

    /// Defaults with the search box set to the sensors' bounding box grown by
    /// half its widest side in every direction.
    pub fn from_sensors(sensors: &[Point3]) -> Result<Self> {
        Ok(Self::new(Bounds::around(sensors, 0.5)?))
    }

    /// Sets `n_max` and rescales `proposal_cap` to match.
    pub fn with_n_max(mut self, n_max: usize) -> Self {
        self.n_max = n_max;
        self.proposal_cap = Self::PROPOSALS_PER_ITERATION.saturating_mul(n_max);
        self
    }

    /// Checks the parameter ranges.
    pub fn validate(&self) -> Result<()> {
        if !(self.t0 > 0.0 && self.t0.is_finite()) {
            return Err(Error::InvalidConfig("t0 must be positive"));
        }
        if self.n_max < 1 {
            return Err(Error::InvalidConfig("n_max must be at least 1"));
        }
        if !(self.gamma > 0.0) {
            return Err(Error::InvalidConfig("gamma must be positive"));
        }
        if !(self.cooling_c > 0.0 && self.cooling_c.is_finite()) {
            return Err(Error::InvalidConfig("cooling constant must be positive"));
        }
        if self.dim < 1 {
            return Err(Error::InvalidConfig("dimension must be at least 1"));
        }
        if !self.bounds.is_valid() {
            return Err(Error::InvalidConfig("bounds must be nonempty finite intervals"));
        }
        let s = self.scale;
        if !(s.x > 0.0 && s.y > 0.0 && s.z > 0.0 && s.is_finite()) {
            return Err(Error::InvalidConfig("step scale must be positive"));
        }
        if self.proposal_cap < self.n_max {
            return Err(Error::InvalidConfig("proposal cap below n_max"));
        }
        Ok(())
    }
}

/// The objective `ψ` over one measurement set, with the measured angles'
/// sines and cosines cached.
#[derive(Debug, Clone)]
pub struct L1Objective<'a> {
    sensors: &'a [Point3],
    measured: Vec<Measured>,
}

#[derive(Debug, Clone, Copy)]
struct Measured {
    azimuth: f64,
    sin_az: f64,
    cos_az: f64,
    sin_el: f64,
    cos_el: f64,
}

impl<'a> L1Objective<'a> {
    /// Caches the measurement trigonometry.
    pub fn new(measurements: &[AnglePair], sensors: &'a [Point3]) -> Result<Self> {
        if measurements.len() != sensors.len() {
            return Err(Error::LengthMismatch {
                measurements: measurements.len(),
                sensors: sensors.len(),
            });
        }
        let measured = measurements
            .iter()
            .map(|m| {
                let (sin_az, cos_az) = libm::sincos(m.azimuth());
                let (sin_el, cos_el) = libm::sincos(m.elevation());
                Measured {
                    azimuth: m.azimuth(),
                    sin_az,
                    cos_az,
                    sin_el,
                    cos_el,
                }
            })
            .collect();
        Ok(Self { sensors, measured })
    }

    /// `|θ̂ - θ(x)| + |φ̂ - φ(x)|` for one sensor, or `None` at the sensor itself.
    ///
    /// Each difference is `atan2` of the sine and cosine of the angle between
    /// measured and true directions, which is already circular.
    fn term(m: &Measured, sensor: &Point3, x: Point3) -> Option<f64> {
        let d = x - *sensor;
        let h = libm::sqrt(d.x * d.x + d.y * d.y);
        let az = if h == 0.0 {
            if d.z == 0.0 {
                return None;
            }
            m.azimuth
        } else {
            libm::atan2(m.sin_az * d.x - m.cos_az * d.y, m.cos_az * d.x + m.sin_az * d.y)
        };
        let el = libm::atan2(m.sin_el * h - m.cos_el * d.z, m.cos_el * h + m.sin_el * d.z);
        Some(libm::fabs(az) + libm::fabs(el))
    }

    /// `ψ(x)`; errors if `x` coincides with a sensor.
    pub fn eval(&self, x: Point3) -> Result<f64> {
        let mut psi = 0.0;
        for (m, s) in self.measured.iter().zip(self.sensors) {
            psi += Self::term(m, s, x)
                .ok_or(Error::DegenerateGeometry("point coincides with a sensor"))?;
        }
        Ok(psi)
    }

    /// `ψ(x)`, with sensor-coincident points scoring `+∞`.
    pub fn eval_or_inf(&self, x: Point3) -> f64 {
        self.eval(x).unwrap_or(f64::INFINITY)
    }

    /// `ψ(x)` if `ψ(x) - psi_old <= limit`, else `None`. Stops summing as
    /// soon as a partial sum exceeds the limit.
    fn eval_within(&self, x: Point3, psi_old: f64, limit: f64) -> Option<f64> {
        let mut psi = 0.0;
        for (m, s) in self.measured.iter().zip(self.sensors) {
            psi += Self::term(m, s, x)?;
            if psi - psi_old > limit {
                return None;
            }
        }
        Some(psi)
    }
}

/// `ψ(x)`: sum of absolute circular azimuth and elevation residuals.
pub fn l1_objective(x: Point3, measurements: &[AnglePair], sensors: &[Point3]) -> Result<f64> {
    L1Objective::new(measurements, sensors)?.eval(x)
}

/// `T(k) = T₀ exp(-c k^{1/D})`.
pub fn temperature(k: usize, cfg: &AsaConfig) -> f64 {
    cfg.t0 * libm::exp(-cfg.cooling_c * libm::pow(k as f64, 1.0 / cfg.dim as f64))
}

/// Inverse of the proposal CDF at `u ∈ (0, 1)`:
/// `r = sgn(2u - 1) T [(1 + 1/T)^{|2u - 1|} - 1]`.
pub fn r_from_uniform(u: f64, t: f64) -> f64 {
    r_from_uniform_with(u, t, libm::log1p(1.0 / t))
}

/// [`r_from_uniform`] with `ln(1 + 1/t)` supplied.
fn r_from_uniform_with(u: f64, t: f64, log_span: f64) -> f64 {
    let v = 2.0 * u - 1.0;
    let mag = t * libm::expm1(libm::fabs(v) * log_span);
    libm::copysign(mag.min(1.0), v)
}

/// Proposal CDF `F_T(r)` on `[-1, 1]`.
pub fn r_cdf(r: f64, t: f64) -> f64 {
    let r = r.clamp(-1.0, 1.0);
    let sgn = if r > 0.0 {
        1.0
    } else if r < 0.0 {
        -1.0
    } else {
        0.0
    };
    0.5 + 0.5 * sgn * libm::log1p(libm::fabs(r) / t) / libm::log1p(1.0 / t)
}

/// Draws one step variable `r ∈ [-1, 1]` at temperature `t`.
pub fn sample_r<R: Rng + ?Sized>(t: f64, rng: &mut R) -> f64 {
    r_from_uniform(rng.sample(Open01), t)
}

/// `x + s ∘ r`, clamped into the search box.
pub fn candidate_from_steps(x: Point3, r: [f64; 3], cfg: &AsaConfig) -> Point3 {
    let s = cfg.scale;
    cfg.bounds
        .clamp(Point3::new(x.x + s.x * r[0], x.y + s.y * r[1], x.z + s.z * r[2]))
}

/// Generation function: perturbs every coordinate by an independent `sⱼ rⱼ`.
pub fn generate_candidate<R: Rng + ?Sized>(x: Point3, t: f64, cfg: &AsaConfig, rng: &mut R) -> Point3 {
    candidate_at(x, t, libm::log1p(1.0 / t), cfg, rng)
}

fn candidate_at<R: Rng + ?Sized>(
    x: Point3,
    t: f64,
    log_span: f64,
    cfg: &AsaConfig,
    rng: &mut R,
) -> Point3 {
    let r: [f64; 3] = core::array::from_fn(|_| r_from_uniform_with(rng.sample(Open01), t, log_span));
    candidate_from_steps(x, r, cfg)
}

/// Acceptance probability of moving from `psi_old` to `psi_new` at temperature `t`.
pub fn acceptance(psi_new: f64, psi_old: f64, t: f64) -> f64 {
    let delta = psi_new - psi_old;
    if delta <= 0.0 {
        return 1.0;
    }
    let p = 1.0 / (1.0 + libm::exp(delta / t));
    if p < 1e-300 {
        0.0
    } else {
        p
    }
}

/// Largest objective increase accepted against a uniform draw `u ∈ (0, 1)`.
///
/// `acceptance(ψ + Δ, ψ, t) >= u` exactly when `Δ <= acceptance_limit(t, u)`.
pub fn acceptance_limit(t: f64, u: f64) -> f64 {
    (t * libm::log(1.0 / u - 1.0)).max(0.0)
}

/// State of an annealing chain.
#[derive(Debug, Clone, PartialEq)]
pub struct AsaState {
    /// Accepted moves so far.
    pub k: usize,
    /// Current point.
    pub x_current: Point3,
    /// Objective at the current point.
    pub psi_current: f64,
    /// Best point visited.
    pub x_best: Point3,
    /// Objective at the best point.
    pub psi_best: f64,
    /// Temperature `T(k)`.
    pub temperature: f64,
    /// Proposals made so far.
    pub proposals: usize,
}

/// What happened in one proposal step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsaStep {
    /// Temperature the proposal was made at.
    pub temperature: f64,
    /// Objective before the step.
    pub psi_old: f64,
    /// Objective of the candidate.
    pub psi_candidate: f64,
    /// Acceptance probability.
    pub probability: f64,
    /// Whether the candidate was accepted.
    pub accepted: bool,
}

/// An annealing chain over one measurement set.
#[derive(Debug, Clone)]
pub struct Annealer<'a> {
    objective: L1Objective<'a>,
    cfg: &'a AsaConfig,
    log_span: f64,
    state: AsaState,
}

impl<'a> Annealer<'a> {
    /// Starts a chain at a point drawn uniformly from the search box.
    pub fn new<R: Rng + ?Sized>(
        measurements: &'a [AnglePair],
        sensors: &'a [Point3],
        cfg: &'a AsaConfig,
        rng: &mut R,
    ) -> Result<Self> {
        let lo = cfg.bounds.lo;
        let e = cfg.bounds.extent();
        let start = Point3::new(
            lo.x + e.x * rng.random::<f64>(),
            lo.y + e.y * rng.random::<f64>(),
            lo.z + e.z * rng.random::<f64>(),
        );
        Self::starting_at(measurements, sensors, cfg, start)
    }

    /// Starts a chain at `start`.
    pub fn starting_at(
        measurements: &'a [AnglePair],
        sensors: &'a [Point3],
        cfg: &'a AsaConfig,
        start: Point3,
    ) -> Result<Self> {
        cfg.validate()?;
        if measurements.len() != sensors.len() {
            return Err(Error::LengthMismatch {
                measurements: measurements.len(),
                sensors: sensors.len(),
            });
        }
        if measurements.len() < 2 {
            return Err(Error::TooFewMeasurements(measurements.len()));
        }
        let objective = L1Objective::new(measurements, sensors)?;
        let psi = objective.eval_or_inf(start);
        let t0 = temperature(0, cfg);
        Ok(Self {
            objective,
            cfg,
            log_span: libm::log1p(1.0 / t0),
            state: AsaState {
                k: 0,
                x_current: start,
                psi_current: psi,
                x_best: start,
                psi_best: psi,
                temperature: t0,
                proposals: 0,
            },
        })
    }

    /// Current chain state.
    pub fn state(&self) -> &AsaState {
        &self.state
    }

    /// True while the iteration budget remains and the objective is above `gamma`.
    pub fn running(&self) -> bool {
        self.state.k <= self.cfg.n_max && self.state.psi_current > self.cfg.gamma
    }

    /// Proposes one candidate and applies the acceptance rule.
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> AsaStep {
        let t = self.state.temperature;
        let candidate = candidate_at(self.state.x_current, t, self.log_span, self.cfg, rng);
        let u: f64 = rng.sample(Open01);
        let psi_old = self.state.psi_current;
        let psi_new = self.objective.eval_or_inf(candidate);
        let accepted = psi_new - psi_old <= acceptance_limit(t, u);
        self.record(candidate, psi_new, accepted);
        AsaStep {
            temperature: t,
            psi_old,
            psi_candidate: psi_new,
            probability: acceptance(psi_new, psi_old, t),
            accepted,
        }
    }

    /// Same decision as [`Annealer::step`], skipping the rest of the
    /// objective once rejection is certain.
    fn fast_step<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        let t = self.state.temperature;
        let candidate = candidate_at(self.state.x_current, t, self.log_span, self.cfg, rng);
        let u: f64 = rng.sample(Open01);
        let limit = acceptance_limit(t, u);
        match self.objective.eval_within(candidate, self.state.psi_current, limit) {
            Some(psi_new) => self.record(candidate, psi_new, true),
            None => self.state.proposals += 1,
        }
    }

    fn record(&mut self, candidate: Point3, psi_new: f64, accepted: bool) {
        let st = &mut self.state;
        st.proposals += 1;
        if accepted {
            st.x_current = candidate;
            st.psi_current = psi_new;
            st.k += 1;
            st.temperature = temperature(st.k, self.cfg);
            self.log_span = libm::log1p(1.0 / st.temperature);
            if psi_new < st.psi_best {
                st.x_best = candidate;
                st.psi_best = psi_new;
            }
        }
    }

    /// Runs to termination; returns `true` if the proposal cap cut the run short.
    pub fn run<R: Rng + ?Sized>(&mut self, rng: &mut R) -> bool {
        while self.running() {
            if self.state.proposals >= self.cfg.proposal_cap {
                return true;
            }
            self.fast_step(rng);
        }
        false
    }

    /// Like [`Annealer::run`], calling `observe` after every step.
    pub fn run_observed<R, F>(&mut self, rng: &mut R, mut observe: F) -> bool
    where
        R: Rng + ?Sized,
        F: FnMut(&AsaStep, &AsaState),
    {
        while self.running() {
            if self.state.proposals >= self.cfg.proposal_cap {
                return true;
            }
            let step = self.step(rng);
            observe(&step, &self.state);
        }
        false
    }

    /// Report for the best point found so far.
    pub fn report(&self, truncated: bool) -> EstimateReport {
        EstimateReport {
            method: Method::AsaL1,
            position: self.state.x_best,
            residual: self.state.psi_best,
            subset: None,
            iterations: self.state.k,
            proposals: self.state.proposals,
            truncated,
        }
    }
}

/// Runs one annealing chain from a random feasible start and returns the best point.
pub fn run_asa<R: Rng + ?Sized>(
    measurements: &[AnglePair],
    sensors: &[Point3],
    cfg: &AsaConfig,
    rng: &mut R,
) -> Result<EstimateReport> {
    let mut chain = Annealer::new(measurements, sensors, cfg, rng)?;
    let truncated = chain.run(rng);
    Ok(chain.report(truncated))
}
