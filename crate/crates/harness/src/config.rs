//! Simulation configuration: JSON document, presets and validation.

use std::fs;
use std::path::Path;
use std::str::FromStr;

use aoa_nlos::asa::{AsaConfig, Bounds};
use aoa_nlos::{Method, Point3};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Annealing parameters exposed by the harness; the search box is derived
/// per problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AsaParams {
    /// Initial temperature.
    pub t0: f64,
    /// Iteration budget.
    pub n_max: usize,
    /// Objective stop threshold.
    pub gamma: f64,
    /// Cooling constant.
    pub c: f64,
    /// Proposal cap; defaults to 50 × `n_max`.
    pub proposal_cap: Option<usize>,
}

impl Default for AsaParams {
    fn default() -> Self {
        Self {
            t0: AsaConfig::DEFAULT_T0,
            n_max: AsaConfig::DEFAULT_N_MAX,
            gamma: AsaConfig::DEFAULT_GAMMA,
            c: AsaConfig::DEFAULT_COOLING_C,
            proposal_cap: None,
        }
    }
}

impl AsaParams {
    /// Full annealing config over `bounds`.
    pub fn config(&self, bounds: Bounds) -> AsaConfig {
        let mut cfg = AsaConfig::new(bounds).with_n_max(self.n_max);
        cfg.t0 = self.t0;
        cfg.gamma = self.gamma;
        cfg.cooling_c = self.c;
        if let Some(cap) = self.proposal_cap {
            cfg.proposal_cap = cap;
        }
        cfg
    }

    /// Checks the parameters against a unit box.
    pub fn validate(&self) -> Result<()> {
        let unit = Bounds {
            lo: Point3::ORIGIN,
            hi: Point3::new(1.0, 1.0, 1.0),
        };
        self.config(unit)
            .validate()
            .map_err(|e| Error::Config(e.to_string()))
    }
}

/// The three NLOS severity presets: 2, 5 or 8 NLOS links out of 10.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    /// Two NLOS links.
    Mild,
    /// Five NLOS links.
    Moderate,
    /// Eight NLOS links.
    Severe,
}

impl Preset {
    /// Sensor count of every preset.
    pub const SENSORS: usize = 10;

    /// Number of NLOS links.
    pub fn nlos_count(self) -> usize {
        match self {
            Preset::Mild => 2,
            Preset::Moderate => 5,
            Preset::Severe => 8,
        }
    }

    /// Default configuration for this preset.
    pub fn config(self) -> ScenarioConfig {
        let mut cfg = ScenarioConfig::default();
        cfg.apply_preset(self);
        cfg
    }
}

/// Monte-Carlo scenario definition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Sensors per trial (L).
    pub num_sensors: usize,
    /// Side length of the origin-centered cubic region (m).
    pub region_side: f64,
    /// Gaussian angle error standard deviation (degrees).
    pub sigma_deg: f64,
    /// Number of NLOS links per trial.
    pub nlos_count: usize,
    /// NLOS corruption probabilities to sweep.
    pub p_grid: Vec<f64>,
    /// Monte-Carlo trials per grid point.
    pub trials: usize,
    /// Estimators to run.
    #[serde(with = "method_list")]
    pub methods: Vec<Method>,
    /// Subset size for `alg1`; defaults to the LOS link count.
    pub alg1_n: Option<usize>,
    /// Root seed.
    pub seed: u64,
    /// Redraw which links are NLOS in every trial (otherwise fixed for the run).
    pub redraw_nlos_links: bool,
    /// Annealing parameters for `alg2`.
    pub asa: AsaParams,
    /// Cap on subsets enumerated by `alg1` and `rwgh`.
    pub enumeration_cap: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            num_sensors: Preset::SENSORS,
            region_side: 20.0,
            sigma_deg: 1.0,
            nlos_count: 0,
            p_grid: default_p_grid(),
            trials: 1000,
            methods: Method::ALL.to_vec(),
            alg1_n: None,
            seed: 0,
            redraw_nlos_links: true,
            asa: AsaParams::default(),
            enumeration_cap: aoa_nlos::select::DEFAULT_ENUMERATION_CAP,
        }
    }
}

/// `0.1, 0.2, ..., 0.9`.
pub fn default_p_grid() -> Vec<f64> {
    (1..=9).map(|i| i as f64 / 10.0).collect()
}

impl ScenarioConfig {
    /// Reads a JSON config; absent fields take their defaults.
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Ok(serde_json::from_str(&text)?)
    }

    /// Sets the sensor and NLOS link counts of `preset`.
    pub fn apply_preset(&mut self, preset: Preset) {
        self.num_sensors = Preset::SENSORS;
        self.nlos_count = preset.nlos_count();
    }

    /// Subset size used by `alg1`.
    pub fn effective_alg1_n(&self) -> usize {
        self.alg1_n
            .unwrap_or(self.num_sensors.saturating_sub(self.nlos_count))
    }

    /// Annealing search box: the simulation region.
    pub fn region_bounds(&self) -> Bounds {
        let h = self.region_side / 2.0;
        Bounds {
            lo: Point3::new(-h, -h, -h),
            hi: Point3::new(h, h, h),
        }
    }

    /// Checks every invariant.
    pub fn validate(&self) -> Result<()> {
        let l = self.num_sensors;
        if l < 2 {
            return Err(Error::Config(format!("num_sensors {l} below 2")));
        }
        if self.nlos_count > l {
            return Err(Error::Config(format!(
                "nlos_count {} exceeds num_sensors {l}",
                self.nlos_count
            )));
        }
        if !(self.region_side > 0.0 && self.region_side.is_finite()) {
            return Err(Error::Config("region_side must be positive".into()));
        }
        if !(self.sigma_deg > 0.0 && self.sigma_deg.is_finite()) {
            return Err(Error::Config("sigma_deg must be positive".into()));
        }
        if self.p_grid.is_empty() {
            return Err(Error::Config("p_grid is empty".into()));
        }
        if let Some(p) = self.p_grid.iter().find(|p| !(**p > 0.0 && **p <= 1.0)) {
            return Err(Error::Config(format!("p = {p} outside (0, 1]")));
        }
        if self.trials < 1 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::Config("no methods selected".into()));
        }
        if self.methods.contains(&Method::IadSelect) {
            let n = self.effective_alg1_n();
            if !(2..=l).contains(&n) {
                return Err(Error::Config(format!("alg1 N = {n} outside 2..={l}")));
            }
        }
        self.asa.validate()
    }
}

/// Parses a comma-separated method list such as `alg1,lls`.
pub fn parse_methods(s: &str) -> Result<Vec<Method>> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            Method::from_str(t).map_err(|e| Error::Config(format!("{e}: {:?}", t.trim())))
        })
        .collect()
}

mod method_list {
    use aoa_nlos::Method;
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(methods: &[Method], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(methods.iter().map(Method::id))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Method>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|s| s.parse().map_err(D::Error::custom))
            .collect()
    }
}
