//! Real-data layout: receiver and reference-point coordinates plus per-pulse
//! DVOA observations.
//!
//! Coordinates are CSV `id,x,y,z`. Ids starting with `Rec` are receivers and
//! ids starting with `RP` are reference points (case-insensitive), so one
//! file can hold both. Observations are CSV `receiver_id,rp_id,pulse,ux,uy,uz`.

use std::collections::{BTreeMap, HashMap};
use std::fs::File;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use aoa_nlos::asa::{run_asa, Bounds};
use aoa_nlos::baselines::{rwgh_capped, solve_lls_baseline};
use aoa_nlos::geometry::{angles_from_dvoa, dvoa_from_angles, Dvoa};
use aoa_nlos::noise::{generate_measurements, NoiseSpec, Scenario};
use aoa_nlos::select::{iad_search, DEFAULT_ENUMERATION_CAP};
use aoa_nlos::wlls::solve_wlls;
use aoa_nlos::{AnglePair, EstimateReport, Method, Point3};

use crate::metrics::RmseAccumulator;
use crate::streams::{stream, Purpose};
use crate::{AsaParams, Error, Result, RmseRecord};

/// Tolerance on `|‖u‖ - 1|` before an observed DVOA is rescaled.
pub const DVOA_NORM_TOL: f64 = 1e-6;

/// Header of coordinate files.
pub const COORDINATE_HEADER: [&str; 4] = ["id", "x", "y", "z"];

/// Header of observation files.
pub const OBSERVATION_HEADER: [&str; 6] = ["receiver_id", "rp_id", "pulse", "ux", "uy", "uz"];

/// A named position.
#[derive(Debug, Clone, PartialEq)]
pub struct Site {
    /// Identifier as written in the file.
    pub id: String,
    /// Coordinates (m).
    pub position: Point3,
}

/// One received pulse.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    /// Receiver id.
    pub receiver: String,
    /// Reference point the pulse was emitted from.
    pub reference_point: String,
    /// Pulse number.
    pub pulse: u64,
    /// Unit direction from the receiver.
    pub dvoa: Dvoa,
}

/// Receivers, reference points and observations.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RealDataset {
    /// Receivers in file order.
    pub receivers: Vec<Site>,
    /// Reference points in file order.
    pub reference_points: Vec<Site>,
    /// Observations in file order.
    pub observations: Vec<Observation>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Receiver,
    ReferencePoint,
}

fn kind_of(id: &str) -> Option<Kind> {
    let lower = id.to_ascii_lowercase();
    if lower.starts_with("rec") {
        Some(Kind::Receiver)
    } else if lower.starts_with("rp") {
        Some(Kind::ReferencePoint)
    } else {
        None
    }
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

struct Rows<R> {
    path: PathBuf,
    reader: csv::Reader<R>,
}

impl<R: Read> Rows<R> {
    fn new(path: &Path, input: R, header: &[&str]) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
        let found: Vec<String> = reader.headers()?.iter().map(str::to_ascii_lowercase).collect();
        if found != header {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: 1,
                message: format!("expected header {}, found {}", header.join(","), found.join(",")),
            });
        }
        Ok(Self {
            path: path.to_path_buf(),
            reader,
        })
    }

    fn for_each<F>(mut self, mut f: F) -> Result<()>
    where
        F: FnMut(&csv::StringRecord, &dyn Fn(String) -> Error) -> Result<()>,
    {
        let mut record = csv::StringRecord::new();
        loop {
            let line = match self.reader.read_record(&mut record) {
                Ok(false) => return Ok(()),
                Ok(true) => record.position().map_or(0, |p| p.line()),
                Err(e) => {
                    let line = e.position().map_or(0, |p| p.line());
                    return Err(self.error(line, e.to_string()));
                }
            };
            f(&record, &|message| self.error(line, message))?;
        }
    }

    fn error(&self, line: u64, message: String) -> Error {
        Error::Parse {
            path: self.path.clone(),
            line,
            message,
        }
    }
}

fn number(field: &str, name: &str, err: &dyn Fn(String) -> Error) -> Result<f64> {
    match field.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(err(format!("{name}: not a finite number: {field:?}"))),
    }
}

impl RealDataset {
    /// Adds the sites of a coordinate file.
    pub fn read_coordinates(&mut self, path: &Path) -> Result<()> {
        self.read_coordinates_from(path, open(path)?)
    }

    /// Adds coordinate rows read from `input`; `path` is used in diagnostics.
    pub fn read_coordinates_from<R: Read>(&mut self, path: &Path, input: R) -> Result<()> {
        Rows::new(path, input, &COORDINATE_HEADER)?.for_each(|rec, err| {
            let id = rec[0].to_string();
            let kind = kind_of(&id)
                .ok_or_else(|| err(format!("id {id:?} starts with neither Rec nor RP")))?;
            if self.site(&id).is_some() {
                return Err(err(format!("duplicate id {id:?}")));
            }
            let position = Point3::new(
                number(&rec[1], "x", err)?,
                number(&rec[2], "y", err)?,
                number(&rec[3], "z", err)?,
            );
            let site = Site { id, position };
            match kind {
                Kind::Receiver => self.receivers.push(site),
                Kind::ReferencePoint => self.reference_points.push(site),
            }
            Ok(())
        })
    }

    /// Adds the rows of an observation file; every id must already be declared.
    pub fn read_observations(&mut self, path: &Path) -> Result<()> {
        self.read_observations_from(path, open(path)?)
    }

    /// Adds observation rows read from `input`; `path` is used in diagnostics.
    pub fn read_observations_from<R: Read>(&mut self, path: &Path, input: R) -> Result<()> {
        let receivers: Vec<String> = self.receivers.iter().map(|s| s.id.clone()).collect();
        let rps: Vec<String> = self.reference_points.iter().map(|s| s.id.clone()).collect();
        let observations = &mut self.observations;
        Rows::new(path, input, &OBSERVATION_HEADER)?.for_each(|rec, err| {
            let receiver = rec[0].to_string();
            if !receivers.contains(&receiver) {
                return Err(err(format!("unknown receiver {receiver:?}")));
            }
            let reference_point = rec[1].to_string();
            if !rps.contains(&reference_point) {
                return Err(err(format!("unknown reference point {reference_point:?}")));
            }
            let pulse = rec[2]
                .parse()
                .map_err(|_| err(format!("pulse: not a nonnegative integer: {:?}", &rec[2])))?;
            let u = [
                number(&rec[3], "ux", err)?,
                number(&rec[4], "uy", err)?,
                number(&rec[5], "uz", err)?,
            ];
            let dvoa = Dvoa::normalized(u, DVOA_NORM_TOL).map_err(|e| err(e.to_string()))?;
            observations.push(Observation {
                receiver,
                reference_point,
                pulse,
                dvoa,
            });
            Ok(())
        })
    }

    /// Looks up a receiver or reference point.
    pub fn site(&self, id: &str) -> Option<&Site> {
        self.receivers
            .iter()
            .chain(&self.reference_points)
            .find(|s| s.id == id)
    }

    /// Writes receivers then reference points as a coordinate file.
    pub fn write_coordinates<W: Write>(&self, out: W) -> Result<()> {
        let mut w = writer(out);
        w.write_record(COORDINATE_HEADER)?;
        for s in self.receivers.iter().chain(&self.reference_points) {
            let p = s.position;
            w.write_record([s.id.clone(), p.x.to_string(), p.y.to_string(), p.z.to_string()])?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }

    /// Writes the observations as an observation file.
    pub fn write_observations<W: Write>(&self, out: W) -> Result<()> {
        let mut w = writer(out);
        w.write_record(OBSERVATION_HEADER)?;
        for o in &self.observations {
            let [x, y, z] = o.dvoa.components();
            w.write_record([
                o.receiver.clone(),
                o.reference_point.clone(),
                o.pulse.to_string(),
                x.to_string(),
                y.to_string(),
                z.to_string(),
            ])?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }
}

fn writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out)
}

/// Reads a coordinate file.
pub fn ingest_dataset(path: &Path) -> Result<RealDataset> {
    let mut ds = RealDataset::default();
    ds.read_coordinates(path)?;
    Ok(ds)
}

/// Estimator settings for [`evaluate_dataset`].
#[derive(Debug, Clone, PartialEq)]
pub struct EvalParams {
    /// Subset size for `alg1`; defaults to one fewer than the receivers in each group.
    pub alg1_n: Option<usize>,
    /// Annealing parameters; the box spans the receivers.
    pub asa: AsaParams,
    /// Cap on subsets for `alg1` and `rwgh`.
    pub enumeration_cap: u64,
    /// Seed of the annealing streams.
    pub seed: u64,
}

impl Default for EvalParams {
    fn default() -> Self {
        Self {
            alg1_n: None,
            asa: AsaParams::default(),
            enumeration_cap: DEFAULT_ENUMERATION_CAP,
            seed: 0,
        }
    }
}

/// Result of [`evaluate_dataset`].
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetEvaluation {
    /// One record per method.
    pub records: Vec<RmseRecord>,
    /// Pulses estimated.
    pub pulses: usize,
    /// Pulses skipped for having fewer than two receivers.
    pub skipped: usize,
}

/// Estimates every (reference point, pulse) group with each method and
/// scores the estimates against the reference coordinates.
pub fn evaluate_dataset(ds: &RealDataset, methods: &[Method], params: &EvalParams) -> Result<DatasetEvaluation> {
    if ds.receivers.len() < 2 {
        return Err(Error::Input("need at least two receivers".into()));
    }
    let receivers: Vec<Point3> = ds.receivers.iter().map(|s| s.position).collect();
    let asa = params.asa.config(Bounds::around(&receivers, 0.5)?);
    let rx_index: HashMap<&str, usize> =
        ds.receivers.iter().enumerate().map(|(i, s)| (s.id.as_str(), i)).collect();
    let rp_index: HashMap<&str, usize> =
        ds.reference_points.iter().enumerate().map(|(i, s)| (s.id.as_str(), i)).collect();

    let mut groups: BTreeMap<(usize, u64), BTreeMap<usize, Dvoa>> = BTreeMap::new();
    for o in &ds.observations {
        let (Some(&rx), Some(&rp)) = (
            rx_index.get(o.receiver.as_str()),
            rp_index.get(o.reference_point.as_str()),
        ) else {
            return Err(Error::Input(format!(
                "observation references undeclared id {} or {}",
                o.receiver, o.reference_point
            )));
        };
        if groups.entry((rp, o.pulse)).or_default().insert(rx, o.dvoa).is_some() {
            return Err(Error::Input(format!(
                "{} observed {} pulse {} twice",
                o.receiver, o.reference_point, o.pulse
            )));
        }
    }

    let mut accs = vec![(RmseAccumulator::default(), 0usize); methods.len()];
    let (mut pulses, mut skipped) = (0, 0);
    for (g, ((rp, _), obs)) in groups.iter().enumerate() {
        if obs.len() < 2 {
            skipped += 1;
            continue;
        }
        pulses += 1;
        let truth = ds.reference_points[*rp].position;
        let sensors: Vec<Point3> = obs.keys().map(|&i| receivers[i]).collect();
        let meas: Vec<AnglePair> = obs.values().map(|&u| angles_from_dvoa(u)).collect();
        let n = params.alg1_n.unwrap_or(obs.len().saturating_sub(1).max(2));
        for (&method, (acc, failures)) in methods.iter().zip(&mut accs) {
            let out: aoa_nlos::Result<EstimateReport> = match method {
                Method::IadSelect => {
                    iad_search(&meas, &sensors, n, params.enumeration_cap).map(Into::into)
                }
                Method::AsaL1 => {
                    let mut rng = stream(params.seed, Purpose::Annealing, 0, g as u32);
                    run_asa(&meas, &sensors, &asa, &mut rng)
                }
                Method::Lls => solve_lls_baseline(&meas, &sensors),
                Method::Wlls => solve_wlls(&meas, &sensors),
                Method::Rwgh => rwgh_capped(&meas, &sensors, params.enumeration_cap),
            };
            match out {
                Ok(r) => acc.push(r.position, truth),
                Err(_) => *failures += 1,
            }
        }
    }
    let records = methods
        .iter()
        .zip(accs)
        .map(|(&method, (acc, failures))| RmseRecord {
            method,
            p: None,
            n: (method == Method::IadSelect).then_some(params.alg1_n).flatten(),
            trials: pulses,
            failures,
            rmse: acc.value().unwrap_or(f64::NAN),
        })
        .collect();
    Ok(DatasetEvaluation {
        records,
        pulses,
        skipped,
    })
}

/// Settings for [`synthesize_observations`].
#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    /// Pulses per reference point.
    pub pulses: u64,
    /// Gaussian angle error (degrees).
    pub sigma_deg: f64,
    /// Receivers whose links are NLOS.
    pub nlos_receivers: Vec<String>,
    /// NLOS corruption probability.
    pub p_nlos: f64,
    /// Root seed.
    pub seed: u64,
}

/// Replaces the observations of `ds` with simulated pulses from every
/// reference point to every receiver.
pub fn synthesize_observations(ds: &mut RealDataset, spec: &SynthSpec) -> Result<()> {
    if let Some(id) = spec
        .nlos_receivers
        .iter()
        .find(|id| !ds.receivers.iter().any(|r| &r.id == *id))
    {
        return Err(Error::Input(format!("unknown receiver {id:?}")));
    }
    let sigma = spec.sigma_deg.to_radians();
    let noise = ds
        .receivers
        .iter()
        .map(|r| {
            if spec.nlos_receivers.contains(&r.id) {
                NoiseSpec::new(sigma, spec.p_nlos)
            } else {
                NoiseSpec::los(sigma)
            }
        })
        .collect::<aoa_nlos::Result<Vec<_>>>()?;
    let sensors: Vec<Point3> = ds.receivers.iter().map(|s| s.position).collect();
    let mut observations = Vec::new();
    for (k, rp) in ds.reference_points.iter().enumerate() {
        let scenario = Scenario::new(sensors.clone(), rp.position, noise.clone())?;
        for pulse in 0..spec.pulses {
            let mut rng = stream(spec.seed, Purpose::Noise, k as u32, pulse as u32);
            let meas = generate_measurements(&scenario, &mut rng)?;
            for (r, m) in ds.receivers.iter().zip(meas) {
                observations.push(Observation {
                    receiver: r.id.clone(),
                    reference_point: rp.id.clone(),
                    pulse,
                    dvoa: dvoa_from_angles(m),
                });
            }
        }
    }
    ds.observations = observations;
    Ok(())
}
