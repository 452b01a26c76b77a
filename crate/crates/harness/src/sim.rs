//! Monte-Carlo driver.

use aoa_nlos::asa::run_asa;
use aoa_nlos::baselines::{rwgh_capped, solve_lls_baseline};
use aoa_nlos::noise::{generate_measurements, NoiseSpec, Scenario};
use aoa_nlos::select::iad_search;
use aoa_nlos::wlls::solve_wlls;
use aoa_nlos::{AnglePair, EstimateReport, Method, Point3};
use rand::seq::index;
use rand::Rng;
use rayon::prelude::*;
use rayon::ThreadPool;

use crate::metrics::RmseAccumulator;
use crate::streams::{stream, Purpose};
use crate::{Error, Result, RmseRecord, ScenarioConfig};

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "AOA_THREADS";

/// One method run, with its subset size for `alg1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Slot {
    /// Estimator.
    pub method: Method,
    /// Subset size for `alg1`.
    pub n: Option<usize>,
}

/// A drawn trial: geometry, link states and measurements.
#[derive(Debug, Clone, PartialEq)]
pub struct Trial {
    /// True source position.
    pub source: Point3,
    /// Sensor positions.
    pub sensors: Vec<Point3>,
    /// `true` for links drawn as NLOS.
    pub nlos: Vec<bool>,
    /// Noisy measurements.
    pub measurements: Vec<AnglePair>,
}

impl Trial {
    /// Sorted ids of the LOS links.
    pub fn los_set(&self) -> Vec<usize> {
        (0..self.nlos.len()).filter(|&i| !self.nlos[i]).collect()
    }
}

fn uniform_point<R: Rng>(rng: &mut R, half: f64) -> Point3 {
    let mut c = || rng.random_range(-half..half);
    Point3::new(c(), c(), c())
}

/// Draws trial `trial` at grid point `grid_index` with NLOS probability `p`.
///
/// Geometry and link states depend only on the trial number, so every grid
/// point sees the same layouts.
pub fn draw_trial(cfg: &ScenarioConfig, grid_index: usize, p: f64, trial: usize) -> Result<Trial> {
    let l = cfg.num_sensors;
    let half = cfg.region_side / 2.0;
    let t = trial as u32;
    let mut geo = stream(cfg.seed, Purpose::Geometry, 0, t);
    let source = uniform_point(&mut geo, half);
    let sensors: Vec<Point3> = (0..l).map(|_| uniform_point(&mut geo, half)).collect();

    let mut links = stream(cfg.seed, Purpose::Links, 0, if cfg.redraw_nlos_links { t } else { 0 });
    let mut nlos = vec![false; l];
    for i in index::sample(&mut links, l, cfg.nlos_count) {
        nlos[i] = true;
    }

    let sigma = cfg.sigma_deg.to_radians();
    let noise = nlos
        .iter()
        .map(|&bad| if bad { NoiseSpec::new(sigma, p) } else { NoiseSpec::los(sigma) })
        .collect::<aoa_nlos::Result<Vec<_>>>()?;
    let scenario = Scenario::new(sensors, source, noise)?;
    let mut rng = stream(cfg.seed, Purpose::Noise, grid_index as u32, t);
    let measurements = generate_measurements(&scenario, &mut rng)?;
    Ok(Trial {
        source,
        sensors: scenario.sensors().to_vec(),
        nlos,
        measurements,
    })
}

/// Runs one method on a drawn trial.
pub fn run_slot(
    cfg: &ScenarioConfig,
    slot: Slot,
    trial: &Trial,
    grid_index: usize,
    trial_index: usize,
) -> aoa_nlos::Result<EstimateReport> {
    let (m, s) = (&trial.measurements[..], &trial.sensors[..]);
    match slot.method {
        Method::IadSelect => {
            let n = slot.n.unwrap_or_else(|| cfg.effective_alg1_n());
            iad_search(m, s, n, cfg.enumeration_cap).map(Into::into)
        }
        Method::AsaL1 => {
            let asa = cfg.asa.config(cfg.region_bounds());
            let mut rng = stream(cfg.seed, Purpose::Annealing, grid_index as u32, trial_index as u32);
            run_asa(m, s, &asa, &mut rng)
        }
        Method::Lls => solve_lls_baseline(m, s),
        Method::Wlls => solve_wlls(m, s),
        Method::Rwgh => rwgh_capped(m, s, cfg.enumeration_cap),
    }
}

/// Worker pool sized by [`THREADS_ENV`], or rayon's default when unset.
pub fn thread_pool() -> Result<ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| Error::Config(format!("{THREADS_ENV}={v:?} is not a positive integer")))?;
        builder = builder.num_threads(n);
    }
    Ok(builder.build()?)
}

/// Runs every slot over the whole p grid, returning records ordered by p then slot.
pub fn run_slots(cfg: &ScenarioConfig, slots: &[Slot], pool: &ThreadPool) -> Result<Vec<RmseRecord>> {
    cfg.validate()?;
    let jobs: Vec<(usize, usize)> = (0..cfg.p_grid.len())
        .flat_map(|g| (0..cfg.trials).map(move |t| (g, t)))
        .collect();
    let outcomes: Vec<Vec<Option<Point3>>> = pool.install(|| {
        jobs.par_iter()
            .map(|&(g, t)| -> Result<Vec<Option<Point3>>> {
                let trial = draw_trial(cfg, g, cfg.p_grid[g], t)?;
                Ok(slots
                    .iter()
                    .map(|&slot| run_slot(cfg, slot, &trial, g, t).ok().map(|r| r.position))
                    .collect())
            })
            .collect::<Result<_>>()
    })?;

    let mut records = Vec::with_capacity(cfg.p_grid.len() * slots.len());
    for (g, &p) in cfg.p_grid.iter().enumerate() {
        let rows = &outcomes[g * cfg.trials..(g + 1) * cfg.trials];
        for (j, slot) in slots.iter().enumerate() {
            let mut acc = RmseAccumulator::default();
            let mut failures = 0;
            for (t, row) in rows.iter().enumerate() {
                match row[j] {
                    Some(x) => acc.push(x, draw_source(cfg, t)),
                    None => failures += 1,
                }
            }
            records.push(RmseRecord {
                method: slot.method,
                p: Some(p),
                n: slot.n,
                trials: cfg.trials,
                failures,
                rmse: acc.value().unwrap_or(f64::NAN),
            });
        }
    }
    Ok(records)
}

fn draw_source(cfg: &ScenarioConfig, trial: usize) -> Point3 {
    let mut geo = stream(cfg.seed, Purpose::Geometry, 0, trial as u32);
    uniform_point(&mut geo, cfg.region_side / 2.0)
}

fn slots_for(cfg: &ScenarioConfig, alg1_ns: &[usize]) -> Vec<Slot> {
    cfg.methods
        .iter()
        .flat_map(|&method| -> Vec<Slot> {
            if method == Method::IadSelect {
                alg1_ns.iter().map(|&n| Slot { method, n: Some(n) }).collect()
            } else {
                vec![Slot { method, n: None }]
            }
        })
        .collect()
}

/// One record per (p, method) for the configured methods.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<Vec<RmseRecord>> {
    run_slots(cfg, &slots_for(cfg, &[cfg.effective_alg1_n()]), &thread_pool()?)
}

/// Like [`run_scenario`], with `alg1` run once per subset size in `n_values`.
pub fn sweep_n(cfg: &ScenarioConfig, n_values: &[usize]) -> Result<Vec<RmseRecord>> {
    let l = cfg.num_sensors;
    if n_values.is_empty() {
        return Err(Error::Config("no N values".into()));
    }
    if let Some(n) = n_values.iter().find(|n| !(2..=l).contains(*n)) {
        return Err(Error::Config(format!("N = {n} outside 2..={l}")));
    }
    let mut cfg = cfg.clone();
    if !cfg.methods.contains(&Method::IadSelect) {
        cfg.methods.insert(0, Method::IadSelect);
    }
    cfg.alg1_n = Some(n_values[0]);
    run_slots(&cfg, &slots_for(&cfg, n_values), &thread_pool()?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Preset;

    fn pool(n: usize) -> ThreadPool {
        rayon::ThreadPoolBuilder::new().num_threads(n).build().unwrap()
    }

    #[test]
    fn trials_share_geometry_across_grid() {
        let cfg = Preset::Mild.config();
        let a = draw_trial(&cfg, 0, 0.1, 5).unwrap();
        let b = draw_trial(&cfg, 3, 0.9, 5).unwrap();
        assert_eq!((a.source, &a.sensors, &a.nlos), (b.source, &b.sensors, &b.nlos));
        assert_ne!(a.measurements, b.measurements);
        assert_eq!(a.nlos.iter().filter(|&&b| b).count(), 2);
        assert_eq!(a.los_set().len(), 8);
        assert_eq!(draw_source(&cfg, 5), a.source);
        assert!(a.sensors.iter().all(|s| s.to_array().iter().all(|c| c.abs() <= 10.0)));
    }

    #[test]
    fn fixed_links() {
        let mut cfg = Preset::Moderate.config();
        cfg.redraw_nlos_links = false;
        let a = draw_trial(&cfg, 0, 0.5, 1).unwrap();
        let b = draw_trial(&cfg, 0, 0.5, 2).unwrap();
        assert_eq!(a.nlos, b.nlos);
        assert_ne!(a.sensors, b.sensors);
    }

    #[test]
    fn noiseless_limit() {
        let mut cfg = ScenarioConfig {
            sigma_deg: 1e-9_f64.to_degrees(),
            trials: 10,
            p_grid: vec![0.5],
            ..Default::default()
        };
        cfg.asa.n_max = 300;
        cfg.methods = vec![Method::IadSelect, Method::Lls, Method::Wlls, Method::Rwgh];
        cfg.alg1_n = Some(8);
        let recs = run_slots(&cfg, &slots_for(&cfg, &[8]), &pool(1)).unwrap();
        assert_eq!(recs.len(), 4);
        for r in recs {
            assert_eq!(r.failures, 0);
            assert!(r.rmse < 1e-3, "{r:?}");
        }
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let mut cfg = Preset::Moderate.config();
        cfg.trials = 6;
        cfg.p_grid = vec![0.2, 0.8];
        cfg.asa.n_max = 200;
        let slots = slots_for(&cfg, &[5]);
        let a = run_slots(&cfg, &slots, &pool(1)).unwrap();
        let b = run_slots(&cfg, &slots, &pool(3)).unwrap();
        assert_eq!(a.len(), 10);
        assert_eq!(format!("{a:?}"), format!("{b:?}"));
    }

    #[test]
    fn sweep_slots() {
        let mut cfg = Preset::Moderate.config();
        cfg.methods = vec![Method::Wlls];
        cfg.trials = 3;
        cfg.p_grid = vec![0.5];
        let recs = sweep_n(&cfg, &[2, 5, 10]).unwrap();
        let ns: Vec<_> = recs.iter().map(|r| (r.method, r.n)).collect();
        assert_eq!(
            ns,
            [
                (Method::IadSelect, Some(2)),
                (Method::IadSelect, Some(5)),
                (Method::IadSelect, Some(10)),
                (Method::Wlls, None)
            ]
        );
        assert!(sweep_n(&cfg, &[11]).is_err());
        assert!(sweep_n(&cfg, &[1]).is_err());
    }
}
