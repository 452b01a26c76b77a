//! Command-line interface.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::parse_methods;
use crate::dataset::{evaluate_dataset, synthesize_observations, EvalParams, RealDataset, SynthSpec};
use crate::records::write_csv;
use crate::sim::{run_scenario, sweep_n};
use crate::{AsaParams, Error, Preset, Result, RmseRecord, ScenarioConfig};

/// AOA source localization under NLOS conditions: Monte-Carlo benchmarks and dataset evaluation.
#[derive(Debug, Parser)]
#[command(name = "aoa", version)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Monte-Carlo RMSE of each method over the p grid.
    Simulate {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Monte-Carlo RMSE of alg1 for several subset sizes N.
    SweepN {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Subset sizes to run; defaults to 2..=L.
        #[arg(long, value_delimiter = ',')]
        n_values: Vec<usize>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// RMSE of each method on a recorded dataset.
    Estimate {
        #[command(flatten)]
        data: DataArgs,
        /// Comma-separated methods (alg1, alg2, lls, wlls, rwgh).
        #[arg(long, default_value = "alg1,alg2,lls,wlls,rwgh")]
        methods: String,
        /// Subset size for alg1; defaults to one fewer than the receivers per pulse.
        #[arg(long)]
        alg1_n: Option<usize>,
        /// Seed of the annealing chains.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        asa: AsaArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Validates coordinate and observation files.
    IngestCheck {
        #[command(flatten)]
        data: DataArgs,
    },
    /// Writes simulated observations for a coordinate file.
    Synthesize {
        /// Coordinate files (`id,x,y,z`).
        #[arg(required = true)]
        coords: Vec<PathBuf>,
        /// Pulses per reference point.
        #[arg(long, default_value_t = 100)]
        pulses: u64,
        /// Gaussian angle error (degrees).
        #[arg(long, default_value_t = 1.0)]
        sigma_deg: f64,
        /// Comma-separated receiver ids with NLOS links.
        #[arg(long, value_delimiter = ',')]
        nlos: Vec<String>,
        /// NLOS corruption probability.
        #[arg(long, default_value_t = 0.9)]
        p: f64,
        /// Root seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Output file; standard output when absent.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct DataArgs {
    /// Coordinate files (`id,x,y,z`); receivers and reference points may share one file.
    #[arg(required = true)]
    coords: Vec<PathBuf>,
    /// Observation file (`receiver_id,rp_id,pulse,ux,uy,uz`).
    #[arg(long)]
    observations: Option<PathBuf>,
}

impl DataArgs {
    fn load(&self) -> Result<RealDataset> {
        let mut ds = RealDataset::default();
        for path in &self.coords {
            ds.read_coordinates(path)?;
        }
        if let Some(path) = &self.observations {
            ds.read_observations(path)?;
        }
        Ok(ds)
    }
}

#[derive(Debug, Args)]
struct AsaArgs {
    /// Annealing initial temperature.
    #[arg(long)]
    asa_t0: Option<f64>,
    /// Annealing iteration budget.
    #[arg(long)]
    asa_nmax: Option<usize>,
    /// Annealing stop threshold.
    #[arg(long)]
    asa_gamma: Option<f64>,
    /// Annealing cooling constant.
    #[arg(long)]
    asa_c: Option<f64>,
}

impl AsaArgs {
    fn apply(&self, asa: &mut AsaParams) {
        if let Some(v) = self.asa_t0 {
            asa.t0 = v;
        }
        if let Some(v) = self.asa_nmax {
            asa.n_max = v;
        }
        if let Some(v) = self.asa_gamma {
            asa.gamma = v;
        }
        if let Some(v) = self.asa_c {
            asa.c = v;
        }
    }
}

#[derive(Debug, Args)]
struct ScenarioArgs {
    /// JSON configuration; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// NLOS severity preset (2, 5 or 8 NLOS links of 10).
    #[arg(long, value_enum)]
    preset: Option<Preset>,
    /// Sensors per trial.
    #[arg(long)]
    num_sensors: Option<usize>,
    /// NLOS links per trial.
    #[arg(long)]
    nlos_count: Option<usize>,
    /// Side of the cubic region (m).
    #[arg(long)]
    region_side: Option<f64>,
    /// Monte-Carlo trials per grid point.
    #[arg(long)]
    trials: Option<usize>,
    /// Root seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Gaussian angle error (degrees).
    #[arg(long)]
    sigma_deg: Option<f64>,
    /// Comma-separated NLOS probabilities.
    #[arg(long, value_delimiter = ',')]
    p_grid: Option<Vec<f64>>,
    /// Comma-separated methods (alg1, alg2, lls, wlls, rwgh).
    #[arg(long)]
    methods: Option<String>,
    /// Subset size for alg1; defaults to the LOS link count.
    #[arg(long)]
    alg1_n: Option<usize>,
    /// Keep the same NLOS links in every trial.
    #[arg(long)]
    fixed_nlos_links: bool,
    /// Cap on subsets enumerated by alg1 and rwgh.
    #[arg(long)]
    enumeration_cap: Option<u64>,
    #[command(flatten)]
    asa: AsaArgs,
}

impl ScenarioArgs {
    fn config(&self) -> Result<ScenarioConfig> {
        let mut cfg = match &self.config {
            Some(path) => ScenarioConfig::from_json_file(path)?,
            None => ScenarioConfig::default(),
        };
        if let Some(p) = self.preset {
            cfg.apply_preset(p);
        }
        macro_rules! set {
            ($($field:ident),*) => {$(
                if let Some(v) = &self.$field {
                    cfg.$field = v.clone();
                }
            )*};
        }
        set!(num_sensors, nlos_count, region_side, trials, seed, sigma_deg, p_grid, enumeration_cap);
        if let Some(m) = &self.methods {
            cfg.methods = parse_methods(m)?;
        }
        if self.alg1_n.is_some() {
            cfg.alg1_n = self.alg1_n;
        }
        if self.fixed_nlos_links {
            cfg.redraw_nlos_links = false;
        }
        self.asa.apply(&mut cfg.asa);
        cfg.validate()?;
        Ok(cfg)
    }
}

fn emit(records: &[RmseRecord], output: &OutputArgs) -> Result<()> {
    with_output(output, |w| write_csv(records, w))
}

fn with_output(output: &OutputArgs, f: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    match &output.output {
        Some(path) => {
            let io_err = |source| Error::Io {
                path: path.clone(),
                source,
            };
            let mut w = BufWriter::new(File::create(path).map_err(io_err)?);
            f(&mut w)?;
            w.flush().map_err(io_err)
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            f(&mut w)?;
            w.flush().map_err(|source| Error::Io {
                path: Path::new("<stdout>").to_path_buf(),
                source,
            })
        }
    }
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate { scenario, output } => emit(&run_scenario(&scenario.config()?)?, &output),
        Command::SweepN {
            scenario,
            n_values,
            output,
        } => {
            let cfg = scenario.config()?;
            let ns = if n_values.is_empty() {
                (2..=cfg.num_sensors).collect()
            } else {
                n_values
            };
            emit(&sweep_n(&cfg, &ns)?, &output)
        }
        Command::Estimate {
            data,
            methods,
            alg1_n,
            seed,
            asa,
            output,
        } => {
            let ds = data.load()?;
            let methods = parse_methods(&methods)?;
            if methods.is_empty() {
                return Err(Error::Config("no methods selected".into()));
            }
            let mut params = EvalParams {
                alg1_n,
                seed,
                ..EvalParams::default()
            };
            asa.apply(&mut params.asa);
            params.asa.validate()?;
            let eval = evaluate_dataset(&ds, &methods, &params)?;
            if eval.skipped > 0 {
                eprintln!("warning: skipped {} pulses with fewer than two receivers", eval.skipped);
            }
            emit(&eval.records, &output)
        }
        Command::IngestCheck { data } => {
            let ds = data.load()?;
            println!(
                "receivers={} reference_points={} observations={}",
                ds.receivers.len(),
                ds.reference_points.len(),
                ds.observations.len()
            );
            Ok(())
        }
        Command::Synthesize {
            coords,
            pulses,
            sigma_deg,
            nlos,
            p,
            seed,
            output,
        } => {
            let mut ds = RealDataset::default();
            for path in &coords {
                ds.read_coordinates(path)?;
            }
            let spec = SynthSpec {
                pulses,
                sigma_deg,
                nlos_receivers: nlos,
                p_nlos: p,
                seed,
            };
            synthesize_observations(&mut ds, &spec)?;
            with_output(&output, |w| ds.write_observations(w))
        }
    }
}

/// Parses `args` and runs the command; usage and configuration errors exit
/// with status 2, other failures with 1.
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if matches!(e, Error::Config(_)) { 2 } else { 1 })
        }
    }
}
