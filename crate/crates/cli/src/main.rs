use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use log::{info, warn};

use dcfsim::bianchi::oracle_row;
use dcfsim::error::{ConfigError, Error, OracleError};
use dcfsim::runner::{
    default_station_counts, parse_station_list, run_scenario, run_sweep, write_csv,
    write_oracle_csv, write_plot_data, FileConfig, ScenarioConfig, ScenarioPreset, SweepRow,
    SweepSpec,
};
use dcfsim::{Phy, SimTime};

const EXIT_USAGE: u8 = 2;
const EXIT_IO: u8 = 3;
const EXIT_INVARIANT: u8 = 4;

#[derive(Parser, Debug)]
#[command(name = "dcfsim", version, about = "802.11 DCF WLAN simulator")]
struct Cli {
    /// Optional TOML settings file; command line flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one scenario and print its metrics.
    Simulate(Common),
    /// Sweep station count, optionally against a MAC parameter axis.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Also write one gnuplot column file per metric into this directory.
        #[arg(long, value_name = "DIR")]
        plot_dir: Option<PathBuf>,
        /// Append per-flow ratio sums as extra columns.
        #[arg(long)]
        per_flow: bool,
    },
    /// Tabulate the saturation fixed-point model.
    Oracle(Common),
}

#[derive(Args, Debug, Default)]
struct Common {
    /// access | cwmin | cwmax | retry
    #[arg(long)]
    scenario: Option<ScenarioPreset>,
    /// Station counts: `10`, `1,5,10`, `1-10` or `lo:hi:step`.
    #[arg(long)]
    stations: Option<String>,
    #[arg(long)]
    cw_min: Option<u32>,
    #[arg(long)]
    cw_max: Option<u32>,
    #[arg(long)]
    retry_limit: Option<u32>,
    #[arg(long)]
    rts_threshold: Option<u32>,
    /// Simulated seconds of traffic.
    #[arg(long, value_name = "SECONDS")]
    sim_time: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Replications per point.
    #[arg(long)]
    runs: Option<u32>,
    /// Keep every queue backlogged instead of on/off traffic.
    #[arg(long)]
    saturated: bool,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print per-station MAC events to stderr.
    #[arg(long)]
    trace: bool,
}

/// Command line flags after merging with the settings file.
struct Resolved {
    cfg: ScenarioConfig,
    scenario: Option<ScenarioPreset>,
    stations: Option<Vec<u32>>,
    out: Option<PathBuf>,
}

fn resolve(common: &Common, file: Option<&FileConfig>) -> anyhow::Result<Resolved> {
    let mut cfg = ScenarioConfig::default();
    let mut scenario = None;
    let mut stations = None;
    let mut out = None;
    if let Some(f) = file {
        f.apply(&mut cfg)?;
        scenario = f.scenario.as_deref().map(str::parse).transpose()?;
        stations = f.stations.clone();
        out = f.out.clone();
    }
    let m = &mut cfg.mac;
    m.cw_min = common.cw_min.unwrap_or(m.cw_min);
    m.cw_max = common.cw_max.unwrap_or(m.cw_max);
    m.retry_limit = common.retry_limit.unwrap_or(m.retry_limit);
    m.rts_threshold = common.rts_threshold.unwrap_or(m.rts_threshold);
    if let Some(s) = common.sim_time {
        if !(s.is_finite() && s > 0.0) {
            return Err(ConfigError::Invalid("--sim-time must be positive".into()).into());
        }
        cfg.simulation_time = SimTime::from_secs_f64(s);
    }
    cfg.seed = common.seed.unwrap_or(cfg.seed);
    cfg.replications = common.runs.unwrap_or(cfg.replications);
    cfg.saturated |= common.saturated;
    cfg.trace |= common.trace;
    let stations = common
        .stations
        .clone()
        .or(stations)
        .map(|s| parse_station_list(&s))
        .transpose()?;
    Ok(Resolved {
        cfg,
        scenario: common.scenario.or(scenario),
        stations,
        out: common.out.clone().or(out),
    })
}

fn open_out(path: Option<&Path>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn simulate(r: Resolved) -> anyhow::Result<()> {
    let mut cfg = r.cfg;
    let stations = r.stations.unwrap_or_else(|| vec![cfg.stations]);
    if r.scenario.is_some() {
        warn!("--scenario is ignored by simulate; use sweep");
    }
    let mut rows = Vec::new();
    for n in stations {
        cfg.stations = n;
        let result = run_scenario::<f64>(&cfg)?;
        if cfg.trace {
            let mut err = io::stderr().lock();
            for run in &result.runs {
                for rec in &run.outcome.trace {
                    writeln!(err, "seed={} {rec}", run.seed)?;
                }
            }
        }
        info!(
            "n={n}: collision probability {:.4}",
            result.collision_probability()
        );
        rows.push(SweepRow {
            stations: n,
            axis_value: None,
            metrics: result.metrics,
            per_flow: result.per_flow,
            collision_probability: result.collision_probability(),
        });
    }
    write_csv(open_out(r.out.as_deref())?, &rows, None, false)?;
    Ok(())
}

fn sweep(r: Resolved, plot_dir: Option<PathBuf>, per_flow: bool) -> anyhow::Result<()> {
    let stations = r
        .stations
        .unwrap_or_else(|| default_station_counts(r.cfg.max_stations, 2));
    let spec = match r.scenario {
        Some(p) => SweepSpec::preset(p, stations),
        None => SweepSpec::stations_only(stations),
    };
    if r.cfg.trace {
        warn!("--trace is only honoured by simulate");
    }
    let cfg = ScenarioConfig {
        trace: false,
        ..r.cfg
    };
    let rows = run_sweep::<f64>(&cfg, &spec)?;
    write_csv(open_out(r.out.as_deref())?, &rows, spec.axis, per_flow)?;
    if let Some(dir) = plot_dir {
        let files = write_plot_data(&dir, &rows, spec.axis)
            .with_context(|| format!("cannot write plot data to {}", dir.display()))?;
        info!("wrote {} plot files", files.len());
    }
    Ok(())
}

fn oracle(r: Resolved) -> anyhow::Result<()> {
    let cfg = r.cfg;
    cfg.mac.validate()?;
    let phy = Phy::new(cfg.phy, cfg.frame_sizes)?;
    let stations = r
        .stations
        .unwrap_or_else(|| (1..=cfg.max_stations).collect());
    let rows = stations
        .iter()
        .map(|&n| oracle_row::<f64>(n, &cfg.mac, &phy, cfg.traffic.payload_bytes))
        .collect::<Result<Vec<_>, _>>()?;
    write_oracle_csv(open_out(r.out.as_deref())?, &rows)?;
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let file = cli.config.as_deref().map(FileConfig::load).transpose()?;
    match cli.command {
        Command::Simulate(c) => simulate(resolve(&c, file.as_ref())?),
        Command::Sweep {
            common,
            plot_dir,
            per_flow,
        } => sweep(resolve(&common, file.as_ref())?, plot_dir, per_flow),
        Command::Oracle(c) => oracle(resolve(&c, file.as_ref())?),
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<Error>() {
            return match e {
                Error::Config(_) | Error::Phy(_) => EXIT_USAGE,
                Error::Oracle(OracleError::InvalidParams(_)) => EXIT_USAGE,
                Error::Io(_) => EXIT_IO,
                _ => EXIT_INVARIANT,
            };
        }
        if cause.is::<ConfigError>() || cause.is::<dcfsim::error::PhyError>() {
            return EXIT_USAGE;
        }
        if cause.is::<OracleError>() {
            return match cause.downcast_ref::<OracleError>() {
                Some(OracleError::InvalidParams(_)) => EXIT_USAGE,
                _ => EXIT_INVARIANT,
            };
        }
        if cause.is::<io::Error>() {
            return EXIT_IO;
        }
    }
    EXIT_INVARIANT
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
