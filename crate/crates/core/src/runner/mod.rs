//! Scenario configuration, replicated runs and parameter sweeps.

mod config;
mod output;
mod sweep;

use rayon::prelude::*;
use serde::Serialize;

pub use config::FileConfig;
pub use output::{
    write_csv, write_oracle_csv, write_plot_data, CSV_HEADER, ORACLE_HEADER, PLOT_FILES,
};
pub use sweep::{
    default_station_counts, parse_station_list, run_sweep, Axis, ScenarioPreset, SweepRow,
    SweepSpec,
};

use crate::error::{ConfigError, Result};
use crate::kernel::SimTime;
use crate::mac::MacParams;
use crate::network::{Network, NetworkConfig, RunOutcome};
use crate::num::Real;
use crate::phy::{FrameSizes, Phy, PhyParams};
use crate::stats::{compute_metrics, per_flow_reading, MetricsReport, PerFlowReading};
use crate::traffic::{OnOffConfig, TrafficMode, DEFAULT_QUEUE_CAPACITY};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioConfig {
    pub stations: u32,
    pub mac: MacParams,
    pub phy: PhyParams,
    pub frame_sizes: FrameSizes,
    /// Source shape. Start and stop are derived from `app_start` and
    /// `simulation_time`; the fields on this struct are ignored.
    pub traffic: OnOffConfig,
    pub saturated: bool,
    /// Measurement window; also the throughput divisor.
    pub simulation_time: SimTime,
    pub app_start: SimTime,
    pub seed: u64,
    pub replications: u32,
    pub max_stations: u32,
    pub queue_capacity: usize,
    pub trace: bool,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            stations: 1,
            mac: MacParams::default(),
            phy: PhyParams::default(),
            frame_sizes: FrameSizes::default(),
            traffic: OnOffConfig::default(),
            saturated: false,
            simulation_time: SimTime::from_secs(30),
            app_start: SimTime::from_secs(1),
            seed: 1,
            replications: 1,
            max_stations: 60,
            queue_capacity: DEFAULT_QUEUE_CAPACITY,
            trace: false,
        }
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<Phy, ConfigError> {
        let bad = |m: String| Err(ConfigError::Invalid(m));
        if self.stations < 1 || self.stations > self.max_stations {
            return bad(format!(
                "station count {} outside 1..={}",
                self.stations, self.max_stations
            ));
        }
        if self.simulation_time == SimTime::ZERO {
            return bad("simulation time must be positive".into());
        }
        if self.replications < 1 {
            return bad("need at least one run".into());
        }
        if self.queue_capacity < 1 {
            return bad("queue capacity must be positive".into());
        }
        let t = &self.traffic;
        if t.payload_bytes < 1 || t.data_rate < 1 {
            return bad("payload and data rate must be positive".into());
        }
        if !self.saturated && (t.on_duration == SimTime::ZERO || t.interval() >= t.on_duration) {
            return bad("on period shorter than one packet interval".into());
        }
        self.mac.validate()?;
        Phy::new(self.phy, self.frame_sizes).map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    /// Instant the sources stop and the run ends.
    pub fn end_time(&self) -> SimTime {
        self.app_start + self.simulation_time
    }

    pub fn traffic_mode(&self) -> TrafficMode {
        if self.saturated {
            TrafficMode::Saturated {
                payload_bytes: self.traffic.payload_bytes,
                start_time: self.app_start,
                stop_time: self.end_time(),
            }
        } else {
            TrafficMode::OnOff(OnOffConfig {
                start_time: self.app_start,
                stop_time: self.end_time(),
                ..self.traffic
            })
        }
    }

    /// Seed of replication `run`.
    pub fn run_seed(&self, run: u32) -> u64 {
        self.seed.wrapping_add(u64::from(run))
    }

    pub fn network_config(&self, phy: Phy, run: u32) -> NetworkConfig {
        NetworkConfig {
            stations: self.stations as usize,
            mac: self.mac,
            phy,
            traffic: self.traffic_mode(),
            queue_capacity: self.queue_capacity,
            seed: self.run_seed(run),
            trace: self.trace,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunReport<T> {
    pub seed: u64,
    pub metrics: MetricsReport<T>,
    pub per_flow: PerFlowReading<T>,
    pub outcome: RunOutcome,
}

#[derive(Debug, Clone)]
pub struct ScenarioResult<T> {
    pub stations: u32,
    /// Mean over replications.
    pub metrics: MetricsReport<T>,
    pub per_flow: PerFlowReading<T>,
    pub runs: Vec<RunReport<T>>,
}

impl<T: Real> ScenarioResult<T> {
    /// Retransmissions over channel accesses, pooled across replications.
    pub fn collision_probability(&self) -> f64 {
        let (mut retx, mut att) = (0u64, 0u64);
        for r in &self.runs {
            retx += r.outcome.mac.retransmissions;
            att += r.outcome.mac.attempts;
        }
        if att == 0 {
            0.0
        } else {
            retx as f64 / att as f64
        }
    }
}

pub fn run_once<T: Real>(cfg: &ScenarioConfig, run: u32) -> Result<RunReport<T>> {
    let phy = cfg.validate()?;
    let net = cfg.network_config(phy, run);
    let outcome = Network::run(&net, cfg.end_time())?;
    let flows = outcome.flow_stats();
    Ok(RunReport {
        seed: net.seed,
        metrics: compute_metrics(&flows, cfg.simulation_time),
        per_flow: per_flow_reading(&flows),
        outcome,
    })
}

/// Runs all replications of one scenario in parallel.
pub fn run_scenario<T: Real>(cfg: &ScenarioConfig) -> Result<ScenarioResult<T>> {
    cfg.validate()?;
    let runs = (0..cfg.replications)
        .into_par_iter()
        .map(|r| run_once::<T>(cfg, r))
        .collect::<Result<Vec<_>>>()?;
    let metrics: Vec<_> = runs.iter().map(|r| r.metrics).collect();
    let n = T::from_count(runs.len() as u64);
    let per_flow = PerFlowReading {
        pdr_sum: runs.iter().map(|r| r.per_flow.pdr_sum).sum::<T>() / n,
        plr_sum: runs.iter().map(|r| r.per_flow.plr_sum).sum::<T>() / n,
        delay_sum_s: runs.iter().map(|r| r.per_flow.delay_sum_s).sum::<T>() / n,
    };
    Ok(ScenarioResult {
        stations: cfg.stations,
        metrics: MetricsReport::mean(&metrics),
        per_flow,
        runs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn short(stations: u32) -> ScenarioConfig {
        ScenarioConfig {
            stations,
            simulation_time: SimTime::from_secs(4),
            ..ScenarioConfig::default()
        }
    }

    #[test]
    fn defaults_validate() {
        assert!(ScenarioConfig::default().validate().is_ok());
        assert_eq!(ScenarioConfig::default().end_time(), SimTime::from_secs(31));
    }

    #[test]
    fn rejects_out_of_range_stations() {
        assert!(short(0).validate().is_err());
        assert!(short(61).validate().is_err());
    }

    #[test]
    fn replications_use_consecutive_seeds() {
        let cfg = ScenarioConfig {
            replications: 3,
            seed: 10,
            ..short(3)
        };
        let r = run_scenario::<f64>(&cfg).unwrap();
        let seeds: Vec<u64> = r.runs.iter().map(|x| x.seed).collect();
        assert_eq!(seeds, vec![10, 11, 12]);
    }

    #[test]
    fn light_load_is_lossless() {
        let r = run_scenario::<f64>(&short(2)).unwrap();
        assert_eq!(r.metrics.pdr, 1.0);
        assert_eq!(r.metrics.plr, 0.0);
        // 2 stations at 250 kb/s mean, IP level
        let offered = 2.0 * 0.25 * 540.0 / 512.0;
        assert!((r.metrics.agg_throughput_mbps - offered).abs() < 0.05 * offered);
    }

    #[test]
    fn f32_and_f64_agree() {
        let a = run_scenario::<f64>(&short(3)).unwrap();
        let b = run_scenario::<f32>(&short(3)).unwrap();
        assert!((a.metrics.pdr - f64::from(b.metrics.pdr)).abs() < 1e-6);
    }
}
