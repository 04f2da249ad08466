use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use super::ScenarioConfig;
use crate::error::{ConfigError, Error, Result};
use crate::kernel::SimTime;

/// Optional `key = value` settings file (TOML). Keys mirror the command
/// line flags; every key is optional and command line flags override them.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct FileConfig {
    pub scenario: Option<String>,
    pub stations: Option<String>,
    pub cw_min: Option<u32>,
    pub cw_max: Option<u32>,
    pub retry_limit: Option<u32>,
    pub rts_threshold: Option<u32>,
    /// Seconds.
    pub sim_time: Option<f64>,
    pub seed: Option<u64>,
    pub runs: Option<u32>,
    pub saturated: Option<bool>,
    pub out: Option<PathBuf>,
    pub trace: Option<bool>,
    pub payload_bytes: Option<u32>,
    /// bits/s while ON.
    pub data_rate: Option<u64>,
    /// Seconds.
    pub on_time: Option<f64>,
    /// Seconds.
    pub off_time: Option<f64>,
    pub queue_capacity: Option<usize>,
    pub max_stations: Option<u32>,
    pub eifs: Option<bool>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        Ok(Self::parse(&text, &path.display().to_string())?)
    }

    pub fn parse(text: &str, origin: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse {
            path: origin.to_string(),
            msg: e.to_string(),
        })
    }

    /// Copies every present scalar setting onto `cfg`. `scenario`,
    /// `stations` and `out` are left to the caller.
    pub fn apply(&self, cfg: &mut ScenarioConfig) -> Result<(), Error> {
        let secs = |s: f64, what: &str| {
            if s.is_finite() && s > 0.0 {
                Ok(SimTime::from_secs_f64(s))
            } else {
                Err(ConfigError::Invalid(format!(
                    "{what} must be a positive number of seconds"
                )))
            }
        };
        if let Some(v) = self.cw_min {
            cfg.mac.cw_min = v;
        }
        if let Some(v) = self.cw_max {
            cfg.mac.cw_max = v;
        }
        if let Some(v) = self.retry_limit {
            cfg.mac.retry_limit = v;
        }
        if let Some(v) = self.rts_threshold {
            cfg.mac.rts_threshold = v;
        }
        if let Some(v) = self.eifs {
            cfg.mac.eifs_enabled = v;
        }
        if let Some(v) = self.sim_time {
            cfg.simulation_time = secs(v, "sim-time")?;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.runs {
            cfg.replications = v;
        }
        if let Some(v) = self.saturated {
            cfg.saturated = v;
        }
        if let Some(v) = self.trace {
            cfg.trace = v;
        }
        if let Some(v) = self.payload_bytes {
            cfg.traffic.payload_bytes = v;
        }
        if let Some(v) = self.data_rate {
            cfg.traffic.data_rate = v;
        }
        if let Some(v) = self.on_time {
            cfg.traffic.on_duration = secs(v, "on-time")?;
        }
        if let Some(v) = self.off_time {
            cfg.traffic.off_duration = SimTime::from_secs_f64(v.max(0.0));
        }
        if let Some(v) = self.queue_capacity {
            cfg.queue_capacity = v;
        }
        if let Some(v) = self.max_stations {
            cfg.max_stations = v;
        }
        Ok(())
    }
}
