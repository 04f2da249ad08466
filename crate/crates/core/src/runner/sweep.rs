use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use super::{run_scenario, ScenarioConfig};
use crate::error::{ConfigError, Result};
use crate::num::Real;
use crate::stats::{MetricsReport, PerFlowReading};

/// MAC parameter varied by a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    RtsThreshold,
    CwMin,
    CwMax,
    RetryLimit,
}

impl Axis {
    /// CSV column name.
    pub fn column(self) -> &'static str {
        match self {
            Axis::RtsThreshold => "rtsThreshold",
            Axis::CwMin => "cwMin",
            Axis::CwMax => "cwMax",
            Axis::RetryLimit => "retryLimit",
        }
    }

    pub fn apply(self, cfg: &mut ScenarioConfig, value: u32) {
        match self {
            Axis::RtsThreshold => cfg.mac.rts_threshold = value,
            Axis::CwMin => cfg.mac.cw_min = value,
            Axis::CwMax => cfg.mac.cw_max = value,
            Axis::RetryLimit => cfg.mac.retry_limit = value,
        }
    }
}

/// The four canned experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScenarioPreset {
    /// Basic access against RTS/CTS.
    Access,
    CwMin,
    CwMax,
    Retry,
}

impl ScenarioPreset {
    pub const ALL: [ScenarioPreset; 4] = [
        ScenarioPreset::Access,
        ScenarioPreset::CwMin,
        ScenarioPreset::CwMax,
        ScenarioPreset::Retry,
    ];

    pub fn axis(self) -> Axis {
        match self {
            ScenarioPreset::Access => Axis::RtsThreshold,
            ScenarioPreset::CwMin => Axis::CwMin,
            ScenarioPreset::CwMax => Axis::CwMax,
            ScenarioPreset::Retry => Axis::RetryLimit,
        }
    }

    pub fn values(self) -> Vec<u32> {
        match self {
            ScenarioPreset::Access => vec![0, 65535],
            ScenarioPreset::CwMin => vec![3, 7, 15, 31],
            ScenarioPreset::CwMax => vec![255, 511, 1023],
            ScenarioPreset::Retry => vec![1, 3, 5, 7, 9, 11],
        }
    }
}

impl fmt::Display for ScenarioPreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScenarioPreset::Access => "access",
            ScenarioPreset::CwMin => "cwmin",
            ScenarioPreset::CwMax => "cwmax",
            ScenarioPreset::Retry => "retry",
        })
    }
}

impl FromStr for ScenarioPreset {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        ScenarioPreset::ALL
            .into_iter()
            .find(|p| p.to_string() == s.to_ascii_lowercase())
            .ok_or_else(|| ConfigError::Invalid(format!("unknown scenario {s:?}")))
    }
}

/// `1, 2, 4, ..., max`: start at one, then every `step` up to `max`.
pub fn default_station_counts(max: u32, step: u32) -> Vec<u32> {
    let step = step.max(1);
    let mut v = vec![1];
    let mut n = step;
    while n <= max {
        if n > 1 {
            v.push(n);
        }
        n += step;
    }
    v
}

/// Parses `4`, `1,5,10`, `1-10` or `2:60:2` (lo:hi:step).
pub fn parse_station_list(s: &str) -> Result<Vec<u32>, ConfigError> {
    let num = |t: &str| {
        t.trim()
            .parse::<u32>()
            .map_err(|_| ConfigError::Invalid(format!("bad station count {t:?} in {s:?}")))
    };
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((lo, rest)) = part.split_once(':') {
            let (hi, step) = match rest.split_once(':') {
                Some((h, st)) => (num(h)?, num(st)?),
                None => (num(rest)?, 1),
            };
            let lo = num(lo)?;
            if step == 0 || lo > hi {
                return Err(ConfigError::Invalid(format!("bad range {part:?}")));
            }
            out.extend((lo..=hi).step_by(step as usize));
        } else if let Some((lo, hi)) = part.split_once('-') {
            let (lo, hi) = (num(lo)?, num(hi)?);
            if lo > hi {
                return Err(ConfigError::Invalid(format!("bad range {part:?}")));
            }
            out.extend(lo..=hi);
        } else {
            out.push(num(part)?);
        }
    }
    if out.is_empty() {
        return Err(ConfigError::Invalid("empty station list".into()));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepSpec {
    pub stations: Vec<u32>,
    pub axis: Option<Axis>,
    /// Axis values; ignored without an axis.
    pub values: Vec<u32>,
}

impl SweepSpec {
    pub fn stations_only(stations: Vec<u32>) -> Self {
        SweepSpec {
            stations,
            axis: None,
            values: Vec::new(),
        }
    }

    pub fn preset(preset: ScenarioPreset, stations: Vec<u32>) -> Self {
        SweepSpec {
            stations,
            axis: Some(preset.axis()),
            values: preset.values(),
        }
    }

    /// Every (axis value, station count) point, axis outermost.
    pub fn points(&self) -> Vec<(Option<u32>, u32)> {
        let axis_values: Vec<Option<u32>> = match self.axis {
            Some(_) => self.values.iter().copied().map(Some).collect(),
            None => vec![None],
        };
        axis_values
            .into_iter()
            .flat_map(|v| self.stations.iter().map(move |&n| (v, n)))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow<T> {
    pub stations: u32,
    pub axis_value: Option<u32>,
    pub metrics: MetricsReport<T>,
    pub per_flow: PerFlowReading<T>,
    pub collision_probability: f64,
}

/// Runs every point of the sweep in parallel; rows come back in
/// [`SweepSpec::points`] order regardless of scheduling.
pub fn run_sweep<T: Real>(base: &ScenarioConfig, spec: &SweepSpec) -> Result<Vec<SweepRow<T>>> {
    let configs: Vec<(Option<u32>, ScenarioConfig)> = spec
        .points()
        .into_iter()
        .map(|(v, n)| {
            let mut cfg = base.clone();
            cfg.stations = n;
            if let (Some(axis), Some(v)) = (spec.axis, v) {
                axis.apply(&mut cfg, v);
            }
            (v, cfg)
        })
        .collect();
    for (_, cfg) in &configs {
        cfg.validate()?;
    }
    configs
        .par_iter()
        .map(|(v, cfg)| {
            let r = run_scenario::<T>(cfg)?;
            Ok(SweepRow {
                stations: cfg.stations,
                axis_value: *v,
                metrics: r.metrics,
                per_flow: r.per_flow,
                collision_probability: r.collision_probability(),
            })
        })
        .collect()
}
