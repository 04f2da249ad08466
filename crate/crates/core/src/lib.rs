//! Discrete-event simulator of 802.11 DCF in a single-hop star WLAN,
//! plus a saturation-throughput fixed-point model to check it against.
//!
//! The numeric layers (metrics, fixed-point model) are generic over
//! [`num::Real`]; simulated time is always integer nanoseconds. The
//! aliases below fix the scalar to `f64`.

pub mod bianchi;
pub mod error;
pub mod kernel;
pub mod mac;
pub mod medium;
pub mod network;
pub mod num;
pub mod phy;
pub mod runner;
pub mod stats;
pub mod traffic;

pub use error::{Error, Result};
pub use kernel::{RandomStream, Scheduler, SimTime};
pub use mac::{AccessMode, MacParams};
pub use network::{Network, NetworkConfig, RunOutcome};
pub use phy::{FrameSizes, Phy, PhyParams};
pub use runner::{Axis, ScenarioConfig, ScenarioPreset, SweepSpec};
pub use traffic::{OnOffConfig, TrafficMode};

pub type Metrics = stats::MetricsReport<f64>;
pub type PerFlow = stats::PerFlowReading<f64>;
pub type Oracle = bianchi::BianchiParams<f64>;
pub type OracleRow = bianchi::OracleRow<f64>;
pub type ScenarioReport = runner::ScenarioResult<f64>;
pub type SweepRow = runner::SweepRow<f64>;
