use thiserror::Error;

use crate::kernel::SimTime;
use crate::mac::NodeId;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum KernelError {
    #[error("event at {at} scheduled in the past (now {now})")]
    EventInPast { now: SimTime, at: SimTime },
    #[error("event time went backwards: {next} after {last}")]
    TimeWentBackwards { last: SimTime, next: SimTime },
    #[error("run_until called while the scheduler is already running")]
    Reentrant,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PhyError {
    #[error("unsupported OFDM rate {0} b/s")]
    UnsupportedRate(u64),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MediumError {
    #[error("{0} started a transmission while already transmitting")]
    ConcurrentTransmission(NodeId),
    #[error("transmission {0} is not on the medium")]
    UnknownTransmission(u64),
    #[error("transmission {id} finished at {now}, expected {end}")]
    EndMismatch { id: u64, now: SimTime, end: SimTime },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StatsError {
    #[error("received packet for unregistered flow from {0}")]
    UnknownFlow(NodeId),
}

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("invalid model parameters: {0}")]
    InvalidParams(String),
    #[error("fixed point did not converge (residual {residual:e})")]
    NonConvergence { residual: f64 },
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error("cannot parse config file {path}: {msg}")]
    Parse { path: String, msg: String },
}

/// Top-level error for running scenarios and sweeps.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Phy(#[from] PhyError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error(transparent)]
    Medium(#[from] MediumError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
