//! DCF medium access: frame model, contention-window rules and the
//! per-station and access-point state machines.

mod ap;
mod station;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use ap::{AccessPoint, ApAction};
pub use station::{MacCounters, MacEnv, MacPhase, MacReport, Station, StationTimer, TraceRecord};

use crate::error::ConfigError;
use crate::kernel::{RandomStream, SimTime};
use crate::phy::Phy;
use crate::stats::FlowKey;

/// Node address. The access point is always node 0, stations are `1..=n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NodeId(pub u16);

impl NodeId {
    pub const AP: NodeId = NodeId(0);

    pub fn station(index: usize) -> NodeId {
        NodeId(u16::try_from(index + 1).expect("station index fits in u16"))
    }

    /// Zero-based station index, or `None` for the access point.
    pub fn station_index(self) -> Option<usize> {
        (self.0 as usize).checked_sub(1)
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.station_index() {
            None => write!(f, "ap"),
            Some(i) => write!(f, "sta{i}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FrameKind {
    Data,
    Ack,
    Rts,
    Cts,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    pub kind: FrameKind,
    pub src: NodeId,
    pub dst: NodeId,
    /// Application payload; zero for control frames.
    pub payload_bytes: u32,
    /// NAV reservation covering the rest of the exchange after this frame.
    pub duration_field: SimTime,
    pub seq: u64,
    pub flow: FlowKey,
    pub gen_time: SimTime,
}

impl Frame {
    /// A fresh application packet as handed to the MAC queue.
    pub fn data(flow: FlowKey, seq: u64, payload_bytes: u32, gen_time: SimTime) -> Frame {
        Frame {
            kind: FrameKind::Data,
            src: flow.src,
            dst: flow.dst,
            payload_bytes,
            duration_field: SimTime::ZERO,
            seq,
            flow,
            gen_time,
        }
    }

    fn control(kind: FrameKind, of: &Frame, src: NodeId, dst: NodeId, duration: SimTime) -> Frame {
        Frame {
            kind,
            src,
            dst,
            payload_bytes: 0,
            duration_field: duration,
            seq: of.seq,
            flow: of.flow,
            gen_time: of.gen_time,
        }
    }

    pub fn is_control(&self) -> bool {
        self.kind != FrameKind::Data
    }

    /// On-air MPDU size.
    pub fn mpdu_bytes(&self, phy: &Phy) -> u32 {
        let sizes = phy.sizes();
        match self.kind {
            FrameKind::Data => sizes.data_mpdu_bytes(self.payload_bytes),
            FrameKind::Ack => sizes.ack_bytes,
            FrameKind::Rts => sizes.rts_bytes,
            FrameKind::Cts => sizes.cts_bytes,
        }
    }

    pub fn airtime(&self, phy: &Phy) -> SimTime {
        match self.kind {
            FrameKind::Data => phy.data_airtime(self.payload_bytes),
            FrameKind::Ack => phy.ack_airtime(),
            FrameKind::Rts => phy.rts_airtime(),
            FrameKind::Cts => phy.cts_airtime(),
        }
    }
}

/// Builds the RTS that protects `data`, reserving CTS + DATA + ACK.
pub fn rts_for(data: &Frame, phy: &Phy) -> Frame {
    let duration = phy.cts_airtime() + data.airtime(phy) + phy.ack_airtime() + phy.sifs() * 3;
    Frame::control(FrameKind::Rts, data, data.src, data.dst, duration)
}

pub fn cts_for(rts: &Frame, phy: &Phy) -> Frame {
    let duration = rts
        .duration_field
        .saturating_sub(phy.sifs() + phy.cts_airtime());
    Frame::control(FrameKind::Cts, rts, rts.dst, rts.src, duration)
}

pub fn ack_for(data: &Frame) -> Frame {
    Frame::control(FrameKind::Ack, data, data.dst, data.src, SimTime::ZERO)
}

/// Stamps the NAV reservation for the trailing SIFS + ACK onto a DATA frame.
pub fn with_data_duration(mut data: Frame, phy: &Phy) -> Frame {
    data.duration_field = phy.sifs() + phy.ack_airtime();
    data
}

/// Access mechanism, selected through the RTS threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AccessMode {
    /// Two-way DATA/ACK.
    Basic,
    /// Four-way RTS/CTS/DATA/ACK.
    RtsCts,
}

impl AccessMode {
    pub fn rts_threshold(self) -> u32 {
        match self {
            AccessMode::Basic => 65535,
            AccessMode::RtsCts => 0,
        }
    }
}

/// Contention parameters. `cw_min`/`cw_max` are contention-window values:
/// backoff is drawn uniformly from `[0, cw]` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MacParams {
    pub cw_min: u32,
    pub cw_max: u32,
    /// Maximum retransmissions of one packet before it is dropped.
    pub retry_limit: u32,
    /// RTS/CTS is used for DATA MPDUs strictly larger than this.
    pub rts_threshold: u32,
    /// Defer by EIFS after observing an undecodable frame.
    pub eifs_enabled: bool,
}

impl Default for MacParams {
    fn default() -> Self {
        MacParams {
            cw_min: 15,
            cw_max: 1023,
            retry_limit: 7,
            rts_threshold: 65535,
            eifs_enabled: true,
        }
    }
}

impl MacParams {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.cw_min < 1 {
            return Err(ConfigError::Invalid("cw_min must be at least 1".into()));
        }
        if self.cw_min > self.cw_max {
            return Err(ConfigError::Invalid(format!(
                "cw_min {} exceeds cw_max {}",
                self.cw_min, self.cw_max
            )));
        }
        if self.retry_limit < 1 {
            return Err(ConfigError::Invalid(
                "retry_limit must be at least 1".into(),
            ));
        }
        Ok(())
    }

    pub fn uses_rts(&self, data_mpdu_bytes: u32) -> bool {
        data_mpdu_bytes > self.rts_threshold
    }
}

/// Window after one more failure: `min(2(cw + 1) - 1, cw_max)`.
pub fn next_cw(cw: u32, cw_max: u32) -> u32 {
    (2 * (cw + 1) - 1).min(cw_max)
}

/// Window after `failures` consecutive failures starting from `cw_min`.
pub fn cw_after_failures(cw_min: u32, cw_max: u32, failures: u32) -> u32 {
    (0..failures).fold(cw_min, |cw, _| next_cw(cw, cw_max))
}

pub fn draw_backoff(stream: &mut RandomStream, cw: u32) -> u32 {
    stream.uniform_int(0, u64::from(cw)) as u32
}

/// Response timeouts, measured from the end of the station's own frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TimeoutDurations {
    pub cts_timeout: SimTime,
    pub ack_timeout: SimTime,
}

impl TimeoutDurations {
    pub fn new(phy: &Phy) -> Self {
        TimeoutDurations {
            cts_timeout: phy.sifs() + phy.cts_airtime() + phy.slot(),
            ack_timeout: phy.sifs() + phy.ack_airtime() + phy.slot(),
        }
    }
}

/// A response that starts strictly before `tx_end + timeout` is accepted.
pub fn response_in_time(tx_end: SimTime, timeout: SimTime, response_start: SimTime) -> bool {
    response_start < tx_end + timeout
}
