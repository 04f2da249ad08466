//! Application traffic: constant-rate on/off sources, a saturating source,
//! and the tail-drop MAC queue they feed.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::kernel::SimTime;
use crate::mac::Frame;

pub const DEFAULT_QUEUE_CAPACITY: usize = 500;

/// FIFO transmit queue with tail drop.
#[derive(Debug, Clone)]
pub struct TxQueue {
    frames: VecDeque<Frame>,
    capacity: usize,
}

impl TxQueue {
    pub fn new(capacity: usize) -> Self {
        TxQueue {
            frames: VecDeque::with_capacity(capacity.min(1024)),
            capacity,
        }
    }

    /// Appends `frame` unless the queue is full. A rejected frame is lost.
    pub fn enqueue(&mut self, frame: Frame) -> bool {
        if self.frames.len() >= self.capacity {
            return false;
        }
        self.frames.push_back(frame);
        true
    }

    pub fn dequeue(&mut self) -> Option<Frame> {
        self.frames.pop_front()
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }
}

/// Constant-bit-rate source that alternates fixed ON and OFF periods.
/// During ON, packets leave every `payload_bytes * 8 / data_rate` seconds,
/// the first one a full interval after the period starts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OnOffConfig {
    pub on_duration: SimTime,
    pub off_duration: SimTime,
    /// bits/s while ON
    pub data_rate: u64,
    pub payload_bytes: u32,
    pub start_time: SimTime,
    pub stop_time: SimTime,
}

impl Default for OnOffConfig {
    fn default() -> Self {
        OnOffConfig {
            on_duration: SimTime::from_secs(1),
            off_duration: SimTime::from_secs(1),
            data_rate: 500_000,
            payload_bytes: 512,
            start_time: SimTime::from_secs(1),
            stop_time: SimTime::from_secs(31),
        }
    }
}

impl OnOffConfig {
    pub fn interval(&self) -> SimTime {
        SimTime::from_nanos(u64::from(self.payload_bytes) * 8 * 1_000_000_000 / self.data_rate)
    }

    pub fn packets_per_on_period(&self) -> u64 {
        let interval = self.interval().as_nanos();
        if interval == 0 {
            return 0;
        }
        (self.on_duration.as_nanos() - 1) / interval
    }

    /// Long-run mean offered rate in bits/s.
    pub fn mean_rate(&self) -> f64 {
        let on = self.on_duration.as_secs_f64();
        let off = self.off_duration.as_secs_f64();
        self.data_rate as f64 * on / (on + off)
    }

    /// First generation instant strictly after `t`, if any before `stop_time`.
    pub fn next_generation_after(&self, t: SimTime) -> Option<SimTime> {
        let interval = self.interval();
        if interval == SimTime::ZERO || interval >= self.on_duration {
            return None;
        }
        let period = self.on_duration + self.off_duration;
        let (mut k, mut j) = match t.checked_sub(self.start_time) {
            None => (0, 1),
            Some(rel) => {
                let k = rel.as_nanos() / period.as_nanos();
                let within = SimTime::from_nanos(rel.as_nanos() % period.as_nanos());
                (k, within.whole_units(interval) + 1)
            }
        };
        if interval * j >= self.on_duration {
            k += 1;
            j = 1;
        }
        let at = self.start_time + period * k + interval * j;
        (at < self.stop_time).then_some(at)
    }
}

/// How stations generate packets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TrafficMode {
    OnOff(OnOffConfig),
    /// Every queue is topped up whenever the MAC takes its head, between
    /// `start_time` and `stop_time`.
    Saturated {
        payload_bytes: u32,
        start_time: SimTime,
        stop_time: SimTime,
    },
}

impl TrafficMode {
    pub fn payload_bytes(&self) -> u32 {
        match self {
            TrafficMode::OnOff(c) => c.payload_bytes,
            TrafficMode::Saturated { payload_bytes, .. } => *payload_bytes,
        }
    }

    pub fn start_time(&self) -> SimTime {
        match self {
            TrafficMode::OnOff(c) => c.start_time,
            TrafficMode::Saturated { start_time, .. } => *start_time,
        }
    }

    pub fn stop_time(&self) -> SimTime {
        match self {
            TrafficMode::OnOff(c) => c.stop_time,
            TrafficMode::Saturated { stop_time, .. } => *stop_time,
        }
    }

    pub fn is_saturated(&self) -> bool {
        matches!(self, TrafficMode::Saturated { .. })
    }
}
