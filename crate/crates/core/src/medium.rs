//! Single collision domain with zero propagation delay.
//!
//! Every node hears every transmission. A frame is decodable only if no
//! other transmission overlapped it for any length of time; there is no
//! capture and no bit-error model, so collisions are the only loss.

use crate::error::MediumError;
use crate::kernel::SimTime;
use crate::mac::{Frame, NodeId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TxId(u64);

#[derive(Debug, Clone)]
pub struct Transmission {
    pub id: TxId,
    pub sender: NodeId,
    pub frame: Frame,
    pub start: SimTime,
    pub end: SimTime,
    overlapped: bool,
    /// Senders of transmissions that overlapped this one.
    partners: Vec<NodeId>,
}

/// Outcome of a transmission leaving the medium.
#[derive(Debug, Clone)]
pub struct Delivery {
    pub tx: Transmission,
    /// Intact at every receiver.
    pub decoded: bool,
    /// Medium has no transmissions left.
    pub now_idle: bool,
}

impl Delivery {
    /// Nodes that can receive this frame: everyone not transmitting at any
    /// point during it.
    pub fn is_observer(&self, node: NodeId) -> bool {
        node != self.tx.sender && !self.tx.partners.contains(&node)
    }
}

/// Result of starting a transmission.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Started {
    pub id: TxId,
    pub end: SimTime,
    /// The medium was idle until now; listeners must be told it went busy.
    pub busy_start: bool,
}

#[derive(Debug, Clone)]
pub struct Medium {
    active: Vec<Transmission>,
    next_id: u64,
    idle_since: SimTime,
    busy_since: Option<SimTime>,
    begun: u64,
    finished: u64,
}

impl Default for Medium {
    fn default() -> Self {
        Self::new()
    }
}

impl Medium {
    pub fn new() -> Self {
        Medium {
            active: Vec::new(),
            next_id: 0,
            idle_since: SimTime::ZERO,
            busy_since: None,
            begun: 0,
            finished: 0,
        }
    }

    pub fn is_idle(&self) -> bool {
        self.active.is_empty()
    }

    pub fn idle_since(&self) -> SimTime {
        self.idle_since
    }

    pub fn busy_since(&self) -> Option<SimTime> {
        self.busy_since
    }

    /// Idle time accumulated up to `now`; zero while busy.
    pub fn idle_duration(&self, now: SimTime) -> SimTime {
        if self.is_idle() {
            now.saturating_sub(self.idle_since)
        } else {
            SimTime::ZERO
        }
    }

    /// Transmissions started and finished so far.
    pub fn conservation(&self) -> (u64, u64) {
        (self.begun, self.finished)
    }

    pub fn active(&self) -> &[Transmission] {
        &self.active
    }

    pub fn begin_transmission(
        &mut self,
        sender: NodeId,
        frame: Frame,
        now: SimTime,
        airtime: SimTime,
    ) -> Result<Started, MediumError> {
        if self.active.iter().any(|t| t.sender == sender) {
            return Err(MediumError::ConcurrentTransmission(sender));
        }
        let busy_start = self.active.is_empty();
        if busy_start {
            self.busy_since = Some(now);
        }
        let mut partners = Vec::new();
        for other in &mut self.active {
            other.overlapped = true;
            other.partners.push(sender);
            partners.push(other.sender);
        }
        let id = TxId(self.next_id);
        self.next_id += 1;
        self.begun += 1;
        let end = now + airtime;
        self.active.push(Transmission {
            id,
            sender,
            frame,
            start: now,
            end,
            overlapped: !partners.is_empty(),
            partners,
        });
        Ok(Started {
            id,
            end,
            busy_start,
        })
    }

    pub fn finish_transmission(&mut self, id: TxId, now: SimTime) -> Result<Delivery, MediumError> {
        let pos = self
            .active
            .iter()
            .position(|t| t.id == id)
            .ok_or(MediumError::UnknownTransmission(id.0))?;
        if self.active[pos].end != now {
            return Err(MediumError::EndMismatch {
                id: id.0,
                now,
                end: self.active[pos].end,
            });
        }
        let tx = self.active.swap_remove(pos);
        // keep FIFO order among the remaining ones
        self.active.sort_by_key(|t| t.id);
        self.finished += 1;
        let now_idle = self.active.is_empty();
        if now_idle {
            self.idle_since = now;
            self.busy_since = None;
        }
        Ok(Delivery {
            decoded: !tx.overlapped,
            tx,
            now_idle,
        })
    }
}
