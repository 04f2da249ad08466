use super::{ack_for, cts_for, Frame, FrameKind, MacPhase, NodeId};
use crate::phy::Phy;

/// What the access point does with a frame it has just decoded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ApAction {
    /// Send this response a SIFS from now.
    Respond(Frame),
    /// Hand DATA to the sink and acknowledge it a SIFS from now.
    /// `duplicate` is set for a retransmission of an already-delivered packet.
    DeliverAndAck { ack: Frame, duplicate: bool },
}

/// Uplink-only access point: it never contends, it only answers RTS with
/// CTS and DATA with ACK.
#[derive(Debug)]
pub struct AccessPoint {
    phase: MacPhase,
    /// Highest sequence number delivered per station.
    last_seq: Vec<Option<u64>>,
}

impl AccessPoint {
    pub fn new(stations: usize) -> Self {
        AccessPoint {
            phase: MacPhase::Idle,
            last_seq: vec![None; stations],
        }
    }

    pub fn id(&self) -> NodeId {
        NodeId::AP
    }

    pub fn phase(&self) -> MacPhase {
        self.phase
    }

    /// Frames for other nodes, and corrupted frames, are ignored: the AP
    /// never contends so NAV and EIFS do not affect it.
    pub fn on_frame(&mut self, frame: &Frame, decoded: bool, phy: &Phy) -> Option<ApAction> {
        if !decoded || frame.dst != NodeId::AP {
            return None;
        }
        let action = match frame.kind {
            FrameKind::Rts => ApAction::Respond(cts_for(frame, phy)),
            FrameKind::Data => {
                let idx = frame.src.station_index()?;
                let slot = self.last_seq.get_mut(idx)?;
                let duplicate = slot.is_some_and(|s| frame.seq <= s);
                if !duplicate {
                    *slot = Some(frame.seq);
                }
                ApAction::DeliverAndAck {
                    ack: ack_for(frame),
                    duplicate,
                }
            }
            FrameKind::Ack | FrameKind::Cts => return None,
        };
        self.phase = MacPhase::Responding;
        Some(action)
    }

    /// Highest sequence number handed to the sink for `station`.
    pub fn last_delivered(&self, station: usize) -> Option<u64> {
        self.last_seq.get(station).copied().flatten()
    }

    pub fn on_response_sent(&mut self) {
        self.phase = MacPhase::Idle;
    }
}
