//! Per-flow counters probed at the IP level and the four aggregate
//! metrics: delivery ratio, loss ratio, aggregated throughput and mean
//! end-to-end delay.

use std::fmt;

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::StatsError;
use crate::kernel::SimTime;
use crate::mac::NodeId;
use crate::num::Real;

pub const UDP_PROTOCOL: u8 = 17;
pub const SINK_BASE_PORT: u16 = 9;
const SOURCE_BASE_PORT: u16 = 49153;

/// Five-tuple identifying one uplink flow. Station `i` sends to sink port
/// `9 + i` on the access point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FlowKey {
    pub protocol: u8,
    pub src: NodeId,
    pub dst: NodeId,
    pub src_port: u16,
    pub dst_port: u16,
}

impl FlowKey {
    pub fn for_station(index: usize) -> FlowKey {
        let offset = u16::try_from(index).expect("station index fits in u16");
        FlowKey {
            protocol: UDP_PROTOCOL,
            src: NodeId::station(index),
            dst: NodeId::AP,
            src_port: SOURCE_BASE_PORT + offset,
            dst_port: SINK_BASE_PORT + offset,
        }
    }
}

impl fmt::Display for FlowKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{} -> {}:{} proto {}",
            self.src, self.src_port, self.dst, self.dst_port, self.protocol
        )
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct FlowStats {
    pub tx_packets: u64,
    pub rx_packets: u64,
    pub lost_packets: u64,
    pub tx_bytes: u64,
    pub rx_bytes: u64,
    pub delay_sum: SimTime,
    pub time_first_tx: Option<SimTime>,
    pub time_last_tx: Option<SimTime>,
    pub time_first_rx: Option<SimTime>,
    pub time_last_rx: Option<SimTime>,
}

impl FlowStats {
    /// Packets neither delivered nor lost; they must still be in the MAC.
    pub fn unaccounted(&self) -> u64 {
        self.tx_packets - self.rx_packets - self.lost_packets
    }
}

/// Flow-monitor analogue: one [`FlowStats`] per registered flow.
#[derive(Debug, Clone, Default)]
pub struct FlowMonitor {
    keys: Vec<FlowKey>,
    stats: Vec<FlowStats>,
}

impl FlowMonitor {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(&mut self, key: FlowKey) {
        if !self.keys.contains(&key) {
            self.keys.push(key);
            self.stats.push(FlowStats::default());
        }
    }

    fn slot(&mut self, key: &FlowKey) -> Result<&mut FlowStats, StatsError> {
        let i = self
            .keys
            .iter()
            .position(|k| k == key)
            .ok_or(StatsError::UnknownFlow(key.src))?;
        Ok(&mut self.stats[i])
    }

    pub fn record_tx(&mut self, key: &FlowKey, bytes: u32, t: SimTime) -> Result<(), StatsError> {
        let s = self.slot(key)?;
        s.tx_packets += 1;
        s.tx_bytes += u64::from(bytes);
        s.time_first_tx.get_or_insert(t);
        s.time_last_tx = Some(t);
        Ok(())
    }

    pub fn record_rx(
        &mut self,
        key: &FlowKey,
        bytes: u32,
        gen_time: SimTime,
        t: SimTime,
    ) -> Result<(), StatsError> {
        let s = self.slot(key)?;
        s.rx_packets += 1;
        s.rx_bytes += u64::from(bytes);
        s.delay_sum += t - gen_time;
        s.time_first_rx.get_or_insert(t);
        s.time_last_rx = Some(t);
        Ok(())
    }

    pub fn record_lost(&mut self, key: &FlowKey) -> Result<(), StatsError> {
        self.slot(key)?.lost_packets += 1;
        Ok(())
    }

    pub fn get(&self, key: &FlowKey) -> Option<&FlowStats> {
        self.keys
            .iter()
            .position(|k| k == key)
            .map(|i| &self.stats[i])
    }

    pub fn flows(&self) -> impl Iterator<Item = (&FlowKey, &FlowStats)> {
        self.keys.iter().zip(&self.stats)
    }

    pub fn stats(&self) -> &[FlowStats] {
        &self.stats
    }

    pub fn into_stats(self) -> Vec<FlowStats> {
        self.stats
    }
}

/// Aggregate metrics, computed as totals over totals across all flows.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct MetricsReport<T> {
    pub pdr: T,
    pub plr: T,
    pub agg_throughput_mbps: T,
    pub avg_delay_s: T,
}

impl<T: Real> MetricsReport<T> {
    pub fn mean(reports: &[MetricsReport<T>]) -> MetricsReport<T> {
        if reports.is_empty() {
            return MetricsReport::default();
        }
        let n = T::from_count(reports.len() as u64);
        MetricsReport {
            pdr: reports.iter().map(|r| r.pdr).sum::<T>() / n,
            plr: reports.iter().map(|r| r.plr).sum::<T>() / n,
            agg_throughput_mbps: reports.iter().map(|r| r.agg_throughput_mbps).sum::<T>() / n,
            avg_delay_s: reports.iter().map(|r| r.avg_delay_s).sum::<T>() / n,
        }
    }

    pub fn as_array(&self) -> [T; 4] {
        [
            self.pdr,
            self.plr,
            self.agg_throughput_mbps,
            self.avg_delay_s,
        ]
    }
}

/// Alternate reading that sums per-flow ratios instead of dividing totals.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct PerFlowReading<T> {
    pub pdr_sum: T,
    pub plr_sum: T,
    pub delay_sum_s: T,
}

pub fn compute_metrics<T: Real>(flows: &[FlowStats], simulation_time: SimTime) -> MetricsReport<T> {
    let tx: u64 = flows.iter().map(|f| f.tx_packets).sum();
    if tx == 0 {
        warn!("no packets transmitted; reporting zero metrics");
        return MetricsReport::default();
    }
    let rx: u64 = flows.iter().map(|f| f.rx_packets).sum();
    let lost: u64 = flows.iter().map(|f| f.lost_packets).sum();
    let secs = T::lit(simulation_time.as_secs_f64());
    let mega = T::lit(1e6);
    let agg_throughput_mbps = flows
        .iter()
        .map(|f| T::from_count(f.rx_bytes) * T::lit(8.0) / secs / mega)
        .sum();
    let delay: T = flows
        .iter()
        .map(|f| T::lit(f.delay_sum.as_secs_f64()))
        .sum();
    let avg_delay_s = if rx == 0 {
        T::zero()
    } else {
        delay / T::from_count(rx)
    };
    MetricsReport {
        pdr: T::from_count(rx) / T::from_count(tx),
        plr: T::from_count(lost) / T::from_count(tx),
        agg_throughput_mbps,
        avg_delay_s,
    }
}

pub fn per_flow_reading<T: Real>(flows: &[FlowStats]) -> PerFlowReading<T> {
    let ratio = |num: T, den: u64| {
        if den == 0 {
            T::zero()
        } else {
            num / T::from_count(den)
        }
    };
    PerFlowReading {
        pdr_sum: flows
            .iter()
            .map(|f| ratio(T::from_count(f.rx_packets), f.tx_packets))
            .sum(),
        plr_sum: flows
            .iter()
            .map(|f| ratio(T::from_count(f.lost_packets), f.tx_packets))
            .sum(),
        delay_sum_s: flows
            .iter()
            .map(|f| ratio(T::lit(f.delay_sum.as_secs_f64()), f.rx_packets))
            .sum(),
    }
}
