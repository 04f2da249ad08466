//! One-hop star WLAN: `n` stations sending uplink to an access point over
//! a shared medium. Wires traffic, MAC, medium and flow statistics onto
//! the event kernel and checks run-level invariants at the end.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use log::debug;

use crate::error::{Error, Result};
use crate::kernel::{RandomStream, Scheduler, SimTime};
use crate::mac::{
    AccessPoint, ApAction, Frame, MacCounters, MacEnv, MacParams, MacReport, NodeId, Station,
    StationTimer, TimeoutDurations, TraceRecord,
};
use crate::medium::{Medium, TxId};
use crate::phy::Phy;
use crate::stats::{FlowKey, FlowMonitor, FlowStats};
use crate::traffic::{TrafficMode, TxQueue};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Event {
    /// On/off source of a station emits a packet.
    Generate(usize),
    /// Saturated sources start filling their queues.
    StartSaturated,
    Station(usize, StationTimer),
    TxEnd(TxId),
    /// Access point sends a CTS or ACK.
    ApRespond(Frame),
}

impl From<(usize, StationTimer)> for Event {
    fn from((sta, timer): (usize, StationTimer)) -> Self {
        Event::Station(sta, timer)
    }
}

#[derive(Debug, Clone)]
pub struct NetworkConfig {
    pub stations: usize,
    pub mac: MacParams,
    pub phy: Phy,
    pub traffic: TrafficMode,
    pub queue_capacity: usize,
    pub seed: u64,
    pub trace: bool,
}

/// Everything a finished run leaves behind.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub flows: Vec<(FlowKey, FlowStats)>,
    /// Packets still held by each station's MAC and not yet delivered.
    pub residual: Vec<u64>,
    pub per_station: Vec<MacCounters>,
    pub mac: MacCounters,
    pub events: u64,
    /// Hash over the executed event sequence; equal seeds give equal digests.
    pub digest: u64,
    pub trace: Vec<TraceRecord>,
}

impl RunOutcome {
    pub fn flow_stats(&self) -> Vec<FlowStats> {
        self.flows.iter().map(|(_, s)| s.clone()).collect()
    }

    /// Fraction of channel accesses that were retransmissions.
    pub fn collision_probability(&self) -> f64 {
        if self.mac.attempts == 0 {
            0.0
        } else {
            self.mac.retransmissions as f64 / self.mac.attempts as f64
        }
    }
}

pub struct Network {
    phy: Phy,
    timeouts: TimeoutDurations,
    traffic: TrafficMode,
    medium: Medium,
    stations: Vec<Station>,
    ap: AccessPoint,
    monitor: FlowMonitor,
    flows: Vec<FlowKey>,
    next_seq: Vec<u64>,
    trace_on: bool,
    trace: Vec<TraceRecord>,
    digest: DefaultHasher,
    failure: Option<Error>,
}

impl Network {
    pub fn new(cfg: &NetworkConfig) -> Self {
        let mut monitor = FlowMonitor::new();
        let flows: Vec<FlowKey> = (0..cfg.stations).map(FlowKey::for_station).collect();
        let stations = (0..cfg.stations)
            .map(|i| {
                monitor.register(flows[i]);
                let rng = RandomStream::new(cfg.seed, i as u64 + 1);
                let mut sta = Station::new(i, cfg.mac, rng, TxQueue::new(cfg.queue_capacity));
                sta.set_tracing(cfg.trace);
                sta
            })
            .collect();
        Network {
            phy: cfg.phy,
            timeouts: TimeoutDurations::new(&cfg.phy),
            traffic: cfg.traffic,
            medium: Medium::new(),
            stations,
            ap: AccessPoint::new(cfg.stations),
            monitor,
            flows,
            next_seq: vec![0; cfg.stations],
            trace_on: cfg.trace,
            trace: Vec::new(),
            digest: DefaultHasher::new(),
            failure: None,
        }
    }

    /// Builds the network, runs it until `t_end` and verifies invariants.
    pub fn run(cfg: &NetworkConfig, t_end: SimTime) -> Result<RunOutcome> {
        let mut net = Network::new(cfg);
        let mut sched = Scheduler::new();
        net.seed_events(&mut sched)?;
        let events = sched.run_until(t_end, |s, ev| net.handle(s, ev))?;
        if let Some(e) = net.failure.take() {
            return Err(e);
        }
        net.finish(events)
    }

    fn seed_events(&self, sched: &mut Scheduler<Event>) -> Result<()> {
        match self.traffic {
            TrafficMode::OnOff(c) => {
                if let Some(first) = c.next_generation_after(SimTime::ZERO) {
                    for i in 0..self.stations.len() {
                        sched.schedule_at(first, Event::Generate(i))?;
                    }
                }
            }
            TrafficMode::Saturated { start_time, .. } => {
                sched.schedule_at(start_time, Event::StartSaturated)?;
            }
        }
        Ok(())
    }

    fn env(&self, now: SimTime) -> MacEnv {
        MacEnv {
            now,
            phy: self.phy,
            timeouts: self.timeouts,
            medium_idle: self.medium.is_idle(),
            idle_since: self.medium.idle_since(),
            busy_since: self.medium.busy_since(),
        }
    }

    fn handle(&mut self, sched: &mut Scheduler<Event>, ev: Event) {
        if self.failure.is_some() {
            return;
        }
        let now = sched.now();
        now.hash(&mut self.digest);
        self.fingerprint(&ev);
        if let Err(e) = self.dispatch(sched, ev, now) {
            self.failure = Some(e);
        }
    }

    fn fingerprint(&mut self, ev: &Event) {
        let h = &mut self.digest;
        match ev {
            Event::Generate(i) => (0u8, *i).hash(h),
            Event::StartSaturated => 1u8.hash(h),
            Event::Station(i, t) => (2u8, *i, *t).hash(h),
            Event::TxEnd(id) => (3u8, *id).hash(h),
            Event::ApRespond(f) => (4u8, f.kind, f.dst, f.seq).hash(h),
        }
    }

    fn dispatch(&mut self, sched: &mut Scheduler<Event>, ev: Event, now: SimTime) -> Result<()> {
        match ev {
            Event::Generate(i) => {
                if let TrafficMode::OnOff(c) = self.traffic {
                    self.emit(i, now, sched)?;
                    if let Some(next) = c.next_generation_after(now) {
                        sched.schedule_at(next, Event::Generate(i))?;
                    }
                }
                Ok(())
            }
            Event::StartSaturated => {
                for i in 0..self.stations.len() {
                    self.refill(i, now, sched)?;
                }
                Ok(())
            }
            Event::Station(i, StationTimer::AccessExpiry) => {
                let env = self.env(now);
                let report = self.stations[i].on_access_expiry(&env);
                self.apply(i, report, now, sched)
            }
            Event::Station(i, StationTimer::ResponseTimeout) => {
                let env = self.env(now);
                let report = self.stations[i].on_timeout(&env, sched);
                self.apply(i, report, now, sched)
            }
            Event::Station(i, StationTimer::SendData) => {
                match self.stations[i].on_send_data(&self.phy, now) {
                    Some(data) => self.transmit(NodeId::station(i), data, now, sched),
                    None => Ok(()),
                }
            }
            Event::TxEnd(id) => self.tx_end(id, now, sched),
            Event::ApRespond(frame) => self.transmit(NodeId::AP, frame, now, sched),
        }
    }

    /// Application hands one packet to station `i`.
    fn emit(&mut self, i: usize, now: SimTime, sched: &mut Scheduler<Event>) -> Result<()> {
        let flow = self.flows[i];
        self.next_seq[i] += 1;
        let payload = self.traffic.payload_bytes();
        let frame = Frame::data(flow, self.next_seq[i], payload, now);
        self.monitor
            .record_tx(&flow, self.phy.sizes().ip_bytes(payload), now)?;
        if !self.stations[i].queue_mut().enqueue(frame) {
            self.monitor.record_lost(&flow)?;
            return Ok(());
        }
        let env = self.env(now);
        let report = self.stations[i].on_enqueue(&env, sched);
        self.apply(i, report, now, sched)
    }

    /// Saturated sources keep one packet waiting behind the one in service.
    fn refill(&mut self, i: usize, now: SimTime, sched: &mut Scheduler<Event>) -> Result<()> {
        let TrafficMode::Saturated {
            start_time,
            stop_time,
            ..
        } = self.traffic
        else {
            return Ok(());
        };
        if now < start_time || now >= stop_time {
            return Ok(());
        }
        while self.stations[i].queue().is_empty() {
            self.emit(i, now, sched)?;
        }
        Ok(())
    }

    fn apply(
        &mut self,
        i: usize,
        report: Option<MacReport>,
        now: SimTime,
        sched: &mut Scheduler<Event>,
    ) -> Result<()> {
        match report {
            Some(MacReport::Transmit(frame)) => {
                self.transmit(NodeId::station(i), frame, now, sched)?
            }
            Some(MacReport::Dropped(frame)) => self.monitor.record_lost(&frame.flow)?,
            Some(MacReport::Succeeded(_)) | None => {}
        }
        if self.trace_on {
            self.stations[i].drain_trace(&mut self.trace);
        }
        self.refill(i, now, sched)
    }

    fn transmit(
        &mut self,
        sender: NodeId,
        frame: Frame,
        now: SimTime,
        sched: &mut Scheduler<Event>,
    ) -> Result<()> {
        let airtime = frame.airtime(&self.phy);
        let started = self
            .medium
            .begin_transmission(sender, frame, now, airtime)?;
        sched.schedule_at(started.end, Event::TxEnd(started.id))?;
        if started.busy_start {
            let env = self.env(now);
            for sta in &mut self.stations {
                sta.on_medium_busy(&env, sched);
            }
        }
        Ok(())
    }

    fn tx_end(&mut self, id: TxId, now: SimTime, sched: &mut Scheduler<Event>) -> Result<()> {
        let delivery = self.medium.finish_transmission(id, now)?;
        let env = self.env(now);
        let tx = &delivery.tx;
        match tx.sender.station_index() {
            Some(i) => self.stations[i].on_own_tx_end(&env, sched),
            None => self.ap.on_response_sent(),
        }
        for i in 0..self.stations.len() {
            if !delivery.is_observer(NodeId::station(i)) {
                continue;
            }
            let report =
                self.stations[i].on_frame(&tx.frame, delivery.decoded, tx.start, &env, sched);
            self.apply(i, report, now, sched)?;
        }
        if delivery.is_observer(NodeId::AP) {
            match self.ap.on_frame(&tx.frame, delivery.decoded, &self.phy) {
                Some(ApAction::Respond(cts)) => {
                    sched.schedule(self.phy.sifs(), Event::ApRespond(cts));
                }
                Some(ApAction::DeliverAndAck { ack, duplicate }) => {
                    if !duplicate {
                        let f = &tx.frame;
                        let bytes = self.phy.sizes().ip_bytes(f.payload_bytes);
                        self.monitor.record_rx(&f.flow, bytes, f.gen_time, now)?;
                    } else {
                        debug!(
                            "{now}: duplicate from {} seq {}",
                            tx.frame.src, tx.frame.seq
                        );
                    }
                    sched.schedule(self.phy.sifs(), Event::ApRespond(ack));
                }
                None => {}
            }
        }
        if delivery.now_idle {
            let env = self.env(now);
            for sta in &mut self.stations {
                sta.on_medium_idle(&env, sched);
            }
        }
        Ok(())
    }

    fn residual(&self, i: usize) -> u64 {
        let sta = &self.stations[i];
        let delivered = self.ap.last_delivered(i);
        let in_service = sta
            .in_service()
            .is_some_and(|f| delivered.is_none_or(|d| f.seq > d));
        sta.queue().len() as u64 + u64::from(in_service)
    }

    fn finish(mut self, events: u64) -> Result<RunOutcome> {
        let residual: Vec<u64> = (0..self.stations.len()).map(|i| self.residual(i)).collect();
        let flows: Vec<(FlowKey, FlowStats)> =
            self.monitor.flows().map(|(k, s)| (*k, s.clone())).collect();
        for ((key, s), r) in flows.iter().zip(&residual) {
            if s.tx_packets != s.rx_packets + s.lost_packets + r {
                return Err(Error::Invariant(format!(
                    "flow {key}: tx {} != rx {} + lost {} + queued {r}",
                    s.tx_packets, s.rx_packets, s.lost_packets
                )));
            }
        }
        let (begun, finished) = self.medium.conservation();
        if begun != finished + self.medium.active().len() as u64 {
            return Err(Error::Invariant(format!(
                "medium started {begun} frames but accounted for {finished} + {}",
                self.medium.active().len()
            )));
        }
        let per_station: Vec<MacCounters> = self.stations.iter().map(|s| *s.counters()).collect();
        let mut mac = MacCounters::default();
        for c in &per_station {
            mac.merge(c);
        }
        if mac.nav_violations > 0 {
            return Err(Error::Invariant(format!(
                "{} transmissions started inside a NAV reservation",
                mac.nav_violations
            )));
        }
        if self.trace_on {
            for sta in &mut self.stations {
                sta.drain_trace(&mut self.trace);
            }
        }
        Ok(RunOutcome {
            flows,
            residual,
            per_station,
            mac,
            events,
            digest: self.digest.finish(),
            trace: self.trace,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phy::{FrameSizes, PhyParams};
    use crate::traffic::OnOffConfig;

    fn config(stations: usize, traffic: TrafficMode) -> NetworkConfig {
        NetworkConfig {
            stations,
            mac: MacParams::default(),
            phy: Phy::new(PhyParams::default(), FrameSizes::default()).unwrap(),
            traffic,
            queue_capacity: 500,
            seed: 1,
            trace: false,
        }
    }

    fn saturated(stop_s: u64) -> TrafficMode {
        TrafficMode::Saturated {
            payload_bytes: 512,
            start_time: SimTime::from_secs(1),
            stop_time: SimTime::from_secs(stop_s),
        }
    }

    #[test]
    fn lone_onoff_station_delivers_everything() {
        let traffic = TrafficMode::OnOff(OnOffConfig {
            stop_time: SimTime::from_secs(5),
            ..OnOffConfig::default()
        });
        let out = Network::run(&config(1, traffic), SimTime::from_secs(5)).unwrap();
        let s = &out.flows[0].1;
        // ON during [1,2) and [3,4)
        assert_eq!(s.tx_packets, 2 * 122);
        assert_eq!(s.rx_packets, s.tx_packets);
        assert_eq!(out.mac.retransmissions, 0);
        // every packet needs at least its own DATA airtime
        let min_delay = SimTime::from_micros(408);
        assert!(s.delay_sum >= min_delay * s.rx_packets);
    }

    #[test]
    fn lone_saturated_station_matches_cycle_time() {
        let out = Network::run(&config(1, saturated(3)), SimTime::from_secs(3)).unwrap();
        let rx = out.flows[0].1.rx_packets as f64;
        // cycle: DIFS + mean 7.5 slots + DATA + SIFS + ACK = 557.5 us
        let expected = 2.0 / 557.5e-6;
        assert!(
            (rx - expected).abs() / expected < 0.02,
            "{rx} vs {expected}"
        );
    }

    #[test]
    fn same_seed_same_digest() {
        let a = Network::run(&config(5, saturated(2)), SimTime::from_secs(2)).unwrap();
        let b = Network::run(&config(5, saturated(2)), SimTime::from_secs(2)).unwrap();
        assert_eq!(a.digest, b.digest);
        assert_eq!(a.flows, b.flows);
        let mut cfg = config(5, saturated(2));
        cfg.seed = 2;
        let c = Network::run(&cfg, SimTime::from_secs(2)).unwrap();
        assert_ne!(a.digest, c.digest);
    }

    #[test]
    fn contention_produces_retransmissions() {
        let out = Network::run(&config(10, saturated(2)), SimTime::from_secs(2)).unwrap();
        assert!(out.mac.retransmissions > 0);
        let p = out.collision_probability();
        assert!(p > 0.05 && p < 0.5, "{p}");
    }

    #[test]
    fn rts_mode_runs_clean() {
        let mut cfg = config(8, saturated(2));
        cfg.mac.rts_threshold = 0;
        let out = Network::run(&cfg, SimTime::from_secs(2)).unwrap();
        assert!(out.flows.iter().all(|(_, s)| s.rx_packets > 0));
        assert_eq!(out.mac.nav_violations, 0);
    }

    #[test]
    fn trace_records_when_enabled() {
        let mut cfg = config(2, saturated(2));
        cfg.trace = true;
        let out = Network::run(&cfg, SimTime::from_millis(1100)).unwrap();
        assert!(out.trace.iter().any(|r| r.event == "tx-success"));
    }
}
