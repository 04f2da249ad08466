use std::fmt;

use super::{
    draw_backoff, next_cw, response_in_time, rts_for, with_data_duration, Frame, FrameKind,
    MacParams, NodeId, TimeoutDurations,
};
use crate::kernel::{EventHandle, RandomStream, Scheduler, SimTime};
use crate::phy::Phy;
use crate::traffic::TxQueue;

/// Timers a station arms on the kernel. The embedding simulation maps
/// `(station index, timer)` into its own event type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StationTimer {
    /// Backoff counter reached zero.
    AccessExpiry,
    /// CTS or ACK did not arrive in time.
    ResponseTimeout,
    /// SIFS after a CTS has elapsed; send the protected DATA frame.
    SendData,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MacPhase {
    /// Nothing queued and no backoff outstanding.
    Idle,
    /// Has a packet or post-backoff outstanding, waiting for the medium.
    Defer,
    /// Counting down backoff slots on an idle medium.
    Backoff,
    TxRts,
    WaitCts,
    TxData,
    WaitAck,
    /// Access point sending a SIFS response.
    Responding,
}

/// Snapshot of the shared state a station needs when reacting to an event.
#[derive(Debug, Clone, Copy)]
pub struct MacEnv {
    pub now: SimTime,
    pub phy: Phy,
    pub timeouts: TimeoutDurations,
    pub medium_idle: bool,
    /// Time the medium last became idle (meaningful only when idle).
    pub idle_since: SimTime,
    /// Start of the current busy period, if busy.
    pub busy_since: Option<SimTime>,
}

impl MacEnv {
    /// Idle, or went busy at this very instant: carrier sense cannot yet
    /// have detected a transmission that starts in the same tick.
    fn senses_idle(&self) -> bool {
        self.medium_idle || self.busy_since == Some(self.now)
    }
}

/// Access attempts and their outcomes, for collision-probability estimates.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MacCounters {
    /// Channel accesses (initial RTS or DATA transmissions).
    pub attempts: u64,
    /// Accesses made for a packet that had already failed at least once.
    pub retransmissions: u64,
    pub failures: u64,
    pub successes: u64,
    pub drops: u64,
    /// Transmissions begun while the NAV was still set (must stay zero).
    pub nav_violations: u64,
}

impl MacCounters {
    pub fn merge(&mut self, other: &MacCounters) {
        self.attempts += other.attempts;
        self.retransmissions += other.retransmissions;
        self.failures += other.failures;
        self.successes += other.successes;
        self.drops += other.drops;
        self.nav_violations += other.nav_violations;
    }
}

/// Outcome the simulation must act on after a station callback.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MacReport {
    /// Start this frame on the medium now.
    Transmit(Frame),
    /// Packet abandoned after exhausting its retries.
    Dropped(Frame),
    /// ACK received for the packet in service.
    Succeeded(Frame),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceRecord {
    pub time: SimTime,
    pub node: NodeId,
    pub event: &'static str,
    pub cw: u32,
    pub retry: u32,
}

impl fmt::Display for TraceRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} {} cw={} retry={}",
            self.time, self.node, self.event, self.cw, self.retry
        )
    }
}

#[derive(Debug, Clone, Copy)]
struct PendingAccess {
    handle: EventHandle,
    /// First slot boundary counts from here.
    start: SimTime,
    slots: u32,
    expiry: SimTime,
}

/// One DCF station: contention state, the packet in service and its queue.
#[derive(Debug)]
pub struct Station {
    id: NodeId,
    index: usize,
    params: MacParams,
    rng: RandomStream,
    phase: MacPhase,
    cw: u32,
    retry_count: u32,
    /// Drawn backoff slots not yet counted down.
    backoff: Option<u32>,
    access: Option<PendingAccess>,
    nav_until: SimTime,
    rx_corrupt: bool,
    timeout_end: SimTime,
    timeout: Option<EventHandle>,
    tx_end: SimTime,
    queue: TxQueue,
    current: Option<Frame>,
    counters: MacCounters,
    tracing: bool,
    trace: Vec<TraceRecord>,
}

impl Station {
    pub fn new(index: usize, params: MacParams, rng: RandomStream, queue: TxQueue) -> Self {
        Station {
            id: NodeId::station(index),
            index,
            params,
            rng,
            phase: MacPhase::Idle,
            cw: params.cw_min,
            retry_count: 0,
            backoff: None,
            access: None,
            nav_until: SimTime::ZERO,
            rx_corrupt: false,
            timeout_end: SimTime::ZERO,
            timeout: None,
            tx_end: SimTime::ZERO,
            queue,
            current: None,
            counters: MacCounters::default(),
            tracing: false,
            trace: Vec::new(),
        }
    }

    pub fn set_tracing(&mut self, on: bool) {
        self.tracing = on;
    }

    pub fn id(&self) -> NodeId {
        self.id
    }

    pub fn phase(&self) -> MacPhase {
        self.phase
    }

    pub fn cw(&self) -> u32 {
        self.cw
    }

    pub fn retry_count(&self) -> u32 {
        self.retry_count
    }

    pub fn backoff_slots(&self) -> Option<u32> {
        self.backoff
    }

    pub fn nav_until(&self) -> SimTime {
        self.nav_until
    }

    pub fn counters(&self) -> &MacCounters {
        &self.counters
    }

    pub fn queue(&self) -> &TxQueue {
        &self.queue
    }

    pub fn queue_mut(&mut self) -> &mut TxQueue {
        &mut self.queue
    }

    /// True while a post-transmission backoff runs with nothing to send.
    pub fn post_backoff_pending(&self) -> bool {
        self.backoff.is_some() && self.current.is_none()
    }

    pub fn in_service(&self) -> Option<&Frame> {
        self.current.as_ref()
    }

    pub fn drain_trace(&mut self, into: &mut Vec<TraceRecord>) {
        into.append(&mut self.trace);
    }

    fn log(&mut self, now: SimTime, event: &'static str) {
        if self.tracing {
            self.trace.push(TraceRecord {
                time: now,
                node: self.id,
                event,
                cw: self.cw,
                retry: self.retry_count,
            });
        }
    }

    fn contending(&self) -> bool {
        matches!(
            self.phase,
            MacPhase::Idle | MacPhase::Defer | MacPhase::Backoff
        )
    }

    /// Earliest instant the backoff countdown may start: the medium must
    /// have been idle for DIFS (EIFS after a corrupted frame), the NAV must
    /// have expired DIFS ago, and DIFS must have passed since our own
    /// response timeout.
    pub fn access_grant(&self, env: &MacEnv) -> SimTime {
        let difs = env.phy.difs();
        let ifs = if self.rx_corrupt && self.params.eifs_enabled {
            env.phy.eifs()
        } else {
            difs
        };
        (env.idle_since + ifs)
            .max(self.nav_until + difs)
            .max(self.timeout_end + difs)
    }

    fn draw(&mut self, now: SimTime) {
        let slots = draw_backoff(&mut self.rng, self.cw);
        self.backoff = Some(slots);
        self.log(now, "backoff-draw");
    }

    fn fetch_next(&mut self) {
        if self.current.is_none() {
            self.current = self.queue.dequeue();
        }
    }

    /// A packet was accepted into the queue.
    pub fn on_enqueue<E>(&mut self, env: &MacEnv, sched: &mut Scheduler<E>) -> Option<MacReport>
    where
        E: From<(usize, StationTimer)>,
    {
        if !self.contending() {
            return None;
        }
        self.fetch_next();
        if self.phase != MacPhase::Idle {
            // backoff or post-backoff already outstanding
            return None;
        }
        if env.senses_idle() && self.nav_until <= env.now && env.now >= self.access_grant(env) {
            self.log(env.now, "immediate-access");
            return self.start_access(env);
        }
        self.draw(env.now);
        self.contend(env, sched);
        None
    }

    /// Enter or continue contention: schedule the countdown if the medium
    /// is idle, otherwise defer until it is.
    fn contend<E>(&mut self, env: &MacEnv, sched: &mut Scheduler<E>)
    where
        E: From<(usize, StationTimer)>,
    {
        if self.access.is_some() {
            return;
        }
        if self.backoff.is_none() && self.current.is_none() {
            self.phase = MacPhase::Idle;
            return;
        }
        if !env.medium_idle {
            self.phase = MacPhase::Defer;
            return;
        }
        let start = self.access_grant(env).max(env.now);
        let slots = self.backoff.unwrap_or(0);
        let expiry = start + env.phy.slot() * u64::from(slots);
        let handle = sched
            .schedule_at(expiry, E::from((self.index, StationTimer::AccessExpiry)))
            .expect("access expiry is never in the past");
        self.access = Some(PendingAccess {
            handle,
            start,
            slots,
            expiry,
        });
        self.phase = MacPhase::Backoff;
    }

    /// Medium went busy: freeze the countdown, keeping slots not yet elapsed.
    /// A station whose counter expires at this very instant still transmits.
    pub fn on_medium_busy<E>(&mut self, env: &MacEnv, sched: &mut Scheduler<E>) {
        let Some(access) = self.access else {
            return;
        };
        if access.expiry == env.now {
            return;
        }
        sched.cancel(access.handle);
        self.access = None;
        let elapsed = if env.now > access.start {
            (env.now - access.start).whole_units(env.phy.slot()) as u32
        } else {
            0
        };
        let remaining = access.slots - elapsed.min(access.slots);
        self.backoff = Some(remaining);
        self.phase = MacPhase::Defer;
        self.log(env.now, "backoff-freeze");
    }

    pub fn on_medium_idle<E>(&mut self, env: &MacEnv, sched: &mut Scheduler<E>)
    where
        E: From<(usize, StationTimer)>,
    {
        if self.phase == MacPhase::Defer {
            self.contend(env, sched);
        }
    }

    /// Backoff counter reached zero.
    pub fn on_access_expiry(&mut self, env: &MacEnv) -> Option<MacReport> {
        self.access = None;
        self.backoff = None;
        self.fetch_next();
        if self.current.is_none() {
            self.phase = MacPhase::Idle;
            self.log(env.now, "post-backoff-done");
            return None;
        }
        self.start_access(env)
    }

    fn start_access(&mut self, env: &MacEnv) -> Option<MacReport> {
        let data = self.current.clone()?;
        if self.nav_until > env.now {
            self.counters.nav_violations += 1;
        }
        self.counters.attempts += 1;
        if self.retry_count > 0 {
            self.counters.retransmissions += 1;
        }
        self.backoff = None;
        let frame = self.frame_for_access(data, &env.phy, env.now);
        Some(MacReport::Transmit(frame))
    }

    /// RTS or DATA, depending on the RTS threshold.
    fn frame_for_access(&mut self, data: Frame, phy: &Phy, now: SimTime) -> Frame {
        let data = with_data_duration(data, phy);
        if self.params.uses_rts(data.mpdu_bytes(phy)) {
            self.phase = MacPhase::TxRts;
            self.log(now, "tx-rts");
            rts_for(&data, phy)
        } else {
            self.phase = MacPhase::TxData;
            self.log(now, "tx-data");
            data
        }
    }

    /// Our own frame finished on air; arm the response timeout.
    pub fn on_own_tx_end<E>(&mut self, env: &MacEnv, sched: &mut Scheduler<E>)
    where
        E: From<(usize, StationTimer)>,
    {
        let timeout = match self.phase {
            MacPhase::TxRts => {
                self.phase = MacPhase::WaitCts;
                env.timeouts.cts_timeout
            }
            MacPhase::TxData => {
                self.phase = MacPhase::WaitAck;
                env.timeouts.ack_timeout
            }
            _ => return,
        };
        self.tx_end = env.now;
        self.timeout = Some(sched.schedule(
            timeout,
            E::from((self.index, StationTimer::ResponseTimeout)),
        ));
    }

    /// A frame from another node finished on air. `rx_start` is when its
    /// reception began. `decoded` is false when it collided.
    pub fn on_frame<E>(
        &mut self,
        frame: &Frame,
        decoded: bool,
        rx_start: SimTime,
        env: &MacEnv,
        sched: &mut Scheduler<E>,
    ) -> Option<MacReport>
    where
        E: From<(usize, StationTimer)>,
    {
        if !decoded {
            self.rx_corrupt = true;
            return None;
        }
        self.rx_corrupt = false;
        if frame.dst != self.id {
            let until = env.now + frame.duration_field;
            if until > self.nav_until {
                self.nav_until = until;
            }
            return None;
        }
        match (frame.kind, self.phase) {
            (FrameKind::Cts, MacPhase::WaitCts)
                if response_in_time(self.tx_end, env.timeouts.cts_timeout, rx_start) =>
            {
                self.cancel_timeout(sched);
                self.phase = MacPhase::TxData;
                self.log(env.now, "rx-cts");
                sched.schedule(
                    env.phy.sifs(),
                    E::from((self.index, StationTimer::SendData)),
                );
                None
            }
            (FrameKind::Ack, MacPhase::WaitAck)
                if response_in_time(self.tx_end, env.timeouts.ack_timeout, rx_start) =>
            {
                self.cancel_timeout(sched);
                Some(self.on_tx_success(env, sched))
            }
            _ => None,
        }
    }

    fn cancel_timeout<E>(&mut self, sched: &mut Scheduler<E>) {
        if let Some(h) = self.timeout.take() {
            sched.cancel(h);
        }
    }

    /// SIFS after CTS: the protected DATA frame goes out.
    pub fn on_send_data(&mut self, phy: &Phy, now: SimTime) -> Option<Frame> {
        if self.phase != MacPhase::TxData {
            return None;
        }
        self.log(now, "tx-data");
        self.current.clone().map(|d| with_data_duration(d, phy))
    }

    fn on_tx_success<E>(&mut self, env: &MacEnv, sched: &mut Scheduler<E>) -> MacReport
    where
        E: From<(usize, StationTimer)>,
    {
        let done = self
            .current
            .take()
            .expect("success without packet in service");
        self.counters.successes += 1;
        self.cw = self.params.cw_min;
        self.retry_count = 0;
        self.log(env.now, "tx-success");
        self.fetch_next();
        // post-backoff is mandatory even with an empty queue
        self.draw(env.now);
        self.phase = MacPhase::Defer;
        self.contend(env, sched);
        MacReport::Succeeded(done)
    }

    /// CTS or ACK timeout fired.
    pub fn on_timeout<E>(&mut self, env: &MacEnv, sched: &mut Scheduler<E>) -> Option<MacReport>
    where
        E: From<(usize, StationTimer)>,
    {
        self.timeout = None;
        self.timeout_end = env.now;
        self.counters.failures += 1;
        self.retry_count += 1;
        let mut report = None;
        if self.retry_count > self.params.retry_limit {
            let dropped = self
                .current
                .take()
                .expect("timeout without packet in service");
            self.counters.drops += 1;
            self.log(env.now, "drop");
            self.cw = self.params.cw_min;
            self.retry_count = 0;
            self.fetch_next();
            report = Some(MacReport::Dropped(dropped));
        } else {
            self.cw = next_cw(self.cw, self.params.cw_max);
            self.log(env.now, "tx-failure");
        }
        self.draw(env.now);
        self.phase = MacPhase::Defer;
        self.contend(env, sched);
        report
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phy::{FrameSizes, PhyParams};
    use crate::stats::FlowKey;

    #[derive(Debug, Clone, Copy, PartialEq)]
    struct Ev(usize, StationTimer);

    impl From<(usize, StationTimer)> for Ev {
        fn from((i, t): (usize, StationTimer)) -> Self {
            Ev(i, t)
        }
    }

    fn phy() -> Phy {
        Phy::new(PhyParams::default(), FrameSizes::default()).unwrap()
    }

    fn env(now_us: u64, idle: bool, idle_since_us: u64) -> MacEnv {
        let phy = phy();
        MacEnv {
            now: SimTime::from_micros(now_us),
            phy,
            timeouts: TimeoutDurations::new(&phy),
            medium_idle: idle,
            idle_since: SimTime::from_micros(idle_since_us),
            busy_since: (!idle).then(|| SimTime::from_micros(idle_since_us)),
        }
    }

    fn station(params: MacParams) -> Station {
        Station::new(0, params, RandomStream::new(1, 1), TxQueue::new(10))
    }

    fn packet(seq: u64) -> Frame {
        Frame::data(FlowKey::for_station(0), seq, 512, SimTime::ZERO)
    }

    fn pending_times(sched: &mut Scheduler<Ev>) -> Vec<(SimTime, Ev)> {
        let mut out = Vec::new();
        sched
            .run_until(SimTime::from_secs(1), |s, e| out.push((s.now(), e)))
            .unwrap();
        out
    }

    #[test]
    fn lone_station_transmits_immediately() {
        let mut sta = station(MacParams::default());
        let mut sched = Scheduler::<Ev>::new();
        sta.queue_mut().enqueue(packet(1));
        let report = sta.on_enqueue(&env(1000, true, 0), &mut sched);
        assert!(matches!(report, Some(MacReport::Transmit(_))));
        assert_eq!(sched.pending_count(), 0);
        assert_eq!(sta.counters().attempts, 1);
    }

    #[test]
    fn arrival_in_same_tick_as_busy_start_collides() {
        let mut sta = station(MacParams::default());
        let mut sched = Scheduler::<Ev>::new();
        sta.queue_mut().enqueue(packet(1));
        let e = MacEnv {
            busy_since: Some(SimTime::from_micros(1000)),
            ..env(1000, false, 0)
        };
        assert!(matches!(
            sta.on_enqueue(&e, &mut sched),
            Some(MacReport::Transmit(_))
        ));
    }

    #[test]
    fn busy_medium_starts_backoff() {
        let mut sta = station(MacParams::default());
        let mut sched = Scheduler::<Ev>::new();
        sta.queue_mut().enqueue(packet(1));
        assert!(sta.on_enqueue(&env(1000, false, 0), &mut sched).is_none());
        assert_eq!(sta.phase(), MacPhase::Defer);
        let slots = sta.backoff_slots().unwrap();
        assert!(slots <= 15);
        // medium idles at 1100 us: countdown starts after DIFS
        sta.on_medium_idle(&env(1100, true, 1100), &mut sched);
        let fired = pending_times(&mut sched);
        let expect = SimTime::from_micros(1100 + 34 + 9 * u64::from(slots));
        assert_eq!(fired, vec![(expect, Ev(0, StationTimer::AccessExpiry))]);
    }

    #[test]
    fn countdown_freezes_and_resumes() {
        let mut sta = station(MacParams::default());
        let mut sched = Scheduler::<Ev>::new();
        sta.backoff = Some(3);
        sta.current = Some(packet(1));
        sta.phase = MacPhase::Defer;
        sta.on_medium_idle(&env(0, true, 0), &mut sched);
        // busy after one decrement (34 + 9 us)
        sta.on_medium_busy(&env(34 + 9 + 2, false, 0), &mut sched);
        assert_eq!(sta.backoff_slots(), Some(2));
        assert_eq!(sta.phase(), MacPhase::Defer);
        sta.on_medium_idle(&env(500, true, 500), &mut sched);
        let fired = pending_times(&mut sched);
        assert_eq!(fired[0].0, SimTime::from_micros(500 + 34 + 18));
    }

    #[test]
    fn counter_three_fires_after_three_slots() {
        let mut sta = station(MacParams::default());
        let mut sched = Scheduler::<Ev>::new();
        sta.backoff = Some(3);
        sta.current = Some(packet(1));
        sta.phase = MacPhase::Defer;
        sta.on_medium_idle(&env(100, true, 100), &mut sched);
        assert_eq!(
            pending_times(&mut sched)[0].0,
            SimTime::from_micros(100 + 34 + 27)
        );
    }

    #[test]
    fn zero_counter_fires_at_difs_boundary() {
        let mut sta = station(MacParams::default());
        let mut sched = Scheduler::<Ev>::new();
        sta.backoff = Some(0);
        sta.current = Some(packet(1));
        sta.phase = MacPhase::Defer;
        sta.on_medium_idle(&env(100, true, 100), &mut sched);
        assert_eq!(pending_times(&mut sched)[0].0, SimTime::from_micros(134));
    }

    #[test]
    fn expiry_at_busy_instant_still_fires() {
        let mut sta = station(MacParams::default());
        let mut sched = Scheduler::<Ev>::new();
        sta.backoff = Some(1);
        sta.current = Some(packet(1));
        sta.phase = MacPhase::Defer;
        sta.on_medium_idle(&env(0, true, 0), &mut sched);
        sta.on_medium_busy(&env(43, false, 0), &mut sched);
        assert_eq!(sta.phase(), MacPhase::Backoff);
        assert_eq!(pending_times(&mut sched).len(), 1);
    }

    #[test]
    fn eifs_after_corrupted_frame() {
        let mut sta = station(MacParams::default());
        let mut sched = Scheduler::<Ev>::new();
        let e = env(100, true, 100);
        sta.on_frame(&packet(9), false, SimTime::ZERO, &e, &mut sched);
        assert_eq!(sta.access_grant(&e), SimTime::from_micros(182));
        sta.on_frame(&packet(9), true, SimTime::ZERO, &e, &mut sched);
        assert_eq!(sta.access_grant(&e), SimTime::from_micros(134));

        let mut off = station(MacParams {
            eifs_enabled: false,
            ..MacParams::default()
        });
        off.on_frame(&packet(9), false, SimTime::ZERO, &e, &mut sched);
        assert_eq!(off.access_grant(&e), SimTime::from_micros(134));
    }

    #[test]
    fn overheard_cts_sets_nav() {
        let p = phy();
        let mut sta = station(MacParams::default());
        let mut sched = Scheduler::<Ev>::new();
        let other = Frame::data(FlowKey::for_station(3), 1, 512, SimTime::ZERO);
        let rts = rts_for(&with_data_duration(other, &p), &p);
        let cts = super::super::cts_for(&rts, &p);
        let e = env(1000, true, 1000);
        sta.on_frame(&cts, true, SimTime::from_micros(968), &e, &mut sched);
        assert_eq!(
            sta.nav_until(),
            SimTime::from_micros(1000 + 16 + 408 + 16 + 32)
        );
        assert!(sta.access_grant(&e) >= sta.nav_until() + p.difs());
    }

    #[test]
    fn failures_double_cw_then_drop() {
        let params = MacParams {
            retry_limit: 1,
            ..MacParams::default()
        };
        let mut sta = station(params);
        let mut sched = Scheduler::<Ev>::new();
        sta.queue_mut().enqueue(packet(1));
        let Some(MacReport::Transmit(d)) = sta.on_enqueue(&env(1000, true, 0), &mut sched) else {
            panic!("expected immediate access");
        };
        assert_eq!(d.kind, FrameKind::Data);
        sta.on_own_tx_end(&env(1408, false, 0), &mut sched);
        assert_eq!(sta.phase(), MacPhase::WaitAck);

        assert!(sta.on_timeout(&env(1465, true, 1408), &mut sched).is_none());
        assert_eq!((sta.cw(), sta.retry_count()), (31, 1));

        sta.phase = MacPhase::WaitAck;
        sta.access = None;
        let report = sta.on_timeout(&env(3000, true, 2900), &mut sched);
        assert!(matches!(report, Some(MacReport::Dropped(f)) if f.seq == 1));
        assert_eq!((sta.cw(), sta.retry_count()), (15, 0));
        assert_eq!(sta.counters().drops, 1);
        // post-drop backoff still runs with nothing queued
        assert!(sta.post_backoff_pending());
    }

    #[test]
    fn timeout_defers_by_difs_after_timeout() {
        let mut sta = station(MacParams::default());
        let mut sched = Scheduler::<Ev>::new();
        sta.current = Some(packet(1));
        sta.phase = MacPhase::WaitAck;
        let e = env(1465, true, 1408);
        sta.on_timeout(&e, &mut sched);
        assert_eq!(sta.access_grant(&e), SimTime::from_micros(1465 + 34));
    }

    #[test]
    fn success_resets_and_starts_post_backoff() {
        let mut sta = station(MacParams::default());
        let mut sched = Scheduler::<Ev>::new();
        sta.current = Some(packet(1));
        sta.cw = 63;
        sta.retry_count = 2;
        sta.phase = MacPhase::WaitAck;
        sta.tx_end = SimTime::from_micros(1000);
        let ack = super::super::ack_for(&packet(1));
        let report = sta.on_frame(
            &ack,
            true,
            SimTime::from_micros(1016),
            &env(1048, true, 1048),
            &mut sched,
        );
        assert!(matches!(report, Some(MacReport::Succeeded(_))));
        assert_eq!((sta.cw(), sta.retry_count()), (15, 0));
        assert!(sta.post_backoff_pending());
        assert_eq!(sta.phase(), MacPhase::Backoff);

        // arrival during post-backoff waits for the countdown
        sta.queue_mut().enqueue(packet(2));
        assert!(sta.on_enqueue(&env(1050, true, 1048), &mut sched).is_none());
        let fired = pending_times(&mut sched);
        assert_eq!(fired.len(), 1);
        let report = sta.on_access_expiry(&MacEnv {
            now: fired[0].0,
            ..env(0, true, 1048)
        });
        assert!(matches!(report, Some(MacReport::Transmit(f)) if f.seq == 2));
    }

    #[test]
    fn late_ack_is_ignored() {
        let mut sta = station(MacParams::default());
        let mut sched = Scheduler::<Ev>::new();
        sta.current = Some(packet(1));
        sta.phase = MacPhase::WaitAck;
        sta.tx_end = SimTime::from_micros(1000);
        let ack = super::super::ack_for(&packet(1));
        let report = sta.on_frame(
            &ack,
            true,
            SimTime::from_micros(1057),
            &env(1089, true, 1089),
            &mut sched,
        );
        assert!(report.is_none());
        assert_eq!(sta.phase(), MacPhase::WaitAck);
    }
}
