use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashSet};

use super::time::SimTime;
use crate::error::KernelError;

/// Opaque reference to a scheduled event, used for cancellation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EventHandle(u64);

#[derive(Debug)]
struct Entry<E> {
    time: SimTime,
    seq: u64,
    event: E,
}

impl<E> PartialEq for Entry<E> {
    fn eq(&self, other: &Self) -> bool {
        (self.time, self.seq) == (other.time, other.seq)
    }
}

impl<E> Eq for Entry<E> {}

impl<E> PartialOrd for Entry<E> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl<E> Ord for Entry<E> {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.time, self.seq).cmp(&(other.time, other.seq))
    }
}

/// Single-threaded discrete-event scheduler.
///
/// Events run in `(time, insertion sequence)` order, so simultaneous events
/// keep FIFO order and a run is fully reproducible.
#[derive(Debug)]
pub struct Scheduler<E> {
    now: SimTime,
    next_seq: u64,
    queue: BinaryHeap<Reverse<Entry<E>>>,
    pending: HashSet<u64>,
    running: bool,
    executed: u64,
}

impl<E> Default for Scheduler<E> {
    fn default() -> Self {
        Self::new()
    }
}

impl<E> Scheduler<E> {
    pub fn new() -> Self {
        Scheduler {
            now: SimTime::ZERO,
            next_seq: 0,
            queue: BinaryHeap::new(),
            pending: HashSet::new(),
            running: false,
            executed: 0,
        }
    }

    pub fn now(&self) -> SimTime {
        self.now
    }

    /// Total number of events executed over the scheduler's lifetime.
    pub fn executed(&self) -> u64 {
        self.executed
    }

    pub fn pending_count(&self) -> usize {
        self.pending.len()
    }

    /// Queues `event` to fire `delay` after the current time.
    pub fn schedule(&mut self, delay: SimTime, event: E) -> EventHandle {
        let time = self.now + delay;
        self.push(time, event)
    }

    /// Queues `event` at an absolute time, which must not lie in the past.
    pub fn schedule_at(&mut self, time: SimTime, event: E) -> Result<EventHandle, KernelError> {
        if time < self.now {
            return Err(KernelError::EventInPast {
                now: self.now,
                at: time,
            });
        }
        Ok(self.push(time, event))
    }

    fn push(&mut self, time: SimTime, event: E) -> EventHandle {
        let seq = self.next_seq;
        self.next_seq += 1;
        self.queue.push(Reverse(Entry { time, seq, event }));
        self.pending.insert(seq);
        EventHandle(seq)
    }

    /// Returns true iff the event had not yet executed or been cancelled.
    pub fn cancel(&mut self, handle: EventHandle) -> bool {
        self.pending.remove(&handle.0)
    }

    pub fn is_pending(&self, handle: EventHandle) -> bool {
        self.pending.contains(&handle.0)
    }

    /// Pops the next live event with `time <= t_end` and advances the clock.
    fn pop_until(&mut self, t_end: SimTime) -> Option<(SimTime, E)> {
        loop {
            let head = self.queue.peek()?;
            if head.0.time > t_end {
                return None;
            }
            let Reverse(entry) = self.queue.pop().expect("peeked entry");
            if !self.pending.remove(&entry.seq) {
                continue;
            }
            self.now = entry.time;
            return Some((entry.time, entry.event));
        }
    }

    /// Executes every live event with `time <= t_end` and leaves the clock at
    /// `t_end`. Returns the number of events executed by this call.
    pub fn run_until<F>(&mut self, t_end: SimTime, mut handler: F) -> Result<u64, KernelError>
    where
        F: FnMut(&mut Scheduler<E>, E),
    {
        if self.running {
            return Err(KernelError::Reentrant);
        }
        if t_end < self.now {
            return Err(KernelError::EventInPast {
                now: self.now,
                at: t_end,
            });
        }
        self.running = true;
        let mut count = 0;
        let mut last = self.now;
        while let Some((time, event)) = self.pop_until(t_end) {
            if time < last {
                self.running = false;
                return Err(KernelError::TimeWentBackwards { last, next: time });
            }
            last = time;
            handler(self, event);
            count += 1;
        }
        self.now = t_end;
        self.executed += count;
        self.running = false;
        Ok(count)
    }
}
