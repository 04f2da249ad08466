//! Deterministic discrete-event kernel: integer-nanosecond clock, a
//! `(time, seq)`-ordered event queue with cancellation, and seeded random
//! streams.

mod rng;
mod scheduler;
mod time;

pub use rng::RandomStream;
pub use scheduler::{EventHandle, Scheduler};
pub use time::SimTime;
