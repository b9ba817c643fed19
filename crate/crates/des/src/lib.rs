//! A small discrete-event simulation kernel.
//!
//! The kernel keeps a future event list ordered by `(time, sequence)`, a
//! simulation clock, seeded random streams, and capacity-limited queues and
//! stations. A kernel instance is single-threaded; run replications on
//! separate instances to parallelize.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod error;
mod kernel;
mod queue;
mod rng;

pub use error::DesError;
pub use kernel::{EventRecord, Kernel};
pub use queue::{CapacityQueue, Station};
pub use rng::{derive_seed, exponential_quantile, RandomStream};

/// Simulated time in seconds.
pub type SimTime = f64;

/// Seconds per simulated day.
pub const SECONDS_PER_DAY: SimTime = 86_400.0;
