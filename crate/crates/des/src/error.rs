use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DesError {
    #[error("event at t={time} scheduled in the past (clock is {clock})")]
    PastEvent { time: f64, clock: f64 },

    #[error("event time must be finite, got {0}")]
    NonFiniteTime(f64),

    #[error("invalid distribution parameter: {0}")]
    InvalidParameter(String),

    #[error("queue '{name}' is full (capacity {capacity})")]
    QueueFull { name: String, capacity: usize },
}
