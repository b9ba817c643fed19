use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::{DesError, SimTime};

/// A scheduled event as seen by the dispatch handler.
#[derive(Debug, Clone, PartialEq)]
pub struct EventRecord<K> {
    pub time: SimTime,
    /// Insertion counter, unique per kernel. Breaks ties between equal times.
    pub sequence: u64,
    pub kind: K,
    pub subject: u64,
}

struct Pending<K>(EventRecord<K>);

impl<K> PartialEq for Pending<K> {
    fn eq(&self, other: &Self) -> bool {
        self.0.sequence == other.0.sequence
    }
}

impl<K> Eq for Pending<K> {}

impl<K> PartialOrd for Pending<K> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<K> Ord for Pending<K> {
    // BinaryHeap is a max-heap; reverse so the earliest (time, sequence) pops first.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .0
            .time
            .total_cmp(&self.0.time)
            .then_with(|| other.0.sequence.cmp(&self.0.sequence))
    }
}

/// Event calendar plus simulation clock.
///
/// Events are dispatched in lexicographic `(time, sequence)` order, so two
/// events at the same instant fire in the order they were scheduled.
pub struct Kernel<K> {
    clock: SimTime,
    next_sequence: u64,
    calendar: BinaryHeap<Pending<K>>,
    trace: Option<Vec<(SimTime, u64)>>,
}

impl<K> Default for Kernel<K> {
    fn default() -> Self {
        Self::new()
    }
}

impl<K> Kernel<K> {
    pub fn new() -> Self {
        Self {
            clock: 0.0,
            next_sequence: 0,
            calendar: BinaryHeap::new(),
            trace: None,
        }
    }

    /// Current simulation clock.
    pub fn now(&self) -> SimTime {
        self.clock
    }

    /// Number of events waiting in the calendar.
    pub fn pending(&self) -> usize {
        self.calendar.len()
    }

    /// Record `(time, sequence)` of every dispatched event. Used by tests to
    /// audit dispatch order and to compare traces across runs.
    pub fn enable_trace(&mut self) {
        self.trace.get_or_insert_with(Vec::new);
    }

    pub fn trace(&self) -> Option<&[(SimTime, u64)]> {
        self.trace.as_deref()
    }

    /// Schedule `kind` for `subject` at absolute `time`. Returns the sequence number.
    pub fn schedule(&mut self, time: SimTime, kind: K, subject: u64) -> Result<u64, DesError> {
        if !time.is_finite() {
            return Err(DesError::NonFiniteTime(time));
        }
        if time < self.clock {
            return Err(DesError::PastEvent {
                time,
                clock: self.clock,
            });
        }
        let sequence = self.next_sequence;
        self.next_sequence += 1;
        self.calendar.push(Pending(EventRecord {
            time,
            sequence,
            kind,
            subject,
        }));
        Ok(sequence)
    }

    /// Schedule `kind` after a non-negative `delay` from the current clock.
    pub fn schedule_in(&mut self, delay: SimTime, kind: K, subject: u64) -> Result<u64, DesError> {
        self.schedule(self.clock + delay, kind, subject)
    }

    /// Dispatch every event with `time <= until` and leave the clock at `until`.
    ///
    /// The handler may schedule further events through the kernel it receives;
    /// those are dispatched in the same call if they fall inside the horizon.
    /// Returns the number of events dispatched.
    pub fn run<F>(&mut self, until: SimTime, mut handler: F) -> usize
    where
        F: FnMut(&mut Self, EventRecord<K>),
    {
        let mut dispatched = 0;
        while let Some(top) = self.calendar.peek() {
            if top.0.time > until {
                break;
            }
            let Pending(event) = self.calendar.pop().expect("peeked");
            self.clock = event.time;
            if let Some(trace) = self.trace.as_mut() {
                trace.push((event.time, event.sequence));
            }
            handler(self, event);
            dispatched += 1;
        }
        if until > self.clock {
            self.clock = until;
        }
        dispatched
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn drain(kernel: &mut Kernel<&'static str>, until: SimTime) -> Vec<&'static str> {
        let mut seen = Vec::new();
        kernel.run(until, |_, ev| seen.push(ev.kind));
        seen
    }

    #[test]
    fn equal_times_dispatch_in_insertion_order() {
        let mut k = Kernel::new();
        k.schedule(1.0, "a", 0).unwrap();
        k.schedule(1.0, "b", 0).unwrap();
        k.schedule(1.0, "c", 0).unwrap();
        assert_eq!(drain(&mut k, 10.0), ["a", "b", "c"]);
    }

    #[test]
    fn earlier_time_first() {
        let mut k = Kernel::new();
        k.schedule(5.0, "late", 0).unwrap();
        k.schedule(3.0, "early", 0).unwrap();
        assert_eq!(drain(&mut k, 10.0), ["early", "late"]);
    }

    #[test]
    fn event_at_clock_runs_before_advance() {
        let mut k = Kernel::new();
        k.run(4.0, |_, _: EventRecord<&str>| {});
        k.schedule(4.0, "now", 0).unwrap();
        k.schedule(4.5, "later", 0).unwrap();
        let mut order = Vec::new();
        k.run(4.0, |k, ev| order.push((ev.kind, k.now())));
        assert_eq!(order, [("now", 4.0)]);
        assert_eq!(k.pending(), 1);
    }

    #[test]
    fn past_event_rejected() {
        let mut k: Kernel<()> = Kernel::new();
        k.run(10.0, |_, _| {});
        assert_eq!(
            k.schedule(9.0, (), 0),
            Err(DesError::PastEvent {
                time: 9.0,
                clock: 10.0
            })
        );
        assert!(matches!(
            k.schedule(f64::NAN, (), 0),
            Err(DesError::NonFiniteTime(_))
        ));
    }

    #[test]
    fn empty_calendar_advances_clock() {
        let mut k: Kernel<()> = Kernel::new();
        assert_eq!(k.run(100.0, |_, _| {}), 0);
        assert_eq!(k.now(), 100.0);
    }

    #[test]
    fn horizon_is_inclusive() {
        let mut k = Kernel::new();
        k.schedule(1.0, "x", 0).unwrap();
        k.schedule(2.0, "y", 0).unwrap();
        k.schedule(3.0, "edge", 0).unwrap();
        k.schedule(3.0001, "beyond", 0).unwrap();
        assert_eq!(k.run(3.0, |_, _| {}), 3);
        assert_eq!(k.now(), 3.0);
        assert_eq!(k.pending(), 1);
    }

    #[test]
    fn handler_can_chain_events() {
        let mut k = Kernel::new();
        k.schedule(0.0, 0u32, 0).unwrap();
        let n = k.run(10.0, |k, ev| {
            if ev.kind < 5 {
                k.schedule_in(1.0, ev.kind + 1, ev.subject).unwrap();
            }
        });
        assert_eq!(n, 6);
    }
}
