use std::collections::VecDeque;

use crate::DesError;

/// FIFO queue of entity ids, optionally bounded.
#[derive(Debug, Clone)]
pub struct CapacityQueue {
    name: String,
    capacity: Option<usize>,
    occupants: VecDeque<u64>,
    max_len: usize,
}

impl CapacityQueue {
    pub fn bounded(name: impl Into<String>, capacity: usize) -> Self {
        Self {
            name: name.into(),
            capacity: Some(capacity),
            occupants: VecDeque::new(),
            max_len: 0,
        }
    }

    pub fn unbounded(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            capacity: None,
            occupants: VecDeque::new(),
            max_len: 0,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn capacity(&self) -> Option<usize> {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.occupants.len()
    }

    pub fn is_empty(&self) -> bool {
        self.occupants.is_empty()
    }

    /// Longest length observed since construction.
    pub fn max_len(&self) -> usize {
        self.max_len
    }

    /// Remaining room, `None` when unbounded.
    pub fn free(&self) -> Option<usize> {
        self.capacity.map(|c| c - self.occupants.len())
    }

    pub fn is_full(&self) -> bool {
        self.free() == Some(0)
    }

    pub fn push(&mut self, id: u64) -> Result<(), DesError> {
        if let Some(capacity) = self.capacity {
            if self.occupants.len() >= capacity {
                return Err(DesError::QueueFull {
                    name: self.name.clone(),
                    capacity,
                });
            }
        }
        self.occupants.push_back(id);
        self.max_len = self.max_len.max(self.occupants.len());
        Ok(())
    }

    pub fn front(&self) -> Option<u64> {
        self.occupants.front().copied()
    }

    pub fn pop(&mut self) -> Option<u64> {
        self.occupants.pop_front()
    }
}

/// A counted resource: `capacity` identical slots (lanes, servers).
#[derive(Debug, Clone)]
pub struct Station {
    name: String,
    capacity: usize,
    busy: usize,
}

impl Station {
    pub fn new(name: impl Into<String>, capacity: usize) -> Self {
        Self {
            name: name.into(),
            capacity,
            busy: 0,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn busy(&self) -> usize {
        self.busy
    }

    pub fn free(&self) -> usize {
        self.capacity - self.busy
    }

    /// Take one slot if available.
    pub fn try_acquire(&mut self) -> bool {
        if self.busy < self.capacity {
            self.busy += 1;
            true
        } else {
            false
        }
    }

    pub fn release(&mut self) {
        assert!(self.busy > 0, "release on idle station '{}'", self.name);
        self.busy -= 1;
    }
}
