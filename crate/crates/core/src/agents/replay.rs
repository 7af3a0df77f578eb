//! Fixed-capacity experience replay: a ring buffer of transitions with
//! uniform sampling.

use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Transition {
    pub state: usize,
    pub action: usize,
    pub reward: f64,
    pub next_state: usize,
    pub done: bool,
}

#[derive(Clone, Debug)]
pub struct ReplayBuffer {
    items: Vec<Transition>,
    capacity: usize,
    write_pos: usize,
}

impl ReplayBuffer {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "replay capacity must be positive");
        ReplayBuffer { items: Vec::new(), capacity, write_pos: 0 }
    }

    /// Appends a transition, evicting the oldest once at capacity.
    pub fn push(&mut self, t: Transition) {
        if self.items.len() < self.capacity {
            self.items.push(t);
        } else {
            self.items[self.write_pos] = t;
            self.write_pos = (self.write_pos + 1) % self.capacity;
        }
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn iter(&self) -> impl Iterator<Item = &Transition> {
        self.items.iter()
    }

    /// Fills `out` with `count` transitions drawn uniformly (with
    /// replacement) from the stored ones.
    pub fn sample_into<R: Rng>(&self, count: usize, rng: &mut R, out: &mut Vec<Transition>) {
        assert!(!self.items.is_empty(), "cannot sample from an empty buffer");
        out.clear();
        for _ in 0..count {
            out.push(self.items[rng.gen_range(0..self.items.len())]);
        }
    }
}
