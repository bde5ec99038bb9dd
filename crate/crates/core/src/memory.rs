//! Training memories for the memory-based learners.

use std::collections::VecDeque;

use crate::stream::Example;

pub const DEFAULT_BUDGET: usize = 100;
pub const DEFAULT_WINDOW: usize = 1000;

/// Two per-class FIFO queues whose capacities track each other so the
/// stored training set stays class-balanced.
///
/// After every append the capacities become
/// `cap_p = min(B/2, |q_n| + 1)` and `cap_n = min(B/2, |q_p| + 1)`,
/// and both queues drop their oldest entries down to capacity.
#[derive(Debug, Clone, PartialEq)]
pub struct DualQueue {
    positives: VecDeque<Example>,
    negatives: VecDeque<Example>,
    cap_p: usize,
    cap_n: usize,
    budget: usize,
}

impl DualQueue {
    /// `budget` must be even and at least 2.
    pub fn new(budget: usize) -> Self {
        assert!(
            budget >= 2 && budget.is_multiple_of(2),
            "budget must be even and >= 2, got {budget}"
        );
        DualQueue {
            positives: VecDeque::with_capacity(budget / 2 + 1),
            negatives: VecDeque::with_capacity(budget / 2 + 1),
            cap_p: 1,
            cap_n: 1,
            budget,
        }
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn capacities(&self) -> (usize, usize) {
        (self.cap_p, self.cap_n)
    }

    pub fn positives(&self) -> &VecDeque<Example> {
        &self.positives
    }

    pub fn negatives(&self) -> &VecDeque<Example> {
        &self.negatives
    }

    pub fn len(&self) -> usize {
        self.positives.len() + self.negatives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn append(&mut self, ex: Example) {
        if ex.y == 1 {
            self.positives.push_back(ex);
        } else {
            self.negatives.push_back(ex);
        }
        let half = self.budget / 2;
        self.cap_p = half.min(self.negatives.len() + 1);
        self.cap_n = half.min(self.positives.len() + 1);
        truncate_front(&mut self.positives, self.cap_p);
        truncate_front(&mut self.negatives, self.cap_n);
    }

    pub fn reset(&mut self) {
        self.positives.clear();
        self.negatives.clear();
        self.cap_p = 1;
        self.cap_n = 1;
    }

    /// Positives (oldest first) followed by negatives (oldest first).
    pub fn training_set(&self) -> impl Iterator<Item = &Example> + '_ {
        self.positives.iter().chain(self.negatives.iter())
    }
}

/// Fixed-size FIFO of the most recent examples.
#[derive(Debug, Clone, PartialEq)]
pub struct SlidingWindow {
    window: VecDeque<Example>,
    capacity: usize,
}

impl SlidingWindow {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "window capacity must be positive");
        SlidingWindow {
            window: VecDeque::with_capacity(capacity + 1),
            capacity,
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.window.len()
    }

    pub fn is_empty(&self) -> bool {
        self.window.is_empty()
    }

    pub fn append(&mut self, ex: Example) {
        self.window.push_back(ex);
        truncate_front(&mut self.window, self.capacity);
    }

    pub fn reset(&mut self) {
        self.window.clear();
    }

    pub fn training_set(&self) -> impl Iterator<Item = &Example> + '_ {
        self.window.iter()
    }
}

fn truncate_front<T>(queue: &mut VecDeque<T>, cap: usize) {
    while queue.len() > cap {
        queue.pop_front();
    }
}
