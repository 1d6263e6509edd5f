use std::collections::VecDeque;

use crate::envs::Environment;
use crate::error::Result;
use crate::gbt::Dataset;

/// One round of interaction; the context is an index into the pool.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InteractionRecord {
    pub epoch: usize,
    pub context: usize,
    pub action: usize,
    pub reward: bool,
}

/// Interaction history, optionally limited to the most recent records.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct HistoryBuffer {
    records: VecDeque<InteractionRecord>,
    capacity: Option<usize>,
}

impl HistoryBuffer {
    pub fn new(capacity: Option<usize>) -> Self {
        Self { records: VecDeque::new(), capacity }
    }

    pub fn capacity(&self) -> Option<usize> {
        self.capacity
    }

    /// Appends a record, evicting the oldest one when full.
    pub fn push(&mut self, record: InteractionRecord) {
        self.records.push_back(record);
        if let Some(c) = self.capacity {
            while self.records.len() > c {
                self.records.pop_front();
            }
        }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &InteractionRecord> {
        self.records.iter()
    }

    /// Concatenated context and action features with the observed rewards.
    pub fn to_dataset(&self, env: &Environment) -> Result<Dataset> {
        let mut data = Dataset::with_capacity(env.n_features(), self.len());
        for r in &self.records {
            data.push_concat(env.pool.get(r.context), env.bank.get(r.action), r.reward as u8 as f64)?;
        }
        Ok(data)
    }
}

/// Keeps the newest `min(len, capacity)` records in order; `None` keeps all.
pub fn apply_window(mut buffer: HistoryBuffer, capacity: Option<usize>) -> HistoryBuffer {
    if let Some(c) = capacity {
        let excess = buffer.records.len().saturating_sub(c);
        buffer.records.drain(..excess);
    }
    buffer.capacity = capacity;
    buffer
}

#[cfg(test)]
mod tests {
    use super::*;

    fn filled(n: usize) -> HistoryBuffer {
        let mut b = HistoryBuffer::new(None);
        for i in 0..n {
            b.push(InteractionRecord { epoch: i, context: 0, action: 0, reward: false });
        }
        b
    }

    #[test]
    fn window_keeps_newest() {
        let b = apply_window(filled(5000), Some(4500));
        assert_eq!(b.len(), 4500);
        assert_eq!(b.iter().next().unwrap().epoch, 500);
        assert_eq!(b.iter().last().unwrap().epoch, 4999);
        let again = apply_window(b.clone(), Some(4500));
        assert_eq!(again, b);
        assert_eq!(apply_window(filled(10), Some(4500)).len(), 10);
        assert_eq!(apply_window(filled(10), None).len(), 10);
    }

    #[test]
    fn push_evicts_oldest() {
        let mut b = HistoryBuffer::new(Some(3));
        for i in 0..5 {
            b.push(InteractionRecord { epoch: i, context: 0, action: 0, reward: true });
        }
        assert_eq!(b.iter().map(|r| r.epoch).collect::<Vec<_>>(), vec![2, 3, 4]);
    }
}
