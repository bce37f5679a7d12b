//! A list kept sorted by decreasing key with stable insertion.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct RankedEntry<T> {
    pub item: T,
    pub key: f64,
}

/// An ordered list where entries are ranked by decreasing key. Equal keys
/// keep insertion order: a new entry lands after every existing entry with
/// the same key.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedList<T> {
    entries: Vec<RankedEntry<T>>,
}

impl<T> Default for RankedList<T> {
    fn default() -> Self {
        RankedList { entries: Vec::new() }
    }
}

impl<T> RankedList<T> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts `item` ranked by `key` and returns the 0-based position it
    /// took. Non-finite keys are rejected.
    pub fn insert(&mut self, item: T, key: f64) -> Result<usize> {
        if !key.is_finite() {
            return Err(Error::NonFiniteKey { value: key });
        }
        let pos = self.entries.partition_point(|e| e.key >= key);
        self.entries.insert(pos, RankedEntry { item, key });
        Ok(pos)
    }

    /// Removes and returns the highest-ranked entry.
    pub fn pop_front(&mut self) -> Option<RankedEntry<T>> {
        if self.entries.is_empty() {
            None
        } else {
            Some(self.entries.remove(0))
        }
    }

    /// Removes and returns the entry at `index`.
    pub fn remove(&mut self, index: usize) -> Option<RankedEntry<T>> {
        if index < self.entries.len() {
            Some(self.entries.remove(index))
        } else {
            None
        }
    }

    pub fn front(&self) -> Option<&RankedEntry<T>> {
        self.entries.first()
    }

    pub fn get(&self, index: usize) -> Option<&RankedEntry<T>> {
        self.entries.get(index)
    }

    pub fn iter(&self) -> impl Iterator<Item = &RankedEntry<T>> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn clear(&mut self) {
        self.entries.clear();
    }

    /// Consumes the list, yielding items in rank order.
    pub fn into_items(self) -> Vec<T> {
        self.entries.into_iter().map(|e| e.item).collect()
    }
}

impl<T> IntoIterator for RankedList<T> {
    type Item = RankedEntry<T>;
    type IntoIter = std::vec::IntoIter<RankedEntry<T>>;

    fn into_iter(self) -> Self::IntoIter {
        self.entries.into_iter()
    }
}
