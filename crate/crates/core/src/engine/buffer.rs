use thiserror::Error;

use crate::bundle::{BundleCopy, BundleId, NodeId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BufferError {
    #[error("copy of {size} B exceeds the whole buffer ({capacity} B)")]
    TooLarge { size: u64, capacity: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub enum InsertOutcome {
    /// Stored; the listed copies were evicted to make room.
    Inserted { evicted: Vec<BundleCopy> },
    /// The node already holds this bundle; nothing changed.
    Duplicate,
}

/// Finite FIFO store of bundle copies, oldest-received first.
#[derive(Debug, Clone, PartialEq)]
pub struct Buffer {
    owner: NodeId,
    capacity: u64,
    used: u64,
    copies: Vec<BundleCopy>,
}

impl Buffer {
    pub fn new(owner: NodeId, capacity: u64) -> Self {
        Self { owner, capacity, used: 0, copies: Vec::new() }
    }

    pub fn capacity(&self) -> u64 {
        self.capacity
    }

    pub fn used(&self) -> u64 {
        self.used
    }

    pub fn len(&self) -> usize {
        self.copies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.copies.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, BundleCopy> {
        self.copies.iter()
    }

    pub fn ids(&self) -> impl Iterator<Item = BundleId> + '_ {
        self.copies.iter().map(|c| c.id())
    }

    pub fn contains(&self, id: BundleId) -> bool {
        self.copies.iter().any(|c| c.id() == id)
    }

    pub fn get(&self, id: BundleId) -> Option<&BundleCopy> {
        self.copies.iter().find(|c| c.id() == id)
    }

    pub fn get_mut(&mut self, id: BundleId) -> Option<&mut BundleCopy> {
        self.copies.iter_mut().find(|c| c.id() == id)
    }

    pub fn remove(&mut self, id: BundleId) -> Option<BundleCopy> {
        let idx = self.copies.iter().position(|c| c.id() == id)?;
        let copy = self.copies.remove(idx);
        self.used -= copy.size();
        Some(copy)
    }

    /// Remove every copy matching `pred`, preserving order of the rest.
    pub fn remove_where(&mut self, mut pred: impl FnMut(&BundleCopy) -> bool) -> Vec<BundleCopy> {
        if !self.copies.iter().any(&mut pred) {
            return Vec::new();
        }
        let (gone, kept): (Vec<_>, Vec<_>) = std::mem::take(&mut self.copies)
            .into_iter()
            .partition(|c| pred(c));
        self.copies = kept;
        self.used = self.copies.iter().map(BundleCopy::size).sum();
        gone
    }

    /// Store `copy`, evicting under a drop-oldest policy: relayed copies go
    /// first in arrival order, copies this node originated go last.
    pub fn insert(&mut self, copy: BundleCopy) -> Result<InsertOutcome, BufferError> {
        if copy.size() > self.capacity {
            return Err(BufferError::TooLarge { size: copy.size(), capacity: self.capacity });
        }
        if self.contains(copy.id()) {
            return Ok(InsertOutcome::Duplicate);
        }
        let mut evicted = Vec::new();
        for own in [false, true] {
            while self.used + copy.size() > self.capacity {
                let Some(idx) = self
                    .copies
                    .iter()
                    .position(|c| (c.bundle.source == self.owner) == own)
                else {
                    break;
                };
                let gone = self.copies.remove(idx);
                self.used -= gone.size();
                evicted.push(gone);
            }
        }
        self.used += copy.size();
        self.copies.push(copy);
        Ok(InsertOutcome::Inserted { evicted })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::{Bundle, CopyState};
    use crate::geometry::Position;
    use proptest::prelude::*;

    const KB500: u64 = 500_000;

    fn copy(id: u32, source: u32, size: u64) -> BundleCopy {
        BundleCopy {
            bundle: Bundle {
                id: BundleId(id),
                source: NodeId(source),
                destination: NodeId(99),
                size,
                created_at: 0.0,
                ttl: 1200.0,
                source_position: Position::new(0.0, 0.0),
            },
            hop_count: 1,
            received_at: id as f64,
            state: CopyState::Plain,
        }
    }

    #[test]
    fn twelve_copies_fit_six_megabytes() {
        let mut b = Buffer::new(NodeId(0), 6_000_000);
        for i in 0..12 {
            assert_eq!(b.insert(copy(i, 1, KB500)).unwrap(), InsertOutcome::Inserted { evicted: vec![] });
        }
        assert_eq!(b.used(), 6_000_000);
        let InsertOutcome::Inserted { evicted } = b.insert(copy(12, 1, KB500)).unwrap() else {
            panic!("expected insert");
        };
        assert_eq!(evicted.len(), 1);
        assert_eq!(evicted[0].id(), BundleId(0));
        assert_eq!(b.len(), 12);
    }

    #[test]
    fn own_copies_evicted_last() {
        let mut b = Buffer::new(NodeId(0), 3 * KB500);
        b.insert(copy(1, 0, KB500)).unwrap();
        b.insert(copy(2, 5, KB500)).unwrap();
        b.insert(copy(3, 0, KB500)).unwrap();
        let InsertOutcome::Inserted { evicted } = b.insert(copy(4, 0, 2 * KB500)).unwrap() else {
            panic!();
        };
        let ids: Vec<_> = evicted.iter().map(|c| c.id().0).collect();
        assert_eq!(ids, vec![2, 1]);
        assert_eq!(b.ids().map(|i| i.0).collect::<Vec<_>>(), vec![3, 4]);
    }

    #[test]
    fn duplicate_and_oversize() {
        let mut b = Buffer::new(NodeId(0), 2 * KB500);
        assert_eq!(b.insert(copy(1, 3, KB500)).unwrap(), InsertOutcome::Inserted { evicted: vec![] });
        assert_eq!(b.insert(copy(1, 3, KB500)).unwrap(), InsertOutcome::Duplicate);
        assert_eq!(b.used(), KB500);
        assert!(matches!(b.insert(copy(2, 3, 3 * KB500)), Err(BufferError::TooLarge { .. })));
    }

    proptest! {
        #[test]
        fn usage_never_exceeds_capacity(
            ops in proptest::collection::vec((0u32..30, 0u32..4, 1u64..4, any::<bool>()), 1..80),
        ) {
            let mut b = Buffer::new(NodeId(0), 6 * KB500);
            for (id, src, units, remove) in ops {
                if remove {
                    b.remove(BundleId(id));
                } else {
                    b.insert(copy(id, src, units * KB500)).unwrap();
                }
                prop_assert!(b.used() <= b.capacity());
                prop_assert_eq!(b.used(), b.iter().map(|c| c.size()).sum::<u64>());
            }
        }
    }
}
