use std::collections::HashMap;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, OnceLock};

use sha2::{Digest, Sha256};

use super::{matrix_to_graph, Graph};
use crate::matrix::CooMatrix;
use crate::scalar::Scalar;

/// SHA-256 of the expanded canonical form of a matrix.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct CacheKey([u8; 32]);

impl fmt::Debug for CacheKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0[..8] {
            write!(f, "{b:02x}")?;
        }
        Ok(())
    }
}

impl CacheKey {
    /// Key of `m` after expansion, so storage kind does not change it.
    pub fn of<T: Scalar>(m: &CooMatrix<T>) -> Self {
        Self::of_expanded(&m.expand())
    }

    fn of_expanded<T: Scalar>(expanded: &CooMatrix<T>) -> Self {
        let d = expanded.descriptor();
        let mut h = Sha256::new();
        h.update((d.rows as u64).to_le_bytes());
        h.update((d.cols as u64).to_le_bytes());
        h.update([d.scalar.tag()]);
        let mut buf = Vec::with_capacity(32);
        for &(i, j, v) in expanded.entries() {
            buf.clear();
            buf.extend_from_slice(&(i as u64).to_le_bytes());
            buf.extend_from_slice(&(j as u64).to_le_bytes());
            v.write_le(&mut buf);
            h.update(&buf);
        }
        CacheKey(h.finalize().into())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CacheStats {
    pub hits: u64,
    pub misses: u64,
    pub evictions: u64,
    pub entries: usize,
}

struct Slot<T> {
    graph: Arc<OnceLock<Arc<Graph<T>>>>,
    last_used: u64,
}

struct Inner<T> {
    slots: HashMap<CacheKey, Slot<T>>,
    clock: u64,
}

/// Content-keyed cache of transformed graphs with LRU eviction.
///
/// Concurrent callers asking for the same key run at most one transform;
/// the others block on it and receive the same `Arc`.
pub struct GraphCache<T> {
    capacity: usize,
    inner: Mutex<Inner<T>>,
    hits: AtomicU64,
    misses: AtomicU64,
    evictions: AtomicU64,
}

impl<T: Scalar> Default for GraphCache<T> {
    fn default() -> Self {
        Self::with_capacity(64)
    }
}

impl<T: Scalar> GraphCache<T> {
    pub fn with_capacity(capacity: usize) -> Self {
        GraphCache {
            capacity: capacity.max(1),
            inner: Mutex::new(Inner { slots: HashMap::new(), clock: 0 }),
            hits: AtomicU64::new(0),
            misses: AtomicU64::new(0),
            evictions: AtomicU64::new(0),
        }
    }

    pub fn get_or_transform(&self, m: &CooMatrix<T>) -> Arc<Graph<T>> {
        let expanded = m.expand();
        let key = CacheKey::of_expanded(&expanded);
        let cell = {
            let mut inner = self.inner.lock().expect("graph cache lock poisoned");
            inner.clock += 1;
            let now = inner.clock;
            if let Some(slot) = inner.slots.get_mut(&key) {
                slot.last_used = now;
                self.hits.fetch_add(1, Ordering::Relaxed);
                slot.graph.clone()
            } else {
                self.misses.fetch_add(1, Ordering::Relaxed);
                if inner.slots.len() >= self.capacity {
                    if let Some(oldest) = inner.slots.iter().min_by_key(|(_, s)| s.last_used).map(|(k, _)| *k) {
                        inner.slots.remove(&oldest);
                        self.evictions.fetch_add(1, Ordering::Relaxed);
                    }
                }
                let cell = Arc::new(OnceLock::new());
                inner.slots.insert(key, Slot { graph: cell.clone(), last_used: now });
                cell
            }
        };
        cell.get_or_init(|| Arc::new(matrix_to_graph(&expanded))).clone()
    }

    pub fn contains(&self, m: &CooMatrix<T>) -> bool {
        let key = CacheKey::of(m);
        self.inner.lock().expect("graph cache lock poisoned").slots.contains_key(&key)
    }

    pub fn stats(&self) -> CacheStats {
        CacheStats {
            hits: self.hits.load(Ordering::Relaxed),
            misses: self.misses.load(Ordering::Relaxed),
            evictions: self.evictions.load(Ordering::Relaxed),
            entries: self.inner.lock().expect("graph cache lock poisoned").slots.len(),
        }
    }
}
