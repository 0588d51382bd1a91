//! Fixed-capacity string table with least-recently-used eviction.

use rustc_hash::FxHashMap;

const NIL: u32 = 0;

/// Maps strings to ids in `1..=capacity`.
///
/// Ids are handed out sequentially until the table is full; after that the
/// least recently used entry is evicted and its id reused. Both inserts and
/// hits count as a use. Every slot carries a generation counter that changes
/// whenever the slot is reassigned, so callers can detect stale ids cheaply.
#[derive(Debug, Clone)]
pub struct LookupTable {
    capacity: u32,
    ids: FxHashMap<Box<str>, u32>,
    values: Vec<Option<Box<str>>>,
    generations: Vec<u64>,
    // Recency list threaded through the slots; slot 0 is the sentinel.
    // sentinel.next is the least recently used id, sentinel.prev the most recent.
    prev: Vec<u32>,
    next: Vec<u32>,
    allocated: u32,
    last_set_id: u32,
}

impl LookupTable {
    pub fn new(capacity: u32) -> Self {
        assert!(capacity >= 1, "lookup table capacity must be positive");
        LookupTable {
            capacity,
            ids: FxHashMap::default(),
            values: vec![None],
            generations: vec![0],
            prev: vec![NIL],
            next: vec![NIL],
            allocated: 0,
            last_set_id: 0,
        }
    }

    pub fn capacity(&self) -> u32 {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn last_set_id(&self) -> u32 {
        self.last_set_id
    }

    pub fn get(&self, id: u32) -> Option<&str> {
        self.values.get(id as usize).and_then(|v| v.as_deref())
    }

    pub fn id_of(&self, value: &str) -> Option<u32> {
        self.ids.get(value).copied()
    }

    pub fn generation(&self, id: u32) -> u64 {
        self.generations[id as usize]
    }

    fn unlink(&mut self, id: u32) {
        let (p, n) = (self.prev[id as usize], self.next[id as usize]);
        self.next[p as usize] = n;
        self.prev[n as usize] = p;
    }

    fn push_most_recent(&mut self, id: u32) {
        let last = self.prev[NIL as usize];
        self.next[last as usize] = id;
        self.prev[id as usize] = last;
        self.next[id as usize] = NIL;
        self.prev[NIL as usize] = id;
    }

    /// Marks `id` as most recently used.
    pub fn touch(&mut self, id: u32) {
        if self.prev[NIL as usize] != id {
            self.unlink(id);
            self.push_most_recent(id);
        }
    }

    /// Returns the id for `value` and whether it was newly assigned.
    pub fn get_or_insert(&mut self, value: &str) -> (u32, bool) {
        if let Some(&id) = self.ids.get(value) {
            self.touch(id);
            return (id, false);
        }
        let id = if self.allocated < self.capacity {
            self.allocated += 1;
            self.values.push(None);
            self.generations.push(0);
            self.prev.push(NIL);
            self.next.push(NIL);
            self.allocated
        } else {
            let victim = self.next[NIL as usize];
            self.unlink(victim);
            if let Some(old) = self.values[victim as usize].take() {
                self.ids.remove(&old);
            }
            self.generations[victim as usize] += 1;
            victim
        };
        let boxed: Box<str> = value.into();
        self.ids.insert(boxed.clone(), id);
        self.values[id as usize] = Some(boxed);
        self.push_most_recent(id);
        (id, true)
    }

    /// Records that an entry row for `id` was emitted and returns the id as it
    /// should appear on the wire: 0 if it follows the previous entry id.
    pub fn entry_wire_id(&mut self, id: u32) -> u32 {
        let wire = if id == self.last_set_id + 1 { 0 } else { id };
        self.last_set_id = id;
        wire
    }
}
