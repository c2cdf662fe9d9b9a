//! Ground sets and element subsets.
//!
//! Elements are dense integer ids `0..ground_size`. A subset is a fixed-width
//! bit set over those ids, so membership, union and difference are single-word
//! operations and iteration always yields ids in ascending order.

use std::cmp::Ordering;
use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Largest ground set an [`ElementSet`] can represent.
pub const MAX_GROUND: usize = 128;

/// A subset of a ground set of at most [`MAX_GROUND`] elements.
///
/// The `Ord` impl compares the ascending id sequences lexicographically
/// (so `{0, 5} < {1, 2}` and `{1} < {1, 2}`); this is the canonical order
/// used for every deterministic tie-break in the crate.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct ElementSet {
    bits: u128,
}

impl ElementSet {
    /// The empty set.
    pub const fn empty() -> Self {
        ElementSet { bits: 0 }
    }

    /// The set `{id}`.
    pub fn singleton(id: u32) -> Self {
        assert!((id as usize) < MAX_GROUND, "element id {id} out of range");
        ElementSet { bits: 1u128 << id }
    }

    /// Builds a set from ids; duplicates are fine.
    pub fn from_ids<I: IntoIterator<Item = u32>>(ids: I) -> Self {
        let mut s = ElementSet::empty();
        for id in ids {
            s.insert(id);
        }
        s
    }

    /// The full set `{0, .., n-1}`.
    pub fn full(n: usize) -> Self {
        assert!(n <= MAX_GROUND, "ground size {n} out of range");
        if n == MAX_GROUND {
            ElementSet { bits: u128::MAX }
        } else {
            ElementSet {
                bits: (1u128 << n) - 1,
            }
        }
    }

    pub fn insert(&mut self, id: u32) {
        assert!((id as usize) < MAX_GROUND, "element id {id} out of range");
        self.bits |= 1u128 << id;
    }

    /// `self ∪ {id}` without mutating.
    pub fn with(mut self, id: u32) -> Self {
        self.insert(id);
        self
    }

    pub fn remove(&mut self, id: u32) {
        if (id as usize) < MAX_GROUND {
            self.bits &= !(1u128 << id);
        }
    }

    pub fn contains(self, id: u32) -> bool {
        (id as usize) < MAX_GROUND && self.bits & (1u128 << id) != 0
    }

    pub fn union(self, other: Self) -> Self {
        ElementSet {
            bits: self.bits | other.bits,
        }
    }

    pub fn intersect(self, other: Self) -> Self {
        ElementSet {
            bits: self.bits & other.bits,
        }
    }

    /// Set difference `self \ other`.
    pub fn minus(self, other: Self) -> Self {
        ElementSet {
            bits: self.bits & !other.bits,
        }
    }

    pub fn len(self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.bits == 0
    }

    pub fn is_subset_of(self, other: Self) -> bool {
        self.bits & !other.bits == 0
    }

    /// Ids in ascending order.
    pub fn iter(self) -> Iter {
        Iter { rest: self.bits }
    }

    pub(crate) const fn from_raw(bits: u128) -> Self {
        ElementSet { bits }
    }

    pub(crate) const fn raw(self) -> u128 {
        self.bits
    }

    /// Ids in ascending order, collected.
    pub fn ids(self) -> Vec<u32> {
        self.iter().collect()
    }
}

impl FromIterator<u32> for ElementSet {
    fn from_iter<I: IntoIterator<Item = u32>>(iter: I) -> Self {
        ElementSet::from_ids(iter)
    }
}

impl Ord for ElementSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.iter().cmp(other.iter())
    }
}

impl PartialOrd for ElementSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for ElementSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, id) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{id}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Display for ElementSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl Serialize for ElementSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for ElementSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let ids = Vec::<u32>::deserialize(deserializer)?;
        for &id in &ids {
            if id as usize >= MAX_GROUND {
                return Err(D::Error::custom(format!("element id {id} out of range")));
            }
        }
        Ok(ElementSet::from_ids(ids))
    }
}

/// Ascending iterator over the ids of an [`ElementSet`].
pub struct Iter {
    rest: u128,
}

impl Iterator for Iter {
    type Item = u32;

    fn next(&mut self) -> Option<u32> {
        if self.rest == 0 {
            return None;
        }
        let id = self.rest.trailing_zeros();
        self.rest &= self.rest - 1;
        Some(id)
    }
}
