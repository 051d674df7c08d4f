//! Small vertex sets packed into a machine word.

use std::cmp::Ordering;
use std::fmt;

/// Maximum number of tree vertices (standard and phantom together).
pub const MAX_VERTICES: usize = 64;

/// A set of vertex indices `0..64`, stored as a bitmask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct VSet(pub u64);

impl VSet {
    pub const EMPTY: VSet = VSet(0);

    pub fn singleton(i: usize) -> VSet {
        VSet(1u64 << i)
    }

    /// The set `{0, .., n-1}`.
    pub fn full(n: usize) -> VSet {
        if n >= 64 {
            VSet(u64::MAX)
        } else {
            VSet((1u64 << n) - 1)
        }
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(it: I) -> VSet {
        it.into_iter().fold(VSet::EMPTY, |s, i| s.with(i))
    }

    #[inline]
    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    #[inline]
    pub fn with(self, i: usize) -> VSet {
        VSet(self.0 | 1u64 << i)
    }

    #[inline]
    pub fn without(self, i: usize) -> VSet {
        VSet(self.0 & !(1u64 << i))
    }

    #[inline]
    pub fn insert(&mut self, i: usize) {
        self.0 |= 1u64 << i;
    }

    #[inline]
    pub fn union(self, o: VSet) -> VSet {
        VSet(self.0 | o.0)
    }

    #[inline]
    pub fn inter(self, o: VSet) -> VSet {
        VSet(self.0 & o.0)
    }

    #[inline]
    pub fn minus(self, o: VSet) -> VSet {
        VSet(self.0 & !o.0)
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    #[inline]
    pub fn is_subset(self, o: VSet) -> bool {
        self.0 & !o.0 == 0
    }

    #[inline]
    pub fn is_disjoint(self, o: VSet) -> bool {
        self.0 & o.0 == 0
    }

    /// Smallest element, if any.
    pub fn first(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    pub fn iter(self) -> Iter {
        Iter(self.0)
    }

    /// All subsets of `self`, including the empty set and `self`.
    pub fn subsets(self) -> Subsets {
        Subsets {
            mask: self.0,
            cur: 0,
            done: false,
        }
    }

    /// Canonical block order: by size, then lexicographically on sorted elements.
    pub fn canonical_cmp(&self, o: &VSet) -> Ordering {
        self.len()
            .cmp(&o.len())
            .then_with(|| self.iter().cmp(o.iter()))
    }
}

impl fmt::Debug for VSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl FromIterator<usize> for VSet {
    fn from_iter<I: IntoIterator<Item = usize>>(it: I) -> Self {
        VSet::from_indices(it)
    }
}

pub struct Iter(u64);

impl Iterator for Iter {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let i = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(i)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Iter {}

pub struct Subsets {
    mask: u64,
    cur: u64,
    done: bool,
}

impl Iterator for Subsets {
    type Item = VSet;

    fn next(&mut self) -> Option<VSet> {
        if self.done {
            return None;
        }
        let out = VSet(self.cur);
        if self.cur == self.mask {
            self.done = true;
        } else {
            self.cur = (self.cur.wrapping_sub(self.mask)) & self.mask;
        }
        Some(out)
    }
}

/// Sort a family of sets into canonical order.
pub fn sort_canonical(sets: &mut [VSet]) {
    sets.sort_by(VSet::canonical_cmp);
}
