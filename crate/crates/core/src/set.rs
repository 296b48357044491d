//! Fixed-capacity bitsets over the vertex range `0..capacity` of a host graph.

use std::fmt;

use serde::ser::{Serialize, SerializeSeq, Serializer};

const WORD: usize = 64;

#[inline]
fn words_for(cap: usize) -> usize {
    cap.div_ceil(WORD)
}

/// A subset of `0..capacity`, stored as packed 64-bit words.
///
/// Binary operations require both operands to share the same capacity; mixing
/// sets from different host graphs is a logic error and panics.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexSet {
    cap: usize,
    words: Vec<u64>,
}

impl VertexSet {
    pub fn empty(cap: usize) -> Self {
        VertexSet {
            cap,
            words: vec![0; words_for(cap)],
        }
    }

    pub fn full(cap: usize) -> Self {
        let mut s = VertexSet {
            cap,
            words: vec![u64::MAX; words_for(cap)],
        };
        s.trim();
        s
    }

    pub fn singleton(cap: usize, v: usize) -> Self {
        let mut s = Self::empty(cap);
        s.insert(v);
        s
    }

    /// Builds a set from vertex ids, returning the first out-of-range id on failure.
    pub fn try_from_iter<I: IntoIterator<Item = usize>>(cap: usize, it: I) -> Result<Self, usize> {
        let mut s = Self::empty(cap);
        for v in it {
            if v >= cap {
                return Err(v);
            }
            s.insert(v);
        }
        Ok(s)
    }

    /// Builds a set from vertex ids. Panics on an out-of-range id.
    pub fn from_iter_in<I: IntoIterator<Item = usize>>(cap: usize, it: I) -> Self {
        Self::try_from_iter(cap, it).unwrap_or_else(|v| panic!("vertex {v} out of range 0..{cap}"))
    }

    fn trim(&mut self) {
        let rem = self.cap % WORD;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    #[inline]
    pub fn capacity(&self) -> usize {
        self.cap
    }

    #[inline]
    pub fn contains(&self, v: usize) -> bool {
        v < self.cap && self.words[v / WORD] >> (v % WORD) & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, v: usize) -> bool {
        assert!(v < self.cap, "vertex {v} out of range 0..{}", self.cap);
        let w = &mut self.words[v / WORD];
        let bit = 1u64 << (v % WORD);
        let fresh = *w & bit == 0;
        *w |= bit;
        fresh
    }

    #[inline]
    pub fn remove(&mut self, v: usize) -> bool {
        if v >= self.cap {
            return false;
        }
        let w = &mut self.words[v / WORD];
        let bit = 1u64 << (v % WORD);
        let had = *w & bit != 0;
        *w &= !bit;
        had
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn clear(&mut self) {
        self.words.iter_mut().for_each(|w| *w = 0);
    }

    pub fn first(&self) -> Option<usize> {
        self.iter().next()
    }

    pub fn iter(&self) -> Iter<'_> {
        Iter {
            words: &self.words,
            idx: 0,
            cur: self.words.first().copied().unwrap_or(0),
        }
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    #[inline]
    fn check_cap(&self, other: &VertexSet) {
        assert_eq!(
            self.cap, other.cap,
            "vertex sets over different host graphs"
        );
    }

    pub fn union_with(&mut self, other: &VertexSet) {
        self.check_cap(other);
        self.words
            .iter_mut()
            .zip(&other.words)
            .for_each(|(a, b)| *a |= b);
    }

    pub fn intersect_with(&mut self, other: &VertexSet) {
        self.check_cap(other);
        self.words
            .iter_mut()
            .zip(&other.words)
            .for_each(|(a, b)| *a &= b);
    }

    pub fn difference_with(&mut self, other: &VertexSet) {
        self.check_cap(other);
        self.words
            .iter_mut()
            .zip(&other.words)
            .for_each(|(a, b)| *a &= !b);
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        let mut s = self.clone();
        s.union_with(other);
        s
    }

    pub fn intersection(&self, other: &VertexSet) -> VertexSet {
        let mut s = self.clone();
        s.intersect_with(other);
        s
    }

    pub fn difference(&self, other: &VertexSet) -> VertexSet {
        let mut s = self.clone();
        s.difference_with(other);
        s
    }

    /// Complement inside `0..capacity`.
    pub fn complement(&self) -> VertexSet {
        let mut s = VertexSet {
            cap: self.cap,
            words: self.words.iter().map(|w| !w).collect(),
        };
        s.trim();
        s
    }

    pub fn intersection_len(&self, other: &VertexSet) -> usize {
        self.check_cap(other);
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.check_cap(other);
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    pub fn is_disjoint(&self, other: &VertexSet) -> bool {
        self.check_cap(other);
        self.words.iter().zip(&other.words).all(|(a, b)| a & b == 0)
    }

    /// The `count` smallest members.
    pub fn take_lowest(&self, count: usize) -> VertexSet {
        VertexSet::from_iter_in(self.cap, self.iter().take(count))
    }
}

pub struct Iter<'a> {
    words: &'a [u64],
    idx: usize,
    cur: u64,
}

impl Iterator for Iter<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        loop {
            if self.cur != 0 {
                let tz = self.cur.trailing_zeros() as usize;
                self.cur &= self.cur - 1;
                return Some(self.idx * WORD + tz);
            }
            self.idx += 1;
            if self.idx >= self.words.len() {
                return None;
            }
            self.cur = self.words[self.idx];
        }
    }
}

impl<'a> IntoIterator for &'a VertexSet {
    type Item = usize;
    type IntoIter = Iter<'a>;

    fn into_iter(self) -> Iter<'a> {
        self.iter()
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl Serialize for VertexSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.len()))?;
        for v in self.iter() {
            seq.serialize_element(&v)?;
        }
        seq.end()
    }
}
