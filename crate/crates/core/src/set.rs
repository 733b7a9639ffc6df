//! Compact index sets used for species subsets, complex supports and
//! facet incidences.

use std::cmp::Ordering;
use std::fmt;

use smallvec::SmallVec;

const WORD: usize = 64;

/// A finite set of indices stored as a bitmask.
///
/// Sets of up to 128 elements live inline. Two sets compare equal when they
/// hold the same elements regardless of their allocated width.
#[derive(Clone, Default)]
pub struct IndexSet {
    words: SmallVec<[u64; 2]>,
}

impl IndexSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(bits: usize) -> Self {
        let mut words = SmallVec::new();
        words.resize(bits.div_ceil(WORD), 0);
        IndexSet { words }
    }

    pub fn singleton(i: usize) -> Self {
        let mut s = Self::with_capacity(i + 1);
        s.insert(i);
        s
    }

    /// The full set `{0, .., n-1}`.
    pub fn full(n: usize) -> Self {
        (0..n).collect()
    }

    pub fn insert(&mut self, i: usize) -> bool {
        let (w, b) = (i / WORD, i % WORD);
        if w >= self.words.len() {
            self.words.resize(w + 1, 0);
        }
        let had = self.words[w] & (1 << b) != 0;
        self.words[w] |= 1 << b;
        !had
    }

    pub fn remove(&mut self, i: usize) -> bool {
        let (w, b) = (i / WORD, i % WORD);
        match self.words.get_mut(w) {
            Some(word) => {
                let had = *word & (1 << b) != 0;
                *word &= !(1 << b);
                had
            }
            None => false,
        }
    }

    pub fn with(&self, i: usize) -> Self {
        let mut s = self.clone();
        s.insert(i);
        s
    }

    pub fn without(&self, i: usize) -> Self {
        let mut s = self.clone();
        s.remove(i);
        s
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        self.words
            .get(i / WORD)
            .is_some_and(|w| w & (1 << (i % WORD)) != 0)
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    #[inline]
    pub fn intersects(&self, other: &IndexSet) -> bool {
        self.words
            .iter()
            .zip(other.words.iter())
            .any(|(a, b)| a & b != 0)
    }

    #[inline]
    pub fn is_subset(&self, other: &IndexSet) -> bool {
        self.words.iter().enumerate().all(|(k, &a)| {
            let b = other.words.get(k).copied().unwrap_or(0);
            a & !b == 0
        })
    }

    pub fn is_superset(&self, other: &IndexSet) -> bool {
        other.is_subset(self)
    }

    pub fn union(&self, other: &IndexSet) -> IndexSet {
        let (long, short) = if self.words.len() >= other.words.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut out = long.clone();
        for (k, w) in short.words.iter().enumerate() {
            out.words[k] |= w;
        }
        out
    }

    pub fn union_with(&mut self, other: &IndexSet) {
        if other.words.len() > self.words.len() {
            self.words.resize(other.words.len(), 0);
        }
        for (k, w) in other.words.iter().enumerate() {
            self.words[k] |= w;
        }
    }

    pub fn intersection(&self, other: &IndexSet) -> IndexSet {
        let words = self
            .words
            .iter()
            .zip(other.words.iter())
            .map(|(a, b)| a & b)
            .collect();
        IndexSet { words }
    }

    pub fn difference(&self, other: &IndexSet) -> IndexSet {
        let words = self
            .words
            .iter()
            .enumerate()
            .map(|(k, a)| a & !other.words.get(k).copied().unwrap_or(0))
            .collect();
        IndexSet { words }
    }

    /// Complement relative to `{0, .., n-1}`.
    pub fn complement(&self, n: usize) -> IndexSet {
        IndexSet::full(n).difference(self)
    }

    pub fn first(&self) -> Option<usize> {
        self.iter().next()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(k * WORD + b)
                }
            })
        })
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    fn significant(&self) -> &[u64] {
        let mut n = self.words.len();
        while n > 0 && self.words[n - 1] == 0 {
            n -= 1;
        }
        &self.words[..n]
    }
}

impl PartialEq for IndexSet {
    fn eq(&self, other: &Self) -> bool {
        self.significant() == other.significant()
    }
}

impl Eq for IndexSet {}

impl std::hash::Hash for IndexSet {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.significant().hash(state);
    }
}

/// Canonical order: by size, then lexicographically on the sorted element
/// lists.
impl Ord for IndexSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.iter().cmp(other.iter()))
    }
}

impl PartialOrd for IndexSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl FromIterator<usize> for IndexSet {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        let mut s = IndexSet::new();
        for i in iter {
            s.insert(i);
        }
        s
    }
}

impl fmt::Debug for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Keeps only the inclusion-minimal members of `family`, sorted canonically
/// and without duplicates.
pub fn inclusion_minimal(mut family: Vec<IndexSet>) -> Vec<IndexSet> {
    family.sort();
    family.dedup();
    let mut kept: Vec<IndexSet> = Vec::with_capacity(family.len());
    for set in family {
        // sorted by size, so any subset of `set` is already in `kept`
        if !kept.iter().any(|k| k.is_subset(&set)) {
            kept.push(set);
        }
    }
    kept
}
