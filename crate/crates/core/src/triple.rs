use std::fmt;

use serde::{Deserialize, Serialize};

/// An ordered triple of atom indices.
///
/// The derived ordering is lexicographic, which coincides with the
/// `a·n² + b·n + c` slot order for a fixed `n`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Triple {
    pub a: usize,
    pub b: usize,
    pub c: usize,
}

impl Triple {
    pub const fn new(a: usize, b: usize, c: usize) -> Self {
        Triple { a, b, c }
    }

    #[inline]
    pub fn index(self, n: usize) -> usize {
        (self.a * n + self.b) * n + self.c
    }

    #[inline]
    pub fn from_index(idx: usize, n: usize) -> Self {
        Triple::new(idx / (n * n), (idx / n) % n, idx % n)
    }

    pub fn max_atom(self) -> usize {
        self.a.max(self.b).max(self.c)
    }

    pub fn map(self, f: impl Fn(usize) -> usize) -> Self {
        Triple::new(f(self.a), f(self.b), f(self.c))
    }

    pub fn as_array(self) -> [usize; 3] {
        [self.a, self.b, self.c]
    }
}

impl fmt::Debug for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.a, self.b, self.c)
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl From<(usize, usize, usize)> for Triple {
    fn from((a, b, c): (usize, usize, usize)) -> Self {
        Triple::new(a, b, c)
    }
}

/// A subset of `U³` stored as an `n³`-slot bit-vector.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TripleSet {
    n: usize,
    words: Vec<u64>,
}

impl TripleSet {
    pub fn empty(n: usize) -> Self {
        let slots = n * n * n;
        TripleSet {
            n,
            words: vec![0; slots.div_ceil(64)],
        }
    }

    pub fn from_triples(n: usize, triples: impl IntoIterator<Item = Triple>) -> Self {
        let mut set = TripleSet::empty(n);
        for t in triples {
            set.insert(t);
        }
        set
    }

    /// Number of atoms of the ambient universe.
    pub fn atoms(&self) -> usize {
        self.n
    }

    pub fn slots(&self) -> usize {
        self.n * self.n * self.n
    }

    #[inline]
    pub fn contains_index(&self, idx: usize) -> bool {
        self.words[idx >> 6] >> (idx & 63) & 1 == 1
    }

    #[inline]
    pub fn contains(&self, a: usize, b: usize, c: usize) -> bool {
        self.contains_index((a * self.n + b) * self.n + c)
    }

    #[inline]
    pub fn contains_triple(&self, t: Triple) -> bool {
        self.contains(t.a, t.b, t.c)
    }

    #[inline]
    pub fn insert_index(&mut self, idx: usize) {
        self.words[idx >> 6] |= 1 << (idx & 63);
    }

    #[inline]
    pub fn insert(&mut self, t: Triple) {
        self.insert_index(t.index(self.n));
    }

    #[inline]
    pub fn remove(&mut self, t: Triple) {
        let idx = t.index(self.n);
        self.words[idx >> 6] &= !(1 << (idx & 63));
    }

    pub fn union_with(&mut self, other: &TripleSet) {
        assert_eq!(self.n, other.n, "triple sets over different universes");
        for (w, o) in self.words.iter_mut().zip(&other.words) {
            *w |= o;
        }
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Slot indices of the members, ascending.
    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let bit = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + bit)
            })
        })
    }

    /// Members in ascending slot order.
    pub fn iter(&self) -> impl Iterator<Item = Triple> + '_ {
        let n = self.n;
        self.indices().map(move |i| Triple::from_index(i, n))
    }
}

impl fmt::Debug for TripleSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_layout() {
        let n = 5;
        let t = Triple::new(2, 3, 4);
        assert_eq!(t.index(n), 2 * 25 + 3 * 5 + 4);
        assert_eq!(Triple::from_index(t.index(n), n), t);
    }

    #[test]
    fn iteration_is_ascending() {
        let set = TripleSet::from_triples(4, [(3, 0, 0).into(), (0, 1, 2).into(), (1, 3, 3).into()]);
        let got: Vec<_> = set.iter().collect();
        let mut sorted = got.clone();
        sorted.sort();
        assert_eq!(got, sorted);
        assert_eq!(set.len(), 3);
    }

    #[test]
    fn insert_remove() {
        let mut set = TripleSet::empty(3);
        assert!(set.is_empty());
        set.insert(Triple::new(2, 2, 2));
        assert!(set.contains(2, 2, 2));
        set.remove(Triple::new(2, 2, 2));
        assert!(set.is_empty());
    }
}
