use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::model::ItemId;

/// Set of items backed by a bit vector.
///
/// Membership is O(1) and iteration is always in ascending item order.
/// Trailing zero words are trimmed so that equal sets compare equal
/// regardless of how they were built.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct ItemSet {
    words: Vec<u64>,
}

impl ItemSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// The set `{0, .., m-1}`.
    pub fn full(m: usize) -> Self {
        let mut words = vec![u64::MAX; m / 64];
        if !m.is_multiple_of(64) {
            words.push((1u64 << (m % 64)) - 1);
        }
        Self { words }
    }

    pub fn from_mask(mask: u64) -> Self {
        let mut s = Self { words: vec![mask] };
        s.trim();
        s
    }

    /// Low 64 items as a mask; only meaningful when every member is below 64.
    pub fn to_mask(&self) -> u64 {
        debug_assert!(self.words.len() <= 1, "set has members above 63");
        self.words.first().copied().unwrap_or(0)
    }

    pub fn contains(&self, item: ItemId) -> bool {
        let (w, b) = split(item);
        self.words.get(w).is_some_and(|word| word & (1 << b) != 0)
    }

    /// Returns true if the item was newly inserted.
    pub fn insert(&mut self, item: ItemId) -> bool {
        let (w, b) = split(item);
        if self.words.len() <= w {
            self.words.resize(w + 1, 0);
        }
        let fresh = self.words[w] & (1 << b) == 0;
        self.words[w] |= 1 << b;
        fresh
    }

    /// Returns true if the item was present.
    pub fn remove(&mut self, item: ItemId) -> bool {
        let (w, b) = split(item);
        let Some(word) = self.words.get_mut(w) else {
            return false;
        };
        let present = *word & (1 << b) != 0;
        *word &= !(1 << b);
        self.trim();
        present
    }

    pub fn with(&self, item: ItemId) -> Self {
        let mut s = self.clone();
        s.insert(item);
        s
    }

    pub fn without(&self, item: ItemId) -> Self {
        let mut s = self.clone();
        s.remove(item);
        s
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn first(&self) -> Option<ItemId> {
        self.iter().next()
    }

    pub fn iter(&self) -> Iter<'_> {
        Iter {
            words: &self.words,
            index: 0,
            current: self.words.first().copied().unwrap_or(0),
        }
    }

    pub fn union(&self, other: &Self) -> Self {
        let (long, short) = if self.words.len() >= other.words.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut words = long.words.clone();
        for (w, o) in words.iter_mut().zip(&short.words) {
            *w |= o;
        }
        Self { words }
    }

    pub fn intersection(&self, other: &Self) -> Self {
        let mut s = Self {
            words: self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect(),
        };
        s.trim();
        s
    }

    pub fn difference(&self, other: &Self) -> Self {
        let mut s = Self {
            words: self
                .words
                .iter()
                .enumerate()
                .map(|(i, a)| a & !other.words.get(i).copied().unwrap_or(0))
                .collect(),
        };
        s.trim();
        s
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & b == 0)
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.difference(other).is_empty()
    }

    /// One past the largest member, or 0 for the empty set.
    pub fn upper_bound(&self) -> usize {
        match self.words.last() {
            None => 0,
            Some(w) => (self.words.len() - 1) * 64 + (64 - w.leading_zeros() as usize),
        }
    }

    fn trim(&mut self) {
        while self.words.last() == Some(&0) {
            self.words.pop();
        }
    }
}

fn split(item: ItemId) -> (usize, u32) {
    let i = item.index();
    (i / 64, (i % 64) as u32)
}

pub struct Iter<'a> {
    words: &'a [u64],
    index: usize,
    current: u64,
}

impl Iterator for Iter<'_> {
    type Item = ItemId;

    fn next(&mut self) -> Option<ItemId> {
        loop {
            if self.current != 0 {
                let bit = self.current.trailing_zeros() as usize;
                self.current &= self.current - 1;
                return Some(ItemId::new(self.index * 64 + bit));
            }
            self.index += 1;
            self.current = *self.words.get(self.index)?;
        }
    }
}

impl<'a> IntoIterator for &'a ItemSet {
    type Item = ItemId;
    type IntoIter = Iter<'a>;

    fn into_iter(self) -> Iter<'a> {
        self.iter()
    }
}

impl FromIterator<ItemId> for ItemSet {
    fn from_iter<I: IntoIterator<Item = ItemId>>(iter: I) -> Self {
        let mut s = Self::new();
        for item in iter {
            s.insert(item);
        }
        s
    }
}

impl Extend<ItemId> for ItemSet {
    fn extend<I: IntoIterator<Item = ItemId>>(&mut self, iter: I) {
        for item in iter {
            self.insert(item);
        }
    }
}

impl fmt::Debug for ItemSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter().map(|o| o.index())).finish()
    }
}

impl fmt::Display for ItemSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, o) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{o}")?;
        }
        write!(f, "}}")
    }
}

impl Serialize for ItemSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter().map(|o| o.index()))
    }
}

impl<'de> Deserialize<'de> for ItemSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let items = Vec::<usize>::deserialize(deserializer)?;
        let mut set = ItemSet::new();
        for i in items {
            if !set.insert(ItemId::new(i)) {
                return Err(serde::de::Error::custom(format!("duplicate item {i}")));
            }
        }
        Ok(set)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    fn ids(v: &[usize]) -> ItemSet {
        v.iter().map(|&i| ItemId::new(i)).collect()
    }

    #[test]
    fn insert_remove_trims() {
        let mut s = ids(&[3, 130]);
        assert!(s.contains(ItemId::new(130)));
        assert!(s.remove(ItemId::new(130)));
        assert_eq!(s, ids(&[3]));
        assert_eq!(s.upper_bound(), 4);
        assert!(!s.remove(ItemId::new(500)));
    }

    #[test]
    fn full_set() {
        assert_eq!(ItemSet::full(0), ItemSet::new());
        assert_eq!(ItemSet::full(64).len(), 64);
        assert_eq!(ItemSet::full(70).len(), 70);
        assert_eq!(ItemSet::full(70).upper_bound(), 70);
    }

    proptest! {
        #[test]
        fn matches_btreeset(a in prop::collection::btree_set(0usize..200, 0..40),
                            b in prop::collection::btree_set(0usize..200, 0..40)) {
            let sa: ItemSet = a.iter().map(|&i| ItemId::new(i)).collect();
            let sb: ItemSet = b.iter().map(|&i| ItemId::new(i)).collect();
            let got: Vec<usize> = sa.iter().map(|o| o.index()).collect();
            prop_assert_eq!(got, a.iter().copied().collect::<Vec<_>>());
            let u: BTreeSet<usize> = a.union(&b).copied().collect();
            prop_assert_eq!(sa.union(&sb), u.iter().map(|&i| ItemId::new(i)).collect::<ItemSet>());
            let d: BTreeSet<usize> = a.difference(&b).copied().collect();
            prop_assert_eq!(sa.difference(&sb), d.iter().map(|&i| ItemId::new(i)).collect::<ItemSet>());
            let n: BTreeSet<usize> = a.intersection(&b).copied().collect();
            prop_assert_eq!(sa.intersection(&sb), n.iter().map(|&i| ItemId::new(i)).collect::<ItemSet>());
            prop_assert_eq!(sa.is_disjoint(&sb), a.is_disjoint(&b));
            prop_assert_eq!(sa.len(), a.len());
        }
    }
}
