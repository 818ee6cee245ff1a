//! Bitmask-encoded subsets of a ground set `{0, .., n-1}`, `n <= 63`.

use std::fmt;

use serde::de::Deserializer;
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

/// Largest supported ground set.
pub const MAX_ELEMENTS: usize = 63;

#[derive(Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Subset(u64);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    pub const fn from_bits(bits: u64) -> Self {
        Subset(bits)
    }

    pub const fn bits(self) -> u64 {
        self.0
    }

    pub fn full(n: usize) -> Self {
        debug_assert!(n <= MAX_ELEMENTS);
        if n == 0 {
            Subset(0)
        } else {
            Subset(u64::MAX >> (64 - n))
        }
    }

    pub fn singleton(i: usize) -> Self {
        Subset(1 << i)
    }

    pub fn contains(self, i: usize) -> bool {
        i < 64 && self.0 >> i & 1 == 1
    }

    pub fn with(self, i: usize) -> Self {
        Subset(self.0 | 1 << i)
    }

    pub fn without(self, i: usize) -> Self {
        Subset(self.0 & !(1 << i))
    }

    pub fn union(self, other: Subset) -> Self {
        Subset(self.0 | other.0)
    }

    pub fn intersection(self, other: Subset) -> Self {
        Subset(self.0 & other.0)
    }

    pub fn difference(self, other: Subset) -> Self {
        Subset(self.0 & !other.0)
    }

    pub fn is_subset_of(self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: Subset) -> bool {
        self.0 & other.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    /// Highest element index plus one (0 for the empty set).
    pub fn span_len(self) -> usize {
        64 - self.0.leading_zeros() as usize
    }

    pub fn iter(self) -> Elements {
        Elements(self.0)
    }

    /// All subsets of `self`, in increasing bitmask order, including `EMPTY` and `self`.
    pub fn subsets(self) -> Submasks {
        Submasks {
            mask: self.0,
            next: Some(0),
        }
    }

    /// All subsets of `{0, .., n-1}` in increasing bitmask order.
    pub fn all(n: usize) -> impl Iterator<Item = Subset> {
        (0..1u64 << n).map(Subset)
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }
}

impl FromIterator<usize> for Subset {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        iter.into_iter().fold(Subset::EMPTY, Subset::with)
    }
}

impl<'a> FromIterator<&'a usize> for Subset {
    fn from_iter<I: IntoIterator<Item = &'a usize>>(iter: I) -> Self {
        iter.into_iter().copied().collect()
    }
}

pub struct Elements(u64);

impl Iterator for Elements {
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
        let c = self.0.count_ones() as usize;
        (c, Some(c))
    }
}

impl ExactSizeIterator for Elements {}

pub struct Submasks {
    mask: u64,
    next: Option<u64>,
}

impl Iterator for Submasks {
    type Item = Subset;

    fn next(&mut self) -> Option<Subset> {
        let cur = self.next?;
        self.next = if cur == self.mask {
            None
        } else {
            // next submask in increasing order
            Some(((cur | !self.mask).wrapping_add(1)) & self.mask)
        };
        Some(Subset(cur))
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, i) in self.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{i}")?;
        }
        f.write_str("}")
    }
}

impl Serialize for Subset {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.len()))?;
        for i in self.iter() {
            seq.serialize_element(&i)?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for Subset {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let items: Vec<usize> = Vec::deserialize(d)?;
        if let Some(&bad) = items.iter().find(|&&i| i >= MAX_ELEMENTS) {
            return Err(serde::de::Error::custom(format!(
                "element {bad} exceeds the {MAX_ELEMENTS}-element cap"
            )));
        }
        Ok(items.into_iter().collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn set_algebra() {
        let a: Subset = [0, 2, 3].iter().collect();
        let b: Subset = [2, 4].iter().collect();
        assert_eq!(a.union(b).to_vec(), vec![0, 2, 3, 4]);
        assert_eq!(a.intersection(b).to_vec(), vec![2]);
        assert_eq!(a.difference(b).to_vec(), vec![0, 3]);
        assert_eq!(a.len(), 3);
        assert_eq!(a.to_string(), "{0,2,3}");
        assert_eq!(Subset::full(3).to_vec(), vec![0, 1, 2]);
        assert_eq!(Subset::full(0), Subset::EMPTY);
        assert_eq!(Subset::full(63).len(), 63);
    }

    proptest! {
        #[test]
        fn submasks_enumerate_every_subset_once(bits in 0u64..(1 << 10)) {
            let s = Subset::from_bits(bits);
            let subs: Vec<Subset> = s.subsets().collect();
            prop_assert_eq!(subs.len(), 1usize << s.len());
            prop_assert!(subs.windows(2).all(|w| w[0] < w[1]));
            prop_assert!(subs.iter().all(|t| t.is_subset_of(s)));
        }

        #[test]
        fn json_round_trip(bits in any::<u64>().prop_map(|b| b >> 1)) {
            let s = Subset::from_bits(bits);
            let text = serde_json::to_string(&s).unwrap();
            let back: Subset = serde_json::from_str(&text).unwrap();
            prop_assert_eq!(s, back);
        }
    }
}
