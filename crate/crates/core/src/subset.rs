//! Bit-indexed subsets of a finite ground set `{0, .., n-1}`.

use std::cmp::Ordering;
use std::fmt;

use serde::de::{Deserializer, Error as _, SeqAccess, Visitor};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported ground set. One machine word holds every subset.
pub const MAX_GROUND: usize = 63;

/// A subset of the ground set, one bit per element.
///
/// The total order is the canonical one used everywhere ties must be broken:
/// first by cardinality, then by the ascending element list compared
/// lexicographically.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Subset(u64);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    pub const fn from_bits(bits: u64) -> Self {
        Subset(bits)
    }

    pub const fn bits(self) -> u64 {
        self.0
    }

    pub fn singleton(e: usize) -> Self {
        assert!(e < 64, "element {e} does not fit a 64-bit subset");
        Subset(1 << e)
    }

    /// `{0, .., n-1}`.
    pub fn full(n: usize) -> Self {
        assert!(n <= 64);
        if n == 64 {
            Subset(u64::MAX)
        } else {
            Subset((1u64 << n) - 1)
        }
    }

    pub fn from_elements<I: IntoIterator<Item = usize>>(elements: I) -> Self {
        elements
            .into_iter()
            .fold(Subset::EMPTY, |acc, e| acc.with(e))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, e: usize) -> bool {
        e < 64 && self.0 >> e & 1 == 1
    }

    pub fn with(self, e: usize) -> Self {
        Subset(self.0 | Subset::singleton(e).0)
    }

    pub fn is_subset_of(self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: Subset) -> bool {
        self.0 & other.0 == 0
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

    /// Largest element plus one, or 0 for the empty set.
    pub fn span(self) -> usize {
        64 - self.0.leading_zeros() as usize
    }

    pub fn iter(self) -> Elements {
        Elements(self.0)
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }

    /// All subsets of `self`, starting from the empty set.
    pub fn subsets(self) -> SubsetsOf {
        SubsetsOf {
            set: self.0,
            next: Some(0),
        }
    }
}

impl Ord for Subset {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| {
            let diff = self.0 ^ other.0;
            if diff == 0 {
                Ordering::Equal
            } else if self.0 & (diff & diff.wrapping_neg()) != 0 {
                // lowest differing element belongs to self
                Ordering::Less
            } else {
                Ordering::Greater
            }
        })
    }
}

impl PartialOrd for Subset {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
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
        for (i, e) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str("}")
    }
}

impl FromIterator<usize> for Subset {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        Subset::from_elements(iter)
    }
}

pub struct Elements(u64);

impl Iterator for Elements {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let e = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(e)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Elements {}

/// Carry-rippler walk over every subset of a fixed set.
pub struct SubsetsOf {
    set: u64,
    next: Option<u64>,
}

impl Iterator for SubsetsOf {
    type Item = Subset;

    fn next(&mut self) -> Option<Subset> {
        let cur = self.next?;
        let succ = cur.wrapping_sub(self.set) & self.set;
        self.next = (succ != 0).then_some(succ);
        Some(Subset(cur))
    }
}

/// Every `k`-subset of `{0, .., n-1}` in increasing bit order (Gosper's hack).
pub fn k_subsets(n: usize, k: usize) -> impl Iterator<Item = Subset> {
    assert!(n <= MAX_GROUND);
    let limit = 1u64 << n;
    let first = if k > n { None } else { Some(Subset::full(k).0) };
    std::iter::successors(first, move |&x| {
        if x == 0 {
            return None;
        }
        let c = x & x.wrapping_neg();
        let r = x + c;
        let next = (((r ^ x) >> 2) / c) | r;
        (next < limit).then_some(next)
    })
    .map(Subset)
}

/// The ground set `X = {0, .., n-1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroundSet {
    n: usize,
}

impl GroundSet {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyGround);
        }
        if n > MAX_GROUND {
            return Err(Error::GroundTooLarge { n, max: MAX_GROUND });
        }
        Ok(GroundSet { n })
    }

    pub fn size(self) -> usize {
        self.n
    }

    pub fn full(self) -> Subset {
        Subset::full(self.n)
    }

    pub fn contains(self, s: Subset) -> bool {
        s.span() <= self.n
    }
}

impl Serialize for Subset {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.len()))?;
        for e in self.iter() {
            seq.serialize_element(&e)?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for Subset {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct SubsetVisitor;

        impl<'de> Visitor<'de> for SubsetVisitor {
            type Value = Subset;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an array of element indices")
            }

            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> std::result::Result<Subset, A::Error> {
                let mut s = Subset::EMPTY;
                while let Some(e) = seq.next_element::<usize>()? {
                    if e >= MAX_GROUND {
                        return Err(A::Error::custom(format!(
                            "element {e} exceeds the maximum index {}",
                            MAX_GROUND - 1
                        )));
                    }
                    s = s.with(e);
                }
                Ok(s)
            }
        }

        deserializer.deserialize_seq(SubsetVisitor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &[usize]) -> Subset {
        Subset::from_elements(v.iter().copied())
    }

    #[test]
    fn canonical_order_is_size_then_lexicographic() {
        let mut v = vec![s(&[1, 2]), s(&[0]), s(&[0, 3]), s(&[]), s(&[0, 1, 2]), s(&[2])];
        v.sort();
        assert_eq!(
            v,
            vec![s(&[]), s(&[0]), s(&[2]), s(&[0, 3]), s(&[1, 2]), s(&[0, 1, 2])]
        );
    }

    #[test]
    fn set_algebra() {
        let a = s(&[0, 1, 4]);
        let b = s(&[1, 2]);
        assert_eq!(a.union(b), s(&[0, 1, 2, 4]));
        assert_eq!(a.intersection(b), s(&[1]));
        assert_eq!(a.difference(b), s(&[0, 4]));
        assert!(s(&[1]).is_subset_of(b));
        assert!(Subset::EMPTY.is_subset_of(Subset::EMPTY));
        assert_eq!(a.span(), 5);
        assert_eq!(a.to_string(), "{0,1,4}");
    }

    #[test]
    fn subsets_of_walks_the_power_set() {
        let all: Vec<_> = s(&[0, 2, 5]).subsets().collect();
        assert_eq!(all.len(), 8);
        assert_eq!(all[0], Subset::EMPTY);
        assert_eq!(Subset::EMPTY.subsets().count(), 1);
    }

    #[test]
    fn k_subsets_counts_binomials() {
        assert_eq!(k_subsets(6, 0).count(), 1);
        assert_eq!(k_subsets(6, 2).count(), 15);
        assert_eq!(k_subsets(6, 6).count(), 1);
        assert_eq!(k_subsets(3, 4).count(), 0);
        assert!(k_subsets(7, 3).all(|x| x.len() == 3 && x.span() <= 7));
    }

    #[test]
    fn ground_set_bounds() {
        assert_eq!(GroundSet::new(0), Err(Error::EmptyGround));
        assert!(matches!(GroundSet::new(64), Err(Error::GroundTooLarge { .. })));
        assert_eq!(GroundSet::new(63).unwrap().full().len(), 63);
    }

    #[test]
    fn serde_as_element_list() {
        let json = serde_json::to_string(&s(&[3, 0])).unwrap();
        assert_eq!(json, "[0,3]");
        let back: Subset = serde_json::from_str("[3,0,3]").unwrap();
        assert_eq!(back, s(&[0, 3]));
        assert!(serde_json::from_str::<Subset>("[63]").is_err());
    }
}
