//! Interval-class sets above the bass.

use std::cmp::Ordering;
use std::fmt;

/// A set of non-zero interval classes (1..=11), stored as a bitmask.
///
/// Ordering is lexicographic over the ascending element lists, so
/// `{2,7,9} < {4,7,9}` and `{4} < {4,7}`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct IcSet(u16);

impl IcSet {
    pub const EMPTY: IcSet = IcSet(0);

    /// Builds a set from arbitrary semitone values. Values are reduced mod 12
    /// and unisons/octaves (class 0) are dropped.
    pub fn from_semitones<I: IntoIterator<Item = i32>>(values: I) -> Self {
        let mut bits = 0u16;
        for v in values {
            let ic = v.rem_euclid(12);
            if ic != 0 {
                bits |= 1 << ic;
            }
        }
        IcSet(bits)
    }

    pub fn from_bits(bits: u16) -> Self {
        IcSet(bits & 0x0ffe)
    }

    pub fn bits(self) -> u16 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, ic: u8) -> bool {
        ic < 12 && ic != 0 && self.0 & (1 << ic) != 0
    }

    pub fn insert(&mut self, ic: u8) {
        if ic != 0 && ic < 12 {
            self.0 |= 1 << ic;
        }
    }

    pub fn is_subset(self, other: IcSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn intersects(self, other: IcSet) -> bool {
        self.0 & other.0 != 0
    }

    /// Ascending iteration over the members.
    pub fn iter(self) -> impl Iterator<Item = u8> {
        (1u8..12).filter(move |&ic| self.0 & (1 << ic) != 0)
    }

    pub fn to_vec(self) -> Vec<u8> {
        self.iter().collect()
    }

    /// The `k` smallest members.
    pub fn lowest(self, k: usize) -> IcSet {
        let mut out = IcSet::EMPTY;
        for ic in self.iter().take(k) {
            out.insert(ic);
        }
        out
    }

    /// All subsets with exactly `k` members, in no particular order.
    pub fn subsets_of_len(self, k: usize) -> impl Iterator<Item = IcSet> {
        let full = self.0;
        // Enumerate submasks of `full`.
        let mut sub = full;
        let mut done = false;
        std::iter::from_fn(move || loop {
            if done {
                return None;
            }
            let cur = sub;
            if sub == 0 {
                done = true;
            } else {
                sub = (sub - 1) & full;
            }
            if cur.count_ones() as usize == k {
                return Some(IcSet(cur));
            }
        })
    }
}

impl Ord for IcSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.iter().cmp(other.iter())
    }
}

impl PartialOrd for IcSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for IcSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Circular distance between two interval classes.
pub fn ic_distance(a: u8, b: u8) -> u8 {
    let d = (a as i32 - b as i32).rem_euclid(12) as u8;
    d.min(12 - d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn drops_unisons_and_duplicates() {
        let s = IcSet::from_semitones([4, 16, 12, 0, 7, -5]);
        assert_eq!(s.to_vec(), vec![4, 7]);
    }

    #[test]
    fn lexicographic_order() {
        let a = IcSet::from_semitones([2, 7, 9]);
        let b = IcSet::from_semitones([4, 7, 9]);
        let c = IcSet::from_semitones([4]);
        let d = IcSet::from_semitones([4, 7]);
        assert!(a < b);
        assert!(c < d);
        assert!(d < b);
    }

    #[test]
    fn subsets() {
        let s = IcSet::from_semitones([2, 4, 7, 9]);
        let mut threes: Vec<_> = s.subsets_of_len(3).map(|x| x.to_vec()).collect();
        threes.sort();
        assert_eq!(
            threes,
            vec![vec![2, 4, 7], vec![2, 4, 9], vec![2, 7, 9], vec![4, 7, 9]]
        );
        assert_eq!(s.subsets_of_len(0).count(), 1);
        assert_eq!(s.subsets_of_len(4).count(), 1);
    }

    #[test]
    fn distance_wraps() {
        assert_eq!(ic_distance(11, 1), 2);
        assert_eq!(ic_distance(4, 10), 6);
        assert_eq!(ic_distance(7, 7), 0);
    }
}
