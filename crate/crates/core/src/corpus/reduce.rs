//! Replacement of sonorities with more than three interval classes above
//! the bass.
//!
//! An oversized set is replaced by the most common chord (≤3 classes) whose
//! classes form a subset of it. Reference populations are searched in order:
//! the five slices either side, the whole piece, the whole corpus. Within a
//! population the candidate with the most classes wins, then the most
//! frequent, then the lexicographically smallest.

use std::collections::HashMap;

use rayon::prelude::*;

use super::{closest_member, Corpus};
use crate::ic::IcSet;
use crate::vlt::MAX_INTERVALS;

/// Radius of the local context, in slices.
pub const CONTEXT_RADIUS: usize = 5;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ReductionReport {
    pub total_slices: usize,
    pub replaced: usize,
    /// (piece id, slice index) of replacements that found no candidate and
    /// kept the three lowest classes.
    pub fallbacks: Vec<(String, usize)>,
}

impl ReductionReport {
    pub fn replaced_fraction(&self) -> f64 {
        if self.total_slices == 0 {
            0.0
        } else {
            self.replaced as f64 / self.total_slices as f64
        }
    }
}

/// Occurrence counts of interval-class sets.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct IcFrequencies(HashMap<IcSet, usize>);

impl IcFrequencies {
    pub fn add(&mut self, s: IcSet) {
        *self.0.entry(s).or_default() += 1;
    }

    pub fn add_count(&mut self, s: IcSet, count: usize) {
        *self.0.entry(s).or_default() += count;
    }

    pub fn get(&self, s: IcSet) -> usize {
        self.0.get(&s).copied().unwrap_or(0)
    }

    pub fn merge(&mut self, other: &IcFrequencies) {
        for (&s, &c) in &other.0 {
            self.add_count(s, c);
        }
    }

    /// Best non-empty subset of `target` present in this population.
    pub fn best_subset_of(&self, target: IcSet) -> Option<IcSet> {
        self.0
            .iter()
            .filter(|(s, _)| !s.is_empty() && s.len() <= MAX_INTERVALS && s.is_subset(target))
            .max_by(|a, b| {
                a.0.len()
                    .cmp(&b.0.len())
                    .then(a.1.cmp(b.1))
                    .then(b.0.cmp(a.0))
            })
            .map(|(&s, _)| s)
    }
}

/// Tries each population in turn and returns the first candidate found.
pub fn choose_reduction(target: IcSet, populations: &[&IcFrequencies]) -> Option<IcSet> {
    populations.iter().find_map(|p| p.best_subset_of(target))
}

/// Reduces every oversized slice of the corpus in place.
pub fn reduce_oversized(corpus: &mut Corpus) -> ReductionReport {
    let sets: Vec<Vec<IcSet>> = corpus
        .pieces
        .par_iter()
        .map(|p| p.slices.iter().map(|s| s.raw_interval_classes()).collect())
        .collect();

    let piece_freqs: Vec<IcFrequencies> = sets
        .iter()
        .map(|piece| {
            let mut f = IcFrequencies::default();
            for &s in piece.iter().filter(|s| s.len() <= MAX_INTERVALS) {
                f.add(s);
            }
            f
        })
        .collect();
    let mut corpus_freq = IcFrequencies::default();
    for f in &piece_freqs {
        corpus_freq.merge(f);
    }

    let mut report = ReductionReport {
        total_slices: corpus.n_slices(),
        ..Default::default()
    };

    for (pi, piece) in corpus.pieces.iter_mut().enumerate() {
        let piece_sets = &sets[pi];
        for i in 0..piece.slices.len() {
            let target = piece_sets[i];
            if target.len() <= MAX_INTERVALS {
                continue;
            }
            let lo = i.saturating_sub(CONTEXT_RADIUS);
            let hi = (i + CONTEXT_RADIUS).min(piece_sets.len() - 1);
            let mut local = IcFrequencies::default();
            for (j, &s) in piece_sets.iter().enumerate().take(hi + 1).skip(lo) {
                if j != i && s.len() <= MAX_INTERVALS {
                    local.add(s);
                }
            }
            let chosen = choose_reduction(target, &[&local, &piece_freqs[pi], &corpus_freq]);
            let reduced = match chosen {
                Some(s) => s,
                None => {
                    report.fallbacks.push((piece.id.clone(), i));
                    target.lowest(MAX_INTERVALS)
                }
            };
            let slice = &mut piece.slices[i];
            let top = slice.top_interval();
            let top = if top == 0 || reduced.contains(top) {
                top
            } else {
                closest_member(reduced, top)
            };
            slice.set_reduction(reduced, top);
            report.replaced += 1;
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Piece, Slice, Timing};
    use num_rational::Rational64;

    fn set(v: &[i32]) -> IcSet {
        IcSet::from_semitones(v.iter().copied())
    }

    fn freqs(entries: &[(&[i32], usize)]) -> IcFrequencies {
        let mut f = IcFrequencies::default();
        for (s, c) in entries {
            f.add_count(set(s), *c);
        }
        f
    }

    /// Enumerates every subset of `target` and picks by (cardinality,
    /// frequency, lexicographic) without going through `best_subset_of`.
    fn brute_force(target: IcSet, f: &IcFrequencies) -> Option<IcSet> {
        let mut best: Option<(usize, usize, Vec<u8>)> = None;
        for k in (1..=3).rev() {
            for sub in target.subsets_of_len(k) {
                let c = f.get(sub);
                if c == 0 {
                    continue;
                }
                let cand = (k, c, sub.to_vec());
                best = match best {
                    None => Some(cand),
                    Some(b) => {
                        if (cand.0, cand.1) > (b.0, b.1)
                            || ((cand.0, cand.1) == (b.0, b.1) && cand.2 < b.2)
                        {
                            Some(cand)
                        } else {
                            Some(b)
                        }
                    }
                };
            }
        }
        best.map(|b| IcSet::from_semitones(b.2.iter().map(|&x| x as i32)))
    }

    #[test]
    fn dominant_seventh_with_added_note() {
        let f = freqs(&[(&[4, 7, 10], 6), (&[4, 7], 9), (&[4, 11], 2)]);
        assert_eq!(
            f.best_subset_of(set(&[4, 7, 10, 11])),
            Some(set(&[4, 7, 10]))
        );
    }

    #[test]
    fn maximal_cardinality_then_lexicographic() {
        let f = freqs(&[(&[4, 7], 5), (&[2, 7, 9], 2), (&[4, 7, 9], 2)]);
        let target = set(&[2, 4, 7, 9]);
        assert_eq!(f.best_subset_of(target), Some(set(&[2, 7, 9])));
        assert_eq!(brute_force(target, &f), Some(set(&[2, 7, 9])));
    }

    #[test]
    fn matches_brute_force_on_many_fixtures() {
        // Deterministic pseudo-random fixtures.
        let mut x: u32 = 12345;
        let mut next = || {
            x ^= x << 13;
            x ^= x >> 17;
            x ^= x << 5;
            x
        };
        for _ in 0..500 {
            let mut f = IcFrequencies::default();
            for _ in 0..(next() % 8) {
                let bits = (next() as u16) & 0x0ffe;
                let s = IcSet::from_bits(bits);
                if s.len() <= 3 {
                    f.add_count(s, (next() % 4 + 1) as usize);
                }
            }
            let mut t = IcSet::from_bits((next() as u16) & 0x0ffe);
            while t.len() < 4 {
                t.insert((next() % 11 + 1) as u8);
            }
            assert_eq!(f.best_subset_of(t), brute_force(t, &f), "{t:?}");
        }
    }

    fn piece(chords: &[&[u8]]) -> Piece {
        Piece {
            id: "p".into(),
            slices: chords
                .iter()
                .enumerate()
                .map(|(i, c)| Slice::new(i, Rational64::from_integer(i as i64), c.to_vec()))
                .collect(),
            timing: Timing::Nominal,
        }
    }

    #[test]
    fn reduces_in_context_and_keeps_small_chords() {
        // G7 voicings around an oversized G7 with an added F#.
        let mut corpus = Corpus {
            pieces: vec![piece(&[
                &[43, 59, 62, 65],     // <4,7,10>
                &[43, 59, 62, 65, 66], // <4,7,10,11>, top 11
                &[48, 64, 67],         // <4,7>
            ])],
        };
        let report = reduce_oversized(&mut corpus);
        assert_eq!(report.replaced, 1);
        assert_eq!(report.total_slices, 3);
        let s = &corpus.pieces[0].slices[1];
        assert_eq!(s.interval_classes(), set(&[4, 7, 10]));
        // Top (11) was dropped: moves to the closest retained class, 10.
        assert_eq!(s.top_interval(), 10);
        assert!(!corpus.pieces[0].slices[2].is_reduced());
        assert!(report.replaced_fraction() < 0.34);
    }

    #[test]
    fn falls_back_when_nothing_fits() {
        let mut corpus = Corpus {
            pieces: vec![piece(&[&[48, 50, 52, 53, 55]])],
        };
        let report = reduce_oversized(&mut corpus);
        assert_eq!(report.fallbacks, vec![("p".to_string(), 0)]);
        assert_eq!(
            corpus.pieces[0].slices[0].interval_classes(),
            set(&[2, 4, 5])
        );
    }

    #[test]
    fn population_order_prefers_local_context() {
        let mut chords: Vec<&[u8]> = vec![&[48, 52, 55, 58, 59]]; // <4,7,10,11>
        chords.extend(std::iter::repeat_n(&[48u8, 52, 55][..], 3)); // local <4,7>
        chords.extend(std::iter::repeat_n(&[48u8, 52, 58, 59][..], 10)); // far <4,10,11>
        let mut corpus = Corpus {
            pieces: vec![piece(&chords)],
        };
        reduce_oversized(&mut corpus);
        // Indices 1..=5 are local: three <4,7> and two <4,10,11>; the
        // three-class candidate wins on cardinality.
        assert_eq!(
            corpus.pieces[0].slices[0].interval_classes(),
            set(&[4, 10, 11])
        );
    }
}
