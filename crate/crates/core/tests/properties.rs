use std::collections::BTreeSet;

use num_rational::Rational64;
use proptest::prelude::*;

use vlpatterns::corpus::{expand, NoteEvent};
use vlpatterns::evaluation::compare_groups;
use vlpatterns::filters::{filter_both, filter_frequency, filter_harmony, SimilarityRule};
use vlpatterns::ic::IcSet;
use vlpatterns::ranking::{g5_split, rank, MarginalSource, Measure, TokenSet, TypeTable};
use vlpatterns::skipgram::{
    enumerate_fixed_skip, enumerate_variable_skip, for_each_tuple, SkipConfig, SkipToken,
};
use vlpatterns::vlt::{encode_vlt, parse_pattern, Vlt, VltPattern};
use vlpatterns::weighting::{Weigher, WeightKind};

fn r(x: i64) -> Rational64 {
    Rational64::new(x, 2)
}

/// Notes on a half-beat grid.
fn notes() -> impl Strategy<Value = Vec<NoteEvent>> {
    prop::collection::vec((0i64..24, 1i64..8, 30u8..90), 1..25).prop_map(|v| {
        v.into_iter()
            .map(|(on, dur, p)| NoteEvent::new(r(on), r(dur), p))
            .collect()
    })
}

fn increasing_onsets(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.01f64..2.0, 0..max_len).prop_map(|iois| {
        let mut t = 0.0;
        iois.into_iter()
            .map(|d| {
                t += d;
                t
            })
            .collect()
    })
}

fn chord() -> impl Strategy<Value = Vlt> {
    (
        prop::collection::btree_set(1i32..12, 0..=3),
        any::<prop::sample::Index>(),
        0u8..12,
    )
        .prop_map(|(ics, pick, inc)| {
            let s = IcSet::from_semitones(ics.iter().copied());
            let members: Vec<u8> = ics.iter().map(|&i| i as u8).collect();
            let top = if members.is_empty() {
                0
            } else {
                members[pick.index(members.len())]
            };
            Vlt::new(s, top, Some(inc)).unwrap()
        })
}

fn pattern(n: usize) -> impl Strategy<Value = VltPattern> {
    prop::collection::vec(chord(), n).prop_map(|c| VltPattern::new(c).unwrap())
}

/// Random tokens over a small pool of 3-chord types.
fn token_set() -> impl Strategy<Value = TokenSet> {
    (
        prop::collection::vec(pattern(3), 1..8),
        prop::collection::vec((any::<prop::sample::Index>(), 0usize..4), 1..60),
    )
        .prop_map(|(pool, picks)| {
            let toks: Vec<SkipToken> = picks
                .into_iter()
                .map(|(i, piece)| SkipToken {
                    piece,
                    indices: vec![0, 1, 2],
                    onsets_perf: None,
                    onsets_score: vec![],
                    type_key: pool[i.index(pool.len())].clone(),
                })
                .collect();
            TokenSet::from_tokens(3, &toks, 4)
        })
}

fn encode(notes: &[NoteEvent]) -> Vec<Vlt> {
    let s = expand(notes);
    (0..s.len())
        .map(|i| encode_vlt(i.checked_sub(1).map(|j| &s[j]), &s[i]))
        .collect()
}

proptest! {
    #[test]
    fn expansion_matches_brute_force(notes in notes()) {
        let slices = expand(&notes);
        let onsets: BTreeSet<Rational64> = notes.iter().map(|n| n.onset_score).collect();
        prop_assert_eq!(slices.len(), onsets.len());
        for (s, t) in slices.iter().zip(&onsets) {
            prop_assert_eq!(s.onset_score, *t);
            let sounding: BTreeSet<u8> = notes
                .iter()
                .filter(|n| n.onset_score <= *t && *t < n.onset_score + n.duration_score)
                .map(|n| n.pitch)
                .collect();
            prop_assert_eq!(s.pitches().to_vec(), sounding.into_iter().collect::<Vec<_>>());
        }
    }

    #[test]
    fn expansion_ignores_input_order(notes in notes(), seed in any::<u64>()) {
        let mut shuffled = notes.clone();
        let len = shuffled.len();
        for i in (1..len).rev() {
            shuffled.swap(i, (seed as usize).wrapping_mul(i + 7) % (i + 1));
        }
        prop_assert_eq!(expand(&notes), expand(&shuffled));
    }

    #[test]
    fn encoding_is_transposition_invariant(notes in notes(), k in -24i32..=24) {
        let moved: Vec<NoteEvent> = notes
            .iter()
            .map(|n| NoteEvent::new(n.onset_score, n.duration_score, (n.pitch as i32 + k) as u8))
            .collect();
        prop_assert_eq!(encode(&notes), encode(&moved));
    }

    #[test]
    fn encoding_is_time_shift_invariant(notes in notes(), shift in 0i64..40) {
        let moved: Vec<NoteEvent> = notes
            .iter()
            .map(|n| NoteEvent::new(n.onset_score + r(shift), n.duration_score, n.pitch))
            .collect();
        prop_assert_eq!(encode(&notes), encode(&moved));
    }

    #[test]
    fn fixed_skip_matches_filtered_combinations(k in 0usize..16, n in 1usize..5, t in 0usize..10) {
        let all = enumerate_fixed_skip(k, n, None);
        let expected: Vec<Vec<usize>> = all
            .into_iter()
            .filter(|c| c[n - 1] - c[0] + 1 - n <= t)
            .collect();
        prop_assert_eq!(enumerate_fixed_skip(k, n, Some(t)), expected);
    }

    #[test]
    fn token_count_grows_with_budget(k in 0usize..20, n in 1usize..5, t in 0usize..8) {
        let count = |t| {
            let mut c = 0usize;
            for_each_tuple(k, None, &SkipConfig::fixed(n, t), |_| c += 1);
            c
        };
        prop_assert!(count(t) <= count(t + 1));
    }

    #[test]
    fn token_count_grows_with_window(onsets in increasing_onsets(20), n in 1usize..5, w in 0.0f64..3.0) {
        let a = enumerate_variable_skip(&onsets, n, w);
        let b = enumerate_variable_skip(&onsets, n, w + 0.5);
        prop_assert!(a.len() <= b.len());
        let wide: BTreeSet<Vec<usize>> = b.into_iter().collect();
        prop_assert!(a.iter().all(|x| wide.contains(x)));
    }

    #[test]
    fn weights_lie_in_unit_interval(onsets in increasing_onsets(7)) {
        let w = Weigher::default();
        for kind in WeightKind::ALL {
            let v = w.weigh(kind, &onsets).value;
            prop_assert!((0.0..=1.0).contains(&v), "{} = {}", kind, v);
        }
    }

    #[test]
    fn weights_are_time_shift_invariant(onsets in increasing_onsets(7), shift in 0.0f64..500.0) {
        let w = Weigher::default();
        let moved: Vec<f64> = onsets.iter().map(|o| o + shift).collect();
        for kind in WeightKind::ALL {
            let (a, b) = (w.weigh(kind, &onsets).value, w.weigh(kind, &moved).value);
            prop_assert!((a - b).abs() < 1e-6, "{}: {} vs {}", kind, a, b);
        }
    }

    #[test]
    fn patterns_round_trip(p in (1usize..6).prop_flat_map(pattern)) {
        let text = p.to_string();
        prop_assert_eq!(parse_pattern(&text).unwrap(), p);
    }

    #[test]
    fn pattern_parser_never_panics(text in "[<>\\[\\]0-9,*_ ]{0,40}") {
        if let Ok(p) = parse_pattern(&text) {
            prop_assert_eq!(parse_pattern(&p.to_string()).unwrap(), p);
        }
    }

    #[test]
    fn split_tables_are_consistent(tokens in token_set()) {
        let table = TypeTable::build_counts(&tokens);
        let n = table.total();
        for id in 0..table.len() {
            for split in 1..3 {
                let c = g5_split(&table, id, split).unwrap();
                for cell in [c.o11, c.o12, c.o21, c.o22] {
                    prop_assert!(cell >= 0.0);
                }
                prop_assert!((c.o11 + c.o12 + c.o21 + c.o22 - n).abs() < 1e-9);
                prop_assert_eq!(c.o11, table.count(id));
            }
        }
    }

    #[test]
    fn ranks_survive_weight_scaling(tokens in token_set(), e in -3i32..4) {
        let ones = vec![1.0; tokens.n_tokens()];
        let scaled = vec![2f64.powi(e); tokens.n_tokens()];
        let a = TypeTable::build(&tokens, &ones);
        let b = TypeTable::build(&tokens, &scaled);
        let ids: Vec<usize> = (0..a.len()).collect();
        for m in Measure::ALL {
            let ra = rank(&a, &ids, m, MarginalSource::Positional).unwrap();
            let rb = rank(&b, &ids, m, MarginalSource::Positional).unwrap();
            let key = |l: &vlpatterns::ranking::RankedList| -> Vec<(usize, usize)> {
                l.entries.iter().map(|e| (e.id, e.rank)).collect()
            };
            prop_assert_eq!(key(&ra), key(&rb), "{}", m);
        }
    }

    #[test]
    fn comparison_is_antisymmetric(
        a in prop::collection::vec(0.0f64..=1.0, 2..30),
        b in prop::collection::vec(0.0f64..=1.0, 2..30),
    ) {
        let ab = compare_groups(&a, &b, 6);
        let ba = compare_groups(&b, &a, 6);
        prop_assert!((ab.delta + ba.delta).abs() < 1e-12);
        prop_assert!((ab.d + ba.d).abs() < 1e-9);
        match (ab.t, ba.t) {
            (Some(x), Some(y)) => prop_assert!((x + y).abs() < 1e-9),
            (x, y) => prop_assert_eq!(x.is_none(), y.is_none()),
        }
        if let (Some(p), Some(q)) = (ab.p, ba.p) {
            prop_assert!((p - q).abs() < 1e-12);
            prop_assert!((0.0..=1.0).contains(&p));
        }
    }

    #[test]
    fn both_filter_is_the_intersection(tokens in token_set(), th in 0.0f64..20.0) {
        let table = TypeTable::build_counts(&tokens);
        for rule in [SimilarityRule::SharedInterval, SimilarityRule::IdenticalSet] {
            let freq: BTreeSet<usize> = filter_frequency(&table, th).into_iter().collect();
            let harm: BTreeSet<usize> = filter_harmony(&table, rule).into_iter().collect();
            let both: BTreeSet<usize> = filter_both(&table, th, rule).into_iter().collect();
            prop_assert_eq!(&both, &freq.intersection(&harm).copied().collect());
            prop_assert_eq!(&both, &harm.intersection(&freq).copied().collect());
        }
    }
}
