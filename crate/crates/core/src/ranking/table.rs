//! Token sets and aggregated type tables.

use std::collections::HashMap;
use std::sync::Arc;

use rayon::prelude::*;

use crate::corpus::Corpus;
use crate::ic::IcSet;
use crate::skipgram::{EncodedPiece, SkipConfig, SkipError, SkipToken};
use crate::vlt::{Vlt, VltPattern};
use crate::weighting::{Weigher, WeightKind};

/// Chord identity without its incoming interval.
pub type ChordShape = (IcSet, u8);

fn shape(v: &Vlt) -> ChordShape {
    (v.intervals(), v.top_ic())
}

/// Chord-shape frequencies over the raw slice sequence of a corpus.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SequenceMarginals {
    pub counts: HashMap<ChordShape, f64>,
    pub total: f64,
}

impl SequenceMarginals {
    pub fn from_pieces(pieces: &[EncodedPiece]) -> Self {
        let mut m = SequenceMarginals::default();
        for p in pieces {
            for v in &p.vlts {
                *m.counts.entry(shape(v)).or_default() += 1.0;
                m.total += 1.0;
            }
        }
        m
    }

    pub fn get(&self, v: &Vlt) -> f64 {
        self.counts.get(&shape(v)).copied().unwrap_or(0.0)
    }
}

/// All tokens of one skip configuration, interned by type.
///
/// Types are numbered in order of first appearance, scanning pieces in
/// corpus order, so ids and every downstream sum are reproducible.
#[derive(Debug, Clone)]
pub struct TokenSet {
    n: usize,
    n_compositions: usize,
    types: Arc<Vec<VltPattern>>,
    coverage: Arc<Vec<u32>>,
    token_types: Vec<u32>,
    token_pieces: Vec<u32>,
    /// Performed onsets, `n` per token; empty when unavailable.
    onsets: Vec<f64>,
    sequence: Option<Arc<SequenceMarginals>>,
}

struct PieceTokens {
    types: Vec<VltPattern>,
    token_types: Vec<u32>,
    onsets: Vec<f64>,
}

impl TokenSet {
    /// Enumerates and interns every token of the corpus under `config`.
    pub fn from_corpus(corpus: &Corpus, config: &SkipConfig) -> Result<Self, SkipError> {
        let pieces: Vec<EncodedPiece> = corpus.pieces.par_iter().map(EncodedPiece::new).collect();
        Self::from_encoded(&pieces, config)
    }

    pub fn from_encoded(pieces: &[EncodedPiece], config: &SkipConfig) -> Result<Self, SkipError> {
        config.validate()?;
        let n = config.n;
        let per_piece = pieces
            .par_iter()
            .map(|piece| {
                let mut local: HashMap<VltPattern, u32> = HashMap::new();
                let mut out = PieceTokens {
                    types: Vec::new(),
                    token_types: Vec::new(),
                    onsets: Vec::new(),
                };
                piece.for_each_tuple(config, |idx| {
                    let key = piece.type_key(idx);
                    let next = out.types.len() as u32;
                    let id = *local.entry(key).or_insert_with_key(|k| {
                        out.types.push(k.clone());
                        next
                    });
                    out.token_types.push(id);
                    if let Some(o) = &piece.onsets_perf {
                        out.onsets.extend(idx.iter().map(|&i| o[i]));
                    }
                })?;
                Ok(out)
            })
            .collect::<Result<Vec<_>, SkipError>>()?;

        let mut index: HashMap<VltPattern, u32> = HashMap::new();
        let mut types = Vec::new();
        let mut coverage: Vec<u32> = Vec::new();
        let mut token_types = Vec::new();
        let mut token_pieces = Vec::new();
        let mut onsets = Vec::new();
        let all_have_onsets = pieces.iter().all(|p| p.onsets_perf.is_some());
        for (pi, pt) in per_piece.into_iter().enumerate() {
            let map: Vec<u32> = pt
                .types
                .into_iter()
                .map(|k| {
                    let next = types.len() as u32;
                    let id = *index.entry(k).or_insert_with_key(|k| {
                        types.push(k.clone());
                        coverage.push(0);
                        next
                    });
                    // Each local type is new to this piece exactly once.
                    coverage[id as usize] += 1;
                    id
                })
                .collect();
            token_pieces.extend(std::iter::repeat_n(pi as u32, pt.token_types.len()));
            token_types.extend(pt.token_types.into_iter().map(|t| map[t as usize]));
            if all_have_onsets {
                onsets.extend(pt.onsets);
            }
        }
        Ok(TokenSet {
            n,
            n_compositions: pieces.len(),
            types: Arc::new(types),
            coverage: Arc::new(coverage),
            token_types,
            token_pieces,
            onsets,
            sequence: Some(Arc::new(SequenceMarginals::from_pieces(pieces))),
        })
    }

    /// Interns already materialised tokens, e.g. a hand-written fixture.
    pub fn from_tokens(n: usize, tokens: &[SkipToken], n_compositions: usize) -> Self {
        let mut index: HashMap<VltPattern, u32> = HashMap::new();
        let mut types = Vec::new();
        let mut pieces_of: Vec<Vec<usize>> = Vec::new();
        let mut token_types = Vec::new();
        let mut token_pieces = Vec::new();
        let mut onsets = Vec::new();
        let all_have_onsets = tokens.iter().all(|t| t.onsets_perf.is_some());
        for t in tokens {
            assert_eq!(t.type_key.len(), n, "token cardinality mismatch");
            let next = types.len() as u32;
            let id = *index.entry(t.type_key.clone()).or_insert_with(|| {
                types.push(t.type_key.clone());
                pieces_of.push(Vec::new());
                next
            });
            let seen = &mut pieces_of[id as usize];
            if !seen.contains(&t.piece) {
                seen.push(t.piece);
            }
            token_types.push(id);
            token_pieces.push(t.piece as u32);
            if all_have_onsets {
                onsets.extend(t.onsets_perf.as_ref().expect("checked").iter());
            }
        }
        TokenSet {
            n,
            n_compositions,
            types: Arc::new(types),
            coverage: Arc::new(pieces_of.iter().map(|p| p.len() as u32).collect()),
            token_types,
            token_pieces,
            onsets,
            sequence: None,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn n_tokens(&self) -> usize {
        self.token_types.len()
    }

    pub fn n_types(&self) -> usize {
        self.types.len()
    }

    pub fn n_compositions(&self) -> usize {
        self.n_compositions
    }

    pub fn types(&self) -> &[VltPattern] {
        &self.types
    }

    pub fn token_type(&self, token: usize) -> usize {
        self.token_types[token] as usize
    }

    pub fn token_piece(&self, token: usize) -> usize {
        self.token_pieces[token] as usize
    }

    pub fn has_onsets(&self) -> bool {
        self.n_tokens() == 0 || !self.onsets.is_empty()
    }

    pub fn token_onsets(&self, token: usize) -> Option<&[f64]> {
        if self.onsets.is_empty() {
            None
        } else {
            Some(&self.onsets[token * self.n..(token + 1) * self.n])
        }
    }

    /// Number of tokens of each type.
    pub fn type_frequencies(&self) -> Vec<usize> {
        let mut f = vec![0usize; self.n_types()];
        for &t in &self.token_types {
            f[t as usize] += 1;
        }
        f
    }

    /// Per-token weights plus the number of degenerate tokens.
    ///
    /// Panics if `kind` needs onsets the set does not carry.
    pub fn weights(&self, kind: WeightKind, weigher: &Weigher) -> (Vec<f64>, usize) {
        if !kind.needs_onsets() {
            return (vec![1.0; self.n_tokens()], 0);
        }
        assert!(
            self.has_onsets(),
            "weighting by {kind} needs performed onsets"
        );
        let w: Vec<(f64, bool)> = self
            .onsets
            .par_chunks(self.n)
            .map(|o| {
                let w = weigher.weigh(kind, o);
                (w.value, w.degenerate)
            })
            .collect();
        let degenerate = w.iter().filter(|x| x.1).count();
        (w.into_iter().map(|x| x.0).collect(), degenerate)
    }
}

/// Aggregated (weighted) counts for every type of a token set.
#[derive(Debug, Clone)]
pub struct TypeTable {
    n: usize,
    n_compositions: usize,
    total: f64,
    types: Arc<Vec<VltPattern>>,
    index: HashMap<VltPattern, usize>,
    coverage: Arc<Vec<u32>>,
    counts: Vec<f64>,
    /// `n` per type: f(chord_i) for each position.
    marginals: Vec<f64>,
    /// `n - 1` per type: f(chord_1..chord_i) for split i.
    prefixes: Vec<f64>,
    /// `n - 1` per type: f(chord_{i+1}..chord_n) for split i.
    suffixes: Vec<f64>,
    sequence: Option<Arc<SequenceMarginals>>,
}

impl TypeTable {
    /// Sums token weights per type and derives every positional and split
    /// component count from the type counts.
    pub fn build(tokens: &TokenSet, weights: &[f64]) -> Self {
        assert_eq!(weights.len(), tokens.n_tokens());
        let n = tokens.n;
        let nt = tokens.n_types();
        let mut counts = vec![0.0; nt];
        for (&t, &w) in tokens.token_types.iter().zip(weights) {
            counts[t as usize] += w;
        }
        let total: f64 = counts.iter().sum();
        let types = &tokens.types;

        let mut marginals = vec![0.0; nt * n];
        for pos in 0..n {
            let mut sums: HashMap<&Vlt, f64> = HashMap::new();
            for (t, key) in types.iter().enumerate() {
                *sums.entry(&key.chords()[pos]).or_default() += counts[t];
            }
            for (t, key) in types.iter().enumerate() {
                marginals[t * n + pos] = sums[&key.chords()[pos]];
            }
        }

        let splits = n.saturating_sub(1);
        let mut prefixes = vec![0.0; nt * splits];
        let mut suffixes = vec![0.0; nt * splits];
        for i in 1..n {
            let mut pre: HashMap<&[Vlt], f64> = HashMap::new();
            let mut suf: HashMap<&[Vlt], f64> = HashMap::new();
            for (t, key) in types.iter().enumerate() {
                *pre.entry(&key.chords()[..i]).or_default() += counts[t];
                *suf.entry(&key.chords()[i..]).or_default() += counts[t];
            }
            for (t, key) in types.iter().enumerate() {
                prefixes[t * splits + i - 1] = pre[&key.chords()[..i]];
                suffixes[t * splits + i - 1] = suf[&key.chords()[i..]];
            }
        }

        let index = types
            .iter()
            .enumerate()
            .map(|(i, k)| (k.clone(), i))
            .collect();
        TypeTable {
            n,
            n_compositions: tokens.n_compositions,
            total,
            types: Arc::clone(&tokens.types),
            index,
            coverage: Arc::clone(&tokens.coverage),
            counts,
            marginals,
            prefixes,
            suffixes,
            sequence: tokens.sequence.clone(),
        }
    }

    /// Convenience for unweighted (indicator) counts.
    pub fn build_counts(tokens: &TokenSet) -> Self {
        Self::build(tokens, &vec![1.0; tokens.n_tokens()])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.types.len()
    }

    pub fn is_empty(&self) -> bool {
        self.types.is_empty()
    }

    /// N: total weighted token count.
    pub fn total(&self) -> f64 {
        self.total
    }

    /// C: number of compositions in the corpus.
    pub fn n_compositions(&self) -> usize {
        self.n_compositions
    }

    pub fn key(&self, id: usize) -> &VltPattern {
        &self.types[id]
    }

    pub fn keys(&self) -> &[VltPattern] {
        &self.types
    }

    pub fn id_of(&self, key: &VltPattern) -> Option<usize> {
        self.index.get(key).copied()
    }

    pub fn count(&self, id: usize) -> f64 {
        self.counts[id]
    }

    /// Number of compositions containing at least one token of the type.
    pub fn coverage_count(&self, id: usize) -> usize {
        self.coverage[id] as usize
    }

    pub fn coverage(&self, id: usize) -> f64 {
        if self.n_compositions == 0 {
            0.0
        } else {
            self.coverage[id] as f64 / self.n_compositions as f64
        }
    }

    /// f(chord_pos) over tokens, 0-based position.
    pub fn marginal(&self, id: usize, pos: usize) -> f64 {
        self.marginals[id * self.n + pos]
    }

    pub fn marginals(&self, id: usize) -> &[f64] {
        &self.marginals[id * self.n..(id + 1) * self.n]
    }

    /// f(chord_1..chord_split), `1 <= split < n`.
    pub fn prefix(&self, id: usize, split: usize) -> f64 {
        self.prefixes[id * (self.n - 1) + split - 1]
    }

    /// f(chord_{split+1}..chord_n), `1 <= split < n`.
    pub fn suffix(&self, id: usize, split: usize) -> f64 {
        self.suffixes[id * (self.n - 1) + split - 1]
    }

    pub fn sequence_marginals(&self) -> Option<&SequenceMarginals> {
        self.sequence.as_deref()
    }
}
