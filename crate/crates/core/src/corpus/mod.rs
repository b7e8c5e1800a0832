//! Note-event corpora, full expansion into vertical slices, and the
//! preparation steps that make slices ready for VLT encoding.

mod expand;
mod parse;
mod perf;
mod reduce;

use std::path::Path;

use num_rational::Rational64;
use rayon::prelude::*;
use thiserror::Error;

use crate::ic::{ic_distance, IcSet};
use crate::vlt::{encode_vlt, Vlt};

pub use expand::expand;
pub use parse::{parse_corpus, parse_rational, read_corpus_path, ParseWarning, ParsedCorpus};
pub use perf::{assign_nominal_onsets, assign_performed_onsets, NOMINAL_SECONDS_PER_BEAT};
pub use reduce::{reduce_oversized, IcFrequencies, ReductionReport};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{source_name}:{line}: {msg}")]
    Parse {
        source_name: String,
        line: usize,
        msg: String,
    },
    #[error("corpus is empty")]
    Empty,
    #[error("piece {piece}: insufficient performance anchors")]
    InsufficientAnchors { piece: String },
    #[error("piece {piece}: performed onsets are not monotone with score onsets")]
    NonMonotonePerformance { piece: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// One note, with score time in beats and optional performed time in seconds.
#[derive(Debug, Clone, PartialEq)]
pub struct NoteEvent {
    pub onset_score: Rational64,
    pub duration_score: Rational64,
    pub pitch: u8,
    pub perf: Option<PerformedTime>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerformedTime {
    pub onset: f64,
    pub duration: f64,
}

impl NoteEvent {
    pub fn new(onset: Rational64, duration: Rational64, pitch: u8) -> Self {
        NoteEvent {
            onset_score: onset,
            duration_score: duration,
            pitch,
            perf: None,
        }
    }

    pub fn with_perf(mut self, onset: f64, duration: f64) -> Self {
        self.perf = Some(PerformedTime { onset, duration });
        self
    }

    pub fn offset_score(&self) -> Rational64 {
        self.onset_score + self.duration_score
    }

    /// Half-open sounding test.
    pub fn sounds_at(&self, t: Rational64) -> bool {
        self.onset_score <= t && t < self.offset_score()
    }
}

/// Notes of one piece, sorted by score onset.
#[derive(Debug, Clone, PartialEq)]
pub struct NotePiece {
    pub id: String,
    pub notes: Vec<NoteEvent>,
}

/// A vertical sonority produced by full expansion.
#[derive(Debug, Clone, PartialEq)]
pub struct Slice {
    pub index: usize,
    pub onset_score: Rational64,
    pub onset_perf: Option<f64>,
    pitches: Vec<u8>,
    reduced: Option<(IcSet, u8)>,
}

impl Slice {
    /// Panics on an empty pitch list.
    pub fn new(index: usize, onset_score: Rational64, mut pitches: Vec<u8>) -> Self {
        assert!(!pitches.is_empty(), "a slice needs at least one pitch");
        pitches.sort_unstable();
        pitches.dedup();
        Slice {
            index,
            onset_score,
            onset_perf: None,
            pitches,
            reduced: None,
        }
    }

    pub fn pitches(&self) -> &[u8] {
        &self.pitches
    }

    pub fn bass(&self) -> u8 {
        self.pitches[0]
    }

    pub fn top(&self) -> u8 {
        *self.pitches.last().expect("non-empty")
    }

    pub fn pitch_classes(&self) -> Vec<u8> {
        let mut pcs: Vec<u8> = self.pitches.iter().map(|p| p % 12).collect();
        pcs.sort_unstable();
        pcs.dedup();
        pcs
    }

    /// Distinct non-zero interval classes above the bass as sounded.
    pub fn raw_interval_classes(&self) -> IcSet {
        let bass = self.bass() as i32;
        IcSet::from_semitones(self.pitches.iter().map(|&p| p as i32 - bass))
    }

    /// Interval classes above the bass, after reduction when one was applied.
    pub fn interval_classes(&self) -> IcSet {
        match self.reduced {
            Some((s, _)) => s,
            None => self.raw_interval_classes(),
        }
    }

    /// Interval class of the top voice above the bass (0 = doubles the bass).
    pub fn top_interval(&self) -> u8 {
        match self.reduced {
            Some((_, t)) => t,
            None => ((self.top() as i32 - self.bass() as i32).rem_euclid(12)) as u8,
        }
    }

    pub fn is_reduced(&self) -> bool {
        self.reduced.is_some()
    }

    pub(crate) fn set_reduction(&mut self, s: IcSet, top: u8) {
        self.reduced = Some((s, top));
    }
}

/// How a piece's performed onsets were obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Timing {
    /// Interpolated from performed note onsets.
    Performed,
    /// No performance data; rendered at a fixed 100 BPM.
    Nominal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Piece {
    pub id: String,
    pub slices: Vec<Slice>,
    pub timing: Timing,
}

impl Piece {
    /// VLT sequence of the piece; the first chord has no incoming interval.
    pub fn encode(&self) -> Vec<Vlt> {
        self.slices
            .iter()
            .enumerate()
            .map(|(i, s)| encode_vlt(i.checked_sub(1).map(|j| &self.slices[j]), s))
            .collect()
    }

    pub fn perf_onsets(&self) -> Option<Vec<f64>> {
        self.slices.iter().map(|s| s.onset_perf).collect()
    }
}

/// An expanded corpus, ready for encoding.
#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    pub pieces: Vec<Piece>,
}

impl Corpus {
    pub fn n_compositions(&self) -> usize {
        self.pieces.len()
    }

    pub fn n_slices(&self) -> usize {
        self.pieces.iter().map(|p| p.slices.len()).sum()
    }
}

/// Statistics gathered while preparing a corpus.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PrepareReport {
    pub reduction: ReductionReport,
    /// Pieces rendered at the nominal tempo for lack of performance data.
    pub nominal_pieces: Vec<String>,
}

/// Expands every piece, assigns performed onsets, and reduces oversized
/// sonorities. Pieces are processed in parallel and returned in input order.
pub fn prepare(parsed: &ParsedCorpus) -> Result<(Corpus, PrepareReport), CorpusError> {
    if parsed.pieces.is_empty() {
        return Err(CorpusError::Empty);
    }
    let pieces = parsed
        .pieces
        .par_iter()
        .map(prepare_piece)
        .collect::<Result<Vec<_>, _>>()?;
    let mut corpus = Corpus { pieces };
    let reduction = reduce_oversized(&mut corpus);
    let nominal_pieces = corpus
        .pieces
        .iter()
        .filter(|p| p.timing == Timing::Nominal)
        .map(|p| p.id.clone())
        .collect();
    Ok((
        corpus,
        PrepareReport {
            reduction,
            nominal_pieces,
        },
    ))
}

fn prepare_piece(piece: &NotePiece) -> Result<Piece, CorpusError> {
    let mut slices = expand(&piece.notes);
    let timing = if piece.notes.iter().any(|n| n.perf.is_some()) {
        assign_performed_onsets(&piece.id, &piece.notes, &mut slices)?;
        Timing::Performed
    } else {
        assign_nominal_onsets(&mut slices);
        Timing::Nominal
    };
    Ok(Piece {
        id: piece.id.clone(),
        slices,
        timing,
    })
}

/// Reads a file or directory and prepares it in one step.
pub fn load(path: &Path) -> Result<(Corpus, PrepareReport, Vec<ParseWarning>), CorpusError> {
    let parsed = read_corpus_path(path)?;
    let (corpus, report) = prepare(&parsed)?;
    Ok((corpus, report, parsed.warnings))
}

/// Score time as a float.
pub fn beats_f64(r: Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// The member of `s` closest to `target` on the pitch-class circle; ties go
/// to the smaller interval class. Returns 0 for an empty set.
pub fn closest_member(s: IcSet, target: u8) -> u8 {
    s.iter()
        .min_by_key(|&ic| (ic_distance(ic, target), ic))
        .unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closest_member_prefers_smaller_on_tie() {
        let s = IcSet::from_semitones([4, 10]);
        assert_eq!(closest_member(s, 7), 4);
        assert_eq!(closest_member(s, 11), 10);
        assert_eq!(closest_member(IcSet::EMPTY, 3), 0);
    }

    #[test]
    fn prepare_rejects_empty() {
        let parsed = ParsedCorpus {
            pieces: vec![],
            warnings: vec![],
        };
        assert!(matches!(prepare(&parsed), Err(CorpusError::Empty)));
    }

    #[test]
    fn score_only_piece_gets_nominal_timing() {
        let parsed = parse_corpus("p\t0\t1\t60\np\t1\t1\t64\n".as_bytes(), "t").unwrap();
        let (corpus, report) = prepare(&parsed).unwrap();
        assert_eq!(corpus.pieces[0].timing, Timing::Nominal);
        assert_eq!(report.nominal_pieces, vec!["p".to_string()]);
        assert_eq!(corpus.pieces[0].slices[1].onset_perf, Some(0.6));
    }
}
