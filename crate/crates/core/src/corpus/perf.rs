//! Performed (clock-time) onsets for slices.

use std::collections::HashMap;

use num_rational::Rational64;

use super::{beats_f64 as to_f64, CorpusError, NoteEvent, Slice};

/// Seconds per beat used for score-only pieces (100 BPM).
pub const NOMINAL_SECONDS_PER_BEAT: f64 = 60.0 / 100.0;

/// Renders score onsets at the nominal tempo.
pub fn assign_nominal_onsets(slices: &mut [Slice]) {
    for s in slices {
        s.onset_perf = Some(to_f64(s.onset_score) * NOMINAL_SECONDS_PER_BEAT);
    }
}

/// Gives every slice a performed onset.
///
/// A slice whose onset coincides with attacked notes carrying performed
/// times takes the earliest of them. Other slices are interpolated linearly
/// in score time between the neighbouring anchored slices, or extrapolated
/// from the two nearest anchors at either end.
pub fn assign_performed_onsets(
    piece_id: &str,
    notes: &[NoteEvent],
    slices: &mut [Slice],
) -> Result<(), CorpusError> {
    let mut earliest: HashMap<Rational64, f64> = HashMap::new();
    for n in notes {
        if let Some(p) = n.perf {
            earliest
                .entry(n.onset_score)
                .and_modify(|e| *e = e.min(p.onset))
                .or_insert(p.onset);
        }
    }
    let anchors: Vec<(usize, f64, f64)> = slices
        .iter()
        .enumerate()
        .filter_map(|(i, s)| {
            earliest
                .get(&s.onset_score)
                .map(|&p| (i, to_f64(s.onset_score), p))
        })
        .collect();
    if anchors.len() < 2 {
        return Err(CorpusError::InsufficientAnchors {
            piece: piece_id.to_string(),
        });
    }
    if anchors.windows(2).any(|w| w[1].2 < w[0].2) {
        return Err(CorpusError::NonMonotonePerformance {
            piece: piece_id.to_string(),
        });
    }

    let mut seg = 0;
    for (i, s) in slices.iter_mut().enumerate() {
        while seg + 2 < anchors.len() && anchors[seg + 1].0 <= i {
            seg += 1;
        }
        let (ai, ax, ay) = anchors[seg];
        let (bi, bx, by) = anchors[seg + 1];
        s.onset_perf = Some(if i == ai {
            ay
        } else if i == bi {
            by
        } else {
            let x = to_f64(s.onset_score);
            ay + (x - ax) / (bx - ax) * (by - ay)
        });
    }
    Ok(())
}
