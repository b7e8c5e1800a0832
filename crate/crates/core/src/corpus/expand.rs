use num_rational::Rational64;

use super::{NoteEvent, Slice};

/// Full expansion: one slice per distinct onset, holding every note that
/// sounds at that onset under half-open intervals.
pub fn expand(notes: &[NoteEvent]) -> Vec<Slice> {
    let mut order: Vec<&NoteEvent> = notes.iter().collect();
    order.sort_by_key(|n| n.onset_score);

    let mut onsets: Vec<Rational64> = order.iter().map(|n| n.onset_score).collect();
    onsets.dedup();

    let mut slices = Vec::with_capacity(onsets.len());
    let mut active: Vec<&NoteEvent> = Vec::new();
    let mut next = 0;
    for (index, &t) in onsets.iter().enumerate() {
        active.retain(|n| n.offset_score() > t);
        while next < order.len() && order[next].onset_score == t {
            active.push(order[next]);
            next += 1;
        }
        let pitches = active.iter().map(|n| n.pitch).collect();
        slices.push(Slice::new(index, t, pitches));
    }
    slices
}
