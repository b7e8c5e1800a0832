//! Scoring and ordering of n-gram types.
//!
//! Counts and association measures read a [`TypeTable`]. Bigram measures
//! built on 2x2 tables are extended to longer types by averaging over every
//! prefix/suffix split of the type.

mod contingency;
mod table;

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

pub use contingency::{Contingency2x2, InvariantViolation};
pub use table::{ChordShape, SequenceMarginals, TokenSet, TypeTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Measure {
    Counts,
    Pmi,
    PmiLocal,
    PmiCoverage,
    Dice,
    Chi2,
    G2,
}

impl Measure {
    pub const ALL: [Measure; 7] = [
        Measure::Counts,
        Measure::Pmi,
        Measure::PmiLocal,
        Measure::PmiCoverage,
        Measure::Dice,
        Measure::Chi2,
        Measure::G2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Measure::Counts => "counts",
            Measure::Pmi => "pmi",
            Measure::PmiLocal => "pmi-local",
            Measure::PmiCoverage => "pmi-cov",
            Measure::Dice => "dice",
            Measure::Chi2 => "chi2",
            Measure::G2 => "g2",
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Measure {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Measure::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown rank measure '{s}'"))
    }
}

/// Where P(chord_i) comes from for pMI and Dice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MarginalSource {
    /// The i-th element of each token in the same token list.
    #[default]
    Positional,
    /// Chord-shape frequencies in the raw slice sequence, ignoring the
    /// incoming interval.
    Sequence,
}

impl FromStr for MarginalSource {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "positional" => Ok(MarginalSource::Positional),
            "sequence" => Ok(MarginalSource::Sequence),
            other => Err(format!("unknown marginal source '{other}'")),
        }
    }
}

/// Component probabilities and counts for a type, from the chosen source.
fn component_counts(table: &TypeTable, id: usize, src: MarginalSource) -> Option<(Vec<f64>, f64)> {
    match src {
        MarginalSource::Positional => Some((table.marginals(id).to_vec(), table.total())),
        MarginalSource::Sequence => {
            let seq = table.sequence_marginals()?;
            let m = table.key(id).chords().iter().map(|v| seq.get(v)).collect();
            Some((m, seq.total))
        }
    }
}

fn pmi_with(table: &TypeTable, id: usize, src: MarginalSource) -> Option<f64> {
    let n = table.total();
    let f = table.count(id);
    if !(f > 0.0 && n > 0.0) {
        return None;
    }
    let (marg, denom) = component_counts(table, id, src)?;
    if marg.iter().any(|&m| m <= 0.0) || denom <= 0.0 {
        return None;
    }
    let log_indep: f64 = marg.iter().map(|&m| (m / denom).log2()).sum();
    Some((f / n).log2() - log_indep)
}

/// log2( P(T) / prod P(chord_i) ).
pub fn am_pmi(table: &TypeTable, id: usize) -> Option<f64> {
    pmi_with(table, id, MarginalSource::Positional)
}

/// P(T) * pMI(T).
pub fn am_pmi_local(table: &TypeTable, id: usize) -> Option<f64> {
    am_pmi(table, id).map(|p| table.count(id) / table.total() * p)
}

/// coverage(T) * pMI(T).
pub fn am_pmi_coverage(table: &TypeTable, id: usize) -> Option<f64> {
    am_pmi(table, id).map(|p| table.coverage(id) * p)
}

/// n f(T) / sum f(chord_i).
pub fn am_dice(table: &TypeTable, id: usize) -> Option<f64> {
    dice_with(table, id, MarginalSource::Positional)
}

fn dice_with(table: &TypeTable, id: usize, src: MarginalSource) -> Option<f64> {
    let (marg, _) = component_counts(table, id, src)?;
    let denom: f64 = marg.iter().sum();
    if denom <= 0.0 {
        return None;
    }
    Some(table.n() as f64 * table.count(id) / denom)
}

/// Contingency table for the split after position `split` (1-based).
pub fn g5_split(
    table: &TypeTable,
    id: usize,
    split: usize,
) -> Result<Contingency2x2, InvariantViolation> {
    assert!(split >= 1 && split < table.n(), "split out of range");
    Contingency2x2::from_margins(
        table.count(id),
        table.prefix(id, split),
        table.suffix(id, split),
        table.total(),
    )
}

fn g5_mean(
    table: &TypeTable,
    id: usize,
    stat: impl Fn(&Contingency2x2) -> f64,
) -> Result<Option<f64>, InvariantViolation> {
    let n = table.n();
    if n < 2 || table.total() <= 0.0 {
        return Ok(None);
    }
    let mut sum = 0.0;
    for split in 1..n {
        sum += stat(&g5_split(table, id, split)?);
    }
    Ok(Some(sum / (n - 1) as f64))
}

/// Mean Pearson chi-squared over all splits.
pub fn am_chi2(table: &TypeTable, id: usize) -> Result<Option<f64>, InvariantViolation> {
    g5_mean(table, id, Contingency2x2::chi2)
}

/// Mean log-likelihood ratio over all splits.
pub fn am_g2(table: &TypeTable, id: usize) -> Result<Option<f64>, InvariantViolation> {
    g5_mean(table, id, Contingency2x2::g2)
}

/// Scores one type; `None` means the measure is undefined for it and the
/// type is left out of the list.
pub fn score(
    table: &TypeTable,
    id: usize,
    measure: Measure,
    src: MarginalSource,
) -> Result<Option<f64>, InvariantViolation> {
    Ok(match measure {
        Measure::Counts => Some(table.count(id)),
        Measure::Pmi => pmi_with(table, id, src),
        Measure::PmiLocal => pmi_with(table, id, src).map(|p| table.count(id) / table.total() * p),
        Measure::PmiCoverage => pmi_with(table, id, src).map(|p| table.coverage(id) * p),
        Measure::Dice => dice_with(table, id, src),
        Measure::Chi2 => return am_chi2(table, id),
        Measure::G2 => return am_g2(table, id),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankedEntry {
    pub id: usize,
    pub rank: usize,
    pub score: f64,
}

/// Types in descending score order with competition ranks.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RankedList {
    pub entries: Vec<RankedEntry>,
}

impl RankedList {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn rank_of(&self, id: usize) -> Option<usize> {
        self.entries.iter().find(|e| e.id == id).map(|e| e.rank)
    }
}

fn scored(
    table: &TypeTable,
    ids: &[usize],
    measure: Measure,
    src: MarginalSource,
) -> Result<Vec<(usize, f64)>, InvariantViolation> {
    let mut out = Vec::with_capacity(ids.len());
    for &id in ids {
        if let Some(s) = score(table, id, measure, src)? {
            if s.is_finite() {
                out.push((id, s));
            }
        }
    }
    Ok(out)
}

/// Ranks the given types. Ties share a rank; within a tie, types are
/// ordered by their canonical text.
pub fn rank(
    table: &TypeTable,
    ids: &[usize],
    measure: Measure,
    src: MarginalSource,
) -> Result<RankedList, InvariantViolation> {
    let scored = scored(table, ids, measure, src)?;
    let mut keyed: Vec<(f64, String, usize)> = scored
        .into_iter()
        .map(|(id, s)| (s, table.key(id).to_string(), id))
        .collect();
    keyed.sort_by(|a, b| {
        b.0.partial_cmp(&a.0)
            .unwrap_or(Ordering::Equal)
            .then_with(|| a.1.cmp(&b.1))
    });
    let mut entries = Vec::with_capacity(keyed.len());
    let mut current_rank = 0;
    let mut prev: Option<f64> = None;
    for (pos, (s, _, id)) in keyed.into_iter().enumerate() {
        if prev != Some(s) {
            current_rank = pos + 1;
            prev = Some(s);
        }
        entries.push(RankedEntry {
            id,
            rank: current_rank,
            score: s,
        });
    }
    Ok(RankedList { entries })
}

/// Competition rank of `query` among `ids` without sorting the list.
pub fn rank_of(
    table: &TypeTable,
    ids: &[usize],
    measure: Measure,
    src: MarginalSource,
    query: usize,
) -> Result<Option<usize>, InvariantViolation> {
    if !ids.contains(&query) {
        return Ok(None);
    }
    let q = match score(table, query, measure, src)? {
        Some(s) if s.is_finite() => s,
        _ => return Ok(None),
    };
    let mut better = 0;
    for &id in ids {
        if let Some(s) = score(table, id, measure, src)? {
            if s.is_finite() && s > q {
                better += 1;
            }
        }
    }
    Ok(Some(better + 1))
}
