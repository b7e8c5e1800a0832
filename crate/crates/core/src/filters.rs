//! Type filters applied before ranking.

use std::fmt;
use std::str::FromStr;

use crate::ranking::TypeTable;
use crate::vlt::VltPattern;

/// Default frequency threshold.
pub const DEFAULT_MIN_COUNT: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FilterKind {
    None,
    Frequency(f64),
    Harmony,
    Both(f64),
}

impl FilterKind {
    pub const fn all(threshold: f64) -> [FilterKind; 4] {
        [
            FilterKind::None,
            FilterKind::Frequency(threshold),
            FilterKind::Harmony,
            FilterKind::Both(threshold),
        ]
    }

    pub fn name(&self) -> &'static str {
        match self {
            FilterKind::None => "none",
            FilterKind::Frequency(_) => "freq",
            FilterKind::Harmony => "harmony",
            FilterKind::Both(_) => "both",
        }
    }

    /// Parses `none|freq|harmony|both` with the given threshold.
    pub fn parse(name: &str, threshold: f64) -> Result<Self, String> {
        match name {
            "none" => Ok(FilterKind::None),
            "freq" | "frequency" => Ok(FilterKind::Frequency(threshold)),
            "harmony" => Ok(FilterKind::Harmony),
            "both" => Ok(FilterKind::Both(threshold)),
            other => Err(format!("unknown filter '{other}'")),
        }
    }

    /// Ids of the types that survive, ascending.
    pub fn apply(&self, table: &TypeTable, rule: SimilarityRule) -> Vec<usize> {
        match *self {
            FilterKind::None => (0..table.len()).collect(),
            FilterKind::Frequency(t) => filter_frequency(table, t),
            FilterKind::Harmony => filter_harmony(table, rule),
            FilterKind::Both(t) => filter_both(table, t, rule),
        }
    }
}

impl fmt::Display for FilterKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Reading of the similarity criterion for adjacent members sharing a bass.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SimilarityRule {
    /// Excluded when the interval-class sets overlap at all.
    #[default]
    SharedInterval,
    /// Excluded only when the interval-class sets are identical.
    IdenticalSet,
}

impl FromStr for SimilarityRule {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "shared" | "intersect" => Ok(SimilarityRule::SharedInterval),
            "identical" => Ok(SimilarityRule::IdenticalSet),
            other => Err(format!("unknown similarity rule '{other}'")),
        }
    }
}

/// Which harmony criteria a pattern violates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct HarmonyViolations {
    pub monophony: bool,
    pub no_polyphony: bool,
    pub no_bass_change: bool,
    pub similarity: bool,
}

impl HarmonyViolations {
    pub fn any(&self) -> bool {
        self.monophony || self.no_polyphony || self.no_bass_change || self.similarity
    }
}

pub fn harmony_violations(key: &VltPattern, rule: SimilarityRule) -> HarmonyViolations {
    let chords = key.chords();
    let monophony = chords.iter().any(|c| c.pitch_class_count() == 1);
    let no_polyphony = !chords.iter().any(|c| c.pitch_class_count() >= 3);
    let no_bass_change = chords[1..].iter().all(|c| c.incoming() == Some(0));
    let similarity = chords.windows(2).any(|w| {
        w[1].incoming() == Some(0)
            && match rule {
                SimilarityRule::SharedInterval => w[0].intervals().intersects(w[1].intervals()),
                SimilarityRule::IdenticalSet => w[0].intervals() == w[1].intervals(),
            }
    });
    HarmonyViolations {
        monophony,
        no_polyphony,
        no_bass_change,
        similarity,
    }
}

/// True when the pattern passes all four harmony criteria.
pub fn passes_harmony(key: &VltPattern, rule: SimilarityRule) -> bool {
    !harmony_violations(key, rule).any()
}

pub fn filter_frequency(table: &TypeTable, threshold: f64) -> Vec<usize> {
    (0..table.len())
        .filter(|&id| table.count(id) >= threshold)
        .collect()
}

pub fn filter_harmony(table: &TypeTable, rule: SimilarityRule) -> Vec<usize> {
    (0..table.len())
        .filter(|&id| passes_harmony(table.key(id), rule))
        .collect()
}

pub fn filter_both(table: &TypeTable, threshold: f64, rule: SimilarityRule) -> Vec<usize> {
    (0..table.len())
        .filter(|&id| table.count(id) >= threshold && passes_harmony(table.key(id), rule))
        .collect()
}
