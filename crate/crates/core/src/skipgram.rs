//! Contiguous, fixed-skip and variable-skip n-gram enumeration.
//!
//! Enumeration works on index tuples `i1 < i2 < ... < in` over one piece.
//! Tuples are produced in lexicographic order.

use std::fmt;

use num_rational::Rational64;
use thiserror::Error;

use crate::corpus::Piece;
use crate::vlt::{bass_interval, Vlt, VltPattern};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SkipError {
    #[error("performance times required for variable mode (piece {piece})")]
    MissingPerformance { piece: String },
    #[error("invalid skip configuration: {0}")]
    InvalidConfig(String),
}

/// How a fixed skip budget is spent across the gaps of a token.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum SkipBudget {
    /// At most `t` skipped events summed over all gaps.
    #[default]
    Total,
    /// At most `t` skipped events in each gap.
    PerGap,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SkipMode {
    /// `t = None` admits every combination.
    Fixed {
        t: Option<usize>,
        budget: SkipBudget,
    },
    /// Every consecutive performed inter-onset interval must be `<= w` seconds.
    Variable { w: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SkipConfig {
    pub mode: SkipMode,
    pub n: usize,
}

impl SkipConfig {
    pub fn contiguous(n: usize) -> Self {
        Self::fixed(n, 0)
    }

    pub fn fixed(n: usize, t: usize) -> Self {
        SkipConfig {
            mode: SkipMode::Fixed {
                t: Some(t),
                budget: SkipBudget::Total,
            },
            n,
        }
    }

    pub fn variable(n: usize, w: f64) -> Self {
        SkipConfig {
            mode: SkipMode::Variable { w },
            n,
        }
    }

    pub fn with_budget(mut self, budget: SkipBudget) -> Self {
        if let SkipMode::Fixed { budget: b, .. } = &mut self.mode {
            *b = budget;
        }
        self
    }

    pub fn validate(&self) -> Result<(), SkipError> {
        if self.n == 0 {
            return Err(SkipError::InvalidConfig("n must be at least 1".into()));
        }
        if let SkipMode::Variable { w } = self.mode {
            if !(w > 0.0 && w.is_finite()) {
                return Err(SkipError::InvalidConfig(format!(
                    "window must be a positive number of seconds, got {w}"
                )));
            }
        }
        Ok(())
    }
}

impl fmt::Display for SkipConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.mode {
            SkipMode::Fixed { t: Some(t), .. } => write!(f, "fixed:{t}"),
            SkipMode::Fixed { t: None, .. } => write!(f, "fixed:inf"),
            SkipMode::Variable { w } => write!(f, "variable:{w}"),
        }
    }
}

/// Number of contiguous tokens in a sequence of length `k`.
pub fn contiguous_count(k: usize, n: usize) -> usize {
    (k + 1).saturating_sub(n)
}

/// Visits every index tuple of a sequence of length `k` admitted by
/// `config`. `onsets` (performed seconds, one per element) is required in
/// variable mode and ignored otherwise.
pub fn for_each_tuple<F: FnMut(&[usize])>(
    k: usize,
    onsets: Option<&[f64]>,
    config: &SkipConfig,
    mut visit: F,
) {
    let n = config.n;
    if n == 0 || k < n {
        return;
    }
    let mut stack = vec![0usize; n];
    match config.mode {
        SkipMode::Fixed { t, budget } => {
            let limit = t.unwrap_or(usize::MAX);
            for first in 0..k {
                stack[0] = first;
                fixed_rec(&mut stack, 1, k, limit, budget, &mut visit);
            }
        }
        SkipMode::Variable { w } => {
            let onsets = onsets.expect("variable mode needs performed onsets");
            assert_eq!(onsets.len(), k);
            let sorted = onsets.windows(2).all(|p| p[0] <= p[1]);
            for first in 0..k {
                stack[0] = first;
                variable_rec(&mut stack, 1, onsets, w, sorted, &mut visit);
            }
        }
    }
}

fn fixed_rec<F: FnMut(&[usize])>(
    stack: &mut [usize],
    pos: usize,
    k: usize,
    remaining: usize,
    budget: SkipBudget,
    visit: &mut F,
) {
    if pos == stack.len() {
        visit(stack);
        return;
    }
    let prev = stack[pos - 1];
    let left = stack.len() - pos; // members still to place, including this one
    for j in prev + 1..k {
        // Not enough room for the remaining members.
        if k - j < left {
            break;
        }
        let skipped = j - prev - 1;
        if skipped > remaining {
            break;
        }
        stack[pos] = j;
        let rest = match budget {
            SkipBudget::Total => remaining - skipped,
            SkipBudget::PerGap => remaining,
        };
        fixed_rec(stack, pos + 1, k, rest, budget, visit);
    }
}

fn variable_rec<F: FnMut(&[usize])>(
    stack: &mut [usize],
    pos: usize,
    onsets: &[f64],
    w: f64,
    sorted: bool,
    visit: &mut F,
) {
    if pos == stack.len() {
        visit(stack);
        return;
    }
    let prev = stack[pos - 1];
    for j in prev + 1..onsets.len() {
        if onsets[j] - onsets[prev] > w {
            if sorted {
                break;
            }
            continue;
        }
        stack[pos] = j;
        variable_rec(stack, pos + 1, onsets, w, sorted, visit);
    }
}

fn collect(k: usize, onsets: Option<&[f64]>, config: &SkipConfig) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for_each_tuple(k, onsets, config, |t| out.push(t.to_vec()));
    out
}

/// Tuples of consecutive indices.
pub fn enumerate_contiguous(k: usize, n: usize) -> Vec<Vec<usize>> {
    collect(k, None, &SkipConfig::contiguous(n))
}

/// Tuples whose total skipped count is at most `t` (`None` = unbounded).
pub fn enumerate_fixed_skip(k: usize, n: usize, t: Option<usize>) -> Vec<Vec<usize>> {
    let config = SkipConfig {
        mode: SkipMode::Fixed {
            t,
            budget: SkipBudget::Total,
        },
        n,
    };
    collect(k, None, &config)
}

/// Tuples whose consecutive inter-onset intervals are all at most `w`.
pub fn enumerate_variable_skip(onsets: &[f64], n: usize, w: f64) -> Vec<Vec<usize>> {
    collect(onsets.len(), Some(onsets), &SkipConfig::variable(n, w))
}

/// A piece reduced to what token construction needs.
#[derive(Debug, Clone)]
pub struct EncodedPiece {
    pub id: String,
    pub vlts: Vec<Vlt>,
    pub basses: Vec<u8>,
    pub onsets_perf: Option<Vec<f64>>,
    pub onsets_score: Vec<Rational64>,
}

impl EncodedPiece {
    pub fn new(piece: &Piece) -> Self {
        EncodedPiece {
            id: piece.id.clone(),
            vlts: piece.encode(),
            basses: piece.slices.iter().map(|s| s.bass()).collect(),
            onsets_perf: piece.perf_onsets(),
            onsets_score: piece.slices.iter().map(|s| s.onset_score).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.vlts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vlts.is_empty()
    }

    /// Type key of the token at `indices`, with incoming intervals measured
    /// between the chosen members.
    pub fn type_key(&self, indices: &[usize]) -> VltPattern {
        let chords = indices
            .iter()
            .enumerate()
            .map(|(j, &i)| {
                let i_in =
                    (j > 0).then(|| bass_interval(self.basses[indices[j - 1]], self.basses[i]));
                self.vlts[i].with_incoming(i_in)
            })
            .collect();
        VltPattern::from_raw(chords)
    }

    /// Visits the admitted index tuples of this piece.
    pub fn for_each_tuple<F: FnMut(&[usize])>(
        &self,
        config: &SkipConfig,
        visit: F,
    ) -> Result<(), SkipError> {
        config.validate()?;
        let onsets =
            match config.mode {
                SkipMode::Variable { .. } => {
                    Some(self.onsets_perf.as_deref().ok_or_else(|| {
                        SkipError::MissingPerformance {
                            piece: self.id.clone(),
                        }
                    })?)
                }
                SkipMode::Fixed { .. } => None,
            };
        for_each_tuple(self.len(), onsets, config, visit);
        Ok(())
    }
}

/// One materialised n-gram instance.
#[derive(Debug, Clone, PartialEq)]
pub struct SkipToken {
    pub piece: usize,
    pub indices: Vec<usize>,
    pub onsets_perf: Option<Vec<f64>>,
    pub onsets_score: Vec<Rational64>,
    pub type_key: VltPattern,
}

/// Materialises every token of one piece.
pub fn tokens(
    piece_index: usize,
    piece: &EncodedPiece,
    config: &SkipConfig,
) -> Result<Vec<SkipToken>, SkipError> {
    let mut out = Vec::new();
    piece.for_each_tuple(config, |idx| {
        out.push(SkipToken {
            piece: piece_index,
            indices: idx.to_vec(),
            onsets_perf: piece
                .onsets_perf
                .as_ref()
                .map(|o| idx.iter().map(|&i| o[i]).collect()),
            onsets_score: idx.iter().map(|&i| piece.onsets_score[i]).collect(),
            type_key: piece.type_key(idx),
        })
    })?;
    Ok(out)
}

/// One line of the token dump: `piece_id  indices  type_key  weight`.
pub fn dump_line(piece_id: &str, indices: &[usize], key: &VltPattern, weight: f64) -> String {
    let idx: Vec<String> = indices.iter().map(|i| i.to_string()).collect();
    format!("{piece_id}\t{}\t{key}\t{weight}", idx.join(","))
}
