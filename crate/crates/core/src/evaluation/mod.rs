//! Configuration grid, query ranks, mean reciprocal rank and level
//! comparisons, plus a seeded synthetic corpus for desk-scale runs.

mod config;
mod run;
mod stats;
mod summary;
pub mod synth;

use thiserror::Error;

use crate::ranking::InvariantViolation;
use crate::skipgram::SkipError;

pub use config::{
    GridSpec, PipelineConfig, PipelineOptions, SkipLevel, DEFAULT_FIXED_LEVELS,
    DEFAULT_VARIABLE_LEVELS,
};
pub use run::{run_config, run_grid, weighted_table, GridResult, GridRow, MineResult};
pub use stats::{compare_groups, mrr, reciprocal_rank, Comparison};
pub use summary::{
    grid_csv, level_mrrs, levels_csv, parse_grid_csv, summarize, summary_csv, Level, LevelMrr,
    SummaryRow, DEFAULT_COMPARISONS, GRID_HEADER,
};
pub use synth::{generate_synthetic_corpus, PlantedInstance, SynthCorpus, SynthSpec};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error(transparent)]
    Skip(#[from] SkipError),
    #[error(transparent)]
    Invariant(#[from] InvariantViolation),
    #[error("query has {got} chords but the configuration mines {expected}-grams")]
    QueryLength { expected: usize, got: usize },
    #[error("{0}")]
    Config(String),
}
