//! Discovery of recurrent voice-leading patterns in polyphonic corpora.
//!
//! The pipeline expands note events into vertical slices, encodes each slice
//! as a voice-leading type (VLT), enumerates contiguous or skip-gram tokens
//! over the VLT sequences, weights and aggregates them into a type table,
//! filters the types, and ranks them by counts or an association measure.
//! [`evaluation`] runs the full configuration grid and scores a query
//! pattern's rank with mean reciprocal rank.

pub mod corpus;
pub mod evaluation;
pub mod filters;
pub mod ic;
pub mod ranking;
pub mod skipgram;
pub mod vlt;
pub mod weighting;

pub use corpus::{Corpus, Piece, Slice};
pub use vlt::{parse_pattern, Vlt, VltPattern};
