//! Divide-and-conquer sentence alignment.
//!
//! Bilingual sentence embeddings are mined for high-confidence 1-to-1 pairs
//! that are themselves surrounded by 1-to-1 pairs ("hard delimiters"). The
//! delimiters cut a document pair into small rectangular chunks which any
//! quadratic dynamic-programming aligner can process independently and in
//! parallel. Oversized chunks are re-mined locally and, failing that, aligned
//! inside a band around the mined anchors.
//!
//! The crate is organised bottom-up:
//!
//! * [`alignment`] holds the shared domain types and the text format.
//! * [`embed`] loads embedding matrices and runs exact k-NN search.
//! * [`miner`] scores candidates by ratio margin and selects delimiters.
//! * [`dp`] is the bead DP (full and banded) with the Gale–Church scorer.
//! * [`lexical`] is an optional translation-table scorer.
//! * [`dac`] orchestrates mining, recursion and parallel chunk alignment.
//! * [`simulator`] estimates the expected maximum chunk size.
//! * [`evaluation`] computes strict and delimiter-level P/R/F1.
//! * [`cli`] backs the `dacalign` binary.
//! * [`synth`] generates synthetic document pairs with planted gold.

pub mod alignment;
pub mod cli;
pub mod dac;
pub mod dp;
pub mod embed;
mod error;
pub mod evaluation;
pub mod lexical;
pub mod miner;
pub mod simulator;
pub mod synth;

pub use alignment::{AlignmentSet, Bead, BeadType, Chunk, Delimiter, Span, Violation};
pub use dac::{dac_align, DacConfig, DacOutput};
pub use dp::{align_chunk, banded_align, BeadScorer, BeadSet, GaleChurch, Priors};
pub use embed::EmbeddingMatrix;
pub use error::{Error, Result};
