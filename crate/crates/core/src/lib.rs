//! Emoji sentiment lexicon construction without human annotation.
//!
//! The crate is organised as a pipeline:
//!
//! * [`textnorm`] restores informal text and descriptions and finds emoji occurrences,
//! * [`deptree`] reads lemmatized, tagged dependency parses (CoNLL-U),
//! * [`wordlex`] holds word polarity lexica and shifter inventories,
//! * [`usspad`] propagates word polarities over dependency trees to score sentences,
//! * [`emojirank`] turns scored or labelled corpora and descriptions into emoji lexica,
//! * [`pediaclient`] fetches emoji description pages, fixture-first,
//! * [`evalkit`] scores predictions and compares emoji lexica.

pub mod data;
pub mod deptree;
pub mod emoji;
pub mod emojirank;
pub mod evalkit;
pub mod label;
pub mod pediaclient;
pub mod textnorm;
pub mod usspad;
pub mod wordlex;

pub use deptree::{ParsedDocument, ParsedSentence, TokenNode};
pub use emoji::EmojiKey;
pub use emojirank::{EmojiLexicon, EmojiLexiconEntry, SentimentCounts, SentimentDistribution};
pub use evalkit::{ConfusionMatrix, CorrelationReport, MetricReport};
pub use label::SentimentLabel;
pub use usspad::{PropagationConfig, SentimentScore};
pub use wordlex::{PolarityLexicon, PosClass, ShifterInventory};
