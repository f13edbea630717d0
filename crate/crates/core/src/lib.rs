//! Toolkit for building and classifying a sarcasm corpus drawn from online
//! debate dialogue.
//!
//! * [`corpus`]: quote-response pairs, ingestion, length filter, folds
//! * [`syntax`]: tokenizer, tagger, chunker, SVO heuristic
//! * [`patterns`]: lexico-syntactic template instantiation and statistics
//! * [`weak`]: pattern-based detectors, threshold grid search, filtering
//! * [`cues`]: cue retrieval, rhetorical-question candidates, batching
//! * [`annotation`]: qualifier scoring, vote aggregation, agreement
//! * [`learn`]: n-gram and embedding features, SGD linear SVM, evaluation
//! * [`manifest`]: run manifests written by the CLI

pub mod annotation;
pub mod corpus;
pub mod cues;
pub mod error;
pub mod learn;
pub mod manifest;
pub mod patterns;
pub mod syntax;
pub mod weak;

pub use error::{Error, Result};
