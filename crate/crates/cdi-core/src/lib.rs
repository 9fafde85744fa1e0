//! Core library for the cultural difference identifier (CDI) pipeline.
//!
//! The pipeline learns, per culture, what statements that culture's
//! encyclopedia treats as acceptable, then scores bilingual statement
//! pairs to estimate where the two cultures disagree:
//!
//! 1. [`ingest`] expands category trees into a sentence corpus per
//!    language.
//! 2. [`fabricate`] manufactures minimally-edited negative samples by
//!    flipping adjectives to their antonyms, with collocation and
//!    temporal guards, and balances them against their parents.
//! 3. [`debias`] rewrites samples through a pivot-language round trip
//!    so classifiers cannot just memorize the edit surface.
//! 4. [`classifier`] trains hashed n-gram logistic models and scores
//!    text deterministically.
//! 5. [`scoring`] turns two per-culture models plus human annotations
//!    into per-pair acceptance and difference scores.
//! 6. [`eval`] computes correlations with permutation significance,
//!    annotator agreement, baselines, and the rewrite-mode matrix.
//!
//! Everything downstream of ingestion is bit-reproducible for a fixed
//! seed: hashing is FNV-1a, shuffles use a seeded ChaCha stream, and
//! serialized maps are ordered.

pub mod classifier;
pub mod debias;
pub mod eval;
pub mod fabricate;
pub mod ingest;
pub mod io;
pub mod scoring;
pub mod types;

pub use classifier::{CultureModel, TrainConfig};
pub use debias::{DebiasMode, PivotConfig};
pub use eval::{CorrelationKind, CorrelationResult, EvalReport};
pub use ingest::{CorpusManifest, RawSentence, TopicNode};
pub use scoring::{AnnotationRecord, DifferenceRecord, ScorePair, StatementPair};
pub use types::{FlippedSpan, LabeledSample, Lang, Origin};
