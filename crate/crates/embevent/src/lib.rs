//! Durative, multi-dimension event detection over embedding time series.
//!
//! The library turns a time-stamped token stream into a sequence of unit
//! vectors (the average word embedding of each time unit), finds per-
//! dimension time intervals whose removal makes the rest of the series
//! look more random, intersects those intervals across dimensions into
//! events, and converts events back into ranked "newsworthy" words. Two
//! reference baselines (per-unit tf-idf and Shannon wavelet entropy) and a
//! Recall@K evaluation harness round out the toolkit.
//!
//! ## Pipeline shape
//!
//! ```text
//! documents (JSONL) ──bucket──▶ TimeBucketedCorpus ──average──▶ UnitVectorSeries
//!                                                                    │ per dimension
//!                                                   AbnormalInterval ◀ detect
//!                                                                    │ sweep
//!                                                        Event ◀ assemble
//!                                                                    │ deviations
//!                                                RankedWords ◀ score per unit
//! ```
//!
//! ## Where to start
//!
//! Each major capability has a runnable example:
//!
//! ```bash
//! cargo run --example ingest_corpus      # bucketing + vocabulary
//! cargo run --example unit_vectors      # embedding tables and unit series
//! cargo run --example randomness_test   # the rank von Neumann score
//! cargo run --example detect_intervals  # single-dimension interval detection
//! cargo run --example assemble_events   # intersecting intervals into events
//! cargo run --example rank_event_words  # events back to ranked words
//! cargo run --example baselines         # tf-idf and wavelet-entropy scoring
//! cargo run --example evaluate_recall   # Recall@K against ground truth
//! cargo run --example end_to_end        # the whole chain on synthetic data
//! ```
//!
//! The `embevent` binary wires the same stages into subcommands (`ingest`,
//! `embed`, `detect`, `events`, `score`, `baseline`, `eval`, `synth`,
//! `run`) with file handoff between stages; see the README.

pub mod baselines;
pub mod corpus;
pub mod embeddings;
pub mod error;
pub mod eval;
pub mod event;
pub mod interval;
pub mod pipeline;
pub mod randomness;
pub mod scoring;

pub use corpus::{bucket_documents, build_vocabulary, Document, TimeBucketedCorpus, Vocabulary};
pub use embeddings::{
    average_unit_vector, build_unit_series, load_embedding_table, EmbeddingTable, UnitVectorSeries,
};
pub use error::{Error, Result};
pub use eval::{evaluate, generate_ground_truth, random_baseline_recall, recall_at_k, EvalReport};
pub use event::{assemble_events, brute_force_events, AssemblerParams, Event};
pub use interval::{
    detect_abnormal_intervals, detect_all_dimensions, score_gap, AbnormalInterval, DetectorParams,
};
pub use pipeline::{run_pipeline, PipelineConfig, PipelineInputs};
pub use randomness::{
    midranks, randomness_score, rvn_statistic, BartelsRvn, NormalityTest, RandomnessScore,
};
pub use scoring::{
    dimension_deviation, event_word_score, time_unit_word_scores, EventDeviation, RankedWords,
    ScoreScope,
};
