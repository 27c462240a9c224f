//! Training-data construction and evaluation for multiple-choice distractor
//! generation.
//!
//! The crate covers everything around the text-to-text model:
//!
//! * [`dataset`]: MCQ / SciQ loading and the seeded train/dev split.
//! * [`corpus`]: sentence index over a plain-text corpus, anchor retrieval,
//!   passage expansion and BM25 hit ranking.
//! * [`rap`]: masked pseudo questions for retrieval-augmented pretraining.
//! * [`kg`]: knowledge-graph loading, keyword extraction and triplet retrieval.
//! * [`ranker`]: cosine and confidence-based triplet ranking, classifier labels.
//! * [`kagio`]: knowledge-augmented generator inputs.
//! * [`metrics`]: P@k, R@k, F1@k, MRR and NDCG@k.
//! * [`artifact`]: JSONL headers and run manifests shared by all stages.

pub mod artifact;
pub mod corpus;
pub mod dataset;
pub mod error;
pub mod kagio;
pub mod kg;
pub mod metrics;
pub mod ranker;
pub mod rap;
pub mod text;

pub use corpus::{rank_hits, CorpusIndex, Document, SentenceHit};
pub use dataset::{load_dataset, split_train_dev, DatasetFormat, DatasetSplit, McqItem};
pub use error::{Error, Result};
pub use kagio::{serialize_kag, KagExample, Separators};
pub use kg::{extract_keywords, retrieve_triplets, KeywordSet, KnowledgeGraph, Triplet};
pub use metrics::{evaluate, EvalReport, Prediction};
pub use ranker::{EmbeddingStore, ScoreSource, ScoredTriplet};
pub use rap::{build_examples, mask_anchor, PseudoQuestion, RapConfig, RapExample, RapStats};
pub use text::normalize_text;
