//! Triplet relevancy ranking.
//!
//! The unsupervised ranker scores each triplet by cosine similarity between
//! its embedding and the embedding of the question joined with the answer,
//! and keeps the top k. The supervised path reorders that top k by
//! classifier confidences computed out of process; this module writes the
//! classifier's training labels and reads its confidences back.

mod embedding;

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};
use std::fs;
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kg::Triplet;
use crate::text::{contains_token_match, normalize_text};

pub use embedding::{cosine, EmbeddingStore};

/// Cap on triplets handed to the generator.
pub const DEFAULT_TOP_K: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScoreSource {
    Cosine,
    Classifier,
    /// Cosine and classifier confidence mixed.
    Blend,
    /// Seeded random selection, no score.
    Random,
    /// Answer-endpoint filter, no score.
    AnswerFilter,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredTriplet {
    #[serde(flatten)]
    pub triplet: Triplet,
    pub score: f64,
    pub source: ScoreSource,
}

/// Embedding id of an item's question-answer text.
pub fn qa_key(item_id: &str) -> String {
    format!("qa:{item_id}")
}

/// The question joined with the answer by a single space.
pub fn qa_text(question: &str, answer: &str) -> String {
    format!("{} {}", question.trim(), answer.trim())
}

fn by_score_then_triplet(a: &ScoredTriplet, b: &ScoredTriplet) -> Ordering {
    b.score.total_cmp(&a.score).then_with(|| a.triplet.cmp(&b.triplet))
}

/// The `k` triplets most similar to the question-answer vector, best first.
/// Equal scores are ordered by `(head, relation, tail)`.
pub fn rank_unsupervised(
    triplets: &[Triplet],
    qa_key: &str,
    store: &EmbeddingStore,
    k: usize,
) -> Result<Vec<ScoredTriplet>> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be positive".into()));
    }
    let mut missing = BTreeSet::new();
    let qa = store.get(qa_key);
    if qa.is_none() {
        missing.insert(qa_key.to_owned());
    }
    let keys: Vec<String> = triplets.iter().map(Triplet::text).collect();
    for key in &keys {
        if !store.contains(key) {
            missing.insert(key.clone());
        }
    }
    if !missing.is_empty() {
        return Err(Error::MissingEmbeddings(missing.into_iter().collect()));
    }
    let qa = qa.expect("checked above");

    let mut scored = Vec::with_capacity(triplets.len());
    for (t, key) in triplets.iter().zip(&keys) {
        let v = store.get(key).expect("checked above");
        scored.push(ScoredTriplet {
            triplet: t.clone(),
            score: cosine(v, qa)?,
            source: ScoreSource::Cosine,
        });
    }
    if k < scored.len() {
        scored.select_nth_unstable_by(k - 1, by_score_then_triplet);
        scored.truncate(k);
    }
    scored.sort_by(by_score_then_triplet);
    Ok(scored)
}

/// Reorders `topk` by descending classifier confidence, keyed by triplet
/// text. Equal confidences keep their incoming order.
pub fn rerank_with_confidences(
    topk: &[ScoredTriplet],
    confidences: &HashMap<String, f64>,
) -> Result<Vec<ScoredTriplet>> {
    rerank_blended(topk, confidences, None)
}

/// Like [`rerank_with_confidences`], but with `Some(w)` the new score is
/// `w * confidence + (1 - w) * previous score`.
pub fn rerank_blended(
    topk: &[ScoredTriplet],
    confidences: &HashMap<String, f64>,
    blend: Option<f64>,
) -> Result<Vec<ScoredTriplet>> {
    if let Some(w) = blend {
        if !(0.0..=1.0).contains(&w) {
            return Err(Error::InvalidArgument(format!("blend weight {w} outside [0, 1]")));
        }
    }
    let missing: Vec<String> = topk
        .iter()
        .map(|s| s.triplet.text())
        .filter(|id| !confidences.contains_key(id))
        .collect();
    if !missing.is_empty() {
        return Err(Error::MissingConfidences(missing));
    }
    let mut out: Vec<ScoredTriplet> = topk
        .iter()
        .map(|s| {
            let c = confidences[&s.triplet.text()];
            let (score, source) = match blend {
                None => (c, ScoreSource::Classifier),
                Some(w) => (w * c + (1.0 - w) * s.score, ScoreSource::Blend),
            };
            ScoredTriplet {
                triplet: s.triplet.clone(),
                score,
                source,
            }
        })
        .collect();
    out.sort_by(|a, b| b.score.total_cmp(&a.score));
    Ok(out)
}

/// `k` triplets drawn uniformly without replacement with a seeded
/// generator. Stands in for the ranker in the no-reranker ablation.
pub fn select_random(triplets: &[Triplet], k: usize, seed: u64) -> Vec<ScoredTriplet> {
    let mut pool: Vec<&Triplet> = triplets.iter().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = k.min(pool.len());
    let (chosen, _) = pool.partial_shuffle(&mut rng, k);
    chosen
        .iter()
        .map(|t| ScoredTriplet {
            triplet: (*t).clone(),
            score: 0.0,
            source: ScoreSource::Random,
        })
        .collect()
}

/// How an option must appear in a triplet endpoint to count as contained.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LabelMode {
    /// Normalized endpoint equals the normalized option.
    #[default]
    Strict,
    /// The option occurs in the endpoint at token boundaries.
    Contains,
}

impl FromStr for LabelMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "strict" => Ok(LabelMode::Strict),
            "contains" | "substring" => Ok(LabelMode::Contains),
            other => Err(Error::InvalidArgument(format!("unknown label mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relevance {
    Relevant,
    Irrelevant,
}

fn endpoint_matches(endpoint: &str, option: &str, mode: LabelMode) -> bool {
    match mode {
        LabelMode::Strict => normalize_text(endpoint) == option,
        LabelMode::Contains => contains_token_match(endpoint, option),
    }
}

/// Labels a triplet relevant when one of its endpoints contains the answer
/// or a gold distractor.
pub fn label_triplets(
    triplets: &[Triplet],
    answer: &str,
    distractors: &[String],
    mode: LabelMode,
) -> Vec<(Triplet, Relevance)> {
    let options: Vec<String> = std::iter::once(answer)
        .chain(distractors.iter().map(String::as_str))
        .map(normalize_text)
        .filter(|o| !o.is_empty())
        .collect();
    triplets
        .iter()
        .map(|t| {
            let hit = options.iter().any(|o| {
                endpoint_matches(&t.head, o, mode) || endpoint_matches(&t.tail, o, mode)
            });
            let label = if hit { Relevance::Relevant } else { Relevance::Irrelevant };
            (t.clone(), label)
        })
        .collect()
}

/// Triplets with the answer as head or tail, sorted.
pub fn filter_answer_only(triplets: &[Triplet], answer: &str) -> Vec<Triplet> {
    let answer = normalize_text(answer);
    let mut out: Vec<Triplet> = triplets
        .iter()
        .filter(|t| normalize_text(&t.head) == answer || normalize_text(&t.tail) == answer)
        .cloned()
        .collect();
    out.sort();
    out.dedup();
    out
}

/// One line of the relevancy classifier's training file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupervisedRow {
    pub text_a: String,
    pub text_b: String,
    pub label: u8,
}

pub fn supervised_rows(
    question: &str,
    answer: &str,
    distractors: &[String],
    triplets: &[Triplet],
    mode: LabelMode,
) -> Vec<SupervisedRow> {
    let text_a = qa_text(question, answer);
    label_triplets(triplets, answer, distractors, mode)
        .into_iter()
        .map(|(t, rel)| SupervisedRow {
            text_a: text_a.clone(),
            text_b: t.text(),
            label: u8::from(rel == Relevance::Relevant),
        })
        .collect()
}

#[derive(Deserialize)]
struct ConfidenceLine {
    id: String,
    score: f64,
}

/// Reads `{"id", "score"}` JSONL.
pub fn parse_confidences(raw: &str, context: &str) -> Result<HashMap<String, f64>> {
    let mut out = HashMap::new();
    for (i, line) in raw.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let rec: ConfidenceLine = serde_json::from_str(line).map_err(|e| Error::parse(context, i + 1, e))?;
        if !rec.score.is_finite() {
            return Err(Error::parse(context, i + 1, "non-finite score"));
        }
        if out.insert(rec.id.clone(), rec.score).is_some() {
            return Err(Error::DuplicateId(rec.id));
        }
    }
    Ok(out)
}

pub fn load_confidences(path: impl AsRef<Path>) -> Result<HashMap<String, f64>> {
    let path = path.as_ref();
    let raw = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_confidences(&raw, &path.display().to_string())
}
