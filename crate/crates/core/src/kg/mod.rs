//! Knowledge-graph loading, keyword extraction and triplet retrieval.
//!
//! The retrieved set is K = {(u, e, v) | u, v ∈ W, e ∈ E}: every edge whose
//! two endpoint labels are both keywords, regardless of edge direction.

mod graph;
mod keywords;

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use graph::{load_kg, parse_kg_tsv, KgStats, KnowledgeGraph, Triplet};
pub use keywords::{extract_keywords, KeywordExtractor, KeywordSet, KeywordSource, Stopwords, MAX_NGRAM};

/// The triplet set K for keyword set W.
pub fn retrieve_triplets(kg: &KnowledgeGraph, keywords: &KeywordSet) -> Vec<Triplet> {
    kg.retrieve(keywords.iter())
}

/// One line of a candidates file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateRecord {
    pub item_id: String,
    pub candidates: Vec<String>,
}

/// Reads `{"item_id", "candidates"}` JSONL into a map by item id.
pub fn load_candidates(path: impl AsRef<Path>) -> Result<BTreeMap<String, Vec<String>>> {
    let path = path.as_ref();
    let raw = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_candidates(&raw, &path.display().to_string())
}

pub fn parse_candidates(raw: &str, context: &str) -> Result<BTreeMap<String, Vec<String>>> {
    let mut out = BTreeMap::new();
    for (i, line) in raw.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let rec: CandidateRecord = serde_json::from_str(line).map_err(|e| Error::parse(context, i + 1, e))?;
        if out.insert(rec.item_id.clone(), rec.candidates).is_some() {
            return Err(Error::DuplicateId(rec.item_id));
        }
    }
    Ok(out)
}
