use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use super::graph::KnowledgeGraph;
use crate::text::{normalize_label, tokenize};

/// Longest stem phrase tried against graph labels.
pub const MAX_NGRAM: usize = 3;

static ENGLISH_STOPWORDS: &str = include_str!("../../data/stopwords_en.txt");

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stopwords(HashSet<String>);

impl Stopwords {
    /// The bundled English stoplist (318 words).
    pub fn english() -> Self {
        Self::from_list(ENGLISH_STOPWORDS)
    }

    /// One word per line; blank lines and `#` comments are skipped.
    pub fn from_list(list: &str) -> Self {
        Stopwords(
            list.lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .map(str::to_lowercase)
                .collect(),
        )
    }

    pub fn contains(&self, word: &str) -> bool {
        self.0.contains(word)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KeywordSource {
    Question,
    Answer,
    Candidate,
}

/// The keyword set W with where each keyword came from.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeywordSet {
    pub keywords: BTreeSet<String>,
    pub provenance: BTreeMap<String, BTreeSet<KeywordSource>>,
}

impl KeywordSet {
    pub fn insert(&mut self, raw: &str, source: KeywordSource) {
        let k = normalize_label(raw);
        if k.is_empty() {
            return;
        }
        self.provenance.entry(k.clone()).or_default().insert(source);
        self.keywords.insert(k);
    }

    pub fn contains(&self, k: &str) -> bool {
        self.keywords.contains(k)
    }

    pub fn len(&self) -> usize {
        self.keywords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keywords.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.keywords.iter().map(String::as_str)
    }

    pub fn is_subset(&self, other: &KeywordSet) -> bool {
        self.keywords.is_subset(&other.keywords)
    }

    pub fn from_keywords<'a>(words: impl IntoIterator<Item = &'a str>, source: KeywordSource) -> Self {
        let mut set = KeywordSet::default();
        for w in words {
            set.insert(w, source);
        }
        set
    }
}

fn special_token_pattern() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"\[[^\]\s]*\]|<[^>\s]*>").expect("valid pattern"))
}

/// Extracts W from a stem, its answer and candidate distractors.
///
/// W holds the stem's content words (stoplist removed, bracketed special
/// tokens such as `[MASK]` and single letters dropped), the answer and each
/// candidate as whole normalized phrases, and, when a graph is attached,
/// stem phrases of 2..=3 tokens that name a graph node. Phrases are matched
/// left to right with the longest match winning.
#[derive(Debug, Clone)]
pub struct KeywordExtractor<'g> {
    stopwords: Stopwords,
    graph: Option<&'g KnowledgeGraph>,
}

impl Default for KeywordExtractor<'_> {
    fn default() -> Self {
        KeywordExtractor {
            stopwords: Stopwords::english(),
            graph: None,
        }
    }
}

impl<'g> KeywordExtractor<'g> {
    pub fn new(stopwords: Stopwords) -> Self {
        KeywordExtractor {
            stopwords,
            graph: None,
        }
    }

    pub fn with_graph(mut self, graph: &'g KnowledgeGraph) -> Self {
        self.graph = Some(graph);
        self
    }

    pub fn extract(&self, question: &str, answer: &str, candidates: &[String]) -> KeywordSet {
        let mut set = KeywordSet::default();
        let cleaned = special_token_pattern().replace_all(question, " ");
        let tokens = tokenize(&cleaned);

        for t in &tokens {
            let single_letter = t.chars().count() == 1 && t.chars().all(char::is_alphabetic);
            if !single_letter && !self.stopwords.contains(t) {
                set.insert(t, KeywordSource::Question);
            }
        }

        if let Some(g) = self.graph {
            let mut i = 0;
            while i < tokens.len() {
                let longest = (2..=MAX_NGRAM.min(tokens.len() - i)).rev().find_map(|n| {
                    let phrase = tokens[i..i + n].join(" ");
                    g.has_node(&phrase).then_some((n, phrase))
                });
                match longest {
                    Some((n, phrase)) => {
                        set.insert(&phrase, KeywordSource::Question);
                        i += n;
                    }
                    None => i += 1,
                }
            }
        }

        set.insert(answer, KeywordSource::Answer);
        for c in candidates {
            set.insert(c, KeywordSource::Candidate);
        }
        set
    }
}

/// [`KeywordExtractor::extract`] with the bundled stoplist and no graph.
pub fn extract_keywords(question: &str, answer: &str, candidates: &[String]) -> KeywordSet {
    KeywordExtractor::default().extract(question, answer, candidates)
}
