//! Retrieval-augmented pretraining data.
//!
//! For each MCQ item an option is used as an anchor to retrieve corpus
//! sentences (or short passages). The anchor is masked out of the retrieved
//! text, and the masked text conditioned on the anchor becomes a pseudo
//! question whose target is the remaining options.
//!
//! With answer anchoring the target is `d1 <sep> d2 <sep> d3`. With
//! distractor anchoring on `d_i` the target is the answer followed by the
//! other distractors in dataset order.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::corpus::{rank_hits, CorpusIndex, SentenceHit};
use crate::dataset::McqItem;
use crate::error::{Error, Result};
use crate::text::{find_token_matches, normalize_text};

pub const DEFAULT_MASK_TOKEN: &str = "[MASK]";
pub const DEFAULT_INPUT_SEPARATOR: &str = "</s>";
pub const DEFAULT_TARGET_SEPARATOR: &str = "<sep>";

/// Replaces every token-boundary occurrence of `anchor` in `text` with
/// `mask_token`. Everything else is copied unchanged.
///
/// Fails when the anchor does not occur, or when it would still occur after
/// masking (an anchor that is itself a word of the mask token).
pub fn mask_anchor(text: &str, anchor: &str, mask_token: &str) -> Result<String> {
    let spans = find_token_matches(text, anchor);
    if spans.is_empty() {
        return Err(Error::AnchorNotFound(anchor.to_owned()));
    }
    let mut out = String::with_capacity(text.len() + spans.len() * mask_token.len());
    let mut spans = spans.into_iter().peekable();
    let mut skip_until = 0;
    for (i, c) in text.chars().enumerate() {
        if let Some(&(start, end)) = spans.peek() {
            if i == start {
                out.push_str(mask_token);
                skip_until = end;
                spans.next();
            }
        }
        if i >= skip_until {
            out.push(c);
        }
    }
    if !find_token_matches(&out, anchor).is_empty() {
        return Err(Error::MaskCollision {
            anchor: anchor.to_owned(),
            mask_token: mask_token.to_owned(),
        });
    }
    Ok(out)
}

/// Sentence-level (`S`) or passage-level (`P`) pseudo questions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Variant {
    #[serde(rename = "S")]
    Sentence,
    #[serde(rename = "P")]
    Passage,
}

impl Variant {
    pub fn code(self) -> &'static str {
        match self {
            Variant::Sentence => "S",
            Variant::Passage => "P",
        }
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "S" | "s" | "sentence" => Ok(Variant::Sentence),
            "P" | "p" | "passage" => Ok(Variant::Passage),
            other => Err(Error::InvalidArgument(format!("unknown RAP mode {other:?}"))),
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Anchoring {
    AnswerOnly,
    WithGtd,
}

/// Which option an example was anchored on. Serialized as `answer` or
/// `gtd:<i>` with a 1-based distractor position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AnchorRole {
    Answer,
    Distractor(usize),
}

impl AnchorRole {
    pub fn is_answer(self) -> bool {
        matches!(self, AnchorRole::Answer)
    }
}

impl fmt::Display for AnchorRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnchorRole::Answer => f.write_str("answer"),
            AnchorRole::Distractor(i) => write!(f, "gtd:{i}"),
        }
    }
}

impl FromStr for AnchorRole {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "answer" {
            return Ok(AnchorRole::Answer);
        }
        s.strip_prefix("gtd:")
            .and_then(|i| i.parse().ok())
            .filter(|&i: &usize| i >= 1)
            .map(AnchorRole::Distractor)
            .ok_or_else(|| Error::InvalidArgument(format!("bad anchoring {s:?}")))
    }
}

impl Serialize for AnchorRole {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for AnchorRole {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RapConfig {
    pub mode: Variant,
    pub anchoring: Anchoring,
    /// Neighbouring sentences on each side in passage mode.
    pub window: usize,
    /// Token budget of a passage.
    pub max_passage_tokens: usize,
    /// Retrieved sentences kept per anchor, best BM25 first.
    pub per_anchor_cap: usize,
    pub mask_token: String,
    pub input_separator: String,
    pub target_separator: String,
    /// Drop examples whose (input, target) pair was already emitted.
    pub dedup: bool,
}

impl Default for RapConfig {
    fn default() -> Self {
        RapConfig {
            mode: Variant::Sentence,
            anchoring: Anchoring::AnswerOnly,
            window: 1,
            max_passage_tokens: 128,
            per_anchor_cap: 8,
            mask_token: DEFAULT_MASK_TOKEN.into(),
            input_separator: DEFAULT_INPUT_SEPARATOR.into(),
            target_separator: DEFAULT_TARGET_SEPARATOR.into(),
            dedup: false,
        }
    }
}

impl RapConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidArgument(m.to_owned()));
        if self.per_anchor_cap == 0 {
            return bad("per-anchor cap must be at least 1");
        }
        if self.mode == Variant::Passage && self.window == 0 {
            return bad("passage mode needs a window of at least 1");
        }
        if self.max_passage_tokens == 0 {
            return bad("passage token budget must be positive");
        }
        if self.mask_token.trim().is_empty() {
            return bad("mask token must be non-empty");
        }
        if self.input_separator.trim().is_empty() || self.target_separator.trim().is_empty() {
            return bad("separators must be non-empty");
        }
        Ok(())
    }
}

/// A masked sentence or passage with its conditioning option and targets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PseudoQuestion {
    pub item_id: String,
    pub source: Variant,
    pub masked_text: String,
    pub mask_token: String,
    pub anchor: String,
    pub role: AnchorRole,
    pub target_options: Vec<String>,
}

impl PseudoQuestion {
    pub fn input_text(&self, separator: &str) -> String {
        format!("{} {} {}", self.masked_text, separator, self.anchor)
    }

    pub fn target_text(&self, separator: &str) -> String {
        self.target_options.join(&format!(" {separator} "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RapExample {
    pub item_id: String,
    pub variant: Variant,
    pub anchoring: AnchorRole,
    pub input: String,
    pub target: String,
    pub doc_id: String,
    pub sentence_index: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SkipReason {
    /// The corpus has no sentence containing the anchor.
    NoMatch,
    /// The anchor has no word tokens to search for.
    Unsearchable,
    /// The anchor is a word of the mask token.
    MaskCollision,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkipRecord {
    pub item_id: String,
    pub anchoring: AnchorRole,
    pub anchor: String,
    pub reason: SkipReason,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RapBuild {
    pub examples: Vec<RapExample>,
    pub skipped: Vec<SkipRecord>,
    /// Examples dropped by exact (input, target) deduplication.
    pub deduplicated: usize,
}

/// The anchors of an item: the answer, then each distractor when
/// distractor anchoring is on.
fn anchors(item: &McqItem, anchoring: Anchoring) -> Vec<(AnchorRole, &str, Vec<String>)> {
    let mut out = vec![(AnchorRole::Answer, item.answer.as_str(), item.distractors.clone())];
    if anchoring == Anchoring::WithGtd {
        for (i, d) in item.distractors.iter().enumerate() {
            let mut targets = Vec::with_capacity(item.distractors.len());
            targets.push(item.answer.clone());
            targets.extend(
                item.distractors
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(_, o)| o.clone()),
            );
            out.push((AnchorRole::Distractor(i + 1), d.as_str(), targets));
        }
    }
    out
}

fn build_item(item: &McqItem, index: &CorpusIndex, config: &RapConfig) -> (Vec<RapExample>, Vec<SkipRecord>) {
    let mut examples = Vec::new();
    let mut skipped = Vec::new();
    for (role, anchor, targets) in anchors(item, config.anchoring) {
        let skip = |reason| SkipRecord {
            item_id: item.id.clone(),
            anchoring: role,
            anchor: anchor.to_owned(),
            reason,
        };
        let hits = match index.find_sentences(anchor, usize::MAX) {
            Ok(h) if h.is_empty() => {
                skipped.push(skip(SkipReason::NoMatch));
                continue;
            }
            Ok(h) => h,
            Err(_) => {
                skipped.push(skip(SkipReason::Unsearchable));
                continue;
            }
        };
        let ranked: Vec<SentenceHit> = rank_hits(hits, &item.stem)
            .into_iter()
            .take(config.per_anchor_cap)
            .collect();
        for hit in ranked {
            let text = match config.mode {
                Variant::Sentence => hit.text.clone(),
                Variant::Passage => index
                    .expand_passage(&hit, config.window, config.max_passage_tokens)
                    .expect("hit comes from this index"),
            };
            let masked = match mask_anchor(&normalize_text(&text), anchor, &config.mask_token) {
                Ok(m) => m,
                Err(_) => {
                    skipped.push(skip(SkipReason::MaskCollision));
                    break;
                }
            };
            let pq = PseudoQuestion {
                item_id: item.id.clone(),
                source: config.mode,
                masked_text: masked,
                mask_token: config.mask_token.clone(),
                anchor: anchor.to_owned(),
                role,
                target_options: targets.clone(),
            };
            examples.push(RapExample {
                item_id: item.id.clone(),
                variant: config.mode,
                anchoring: role,
                input: pq.input_text(&config.input_separator),
                target: pq.target_text(&config.target_separator),
                doc_id: hit.doc_id,
                sentence_index: hit.sentence_index,
            });
        }
    }
    (examples, skipped)
}

/// Builds pseudo-question examples for every item. Items are processed in
/// parallel; the output keeps item order, and within an item the answer
/// anchor comes first, then distractors in dataset order, each with its
/// hits in BM25 order against the item stem.
pub fn build_examples(items: &[McqItem], index: &CorpusIndex, config: &RapConfig) -> Result<RapBuild> {
    if items.is_empty() {
        return Err(Error::InvalidArgument("no items to build examples from".into()));
    }
    config.validate()?;

    let per_item: Vec<_> = items.par_iter().map(|it| build_item(it, index, config)).collect();

    let mut build = RapBuild::default();
    let mut seen = HashSet::new();
    for (examples, skipped) in per_item {
        for ex in examples {
            if config.dedup && !seen.insert((ex.input.clone(), ex.target.clone())) {
                build.deduplicated += 1;
                continue;
            }
            build.examples.push(ex);
        }
        build.skipped.extend(skipped);
    }
    for s in &build.skipped {
        log::debug!("skipped {} ({}) anchor {:?}: {:?}", s.item_id, s.anchoring, s.anchor, s.reason);
    }
    Ok(build)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariantCounts {
    pub answer: usize,
    pub gtd: usize,
}

/// Masked sentence/passage counts per variant and anchoring.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RapStats {
    pub per_variant: BTreeMap<Variant, VariantCounts>,
}

impl RapStats {
    pub fn total(&self) -> usize {
        self.per_variant.values().map(|c| c.answer + c.gtd).sum()
    }

    pub fn answer_only(&self, v: Variant) -> usize {
        self.per_variant.get(&v).map_or(0, |c| c.answer)
    }

    /// Answer-anchored plus distractor-anchored count.
    pub fn with_gtd(&self, v: Variant) -> usize {
        self.per_variant.get(&v).map_or(0, |c| c.answer + c.gtd)
    }

    /// Rows in the layout `RAP-S`, `RAP-S w/ GTD`, `RAP-P`, `RAP-P w/ GTD`.
    /// A `w/ GTD` row appears only when distractor-anchored examples exist.
    pub fn rows(&self) -> Vec<(String, usize)> {
        let mut rows = Vec::new();
        for (v, c) in &self.per_variant {
            rows.push((format!("RAP-{}", v.code()), c.answer));
            if c.gtd > 0 {
                rows.push((format!("RAP-{} w/ GTD", v.code()), c.answer + c.gtd));
            }
        }
        rows
    }

    pub fn merge(&mut self, other: &RapStats) {
        for (v, c) in &other.per_variant {
            let e = self.per_variant.entry(*v).or_default();
            e.answer += c.answer;
            e.gtd += c.gtd;
        }
    }
}

pub fn corpus_stats<'a>(examples: impl IntoIterator<Item = &'a RapExample>) -> RapStats {
    let mut stats = RapStats::default();
    for ex in examples {
        let c = stats.per_variant.entry(ex.variant).or_default();
        if ex.anchoring.is_answer() {
            c.answer += 1;
        } else {
            c.gtd += 1;
        }
    }
    stats
}
