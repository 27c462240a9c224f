//! Corpus ingestion, sentence retrieval and passage expansion.
//!
//! Documents are segmented into sentences and every sentence is posted
//! under each of its normalized tokens. Documents are stored sorted by id, so
//! the global sentence order is `(doc_id, sentence_index)` order and every
//! posting list is sorted in that order too.

pub mod bm25;
pub mod segment;

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::text::{normalize_text, tokenize, NormalizedView};

pub use bm25::Bm25Params;
pub use segment::split_sentences;

/// Magic prefix of a persisted index; followed by a one-byte format version.
pub const INDEX_MAGIC: &[u8; 5] = b"DFIDX";
pub const INDEX_VERSION: u8 = b'1';

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    #[serde(rename = "id")]
    pub doc_id: String,
    pub text: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorpusFormat {
    /// Documents separated by blank lines.
    PlainText,
    /// One `{"id", "text"}` object per line.
    Jsonl,
}

impl CorpusFormat {
    /// `.jsonl` and `.json` files are JSONL, everything else plain text.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("jsonl") | Some("json") => CorpusFormat::Jsonl,
            _ => CorpusFormat::PlainText,
        }
    }
}

impl FromStr for CorpusFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" | "txt" | "plain" => Ok(CorpusFormat::PlainText),
            "jsonl" => Ok(CorpusFormat::Jsonl),
            other => Err(Error::InvalidArgument(format!("unknown corpus format {other:?}"))),
        }
    }
}

/// Splits plain text into documents at blank lines. Ids are `doc-NNNNNN`
/// in file order.
pub fn parse_plain_text(raw: &str) -> Vec<Document> {
    let mut docs = Vec::new();
    let mut current = String::new();
    let flush = |current: &mut String, docs: &mut Vec<Document>| {
        if !current.trim().is_empty() {
            docs.push(Document {
                doc_id: format!("doc-{:06}", docs.len()),
                text: std::mem::take(current),
            });
        }
        current.clear();
    };
    for line in raw.lines() {
        if line.trim().is_empty() {
            flush(&mut current, &mut docs);
        } else {
            if !current.is_empty() {
                current.push('\n');
            }
            current.push_str(line);
        }
    }
    flush(&mut current, &mut docs);
    docs
}

pub fn parse_jsonl_documents(raw: &str, context: &str) -> Result<Vec<Document>> {
    raw.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).map_err(|e| Error::parse(context, i + 1, e)))
        .collect()
}

pub fn read_documents(path: impl AsRef<Path>, format: CorpusFormat) -> Result<Vec<Document>> {
    let path = path.as_ref();
    let raw = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    match format {
        CorpusFormat::PlainText => Ok(parse_plain_text(&raw)),
        CorpusFormat::Jsonl => parse_jsonl_documents(&raw, &path.display().to_string()),
    }
}

/// A retrieved sentence with the character spans where the anchor matched.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentenceHit {
    pub doc_id: String,
    pub sentence_index: usize,
    pub text: String,
    pub anchor_spans: Vec<(usize, usize)>,
}

impl SentenceHit {
    fn key_cmp(&self, other: &Self) -> Ordering {
        self.doc_id
            .cmp(&other.doc_id)
            .then(self.sentence_index.cmp(&other.sentence_index))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexStats {
    pub documents: usize,
    pub sentences: usize,
    pub tokens: usize,
    pub vocabulary: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct DocEntry {
    id: String,
    first_sentence: u32,
    sentence_count: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct StoredSentence {
    doc: u32,
    text: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorpusIndex {
    docs: Vec<DocEntry>,
    sentences: Vec<StoredSentence>,
    postings: BTreeMap<String, Vec<u32>>,
    stats: IndexStats,
    #[serde(skip)]
    doc_lookup: HashMap<String, u32>,
}

impl PartialEq for CorpusIndex {
    fn eq(&self, other: &Self) -> bool {
        self.docs == other.docs
            && self.sentences == other.sentences
            && self.postings == other.postings
            && self.stats == other.stats
    }
}

impl CorpusIndex {
    /// Reads and indexes a corpus file, picking the format from its extension.
    pub fn ingest(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Self::ingest_with_format(path, CorpusFormat::from_path(path))
    }

    pub fn ingest_with_format(path: impl AsRef<Path>, format: CorpusFormat) -> Result<Self> {
        Self::build(read_documents(path, format)?)
    }

    /// Builds the index. Segmentation and tokenization run in parallel per
    /// document; the merge is sequential, so the result does not depend on
    /// the thread count.
    pub fn build(mut docs: Vec<Document>) -> Result<Self> {
        docs.sort_by(|a, b| a.doc_id.cmp(&b.doc_id));
        if let Some(w) = docs.windows(2).find(|w| w[0].doc_id == w[1].doc_id) {
            return Err(Error::DuplicateId(w[0].doc_id.clone()));
        }

        let segmented: Vec<Vec<(String, Vec<String>)>> = docs
            .par_iter()
            .map(|d| {
                split_sentences(&d.text)
                    .into_iter()
                    .map(|s| {
                        let toks = tokenize(&s);
                        (s, toks)
                    })
                    .collect()
            })
            .collect();

        let total: usize = segmented.iter().map(Vec::len).sum();
        if total == 0 {
            return Err(Error::EmptyCorpus);
        }
        if total > u32::MAX as usize {
            return Err(Error::InvalidArgument("corpus exceeds 2^32 sentences".into()));
        }

        let mut entries = Vec::with_capacity(docs.len());
        let mut sentences = Vec::with_capacity(total);
        let mut postings: HashMap<String, Vec<u32>> = HashMap::new();
        let mut token_total = 0usize;
        for (doc_idx, (doc, sents)) in docs.iter().zip(segmented).enumerate() {
            entries.push(DocEntry {
                id: doc.doc_id.clone(),
                first_sentence: sentences.len() as u32,
                sentence_count: sents.len() as u32,
            });
            for (text, toks) in sents {
                let sid = sentences.len() as u32;
                token_total += toks.len();
                for t in toks {
                    let list = postings.entry(t).or_default();
                    if list.last() != Some(&sid) {
                        list.push(sid);
                    }
                }
                sentences.push(StoredSentence {
                    doc: doc_idx as u32,
                    text,
                });
            }
        }

        let stats = IndexStats {
            documents: entries.len(),
            sentences: sentences.len(),
            tokens: token_total,
            vocabulary: postings.len(),
        };
        let mut index = CorpusIndex {
            docs: entries,
            sentences,
            postings: postings.into_iter().collect(),
            stats,
            doc_lookup: HashMap::new(),
        };
        index.rebuild_lookup();
        Ok(index)
    }

    fn rebuild_lookup(&mut self) {
        self.doc_lookup = self
            .docs
            .iter()
            .enumerate()
            .map(|(i, d)| (d.id.clone(), i as u32))
            .collect();
    }

    pub fn stats(&self) -> &IndexStats {
        &self.stats
    }

    /// Sentence ids posted under a normalized token.
    pub fn postings(&self, token: &str) -> &[u32] {
        self.postings.get(token).map_or(&[], Vec::as_slice)
    }

    pub fn vocabulary(&self) -> impl Iterator<Item = &str> {
        self.postings.keys().map(String::as_str)
    }

    /// All sentences as `(doc_id, sentence_index, text)` in index order.
    pub fn sentences(&self) -> impl Iterator<Item = (&str, usize, &str)> {
        self.sentences.iter().enumerate().map(move |(sid, s)| {
            let doc = &self.docs[s.doc as usize];
            (doc.id.as_str(), sid - doc.first_sentence as usize, s.text.as_str())
        })
    }

    pub fn sentence(&self, doc_id: &str, sentence_index: usize) -> Option<&str> {
        self.document_sentences(doc_id)?
            .get(sentence_index)
            .map(|s| s.text.as_str())
    }

    fn document_sentences(&self, doc_id: &str) -> Option<&[StoredSentence]> {
        let doc = &self.docs[*self.doc_lookup.get(doc_id)? as usize];
        let first = doc.first_sentence as usize;
        Some(&self.sentences[first..first + doc.sentence_count as usize])
    }

    fn hit_for(&self, sid: u32, spans: Vec<(usize, usize)>) -> SentenceHit {
        let s = &self.sentences[sid as usize];
        let doc = &self.docs[s.doc as usize];
        SentenceHit {
            doc_id: doc.id.clone(),
            sentence_index: (sid - doc.first_sentence) as usize,
            text: s.text.clone(),
            anchor_spans: spans,
        }
    }

    /// Sentences containing `anchor` at token boundaries, in index order,
    /// at most `limit` of them. Multi-word anchors match contiguous tokens.
    pub fn find_sentences(&self, anchor: &str, limit: usize) -> Result<Vec<SentenceHit>> {
        if limit == 0 {
            return Err(Error::InvalidArgument("limit must be positive".into()));
        }
        let needle: Vec<char> = normalize_text(anchor).chars().collect();
        if needle.is_empty() {
            return Err(Error::InvalidArgument("anchor is empty after normalization".into()));
        }
        let mut terms = tokenize(anchor);
        if terms.is_empty() {
            return Err(Error::InvalidArgument(format!("anchor {anchor:?} contains no word tokens")));
        }
        terms.sort_unstable();
        terms.dedup();

        let mut lists: Vec<&[u32]> = terms.iter().map(|t| self.postings(t)).collect();
        lists.sort_by_key(|l| l.len());
        let (shortest, rest) = lists.split_first().expect("non-empty term list");

        let mut hits = Vec::new();
        for &sid in *shortest {
            if !rest.iter().all(|l| l.binary_search(&sid).is_ok()) {
                continue;
            }
            let spans = NormalizedView::new(&self.sentences[sid as usize].text).find(&needle);
            if !spans.is_empty() {
                hits.push(self.hit_for(sid, spans));
                if hits.len() == limit {
                    break;
                }
            }
        }
        Ok(hits)
    }

    /// The hit sentence plus up to `window` neighbours on each side from the
    /// same document. Neighbours are added nearest first, alternating left
    /// and right, while the passage stays within `max_tokens`; a side stops
    /// growing at the first sentence that does not fit. The hit sentence is
    /// always included.
    pub fn expand_passage(&self, hit: &SentenceHit, window: usize, max_tokens: usize) -> Result<String> {
        let sents = self
            .document_sentences(&hit.doc_id)
            .filter(|s| hit.sentence_index < s.len())
            .ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "hit {}#{} does not resolve in the index",
                    hit.doc_id, hit.sentence_index
                ))
            })?;
        let centre = hit.sentence_index;
        let len_of = |i: usize| NormalizedView::new(&sents[i].text).token_count();

        let mut total = len_of(centre);
        let (mut lo, mut hi) = (centre, centre);
        let (mut left_open, mut right_open) = (true, true);
        for d in 1..=window {
            if left_open {
                if d <= centre && total + len_of(centre - d) <= max_tokens {
                    total += len_of(centre - d);
                    lo = centre - d;
                } else {
                    left_open = false;
                }
            }
            if right_open {
                if centre + d < sents.len() && total + len_of(centre + d) <= max_tokens {
                    total += len_of(centre + d);
                    hi = centre + d;
                } else {
                    right_open = false;
                }
            }
            if !left_open && !right_open {
                break;
            }
        }
        Ok(sents[lo..=hi]
            .iter()
            .map(|s| s.text.as_str())
            .collect::<Vec<_>>()
            .join(" "))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        w.write_all(INDEX_MAGIC).map_err(|e| Error::io(path, e))?;
        w.write_all(&[INDEX_VERSION]).map_err(|e| Error::io(path, e))?;
        bincode::serialize_into(&mut w, self).map_err(|e| Error::IndexFormat(e.to_string()))?;
        w.flush().map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
        let mut r = BufReader::new(file);
        let mut header = [0u8; 6];
        r.read_exact(&mut header)
            .map_err(|_| Error::IndexFormat(format!("{}: truncated header", path.display())))?;
        if &header[..5] != INDEX_MAGIC {
            return Err(Error::IndexFormat(format!("{}: not a corpus index", path.display())));
        }
        if header[5] != INDEX_VERSION {
            return Err(Error::IndexFormat(format!(
                "{}: unsupported index version {:?}, expected {:?}",
                path.display(),
                header[5] as char,
                INDEX_VERSION as char
            )));
        }
        let mut index: CorpusIndex =
            bincode::deserialize_from(r).map_err(|e| Error::IndexFormat(e.to_string()))?;
        index.rebuild_lookup();
        Ok(index)
    }
}

/// Orders hits by descending BM25 score of their text against `query`,
/// computed over the hits as the collection. Ties, including the all-zero
/// scores of an empty query, fall back to `(doc_id, sentence_index)`.
pub fn rank_hits(hits: Vec<SentenceHit>, query: &str) -> Vec<SentenceHit> {
    rank_hits_with(hits, query, Bm25Params::default())
}

pub fn rank_hits_with(hits: Vec<SentenceHit>, query: &str, params: Bm25Params) -> Vec<SentenceHit> {
    if hits.len() < 2 {
        return hits;
    }
    let docs: Vec<Vec<String>> = hits.iter().map(|h| tokenize(&h.text)).collect();
    let scores = bm25::score_collection(&docs, &tokenize(query), params);
    let mut scored: Vec<(f64, SentenceHit)> = scores.into_iter().zip(hits).collect();
    scored.sort_by(|(sa, ha), (sb, hb)| sb.total_cmp(sa).then_with(|| ha.key_cmp(hb)));
    scored.into_iter().map(|(_, h)| h).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::char_slice;

    const FIG1: &str = "The kidneys are two reddish-brown bean-shaped organs. They are found in vertebrates.\n\n\
                        Lungs are used for breathing. The liver is large.";

    fn fig1() -> CorpusIndex {
        CorpusIndex::build(parse_plain_text(FIG1)).unwrap()
    }

    #[test]
    fn plain_text_documents() {
        let docs = parse_plain_text("a b.\nc d.\n\n\n e f.\n");
        assert_eq!(docs.len(), 2);
        assert_eq!(docs[0].doc_id, "doc-000000");
        assert_eq!(docs[1].text, " e f.");
    }

    #[test]
    fn one_document_two_sentences() {
        let idx = CorpusIndex::build(parse_plain_text("First one. Second one.")).unwrap();
        assert_eq!(idx.stats().sentences, 2);
        assert_eq!(idx.stats().documents, 1);
        assert_eq!(idx.stats().tokens, 4);
    }

    #[test]
    fn token_posting_contains_sentence() {
        let idx = fig1();
        let posted = idx.postings("kidneys");
        assert_eq!(posted.len(), 1);
        let (_, _, text) = idx.sentences().nth(posted[0] as usize).unwrap();
        assert_eq!(text, "The kidneys are two reddish-brown bean-shaped organs.");
    }

    #[test]
    fn empty_corpus_is_an_error() {
        assert!(matches!(CorpusIndex::build(vec![]), Err(Error::EmptyCorpus)));
        let blank = vec![Document {
            doc_id: "x".into(),
            text: "   ".into(),
        }];
        assert!(matches!(CorpusIndex::build(blank), Err(Error::EmptyCorpus)));
    }

    #[test]
    fn duplicate_doc_ids_are_rejected() {
        let docs = vec![
            Document {
                doc_id: "a".into(),
                text: "x.".into(),
            },
            Document {
                doc_id: "a".into(),
                text: "y.".into(),
            },
        ];
        assert!(matches!(CorpusIndex::build(docs), Err(Error::DuplicateId(_))));
    }

    #[test]
    fn find_examples() {
        let idx = fig1();
        let hits = idx.find_sentences("kidneys", 8).unwrap();
        assert_eq!(hits.len(), 1);
        assert_eq!(hits[0].text, "The kidneys are two reddish-brown bean-shaped organs.");
        assert_eq!(hits[0].doc_id, "doc-000000");
        assert_eq!(hits[0].sentence_index, 0);

        assert!(idx.find_sentences("xylophonium", 8).unwrap().is_empty());
        assert!(idx.find_sentences("kidney", 8).unwrap().is_empty());

        let multi = idx.find_sentences("bean-shaped organs", 8).unwrap();
        assert_eq!(multi.len(), 1);
        let (a, b) = multi[0].anchor_spans[0];
        assert_eq!(char_slice(&multi[0].text, a, b), "bean-shaped organs");
    }

    #[test]
    fn find_rejects_bad_arguments() {
        let idx = fig1();
        assert!(idx.find_sentences("   ", 3).is_err());
        assert!(idx.find_sentences("...", 3).is_err());
        assert!(idx.find_sentences("kidneys", 0).is_err());
    }

    #[test]
    fn find_respects_limit() {
        let idx = fig1();
        assert_eq!(idx.find_sentences("are", 8).unwrap().len(), 3);
        assert_eq!(idx.find_sentences("are", 2).unwrap().len(), 2);
    }

    #[test]
    fn passage_windows() {
        let idx = CorpusIndex::build(parse_plain_text("Alpha one. Beta two. Gamma three.\n\nDelta four. Echo five.")).unwrap();
        let hit = idx.find_sentences("beta", 1).unwrap().remove(0);
        assert_eq!(idx.expand_passage(&hit, 0, 100).unwrap(), "Beta two.");
        assert_eq!(
            idx.expand_passage(&hit, 1, 100).unwrap(),
            "Alpha one. Beta two. Gamma three."
        );
        // token cap: each sentence has 2 tokens
        assert_eq!(idx.expand_passage(&hit, 1, 4).unwrap(), "Alpha one. Beta two.");
        assert_eq!(idx.expand_passage(&hit, 1, 1).unwrap(), "Beta two.");

        let hit = idx.find_sentences("delta", 1).unwrap().remove(0);
        assert_eq!(idx.expand_passage(&hit, 5, 100).unwrap(), "Delta four. Echo five.");
    }

    #[test]
    fn passage_for_unknown_hit_is_an_error() {
        let idx = fig1();
        let mut hit = idx.find_sentences("kidneys", 1).unwrap().remove(0);
        hit.sentence_index = 99;
        assert!(idx.expand_passage(&hit, 1, 10).is_err());
        hit.doc_id = "nope".into();
        assert!(idx.expand_passage(&hit, 1, 10).is_err());
    }

    fn hit(doc: &str, idx: usize, text: &str) -> SentenceHit {
        SentenceHit {
            doc_id: doc.into(),
            sentence_index: idx,
            text: text.into(),
            anchor_spans: vec![(0, 1)],
        }
    }

    #[test]
    fn rank_hits_examples() {
        let single = vec![hit("a", 0, "x")];
        assert_eq!(rank_hits(single.clone(), "anything"), single);

        let hits = vec![
            hit("a", 0, "the sky is blue today"),
            hit("b", 0, "kidneys filter the blood well"),
        ];
        let ranked = rank_hits(hits.clone(), "kidneys filter blood");
        assert_eq!(ranked[0].doc_id, "b");

        assert_eq!(rank_hits(hits.clone(), ""), hits);
    }

    #[test]
    fn rank_hits_ties_use_location() {
        let hits = vec![hit("b", 0, "same words"), hit("a", 1, "same words"), hit("a", 0, "same words")];
        let ranked = rank_hits(hits, "same");
        let keys: Vec<_> = ranked.iter().map(|h| (h.doc_id.as_str(), h.sentence_index)).collect();
        assert_eq!(keys, vec![("a", 0), ("a", 1), ("b", 0)]);
    }

    #[test]
    fn persistence_round_trip_and_version_check() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.idx");
        let idx = fig1();
        idx.save(&path).unwrap();
        let back = CorpusIndex::load(&path).unwrap();
        assert_eq!(idx, back);
        assert_eq!(back.find_sentences("kidneys", 1).unwrap().len(), 1);
        assert_eq!(back.sentence("doc-000001", 1), Some("The liver is large."));

        let mut bytes = fs::read(&path).unwrap();
        bytes[5] = b'2';
        fs::write(&path, &bytes).unwrap();
        let err = CorpusIndex::load(&path).unwrap_err();
        assert!(err.to_string().contains("version"), "{err}");

        fs::write(&path, b"garbage!").unwrap();
        assert!(matches!(CorpusIndex::load(&path), Err(Error::IndexFormat(_))));
    }

    #[test]
    fn persisted_bytes_are_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        let (a, b) = (dir.path().join("a"), dir.path().join("b"));
        fig1().save(&a).unwrap();
        fig1().save(&b).unwrap();
        assert_eq!(fs::read(a).unwrap(), fs::read(b).unwrap());
    }
}
