//! MCQ benchmark loading and splitting.
//!
//! Two source formats are accepted: the cloze-style MCQ set (JSONL with
//! `sentence`, `answer`, `distractors`) and SciQ (a JSON array with
//! `question`, `correct_answer`, `distractor1..3`). Both map onto
//! [`McqItem`]; the canonical output is JSONL with
//! `id`, `stem`, `answer`, `distractors`.

use std::collections::HashSet;
use std::fmt;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::text::normalize_text;

/// Distractors per item in both benchmarks.
pub const DISTRACTOR_COUNT: usize = 3;

/// Default cloze blank: three or more underscores.
pub const DEFAULT_BLANK_PATTERN: &str = "_{3,}";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct McqItem {
    pub id: String,
    pub stem: String,
    pub answer: String,
    pub distractors: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain_tag: Option<String>,
}

impl McqItem {
    /// Checks the item invariants: non-empty answer and distractors, and no
    /// distractor equal to the answer under normalization.
    pub fn validate(&self) -> Result<()> {
        let invalid = |message: String| Error::InvalidRecord {
            id: self.id.clone(),
            message,
        };
        let answer = normalize_text(&self.answer);
        if answer.is_empty() {
            return Err(invalid("empty answer".into()));
        }
        if self.distractors.is_empty() {
            return Err(invalid("no distractors".into()));
        }
        for (i, d) in self.distractors.iter().enumerate() {
            let d = normalize_text(d);
            if d.is_empty() {
                return Err(invalid(format!("distractor {} is empty", i + 1)));
            }
            if d == answer {
                return Err(invalid(format!("distractor {} equals the answer", i + 1)));
            }
        }
        Ok(())
    }

    /// Whether the stem contains a cloze blank.
    pub fn has_blank(&self, blank: &Regex) -> bool {
        blank.is_match(&self.stem)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DatasetFormat {
    Mcq,
    Sciq,
    /// The canonical JSONL written by [`write_canonical`].
    Canonical,
}

impl FromStr for DatasetFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mcq" => Ok(DatasetFormat::Mcq),
            "sciq" => Ok(DatasetFormat::Sciq),
            "canonical" => Ok(DatasetFormat::Canonical),
            other => Err(Error::InvalidArgument(format!("unknown dataset format {other:?}"))),
        }
    }
}

impl fmt::Display for DatasetFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DatasetFormat::Mcq => "mcq",
            DatasetFormat::Sciq => "sciq",
            DatasetFormat::Canonical => "canonical",
        })
    }
}

#[derive(Debug, Deserialize)]
struct McqRecord {
    #[serde(default)]
    id: Option<String>,
    sentence: String,
    answer: String,
    distractors: Vec<String>,
}

#[derive(Debug, Deserialize)]
struct SciqRecord {
    #[serde(default)]
    id: Option<String>,
    question: String,
    correct_answer: String,
    distractor1: String,
    distractor2: String,
    distractor3: String,
}

/// Loads a dataset file. Record order is preserved and option text is
/// trimmed. Items without an explicit id get `<file stem>-<record index>`.
pub fn load_dataset(path: impl AsRef<Path>, format: DatasetFormat) -> Result<Vec<McqItem>> {
    let path = path.as_ref();
    let raw = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let prefix = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "item".to_owned());
    parse_dataset(&raw, format, &prefix, &path.display().to_string())
}

/// Parses dataset text. `context` names the source in error messages.
pub fn parse_dataset(raw: &str, format: DatasetFormat, id_prefix: &str, context: &str) -> Result<Vec<McqItem>> {
    let default_id = |i: usize| format!("{id_prefix}-{i:05}");
    let items = match format {
        DatasetFormat::Mcq => jsonl_records::<McqRecord>(raw, context)?
            .into_iter()
            .map(|(i, r)| McqItem {
                id: r.id.unwrap_or_else(|| default_id(i)),
                stem: r.sentence.trim().to_owned(),
                answer: r.answer.trim().to_owned(),
                distractors: r.distractors.iter().map(|d| d.trim().to_owned()).collect(),
                domain_tag: None,
            })
            .collect::<Vec<_>>(),
        DatasetFormat::Canonical => jsonl_records::<McqItem>(raw, context)?
            .into_iter()
            .map(|(_, mut item)| {
                item.stem = item.stem.trim().to_owned();
                item.answer = item.answer.trim().to_owned();
                item.distractors.iter_mut().for_each(|d| *d = d.trim().to_owned());
                item
            })
            .collect(),
        DatasetFormat::Sciq => {
            if raw.trim().is_empty() {
                return Ok(Vec::new());
            }
            let values: Vec<serde_json::Value> =
                serde_json::from_str(raw).map_err(|e| Error::parse(context, 0, format!("not a JSON array: {e}")))?;
            let mut items = Vec::with_capacity(values.len());
            for (i, v) in values.into_iter().enumerate() {
                let r: SciqRecord = serde_json::from_value(v).map_err(|e| Error::parse(context, i, e))?;
                items.push(McqItem {
                    id: r.id.unwrap_or_else(|| default_id(i)),
                    stem: r.question.trim().to_owned(),
                    answer: r.correct_answer.trim().to_owned(),
                    distractors: [r.distractor1, r.distractor2, r.distractor3]
                        .iter()
                        .map(|d| d.trim().to_owned())
                        .collect(),
                    domain_tag: None,
                });
            }
            items
        }
    };

    let mut seen = HashSet::with_capacity(items.len());
    for item in &items {
        if item.distractors.len() != DISTRACTOR_COUNT {
            return Err(Error::InvalidRecord {
                id: item.id.clone(),
                message: format!(
                    "expected {DISTRACTOR_COUNT} distractors, found {}",
                    item.distractors.len()
                ),
            });
        }
        item.validate()?;
        if !seen.insert(item.id.as_str()) {
            return Err(Error::DuplicateId(item.id.clone()));
        }
    }
    Ok(items)
}

/// Parses non-blank JSONL lines, returning (record index, value). Record
/// indices count non-blank lines from zero; errors report 1-based line numbers.
fn jsonl_records<T: serde::de::DeserializeOwned>(raw: &str, context: &str) -> Result<Vec<(usize, T)>> {
    let mut out = Vec::new();
    for (lineno, line) in raw.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let rec = serde_json::from_str(line).map_err(|e| Error::parse(context, lineno + 1, e))?;
        out.push((out.len(), rec));
    }
    Ok(out)
}

/// Writes items as canonical JSONL.
pub fn write_canonical(path: impl AsRef<Path>, items: &[McqItem]) -> Result<()> {
    let path = path.as_ref();
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    for item in items {
        serde_json::to_writer(&mut w, item)?;
        w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetSplit {
    pub train: Vec<McqItem>,
    pub dev: Vec<McqItem>,
    pub test: Vec<McqItem>,
}

impl DatasetSplit {
    pub fn counts(&self) -> (usize, usize, usize) {
        (self.train.len(), self.dev.len(), self.test.len())
    }
}

/// Splits `items` into train and dev. The train part gets
/// `floor(train_fraction * N)` items chosen by a seeded shuffle; dev takes
/// the rest. Both parts keep the input order.
pub fn split_train_dev(items: &[McqItem], train_fraction: f64, seed: u64) -> Result<(Vec<McqItem>, Vec<McqItem>)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "train fraction must lie in (0, 1), got {train_fraction}"
        )));
    }
    let n = items.len();
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 items to form train and dev splits, got {n}"
        )));
    }
    // guard against 0.29 * 100 = 28.999999999999996
    let n_train = (train_fraction * n as f64 + 1e-9).floor() as usize;
    if n_train == 0 || n_train == n {
        return Err(Error::InvalidArgument(format!(
            "train fraction {train_fraction} leaves an empty split for {n} items"
        )));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut in_train = vec![false; n];
    for &i in &order[..n_train] {
        in_train[i] = true;
    }
    let (train, dev): (Vec<_>, Vec<_>) = items.iter().zip(&in_train).partition(|(_, &t)| t);
    Ok((
        train.into_iter().map(|(it, _)| it.clone()).collect(),
        dev.into_iter().map(|(it, _)| it.clone()).collect(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn item(id: &str) -> McqItem {
        McqItem {
            id: id.into(),
            stem: format!("stem {id}"),
            answer: "a".into(),
            distractors: vec!["b".into(), "c".into(), "d".into()],
            domain_tag: None,
        }
    }

    #[test]
    fn sciq_record_maps_fields() {
        let raw = r#"[{"question":"What filters blood?","correct_answer":" kidneys ",
            "distractor1":"lungs","distractor2":"pancreas","distractor3":"liver","support":""}]"#;
        let items = parse_dataset(raw, DatasetFormat::Sciq, "test", "t").unwrap();
        assert_eq!(items.len(), 1);
        assert_eq!(items[0].answer, "kidneys");
        assert_eq!(items[0].distractors, vec!["lungs", "pancreas", "liver"]);
        assert_eq!(items[0].id, "test-00000");
    }

    #[test]
    fn mcq_jsonl_preserves_order_and_trims() {
        let raw = "{\"sentence\":\"the ____ are organs\",\"answer\":\"kidneys\",\"distractors\":[\" lungs\",\"pancreas\",\"liver \"]}\n\n\
                   {\"sentence\":\"b\",\"answer\":\"x\",\"distractors\":[\"y\",\"z\",\"w\"]}\n";
        let items = parse_dataset(raw, DatasetFormat::Mcq, "train", "t").unwrap();
        assert_eq!(items.len(), 2);
        assert_eq!(items[0].distractors, vec!["lungs", "pancreas", "liver"]);
        assert_eq!(items[1].id, "train-00001");
        let blank = Regex::new(DEFAULT_BLANK_PATTERN).unwrap();
        assert!(items[0].has_blank(&blank));
        assert!(!items[1].has_blank(&blank));
    }

    #[test]
    fn empty_inputs_load_as_empty() {
        assert!(parse_dataset("", DatasetFormat::Mcq, "x", "t").unwrap().is_empty());
        assert!(parse_dataset("  \n", DatasetFormat::Sciq, "x", "t").unwrap().is_empty());
    }

    #[test]
    fn malformed_line_is_named() {
        let raw = "{\"sentence\":\"a\",\"answer\":\"b\",\"distractors\":[\"c\",\"d\",\"e\"]}\n{oops\n";
        match parse_dataset(raw, DatasetFormat::Mcq, "x", "file.jsonl") {
            Err(Error::Parse { record, context, .. }) => {
                assert_eq!(record, 2);
                assert_eq!(context, "file.jsonl");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn wrong_distractor_count_names_id() {
        let raw = "{\"id\":\"q7\",\"sentence\":\"a\",\"answer\":\"b\",\"distractors\":[\"c\",\"d\"]}\n";
        match parse_dataset(raw, DatasetFormat::Mcq, "x", "t") {
            Err(Error::InvalidRecord { id, .. }) => assert_eq!(id, "q7"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn distractor_equal_to_answer_is_rejected() {
        let raw = "{\"sentence\":\"a\",\"answer\":\"Lungs\",\"distractors\":[\"lungs \",\"d\",\"e\"]}\n";
        assert!(matches!(
            parse_dataset(raw, DatasetFormat::Mcq, "x", "t"),
            Err(Error::InvalidRecord { .. })
        ));
    }

    #[test]
    fn duplicate_ids_are_rejected() {
        let raw = "{\"id\":\"a\",\"sentence\":\"a\",\"answer\":\"b\",\"distractors\":[\"c\",\"d\",\"e\"]}\n\
                   {\"id\":\"a\",\"sentence\":\"a\",\"answer\":\"b\",\"distractors\":[\"c\",\"d\",\"e\"]}\n";
        assert!(matches!(
            parse_dataset(raw, DatasetFormat::Mcq, "x", "t"),
            Err(Error::DuplicateId(_))
        ));
    }

    #[test]
    fn split_sizes() {
        let items: Vec<_> = (0..2321).map(|i| item(&i.to_string())).collect();
        let (train, dev) = split_train_dev(&items, 0.9, 7).unwrap();
        assert_eq!((train.len(), dev.len()), (2088, 233));

        let items: Vec<_> = (0..10).map(|i| item(&i.to_string())).collect();
        for seed in 0..20 {
            let (train, dev) = split_train_dev(&items, 0.9, seed).unwrap();
            assert_eq!((train.len(), dev.len()), (9, 1));
        }
    }

    #[test]
    fn split_is_deterministic_and_disjoint() {
        let items: Vec<_> = (0..100).map(|i| item(&i.to_string())).collect();
        let a = split_train_dev(&items, 0.9, 42).unwrap();
        let b = split_train_dev(&items, 0.9, 42).unwrap();
        assert_eq!(a, b);
        let c = split_train_dev(&items, 0.9, 43).unwrap();
        assert_ne!(a.1, c.1);
        let train: HashSet<_> = a.0.iter().map(|i| &i.id).collect();
        assert!(a.1.iter().all(|i| !train.contains(&i.id)));
    }

    #[test]
    fn split_rejects_degenerate_inputs() {
        assert!(split_train_dev(&[item("a")], 0.9, 0).is_err());
        assert!(split_train_dev(&[], 0.9, 0).is_err());
        let two = [item("a"), item("b")];
        assert!(split_train_dev(&two, 1.0, 0).is_err());
        assert!(split_train_dev(&two, 0.0, 0).is_err());
        assert!(split_train_dev(&two, 0.4, 0).is_err());
        assert!(split_train_dev(&two, 0.5, 0).is_ok());
    }
}
