//! Distractor-generation metrics.
//!
//! Predictions are ranked distractor lists; gold is the item's distractor
//! set. A prediction matches a gold distractor under normalized equality and
//! each gold distractor is credited at most once.
//!
//! * `P@k = |top-k ∩ gold| / k`, `R@k = |top-k ∩ gold| / |gold|`, `F1@k`
//!   their harmonic mean (0 when both are 0).
//! * `MRR` is the reciprocal rank of the first matching prediction.
//! * `NDCG@k` uses binary relevance with a `log2(i + 1)` discount, and the
//!   ideal ranking places `min(k, |gold|)` matches first.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dataset::McqItem;
use crate::error::{Error, Result};
use crate::text::normalize_text;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prediction {
    pub item_id: String,
    #[serde(rename = "distractors")]
    pub ranked_distractors: Vec<String>,
}

pub fn is_match(pred: &str, gold: &str) -> bool {
    normalize_text(pred) == normalize_text(gold)
}

/// Relevance of each prediction in rank order: true when it matches a gold
/// item not already credited to an earlier prediction.
fn relevance(ranked: &[String], gold: &[String]) -> Vec<bool> {
    let mut gold: Vec<String> = gold.iter().map(|g| normalize_text(g)).collect();
    let mut seen = HashSet::new();
    gold.retain(|g| seen.insert(g.clone()));
    let mut credited = vec![false; gold.len()];
    ranked
        .iter()
        .map(|p| {
            let p = normalize_text(p);
            match gold.iter().enumerate().position(|(j, g)| !credited[j] && *g == p) {
                Some(j) => {
                    credited[j] = true;
                    true
                }
                None => false,
            }
        })
        .collect()
}

fn distinct_gold(gold: &[String]) -> usize {
    gold.iter().map(|g| normalize_text(g)).collect::<HashSet<_>>().len()
}

pub fn precision_recall_f1_at_k(ranked: &[String], gold: &[String], k: usize) -> Result<(f64, f64, f64)> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    if gold.is_empty() {
        return Err(Error::InvalidArgument("gold set is empty".into()));
    }
    let top = &ranked[..ranked.len().min(k)];
    let hits = relevance(top, gold).into_iter().filter(|&r| r).count() as f64;
    let p = hits / k as f64;
    let r = hits / distinct_gold(gold) as f64;
    let f1 = if p + r == 0.0 { 0.0 } else { 2.0 * p * r / (p + r) };
    Ok((p, r, f1))
}

pub fn mrr(ranked: &[String], gold: &[String]) -> f64 {
    relevance(ranked, gold)
        .iter()
        .position(|&r| r)
        .map_or(0.0, |i| 1.0 / (i + 1) as f64)
}

pub fn ndcg_at_k(ranked: &[String], gold: &[String], k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    if gold.is_empty() {
        return Err(Error::InvalidArgument("gold set is empty".into()));
    }
    let discount = |i: usize| 1.0 / ((i + 2) as f64).log2();
    let top = &ranked[..ranked.len().min(k)];
    let dcg: f64 = relevance(top, gold)
        .iter()
        .enumerate()
        .filter(|(_, &r)| r)
        .map(|(i, _)| discount(i))
        .sum();
    let idcg: f64 = (0..k.min(distinct_gold(gold))).map(discount).sum();
    Ok(dcg / idcg)
}

/// Per-item scores in [0, 1].
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ItemScores {
    pub p_at_1: f64,
    pub r_at_1: f64,
    pub p_at_k: f64,
    pub r_at_k: f64,
    pub f1_at_k: f64,
    pub mrr: f64,
    pub ndcg_at_k: f64,
}

pub fn score_item(ranked: &[String], gold: &[String], k: usize) -> Result<ItemScores> {
    let (p1, r1, _) = precision_recall_f1_at_k(ranked, gold, 1)?;
    let (pk, rk, fk) = precision_recall_f1_at_k(ranked, gold, k)?;
    Ok(ItemScores {
        p_at_1: p1,
        r_at_1: r1,
        p_at_k: pk,
        r_at_k: rk,
        f1_at_k: fk,
        mrr: mrr(ranked, gold),
        ndcg_at_k: ndcg_at_k(ranked, gold, k)?,
    })
}

/// Macro-averaged scores, scaled to percentages.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub k: usize,
    pub n_items: usize,
    /// Dataset items with no prediction, scored as empty predictions.
    pub n_missing: usize,
    pub p_at_1: f64,
    pub r_at_1: f64,
    pub p_at_k: f64,
    pub r_at_k: f64,
    pub f1_at_k: f64,
    pub mrr: f64,
    pub ndcg_at_k: f64,
}

impl EvalReport {
    /// Column headers and values in table order: P@1, R@1, F1@k, MRR, NDCG@k.
    pub fn columns(&self) -> Vec<(String, f64)> {
        vec![
            ("P@1".into(), self.p_at_1),
            ("R@1".into(), self.r_at_1),
            (format!("F1@{}", self.k), self.f1_at_k),
            ("MRR".into(), self.mrr),
            (format!("NDCG@{}", self.k), self.ndcg_at_k),
        ]
    }

    /// Aligned plain-text table, values with two decimals.
    pub fn to_table(&self) -> String {
        let cols = self.columns();
        let width = cols.iter().map(|(h, _)| h.len()).max().unwrap_or(0).max(6);
        let header: Vec<String> = cols.iter().map(|(h, _)| format!("{h:>width$}")).collect();
        let values: Vec<String> = cols.iter().map(|(_, v)| format!("{v:>width$.2}")).collect();
        format!("{}\n{}\n", header.join("  "), values.join("  "))
    }
}

impl fmt::Display for EvalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_table())
    }
}

/// Scores every dataset item against its prediction and macro-averages.
/// Items without a prediction score as empty predictions and are counted in
/// `n_missing`.
pub fn evaluate(preds: &[Prediction], dataset: &[McqItem], k: usize) -> Result<EvalReport> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let known: HashSet<&str> = dataset.iter().map(|i| i.id.as_str()).collect();
    let mut by_id: BTreeMap<&str, &Prediction> = BTreeMap::new();
    for p in preds {
        if !known.contains(p.item_id.as_str()) {
            return Err(Error::InvalidRecord {
                id: p.item_id.clone(),
                message: "prediction for an item not in the dataset".into(),
            });
        }
        if by_id.insert(p.item_id.as_str(), p).is_some() {
            return Err(Error::DuplicateId(p.item_id.clone()));
        }
    }

    let mut sum = ItemScores::default();
    let mut missing = 0;
    for item in dataset {
        let ranked: &[String] = match by_id.get(item.id.as_str()) {
            Some(p) => &p.ranked_distractors,
            None => {
                missing += 1;
                &[]
            }
        };
        let s = score_item(ranked, &item.distractors, k)?;
        sum.p_at_1 += s.p_at_1;
        sum.r_at_1 += s.r_at_1;
        sum.p_at_k += s.p_at_k;
        sum.r_at_k += s.r_at_k;
        sum.f1_at_k += s.f1_at_k;
        sum.mrr += s.mrr;
        sum.ndcg_at_k += s.ndcg_at_k;
    }
    if missing > 0 {
        log::warn!("{missing} dataset items have no prediction; scored as empty");
    }
    let n = dataset.len();
    let scale = |x: f64| if n == 0 { 0.0 } else { 100.0 * x / n as f64 };
    Ok(EvalReport {
        k,
        n_items: n,
        n_missing: missing,
        p_at_1: scale(sum.p_at_1),
        r_at_1: scale(sum.r_at_1),
        p_at_k: scale(sum.p_at_k),
        r_at_k: scale(sum.r_at_k),
        f1_at_k: scale(sum.f1_at_k),
        mrr: scale(sum.mrr),
        ndcg_at_k: scale(sum.ndcg_at_k),
    })
}

pub fn parse_predictions(raw: &str, context: &str) -> Result<Vec<Prediction>> {
    raw.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).map_err(|e| Error::parse(context, i + 1, e)))
        .collect()
}

pub fn load_predictions(path: impl AsRef<Path>) -> Result<Vec<Prediction>> {
    let path = path.as_ref();
    let raw = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_predictions(&raw, &path.display().to_string())
}
