//! Slow, obvious reference implementations. They share no code with the
//! library beyond the public data types, and are used to check it.

#![allow(dead_code)]

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap, HashSet};

use dforge_core::kg::Triplet;

/// Lowercase, whitespace runs folded to one space, trimmed.
pub fn fold(s: &str) -> String {
    let lower: String = s.chars().flat_map(char::to_lowercase).collect();
    lower.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// `[start, end)` char spans of word tokens: runs of alphanumerics, where
/// a single hyphen between two alphanumerics stays inside the token.
pub fn token_spans(chars: &[char]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        if !chars[i].is_alphanumeric() {
            i += 1;
            continue;
        }
        let start = i;
        while i < chars.len() {
            let c = chars[i];
            let inner_hyphen = c == '-'
                && i > start
                && chars[i - 1].is_alphanumeric()
                && chars.get(i + 1).is_some_and(|n| n.is_alphanumeric());
            if c.is_alphanumeric() || inner_hyphen {
                i += 1;
            } else {
                break;
            }
        }
        out.push((start, i));
    }
    out
}

pub fn tokens(s: &str) -> Vec<String> {
    let chars: Vec<char> = fold(s).chars().collect();
    token_spans(&chars)
        .into_iter()
        .map(|(a, b)| chars[a..b].iter().collect())
        .collect()
}

/// Positions in the folded text where the folded anchor occurs, starting
/// at a token start and ending at a token end. Overlaps are counted.
pub fn token_occurrences(text: &str, anchor: &str) -> usize {
    let t: Vec<char> = fold(text).chars().collect();
    let a: Vec<char> = fold(anchor).chars().collect();
    if a.is_empty() || a.len() > t.len() {
        return 0;
    }
    let spans = token_spans(&t);
    let starts: HashSet<usize> = spans.iter().map(|s| s.0).collect();
    let ends: HashSet<usize> = spans.iter().map(|s| s.1).collect();
    (0..=t.len() - a.len())
        .filter(|&p| t[p..p + a.len()] == a[..] && starts.contains(&p) && ends.contains(&(p + a.len())))
        .count()
}

fn label(s: &str) -> String {
    s.replace('_', " ")
        .to_lowercase()
        .split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
}

/// Every stored edge whose two endpoint labels are keywords, sorted and
/// without repeats. Self-loops never count.
pub fn filter_edges(rows: &[(String, String, String)], keywords: &BTreeSet<String>) -> Vec<Triplet> {
    let mut out: BTreeSet<Triplet> = BTreeSet::new();
    for (h, r, t) in rows {
        let (h, t) = (label(h), label(t));
        if h != t && keywords.contains(&h) && keywords.contains(&t) {
            out.insert(Triplet::new(h, r.trim(), t));
        }
    }
    out.into_iter().collect()
}

pub fn cosine(u: &[f64], v: &[f64]) -> f64 {
    let dot: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
    let nu: f64 = u.iter().map(|a| a * a).sum::<f64>().sqrt();
    let nv: f64 = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    (dot / (nu * nv)).clamp(-1.0, 1.0)
}

/// Scores every triplet, sorts the whole list and keeps the first `k`.
pub fn full_sort_rank(
    triplets: &[Triplet],
    qa: &[f64],
    vectors: &HashMap<String, Vec<f64>>,
    k: usize,
) -> Vec<(Triplet, f64)> {
    let mut all: Vec<(Triplet, f64)> = triplets
        .iter()
        .map(|t| (t.clone(), cosine(&vectors[&t.text()], qa)))
        .collect();
    all.sort_by(|a, b| match b.1.partial_cmp(&a.1).unwrap() {
        Ordering::Equal => a.0.cmp(&b.0),
        o => o,
    });
    all.truncate(k);
    all
}

/// Triplets with any endpoint equal (after lowercasing and whitespace
/// folding) to any option.
pub fn relevant_by_endpoints(triplets: &[Triplet], options: &[String]) -> BTreeSet<Triplet> {
    let opts: HashSet<String> = options.iter().map(|o| label_no_underscore(o)).collect();
    triplets
        .iter()
        .filter(|t| opts.contains(&label_no_underscore(&t.head)) || opts.contains(&label_no_underscore(&t.tail)))
        .cloned()
        .collect()
}

fn label_no_underscore(s: &str) -> String {
    s.to_lowercase().split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Scores for one item computed from sets: the top-k predictions are
/// deduplicated and intersected with the deduplicated gold set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NaiveScores {
    pub p1: f64,
    pub r1: f64,
    pub pk: f64,
    pub rk: f64,
    pub f1k: f64,
    pub mrr: f64,
    pub ndcg: f64,
}

pub fn naive_scores(ranked: &[String], gold: &[String], k: usize) -> NaiveScores {
    let gold: HashSet<String> = gold.iter().map(|g| label_no_underscore(g)).collect();
    // a prediction is a hit the first time its text is seen and it is gold
    let mut seen = HashSet::new();
    let hit: Vec<bool> = ranked
        .iter()
        .map(|p| {
            let p = label_no_underscore(p);
            seen.insert(p.clone()) && gold.contains(&p)
        })
        .collect();
    let hits_at = |n: usize| hit.iter().take(n).filter(|&&h| h).count() as f64;
    let p1 = hits_at(1);
    let r1 = hits_at(1) / gold.len() as f64;
    let pk = hits_at(k) / k as f64;
    let rk = hits_at(k) / gold.len() as f64;
    let f1k = if pk + rk > 0.0 { 2.0 * pk * rk / (pk + rk) } else { 0.0 };
    let mrr = hit.iter().position(|&h| h).map_or(0.0, |i| 1.0 / (i as f64 + 1.0));
    let mut dcg = 0.0;
    for (i, &h) in hit.iter().take(k).enumerate() {
        if h {
            dcg += 1.0 / (i as f64 + 2.0).log2();
        }
    }
    let mut idcg = 0.0;
    for i in 0..k.min(gold.len()) {
        idcg += 1.0 / (i as f64 + 2.0).log2();
    }
    NaiveScores {
        p1,
        r1,
        pk,
        rk,
        f1k,
        mrr,
        ndcg: dcg / idcg,
    }
}
