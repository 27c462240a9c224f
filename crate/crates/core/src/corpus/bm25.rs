//! Okapi BM25 over a small in-memory collection.

use std::collections::HashMap;

pub const DEFAULT_K1: f64 = 1.2;
pub const DEFAULT_B: f64 = 0.75;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bm25Params {
    pub k1: f64,
    pub b: f64,
}

impl Default for Bm25Params {
    fn default() -> Self {
        Bm25Params {
            k1: DEFAULT_K1,
            b: DEFAULT_B,
        }
    }
}

/// Scores each tokenized document against the (deduplicated) query terms,
/// treating `docs` as the whole collection. IDF is the non-negative variant
/// `ln(1 + (N - df + 0.5) / (df + 0.5))`.
pub fn score_collection(docs: &[Vec<String>], query: &[String], params: Bm25Params) -> Vec<f64> {
    let n = docs.len();
    if n == 0 {
        return Vec::new();
    }
    let mut terms: Vec<&str> = query.iter().map(String::as_str).collect();
    terms.sort_unstable();
    terms.dedup();
    if terms.is_empty() {
        return vec![0.0; n];
    }

    let avgdl = docs.iter().map(Vec::len).sum::<usize>() as f64 / n as f64;
    let tfs: Vec<HashMap<&str, usize>> = docs
        .iter()
        .map(|d| {
            let mut tf = HashMap::new();
            for t in d {
                *tf.entry(t.as_str()).or_insert(0) += 1;
            }
            tf
        })
        .collect();

    let idf: Vec<f64> = terms
        .iter()
        .map(|t| {
            let df = tfs.iter().filter(|tf| tf.contains_key(t)).count() as f64;
            (1.0 + (n as f64 - df + 0.5) / (df + 0.5)).ln()
        })
        .collect();

    docs.iter()
        .zip(&tfs)
        .map(|(doc, tf)| {
            let len_norm = if avgdl > 0.0 {
                1.0 - params.b + params.b * doc.len() as f64 / avgdl
            } else {
                1.0
            };
            terms
                .iter()
                .zip(&idf)
                .map(|(t, idf)| {
                    let f = *tf.get(t).unwrap_or(&0) as f64;
                    if f == 0.0 {
                        0.0
                    } else {
                        idf * f * (params.k1 + 1.0) / (f + params.k1 * len_norm)
                    }
                })
                .sum()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<String> {
        s.split_whitespace().map(str::to_owned).collect()
    }

    #[test]
    fn hand_computed_two_document_case() {
        // doc0 shares 3 query terms, doc1 none. N=2, df=1 for each shared term:
        // idf = ln(1 + 1.5/1.5) = ln 2. Both docs have 4 tokens so avgdl = 4
        // and the length norm is 1: per-term score = ln2 * 2.2 / 2.2 = ln 2.
        let docs = vec![toks("kidneys filter blood daily"), toks("the sky is blue")];
        let q = toks("kidneys filter blood");
        let s = score_collection(&docs, &q, Bm25Params::default());
        assert!((s[0] - 3.0 * 2f64.ln()).abs() < 1e-12);
        assert_eq!(s[1], 0.0);
    }

    #[test]
    fn empty_query_scores_zero() {
        let docs = vec![toks("a b"), toks("c")];
        assert_eq!(score_collection(&docs, &[], Bm25Params::default()), vec![0.0, 0.0]);
    }

    #[test]
    fn repeated_query_terms_count_once() {
        let docs = vec![toks("a b"), toks("c d")];
        let once = score_collection(&docs, &toks("a"), Bm25Params::default());
        let twice = score_collection(&docs, &toks("a a"), Bm25Params::default());
        assert_eq!(once, twice);
    }
}
