//! Text normalization, tokenization and token-boundary matching.
//!
//! Every comparison in the crate goes through the same normalized view of a
//! string: Unicode NFC, per-character lowercasing, whitespace runs collapsed
//! to a single space, leading and trailing whitespace removed.
//!
//! A token is a maximal run of alphanumeric characters, where a hyphen
//! between two alphanumerics is part of the token ("bean-shaped" is one
//! token). A match is *at token boundaries* when neither of its edges falls
//! strictly inside a token of the surrounding text.

use unicode_normalization::UnicodeNormalization;

/// Normalizes `s` for comparison.
pub fn normalize_text(s: &str) -> String {
    let nfc: String = s.nfc().collect();
    NormalizedView::new(&nfc).chars.into_iter().collect()
}

/// Normalization used for knowledge-graph node labels: [`normalize_text`]
/// with underscores read as spaces.
pub fn normalize_label(s: &str) -> String {
    normalize_text(&s.replace('_', " "))
}

/// Normalized tokens of `s`, in order, duplicates kept.
pub fn tokenize(s: &str) -> Vec<String> {
    let nfc: String = s.nfc().collect();
    NormalizedView::new(&nfc).token_strings().collect()
}

/// Splits a camel-case relation name into lowercase words:
/// `RelatedTo` becomes `related to`, `IsA` becomes `is a`.
pub fn split_camel_case(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 4);
    let mut prev_lower = false;
    for c in s.chars() {
        if c == '_' || c.is_whitespace() {
            if !out.ends_with(' ') && !out.is_empty() {
                out.push(' ');
            }
            prev_lower = false;
            continue;
        }
        if c.is_uppercase() && prev_lower && !out.ends_with(' ') {
            out.push(' ');
        }
        prev_lower = c.is_lowercase() || c.is_numeric();
        out.extend(c.to_lowercase());
    }
    let trimmed = out.trim_end().len();
    out.truncate(trimmed);
    out
}

/// Returns the substring of `s` between two character offsets.
pub fn char_slice(s: &str, start: usize, end: usize) -> &str {
    let mut indices = s.char_indices().map(|(i, _)| i).chain(std::iter::once(s.len()));
    let begin = indices.nth(start).unwrap_or(s.len());
    let finish = if end > start {
        indices.nth(end - start - 1).unwrap_or(s.len())
    } else {
        begin
    };
    &s[begin..finish]
}

/// Finds every non-overlapping token-boundary occurrence of `anchor` in
/// `text`, comparing under normalization. Offsets are character offsets into
/// `text`, end-exclusive. `text` is expected to be NFC already.
pub fn find_token_matches(text: &str, anchor: &str) -> Vec<(usize, usize)> {
    let needle: Vec<char> = normalize_text(anchor).chars().collect();
    if needle.is_empty() {
        return Vec::new();
    }
    NormalizedView::new(text).find(&needle)
}

/// Whether `anchor` occurs in `text` at token boundaries.
pub fn contains_token_match(text: &str, anchor: &str) -> bool {
    !find_token_matches(text, anchor).is_empty()
}

#[inline]
fn is_word_char(c: char) -> bool {
    c.is_alphanumeric()
}

const NO_TOKEN: u32 = u32::MAX;

/// The normalized character stream of a string, with a map back to the
/// source character offsets and a token id per character.
pub(crate) struct NormalizedView {
    chars: Vec<char>,
    /// Source char offset where each normalized char starts.
    src_start: Vec<usize>,
    /// Source char offset one past the source run each normalized char covers.
    src_end: Vec<usize>,
    token_of: Vec<u32>,
    tokens: Vec<(usize, usize)>,
}

impl NormalizedView {
    pub(crate) fn new(text: &str) -> Self {
        let mut chars = Vec::with_capacity(text.len());
        let mut src_start = Vec::with_capacity(text.len());
        let mut src_end = Vec::with_capacity(text.len());
        let mut pending_space: Option<usize> = None;
        for (i, c) in text.chars().enumerate() {
            if c.is_whitespace() {
                if pending_space.is_none() {
                    pending_space = Some(i);
                }
                continue;
            }
            if let Some(ws) = pending_space.take() {
                if !chars.is_empty() {
                    chars.push(' ');
                    src_start.push(ws);
                    src_end.push(i);
                }
            }
            for lc in c.to_lowercase() {
                chars.push(lc);
                src_start.push(i);
                src_end.push(i + 1);
            }
        }

        let mut token_of = vec![NO_TOKEN; chars.len()];
        let mut tokens = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            if !is_word_char(chars[i]) {
                i += 1;
                continue;
            }
            let start = i;
            let mut j = i + 1;
            loop {
                if j < chars.len() && is_word_char(chars[j]) {
                    j += 1;
                } else if j + 1 < chars.len()
                    && chars[j] == '-'
                    && is_word_char(chars[j - 1])
                    && is_word_char(chars[j + 1])
                {
                    j += 2;
                } else {
                    break;
                }
            }
            let id = tokens.len() as u32;
            for t in &mut token_of[start..j] {
                *t = id;
            }
            tokens.push((start, j));
            i = j;
        }

        NormalizedView {
            chars,
            src_start,
            src_end,
            token_of,
            tokens,
        }
    }

    pub(crate) fn token_strings(&self) -> impl Iterator<Item = String> + '_ {
        self.tokens
            .iter()
            .map(move |&(s, e)| self.chars[s..e].iter().collect())
    }

    pub(crate) fn token_count(&self) -> usize {
        self.tokens.len()
    }

    /// Position `p` lies between `chars[p - 1]` and `chars[p]`.
    fn is_boundary(&self, p: usize) -> bool {
        if p == 0 || p == self.chars.len() {
            return true;
        }
        let left = self.token_of[p - 1];
        left == NO_TOKEN || left != self.token_of[p]
    }

    /// Whether `p` starts a fresh source character (not the middle of a
    /// multi-char lowercase expansion).
    fn is_source_edge(&self, p: usize) -> bool {
        p == 0 || p == self.chars.len() || self.src_start[p] != self.src_start[p - 1]
    }

    pub(crate) fn find(&self, needle: &[char]) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        let n = needle.len();
        if n == 0 || n > self.chars.len() {
            return out;
        }
        let mut p = 0;
        while p + n <= self.chars.len() {
            if self.chars[p] == needle[0]
                && self.chars[p..p + n] == *needle
                && self.is_boundary(p)
                && self.is_boundary(p + n)
                && self.is_source_edge(p)
                && self.is_source_edge(p + n)
            {
                out.push((self.src_start[p], self.src_end[p + n - 1]));
                p += n;
            } else {
                p += 1;
            }
        }
        out
    }
}
