//! Rule-based sentence segmentation.
//!
//! A boundary is terminal punctuation (`.`, `!`, `?`), optionally followed by
//! closing quotes or brackets, then whitespace, then an uppercase letter.
//! A period after a known abbreviation or a single-letter initial does not
//! end a sentence.

use unicode_normalization::UnicodeNormalization;

const ABBREVIATIONS: &[&str] = &[
    "mr", "mrs", "ms", "dr", "prof", "sr", "jr", "st", "mt", "vs", "etc", "e.g", "i.e", "cf", "al", "inc",
    "ltd", "co", "corp", "no", "nos", "fig", "figs", "approx", "dept", "est", "gen", "gov", "sen", "rep",
    "col", "lt", "sgt", "capt", "cmdr", "u.s", "u.k", "u.n", "a.m", "p.m", "jan", "feb", "mar", "apr", "jun",
    "jul", "aug", "sep", "sept", "oct", "nov", "dec", "ca", "vol", "pp", "ed", "eds",
];

fn is_closer(c: char) -> bool {
    matches!(c, '"' | '\'' | ')' | ']' | '}' | '\u{201d}' | '\u{2019}' | '\u{bb}')
}

/// Splits `text` into sentences. The text is NFC-normalized and whitespace
/// runs (including newlines) are collapsed; each returned sentence is
/// trimmed and non-empty.
pub fn split_sentences(text: &str) -> Vec<String> {
    let flat: Vec<char> = {
        let nfc: String = text.nfc().collect();
        let mut out = Vec::with_capacity(nfc.len());
        let mut in_ws = false;
        for c in nfc.chars() {
            if c.is_whitespace() {
                in_ws = true;
            } else {
                if in_ws && !out.is_empty() {
                    out.push(' ');
                }
                in_ws = false;
                out.push(c);
            }
        }
        out
    };

    let mut sentences = Vec::new();
    let mut start = 0;
    let mut i = 0;
    while i < flat.len() {
        let c = flat[i];
        if matches!(c, '.' | '!' | '?') {
            let mut j = i + 1;
            while j < flat.len() && (is_closer(flat[j]) || matches!(flat[j], '.' | '!' | '?')) {
                j += 1;
            }
            let breaks = j + 1 < flat.len()
                && flat[j] == ' '
                && flat[j + 1].is_uppercase()
                && !(c == '.' && is_abbreviation(&flat[start..i]));
            if breaks {
                push_trimmed(&mut sentences, &flat[start..j]);
                start = j + 1;
                i = j + 1;
                continue;
            }
            i = j;
            continue;
        }
        i += 1;
    }
    if start < flat.len() {
        push_trimmed(&mut sentences, &flat[start..]);
    }
    sentences
}

fn push_trimmed(out: &mut Vec<String>, chars: &[char]) {
    let s: String = chars.iter().collect();
    let s = s.trim();
    if !s.is_empty() {
        out.push(s.to_owned());
    }
}

/// `before` is the text preceding the period; checks its last word.
fn is_abbreviation(before: &[char]) -> bool {
    let word_start = before.iter().rposition(|c| c.is_whitespace()).map_or(0, |p| p + 1);
    let word: String = before[word_start..]
        .iter()
        .skip_while(|c| !c.is_alphanumeric())
        .flat_map(|c| c.to_lowercase())
        .collect();
    if word.is_empty() {
        return false;
    }
    // single-letter initials: "J. K. Rowling"
    let mut chars = word.chars();
    if let (Some(first), None) = (chars.next(), chars.next()) {
        if first.is_alphabetic() {
            return true;
        }
    }
    ABBREVIATIONS.contains(&word.as_str())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splits_on_terminal_punctuation() {
        let s = split_sentences("The kidneys are two reddish-brown bean-shaped organs. They filter blood!  Why? Because.");
        assert_eq!(
            s,
            vec![
                "The kidneys are two reddish-brown bean-shaped organs.",
                "They filter blood!",
                "Why?",
                "Because."
            ]
        );
    }

    #[test]
    fn lowercase_continuation_does_not_split() {
        assert_eq!(split_sentences("Values e.g. three. more text").len(), 1);
        assert_eq!(split_sentences("It costs 3.5 dollars. Done.").len(), 2);
    }

    #[test]
    fn abbreviations_and_initials() {
        assert_eq!(split_sentences("Dr. Smith met Mr. Jones. They talked.").len(), 2);
        assert_eq!(split_sentences("J. K. Rowling wrote it. Yes.").len(), 2);
        assert_eq!(split_sentences("Made in the U.S. Army bases. Next.").len(), 2);
    }

    #[test]
    fn closing_quotes_stay_with_sentence() {
        assert_eq!(
            split_sentences("He said \"stop.\" Then he left."),
            vec!["He said \"stop.\"", "Then he left."]
        );
    }

    #[test]
    fn newlines_are_whitespace() {
        assert_eq!(split_sentences("One line.\nTwo line.\n"), vec!["One line.", "Two line."]);
        assert!(split_sentences("  \n ").is_empty());
        assert_eq!(split_sentences("no terminal punctuation"), vec!["no terminal punctuation"]);
    }
}
