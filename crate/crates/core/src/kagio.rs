//! Knowledge-augmented generation inputs.
//!
//! The generator input is the question, the answer and the ranked triplets
//! joined by a field separator; the target is the gold distractors joined by
//! an option separator. With no triplets the input reduces to the plain
//! `q </s> a` text-to-text baseline.

use serde::{Deserialize, Serialize};

use crate::dataset::McqItem;
use crate::kg::Triplet;

pub const DEFAULT_MAX_TRIPLETS: usize = 50;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Separators {
    pub field: String,
    pub option: String,
}

impl Default for Separators {
    fn default() -> Self {
        Separators {
            field: "</s>".into(),
            option: "<sep>".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KagExample {
    pub item_id: String,
    pub input: String,
    pub target: String,
    pub triplet_count: usize,
}

impl KagExample {
    /// Splits the target back into options.
    pub fn target_options(&self, seps: &Separators) -> Vec<String> {
        self.target
            .split(&format!(" {} ", seps.option))
            .map(str::to_owned)
            .collect()
    }
}

/// Serializes one item with the first `max_triplets` of `triplets`, which
/// must already be in rank order.
pub fn serialize_kag(item: &McqItem, triplets: &[Triplet], max_triplets: usize, seps: &Separators) -> KagExample {
    let field = format!(" {} ", seps.field);
    let used = &triplets[..triplets.len().min(max_triplets)];
    let mut input = String::new();
    input.push_str(item.stem.trim());
    input.push_str(&field);
    input.push_str(item.answer.trim());
    for t in used {
        input.push_str(&field);
        input.push_str(&t.text());
    }
    KagExample {
        item_id: item.id.clone(),
        input,
        target: item.distractors.join(&format!(" {} ", seps.option)),
        triplet_count: used.len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn item() -> McqItem {
        McqItem {
            id: "fig1".into(),
            stem: "the [MASK] are two reddish-brown bean-shaped organs".into(),
            answer: "kidneys".into(),
            distractors: vec!["lungs".into(), "pancreas".into(), "liver".into()],
            domain_tag: None,
        }
    }

    #[test]
    fn no_triplets_is_the_plain_baseline() {
        let ex = serialize_kag(&item(), &[], 50, &Separators::default());
        assert_eq!(ex.input, "the [MASK] are two reddish-brown bean-shaped organs </s> kidneys");
        assert_eq!(ex.target, "lungs <sep> pancreas <sep> liver");
        assert_eq!(ex.triplet_count, 0);
    }

    #[test]
    fn running_example() {
        let ex = serialize_kag(
            &item(),
            &[Triplet::new("kidney", "RelatedTo", "organ")],
            50,
            &Separators::default(),
        );
        assert_eq!(
            ex.input,
            "the [MASK] are two reddish-brown bean-shaped organs </s> kidneys </s> kidney related to organ"
        );
        assert_eq!(ex.triplet_count, 1);
    }

    #[test]
    fn cap_keeps_rank_prefix() {
        let ts: Vec<_> = (0..60).map(|i| Triplet::new(format!("h{i}"), "IsA", "t")).collect();
        let ex = serialize_kag(&item(), &ts, 50, &Separators::default());
        assert_eq!(ex.triplet_count, 50);
        // q, a and 50 triplets: 51 separators
        assert_eq!(ex.input.matches(" </s> ").count(), 51);
        assert!(ex.input.ends_with("h49 is a t"));
        assert!(!ex.input.contains("h50"));
    }

    #[test]
    fn target_round_trip() {
        let seps = Separators::default();
        let ex = serialize_kag(&item(), &[], 50, &seps);
        assert_eq!(ex.target_options(&seps), item().distractors);
    }
}
