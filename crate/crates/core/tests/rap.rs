#[path = "common/oracles.rs"]
mod oracles;

use std::collections::HashMap;

use dforge_core::rap::{build_examples, mask_anchor, AnchorRole, Anchoring, RapConfig, SkipReason, Variant};
use dforge_core::{CorpusIndex, Document, McqItem};
use proptest::prelude::*;

const WORDS: &[&str] = &["kidneys", "lungs", "liver", "pancreas", "ice", "cream", "bean-shaped", "bean", "red", "salt"];

fn docs() -> impl Strategy<Value = Vec<Document>> {
    prop::collection::vec(
        prop::collection::vec(prop::collection::vec(prop::sample::select(WORDS), 2..8), 1..5),
        1..8,
    )
    .prop_map(|ds| {
        ds.into_iter()
            .enumerate()
            .map(|(i, ss)| Document {
                doc_id: format!("d{i}"),
                text: ss.iter().map(|ws| format!("The {} here.", ws.join(" "))).collect::<Vec<_>>().join(" "),
            })
            .collect()
    })
}

fn items() -> impl Strategy<Value = Vec<McqItem>> {
    prop::collection::vec(prop::sample::subsequence(WORDS, 4).prop_shuffle(), 1..6).prop_map(|v| {
        v.into_iter()
            .enumerate()
            .map(|(i, o)| McqItem {
                id: format!("q{i}"),
                stem: format!("Which {} is {}?", o[1], o[2]),
                answer: o[0].to_owned(),
                distractors: o[1..].iter().map(|s| s.to_string()).collect(),
                domain_tag: None,
            })
            .collect()
    })
}

fn config() -> impl Strategy<Value = RapConfig> {
    (any::<bool>(), any::<bool>(), 1usize..4, 1usize..3, any::<bool>()).prop_map(|(p, gtd, cap, window, dedup)| {
        RapConfig {
            mode: if p { Variant::Passage } else { Variant::Sentence },
            anchoring: if gtd { Anchoring::WithGtd } else { Anchoring::AnswerOnly },
            per_anchor_cap: cap,
            window,
            dedup,
            ..RapConfig::default()
        }
    })
}

fn sorted(mut v: Vec<String>) -> Vec<String> {
    v.sort();
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn examples_mask_and_target_correctly(docs in docs(), items in items(), config in config()) {
        let index = CorpusIndex::build(docs).unwrap();
        let build = build_examples(&items, &index, &config).unwrap();
        let by_id: HashMap<&str, &McqItem> = items.iter().map(|i| (i.id.as_str(), i)).collect();
        let sep_in = format!(" {} ", config.input_separator);
        let sep_out = format!(" {} ", config.target_separator);
        for ex in &build.examples {
            let item = by_id[ex.item_id.as_str()];
            let anchor = match ex.anchoring {
                AnchorRole::Answer => &item.answer,
                AnchorRole::Distractor(i) => &item.distractors[i - 1],
            };
            let (masked, tail) = ex.input.rsplit_once(&sep_in).unwrap();
            prop_assert_eq!(tail, anchor.as_str());
            prop_assert_eq!(oracles::token_occurrences(masked, anchor), 0, "anchor left in {:?}", masked);
            prop_assert!(masked.contains(&config.mask_token));

            let targets: Vec<String> = ex.target.split(&sep_out).map(str::to_owned).collect();
            prop_assert_eq!(targets.len(), item.distractors.len());
            let mut with_anchor = targets.clone();
            with_anchor.push(anchor.clone());
            let mut all = item.distractors.clone();
            all.push(item.answer.clone());
            prop_assert_eq!(sorted(with_anchor), sorted(all));
            if ex.anchoring == AnchorRole::Answer {
                prop_assert_eq!(&targets, &item.distractors);
            }
        }
    }

    #[test]
    fn every_anchor_is_used_or_reported(docs in docs(), items in items(), config in config()) {
        let index = CorpusIndex::build(docs).unwrap();
        let build = build_examples(&items, &index, &config).unwrap();
        let per_item = if config.anchoring == Anchoring::WithGtd { 4 } else { 1 };
        let mut seen: HashMap<(String, AnchorRole), usize> = HashMap::new();
        for ex in &build.examples {
            *seen.entry((ex.item_id.clone(), ex.anchoring)).or_default() += 1;
        }
        for n in seen.values() {
            prop_assert!(*n <= config.per_anchor_cap);
        }
        for s in &build.skipped {
            prop_assert_eq!(s.reason, SkipReason::NoMatch);
            prop_assert!(!seen.contains_key(&(s.item_id.clone(), s.anchoring)));
        }
        if !config.dedup {
            prop_assert_eq!(seen.len() + build.skipped.len(), items.len() * per_item);
        }
    }

    #[test]
    fn builds_are_deterministic(docs in docs(), items in items(), config in config()) {
        let index = CorpusIndex::build(docs).unwrap();
        let a = build_examples(&items, &index, &config).unwrap();
        let b = build_examples(&items, &index, &config).unwrap();
        prop_assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }

    #[test]
    fn datasets_build_independently(docs in docs(), x in items(), y in items(), config in config()) {
        prop_assume!(!config.dedup);
        let index = CorpusIndex::build(docs).unwrap();
        let y: Vec<McqItem> = y.into_iter().map(|mut i| { i.id = format!("y-{}", i.id); i }).collect();
        let alone = build_examples(&x, &index, &config).unwrap().examples;
        let mut both_items = x.clone();
        both_items.extend(y);
        let both = build_examples(&both_items, &index, &config).unwrap().examples;
        prop_assert_eq!(&both[..alone.len()], &alone[..]);
    }
}

#[test]
fn running_example() {
    let masked = mask_anchor(
        "the kidneys are two reddish-brown bean-shaped organs",
        "kidneys",
        "[MASK]",
    )
    .unwrap();
    assert_eq!(masked, "the [MASK] are two reddish-brown bean-shaped organs");
}

#[test]
fn gtd_is_four_times_answer_only_when_everything_matches() {
    let index = CorpusIndex::build(vec![Document {
        doc_id: "d".into(),
        text: "Kidneys filter. Lungs breathe. The liver stores. The pancreas secretes.".into(),
    }])
    .unwrap();
    let items = vec![McqItem {
        id: "q".into(),
        stem: "The ___ are bean-shaped.".into(),
        answer: "kidneys".into(),
        distractors: vec!["lungs".into(), "liver".into(), "pancreas".into()],
        domain_tag: None,
    }];
    let count = |anchoring| {
        let c = RapConfig {
            anchoring,
            per_anchor_cap: 1,
            ..RapConfig::default()
        };
        build_examples(&items, &index, &c).unwrap().examples.len()
    };
    assert_eq!(count(Anchoring::WithGtd), 4 * count(Anchoring::AnswerOnly));
}

#[test]
fn anchors_inside_the_mask_token_are_skipped() {
    let index = CorpusIndex::build(vec![Document {
        doc_id: "d".into(),
        text: "A mask hides the face.".into(),
    }])
    .unwrap();
    let items = vec![McqItem {
        id: "q".into(),
        stem: "What hides the face?".into(),
        answer: "mask".into(),
        distractors: vec!["hat".into(), "scarf".into(), "veil".into()],
        domain_tag: None,
    }];
    let b = build_examples(&items, &index, &RapConfig::default()).unwrap();
    assert!(b.examples.is_empty());
    assert_eq!(b.skipped[0].reason, SkipReason::MaskCollision);
}
