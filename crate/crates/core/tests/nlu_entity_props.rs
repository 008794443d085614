mod common;

use std::collections::{BTreeSet, HashSet};

use chrono::NaiveDate;
use proptest::prelude::*;
use tod_core::config::SemanticType;
use tod_core::entity::{
    extract_candidates, normalize, resolve_slots, similarity, EntityCandidate, ExtractionMethod, SlotRequest,
    SlotResolution,
};
use tod_core::nlu::{content_tokens, Nlu};

const BOTS: [&str; 3] = ["health", "shopping", "flight"];

fn noise() -> Vec<&'static str> {
    include_str!("fixtures/noise.txt").lines().filter(|l| !l.trim().is_empty()).collect()
}

fn nlu(bot: &str) -> Nlu {
    common::engine(bot).nlu().clone()
}

#[test]
fn exact_samples_score_one() {
    for bot in BOTS {
        let cfg = common::load(bot);
        let nlu = nlu(bot);
        for task in cfg.user_tasks() {
            for s in &task.samples {
                let r = nlu.analyze(s);
                let hit = r.candidates.iter().find(|c| c.task_name == task.name);
                let hit = hit.unwrap_or_else(|| panic!("{bot}: `{s}` did not surface {}", task.name));
                assert_eq!(hit.score, 1.0, "{bot}: `{s}`");
                assert!(r.candidates.iter().all(|c| c.score <= 1.0 && c.score >= cfg.intent_threshold));
            }
        }
    }
}

#[test]
fn health_threshold_is_point_six() {
    assert_eq!(common::load("health").intent_threshold, 0.6);
}

#[test]
fn noise_fixture_has_fifty_disjoint_utterances() {
    let lines = noise();
    assert_eq!(lines.len(), 50);
    for bot in BOTS {
        let cfg = common::load(bot);
        let vocab: HashSet<String> = cfg
            .tasks
            .values()
            .flat_map(|t| t.samples.iter())
            .chain(cfg.faqs.iter().map(|f| &f.question))
            .flat_map(|s| content_tokens(s))
            .collect();
        for l in &lines {
            for t in content_tokens(l) {
                assert!(!vocab.contains(&t), "{bot}: noise token `{t}` overlaps a sample");
            }
        }
    }
}

#[test]
fn noise_never_matches() {
    let mut false_accepts = 0;
    for bot in BOTS {
        let nlu = nlu(bot);
        for l in noise() {
            let r = nlu.analyze(l);
            if !r.candidates.is_empty() || r.intent.is_some() || r.faq.is_some() {
                false_accepts += 1;
            }
        }
    }
    assert_eq!(false_accepts, 0);
}

#[test]
fn negated_sample_still_matches_itself() {
    let r = nlu("health").analyze("I don't feel so good");
    assert_eq!(r.intent.as_deref(), Some("health_appointment"));
    let r = nlu("shopping").analyze("I don't want to check order status anymore");
    assert_eq!(r.intent, None);
    assert_eq!(r.suppressed_intent.as_deref(), Some("check_order_status"));
}

fn today() -> NaiveDate {
    common::today()
}

fn all_types() -> BTreeSet<SemanticType> {
    SemanticType::ALL.into_iter().filter(|t| *t != SemanticType::UserUtt).collect()
}

fn piece() -> impl Strategy<Value = String> {
    prop_oneof![
        Just("San Francisco".to_string()),
        Just("los angeles".to_string()),
        Just("tomorrow".to_string()),
        Just("March 3".to_string()),
        Just("at 3pm".to_string()),
        Just("10:30".to_string()),
        Just("jane.doe@example.com".to_string()),
        Just("Dr. John Smith".to_string()),
        (10000u32..99999).prop_map(|z| z.to_string()),
        (0u32..5000).prop_map(|n| n.to_string()),
        "[a-z]{1,8}",
        Just("é café ünïcode".to_string()),
    ]
}

fn utterance() -> impl Strategy<Value = String> {
    prop::collection::vec(piece(), 1..6).prop_map(|p| p.join(" "))
}

fn cand(ty: SemanticType, value: &str, start: usize) -> EntityCandidate {
    EntityCandidate {
        semantic_type: ty,
        span: (start, start + value.len()),
        raw_text: value.into(),
        normalized_value: value.into(),
        method: ExtractionMethod::Pattern,
        confidence: 1.0,
        entity_hint: None,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn spans_index_the_utterance(u in utterance()) {
        let n = u.chars().count();
        for c in extract_candidates(&u, &all_types(), &[], today()) {
            prop_assert!(c.span.0 < c.span.1 && c.span.1 <= n);
            let raw: String = u.chars().skip(c.span.0).take(c.span.1 - c.span.0).collect();
            prop_assert_eq!(&raw, &c.raw_text);
            prop_assert!(c.confidence > 0.0 && c.confidence <= 1.0);
        }
    }

    #[test]
    fn normalization_is_idempotent(u in utterance()) {
        for c in extract_candidates(&u, &all_types(), &[], today()) {
            let again = normalize(c.semantic_type, &c.normalized_value, today());
            prop_assert_eq!(again.as_deref(), Some(c.normalized_value.as_str()), "{:?}", c);
        }
    }

    #[test]
    fn only_expected_types_come_back(u in utterance(), pick in prop::sample::subsequence(SemanticType::ALL.to_vec(), 0..4)) {
        let expected: BTreeSet<_> = pick.into_iter().collect();
        for c in extract_candidates(&u, &expected, &[], today()) {
            prop_assert!(expected.contains(&c.semantic_type));
        }
    }

    #[test]
    fn resolution_never_reuses_a_candidate(
        values in prop::collection::vec((0usize..3, 0u8..4), 0..6),
        slots in prop::collection::vec(0usize..3, 1..4),
    ) {
        let types = [SemanticType::Location, SemanticType::Date, SemanticType::Cardinal];
        let mut pool: Vec<_> = values
            .iter()
            .enumerate()
            .map(|(i, (t, v))| cand(types[*t], &format!("v{v}"), i * 4))
            .collect();
        let requests: Vec<_> = slots
            .iter()
            .enumerate()
            .map(|(i, t)| SlotRequest { entity_name: format!("s{i}"), semantic_type: types[*t] })
            .collect();
        let before = pool.clone();
        let res = resolve_slots(&mut pool, &requests);
        let mut used = HashSet::new();
        for r in &res {
            if let SlotResolution::Assigned(name, c) = r {
                let req = requests.iter().find(|q| &q.entity_name == name).unwrap();
                prop_assert_eq!(c.semantic_type, req.semantic_type);
                prop_assert!(used.insert((c.semantic_type, c.normalized_value.clone())), "value reused");
                prop_assert!(!pool.iter().any(|p| p.semantic_type == c.semantic_type && p.normalized_value == c.normalized_value));
            }
            if let SlotResolution::Ambiguous(_, opts) = r {
                prop_assert!(opts.len() >= 2);
            }
        }
        prop_assert!(pool.len() <= before.len());
        // Resolution stops at the first ambiguous slot.
        if let Some(i) = res.iter().position(|r| matches!(r, SlotResolution::Ambiguous(..))) {
            prop_assert_eq!(i, res.len() - 1);
        }
    }

    #[test]
    fn similarity_is_bounded_and_reflexive(a in "[a-zA-Z ]{0,12}", b in "[a-zA-Z ]{0,12}") {
        let s = similarity(&a, &b);
        prop_assert!((0.0..=1.0).contains(&s));
        prop_assert_eq!(similarity(&a, &a), 1.0);
        prop_assert!((s - similarity(&b, &a)).abs() < 1e-12);
    }
}
