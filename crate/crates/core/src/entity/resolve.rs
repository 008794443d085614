use serde::{Deserialize, Serialize};

use super::EntityCandidate;
use crate::config::SemanticType;
use crate::nlu::tokenize;

/// An unfilled slot of the current leaf.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlotRequest {
    pub entity_name: String,
    pub semantic_type: SemanticType,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SlotResolution {
    Assigned(String, EntityCandidate),
    Ambiguous(String, Vec<EntityCandidate>),
    NoMatch(String),
}

impl SlotResolution {
    pub fn entity(&self) -> &str {
        match self {
            SlotResolution::Assigned(e, _) | SlotResolution::Ambiguous(e, _) | SlotResolution::NoMatch(e) => e,
        }
    }
}

fn fits(c: &EntityCandidate, slot: &SlotRequest) -> bool {
    c.semantic_type == slot.semantic_type
        && (slot.semantic_type != SemanticType::Picklist
            || c.entity_hint.as_deref().is_none_or(|h| h == slot.entity_name))
}

/// First-fit assignment by type, in slot order. A slot with one matching value takes it;
/// two or more distinct values make that slot ambiguous and stop resolution. Slot names
/// play no part in matching. Consumed candidates are removed from `candidates`.
pub fn resolve_slots(candidates: &mut Vec<EntityCandidate>, slots: &[SlotRequest]) -> Vec<SlotResolution> {
    let mut out = Vec::new();
    for slot in slots {
        let mut matching: Vec<EntityCandidate> = Vec::new();
        for c in candidates.iter().filter(|c| fits(c, slot)) {
            if !matching.iter().any(|m| m.normalized_value == c.normalized_value) {
                matching.push(c.clone());
            }
        }
        match matching.len() {
            0 => out.push(SlotResolution::NoMatch(slot.entity_name.clone())),
            1 => {
                let chosen = matching.pop().expect("one match");
                candidates.retain(|c| !(fits(c, slot) && c.normalized_value == chosen.normalized_value));
                out.push(SlotResolution::Assigned(slot.entity_name.clone(), chosen));
            }
            _ => {
                out.push(SlotResolution::Ambiguous(slot.entity_name.clone(), matching));
                break;
            }
        }
    }
    out
}

const ORDINALS: [&str; 5] = ["first", "second", "third", "fourth", "fifth"];

fn norm_words(s: &str) -> Vec<String> {
    tokenize(s).into_iter().map(|t| t.norm).collect()
}

fn contains_run(hay: &[String], needle: &[String]) -> bool {
    !needle.is_empty() && hay.windows(needle.len()).any(|w| w == needle)
}

/// Picks one of the presented options from a reply: option text, an ordinal
/// ("the second one", "last"), or "the <text> one" naming part of a single option.
pub fn resolve_choice(utterance: &str, options: &[String]) -> Option<usize> {
    let words = norm_words(utterance);
    if words.is_empty() || options.is_empty() {
        return None;
    }
    let option_words: Vec<Vec<String>> = options.iter().map(|o| norm_words(o)).collect();

    // Whole option named; prefer the longest when several fit.
    let mut named: Vec<usize> = (0..options.len()).filter(|&i| contains_run(&words, &option_words[i])).collect();
    named.sort_by_key(|&i| std::cmp::Reverse(option_words[i].len()));
    if let Some(&i) = named.first() {
        let longest = option_words[i].len();
        if named.iter().filter(|&&j| option_words[j].len() == longest).count() == 1 {
            return Some(i);
        }
    }

    if words.iter().any(|w| w == "last") {
        return Some(options.len() - 1);
    }
    if let Some(k) = ORDINALS.iter().position(|o| words.iter().any(|w| w == o)) {
        return (k < options.len()).then_some(k);
    }

    // "the <text> one"
    if let (Some(the), Some(one)) = (words.iter().position(|w| w == "the"), words.iter().rposition(|w| w == "one")) {
        if one > the + 1 {
            let inner = &words[the + 1..one];
            let hits: Vec<usize> = (0..options.len()).filter(|&i| contains_run(&option_words[i], inner)).collect();
            if hits.len() == 1 {
                return Some(hits[0]);
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entity::ExtractionMethod;

    fn loc(v: &str, start: usize) -> EntityCandidate {
        EntityCandidate {
            semantic_type: SemanticType::Location,
            span: (start, start + v.len()),
            raw_text: v.into(),
            normalized_value: v.into(),
            method: ExtractionMethod::Gazetteer,
            confidence: 1.0,
            entity_hint: None,
        }
    }

    fn slot(name: &str, ty: SemanticType) -> SlotRequest {
        SlotRequest {
            entity_name: name.into(),
            semantic_type: ty,
        }
    }

    #[test]
    fn two_locations_are_ambiguous_for_first_slot() {
        let mut c = vec![loc("San Francisco", 5), loc("Los Angeles", 22)];
        let r = resolve_slots(&mut c, &[slot("origin", SemanticType::Location), slot("destination", SemanticType::Location)]);
        assert_eq!(r.len(), 1);
        match &r[0] {
            SlotResolution::Ambiguous(e, cs) => {
                assert_eq!(e, "origin");
                assert_eq!(cs.len(), 2);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn single_candidate_is_assigned_and_consumed() {
        let mut c = vec![loc("Boston", 0)];
        let r = resolve_slots(&mut c, &[slot("origin", SemanticType::Location), slot("destination", SemanticType::Location)]);
        assert!(matches!(&r[0], SlotResolution::Assigned(e, _) if e == "origin"));
        assert!(matches!(&r[1], SlotResolution::NoMatch(e) if e == "destination"));
        assert!(c.is_empty());
    }

    #[test]
    fn positional_choices() {
        let opts = ["Oceanic 443", "Ajira 232", "Qantas 424"].map(String::from).to_vec();
        assert_eq!(resolve_choice("the last one", &opts), Some(2));
        assert_eq!(resolve_choice("Qantas 424", &opts), Some(2));
        assert_eq!(resolve_choice("the second one", &opts), Some(1));
        assert_eq!(resolve_choice("the Ajira one", &opts), Some(1));
        assert_eq!(resolve_choice("the late night one", &opts), None);
    }
}
