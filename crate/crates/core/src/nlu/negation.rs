use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::tokens::{tokenize, Token};

const CUES: [&str; 9] = ["not", "no", "never", "cannot", "forgot", "dont", "wont", "cant", "didnt"];
const CONJUNCTIONS: [&str; 5] = ["and", "but", "or", "nor", "yet"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NegationSpan {
    pub cue: String,
    /// Token indices, from the cue to the end of its clause.
    pub scope: Range<usize>,
}

impl NegationSpan {
    pub fn covers(&self, token_index: usize) -> bool {
        self.scope.contains(&token_index)
    }
}

fn is_cue(t: &Token) -> bool {
    let raw = t.raw.to_lowercase().replace('\u{2019}', "'");
    CUES.contains(&t.norm.as_str()) || raw.ends_with("n't")
}

/// Negation cues with their scopes. A scope ends before clause punctuation or a
/// coordinating conjunction.
pub fn detect_negation(utterance: &str) -> Vec<NegationSpan> {
    negation_in_tokens(&tokenize(utterance))
}

pub fn negation_in_tokens(tokens: &[Token]) -> Vec<NegationSpan> {
    let mut out = Vec::new();
    for (i, t) in tokens.iter().enumerate() {
        if !is_cue(t) {
            continue;
        }
        let mut end = i + 1;
        while end < tokens.len() && !tokens[end].break_before && !CONJUNCTIONS.contains(&tokens[end].norm.as_str()) {
            end += 1;
        }
        out.push(NegationSpan {
            cue: t.raw.clone(),
            scope: i..end,
        });
    }
    out
}

/// True when at least one token has a norm in `evidence` and every such token is negated.
pub fn fully_negated(tokens: &[Token], spans: &[NegationSpan], evidence: &[String]) -> bool {
    let mut seen = false;
    for (i, t) in tokens.iter().enumerate() {
        if evidence.contains(&t.norm) {
            seen = true;
            if !spans.iter().any(|s| s.covers(i)) {
                return false;
            }
        }
    }
    seen
}
