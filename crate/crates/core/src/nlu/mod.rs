//! Natural language understanding: intent ranking, negation, polarity, FAQ lookup.
//!
//! The built-in matcher is a deterministic lexical scorer (Dice coefficient over
//! stopword-filtered token multisets). Any [`IntentMatcher`] can replace it.

mod index;
mod negation;
mod tokens;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::config::BotConfig;

pub use index::{EntryKind, IndexEntry, IntentCandidate, IntentIndex};
pub use negation::{detect_negation, fully_negated, negation_in_tokens, NegationSpan};
pub use tokens::{content_tokens, dice, is_stopword, tokenize, Token, STOPWORDS};

const GREETINGS: [&str; 5] = ["hi", "hello", "hey", "greetings", "howdy"];
const GOODBYES: [&str; 3] = ["bye", "goodbye", "farewell"];

/// Ranks tasks for an utterance. Scores must lie in [0, 1] and the list must be sorted
/// best first; candidates below the bot threshold are dropped by the caller.
pub trait IntentMatcher: Send + Sync {
    fn detect_intent(&self, utterance: &str) -> Vec<IntentCandidate>;
}

/// The built-in lexical matcher.
#[derive(Debug, Clone)]
pub struct LexicalMatcher {
    index: Arc<IntentIndex>,
}

impl LexicalMatcher {
    pub fn new(index: Arc<IntentIndex>) -> Self {
        Self { index }
    }
}

impl IntentMatcher for LexicalMatcher {
    fn detect_intent(&self, utterance: &str) -> Vec<IntentCandidate> {
        self.index.rank(utterance, |k| k == EntryKind::Task)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolarityLabel {
    Positive,
    Negative,
    Neutral,
}

impl PolarityLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            PolarityLabel::Positive => "positive",
            PolarityLabel::Negative => "negative",
            PolarityLabel::Neutral => "neutral",
        }
    }
}

impl fmt::Display for PolarityLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaqMatch {
    pub question: String,
    pub answer: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NluResult {
    pub intent: Option<String>,
    pub intent_score: f64,
    /// Thresholded ranking before negation handling.
    pub candidates: Vec<IntentCandidate>,
    pub polarity: PolarityLabel,
    pub faq: Option<FaqMatch>,
    pub negations: Vec<NegationSpan>,
    pub suppressed_intent: Option<String>,
    pub is_greeting: bool,
    pub is_goodbye: bool,
}

impl NluResult {
    pub fn faq_answer(&self) -> Option<&str> {
        self.faq.as_ref().map(|f| f.answer.as_str())
    }
}

/// Picks the intent from ranked candidates. The top candidate is suppressed when every
/// occurrence of its evidence in the utterance sits inside a negation scope, unless the
/// matched sample is negated the same way (so "I don't feel so good" still matches itself).
pub fn resolve_intent(
    utterance: &str,
    candidates: &[IntentCandidate],
    negations: &[NegationSpan],
) -> (Option<IntentCandidate>, Option<String>) {
    let Some(top) = candidates.first() else {
        return (None, None);
    };
    let tokens = tokenize(utterance);
    let negated = |c: &IntentCandidate| {
        if !fully_negated(&tokens, negations, &c.evidence_tokens) {
            return false;
        }
        let sample_tokens = tokenize(&c.matched_sample);
        let sample_neg = negation_in_tokens(&sample_tokens);
        !fully_negated(&sample_tokens, &sample_neg, &c.evidence_tokens)
    };
    if !negated(top) {
        return (Some(top.clone()), None);
    }
    let next = candidates
        .iter()
        .skip(1)
        .find(|c| c.task_name != top.task_name && !negated(c))
        .cloned();
    (next, Some(top.task_name.clone()))
}

/// Polarity from the polarity samples; a negation cue without a positive match counts as negative.
pub fn classify_polarity(utterance: &str, index: &IntentIndex) -> PolarityLabel {
    let best = index
        .rank(utterance, |k| matches!(k, EntryKind::Polarity(_)))
        .into_iter()
        .next();
    match best.as_ref().map(|c| c.task_name.as_str()) {
        Some("positive") => PolarityLabel::Positive,
        Some("negative") => PolarityLabel::Negative,
        _ if !detect_negation(utterance).is_empty() => PolarityLabel::Negative,
        _ => PolarityLabel::Neutral,
    }
}

/// Best FAQ above the index threshold.
pub fn match_faq(utterance: &str, index: &IntentIndex, config: &BotConfig) -> Option<FaqMatch> {
    let best = index.rank(utterance, |k| k == EntryKind::Faq).into_iter().next()?;
    let faq = config.faqs.get(best.task_name.parse::<usize>().ok()?)?;
    Some(FaqMatch {
        question: faq.question.clone(),
        answer: faq.answer.clone(),
        score: best.score,
    })
}

/// NLU front end bound to one bot.
#[derive(Clone)]
pub struct Nlu {
    index: Arc<IntentIndex>,
    matcher: Arc<dyn IntentMatcher>,
    config: Arc<BotConfig>,
}

impl fmt::Debug for Nlu {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Nlu").field("entries", &self.index.entries.len()).finish()
    }
}

impl Nlu {
    pub fn new(config: Arc<BotConfig>) -> Self {
        let index = Arc::new(IntentIndex::from_config(&config));
        let matcher = Arc::new(LexicalMatcher::new(index.clone()));
        Self {
            index,
            matcher,
            config,
        }
    }

    /// Swaps in another intent matcher; polarity and FAQ stay lexical.
    pub fn with_matcher(config: Arc<BotConfig>, matcher: Arc<dyn IntentMatcher>) -> Self {
        Self {
            index: Arc::new(IntentIndex::from_config(&config)),
            matcher,
            config,
        }
    }

    pub fn index(&self) -> &IntentIndex {
        &self.index
    }

    pub fn analyze(&self, utterance: &str) -> NluResult {
        let threshold = self.index.threshold;
        let candidates: Vec<IntentCandidate> = self
            .matcher
            .detect_intent(utterance)
            .into_iter()
            .filter(|c| c.score >= threshold && c.score <= 1.0)
            .collect();
        let negations = detect_negation(utterance);
        let (intent, suppressed_intent) = resolve_intent(utterance, &candidates, &negations);
        let words: Vec<String> = tokenize(utterance).into_iter().map(|t| t.norm).collect();
        let has = |w: &str| words.iter().any(|x| x == w);
        NluResult {
            intent_score: intent.as_ref().map(|c| c.score).unwrap_or(0.0),
            intent: intent.map(|c| c.task_name),
            candidates,
            polarity: classify_polarity(utterance, &self.index),
            faq: match_faq(utterance, &self.index, &self.config),
            negations,
            suppressed_intent,
            is_greeting: GREETINGS.iter().any(|g| has(g)),
            is_goodbye: GOODBYES.iter().any(|g| has(g)) || words.windows(2).any(|w| w[0] == "see" && w[1] == "you"),
        }
    }
}
