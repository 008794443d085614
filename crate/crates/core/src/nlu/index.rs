use serde::{Deserialize, Serialize};

use super::tokens::{content_tokens, dice};
use crate::config::{BotConfig, Polarity};

const BUILTIN_POSITIVE: &[&str] = &[
    "yes", "yeah", "yep", "sure", "correct", "right", "ok", "okay", "of course", "absolutely", "that's right", "yes please",
];
const BUILTIN_NEGATIVE: &[&str] = &["no", "nope", "nah", "not really", "no thanks", "wrong", "I don't think so"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EntryKind {
    Task,
    Faq,
    Polarity(Polarity),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexEntry {
    pub kind: EntryKind,
    /// Task name, FAQ position, or polarity name.
    pub key: String,
    pub sample: String,
    pub tokens: Vec<String>,
}

/// Every scorable sample of a bot in declaration order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntentIndex {
    pub entries: Vec<IndexEntry>,
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntentCandidate {
    pub task_name: String,
    pub score: f64,
    pub matched_sample: String,
    /// Normalized tokens shared by the utterance and the sample.
    pub evidence_tokens: Vec<String>,
}

impl IntentIndex {
    pub fn from_config(config: &BotConfig) -> Self {
        let mut entries = Vec::new();
        let mut push = |kind, key: &str, sample: &str| {
            entries.push(IndexEntry {
                kind,
                key: key.to_string(),
                sample: sample.to_string(),
                tokens: content_tokens(sample),
            })
        };
        for task in config.user_tasks() {
            for s in &task.samples {
                push(EntryKind::Task, &task.name, s);
            }
        }
        for (i, faq) in config.faqs.iter().enumerate() {
            push(EntryKind::Faq, &i.to_string(), &faq.question);
        }
        for (pol, builtin, name) in [
            (Polarity::Positive, BUILTIN_POSITIVE, "positive"),
            (Polarity::Negative, BUILTIN_NEGATIVE, "negative"),
        ] {
            let configured = config.polarity_samples(pol);
            let samples: Vec<&str> = if configured.is_empty() { builtin.to_vec() } else { configured };
            for s in samples {
                push(EntryKind::Polarity(pol), name, s);
            }
        }
        Self {
            entries,
            threshold: config.intent_threshold,
        }
    }

    /// Built-in polarity samples only; used where no bot config is at hand.
    pub fn builtin_polarity(threshold: f64) -> Self {
        let mut entries = Vec::new();
        for (pol, samples, name) in [
            (Polarity::Positive, BUILTIN_POSITIVE, "positive"),
            (Polarity::Negative, BUILTIN_NEGATIVE, "negative"),
        ] {
            for s in samples {
                entries.push(IndexEntry {
                    kind: EntryKind::Polarity(pol),
                    key: name.into(),
                    sample: s.to_string(),
                    tokens: content_tokens(s),
                });
            }
        }
        Self { entries, threshold }
    }

    /// Scores entries accepted by `filter`, best sample per key, sorted by score with
    /// declaration order breaking ties, thresholded.
    pub fn rank(&self, utterance: &str, filter: impl Fn(EntryKind) -> bool) -> Vec<IntentCandidate> {
        let u = content_tokens(utterance);
        let mut best: Vec<IntentCandidate> = Vec::new();
        for e in self.entries.iter().filter(|e| filter(e.kind)) {
            let (score, shared) = dice(&u, &e.tokens);
            match best.iter_mut().find(|c| c.task_name == e.key) {
                Some(c) if c.score >= score => {}
                Some(c) => {
                    c.score = score;
                    c.matched_sample = e.sample.clone();
                    c.evidence_tokens = shared;
                }
                None => best.push(IntentCandidate {
                    task_name: e.key.clone(),
                    score,
                    matched_sample: e.sample.clone(),
                    evidence_tokens: shared,
                }),
            }
        }
        // Stable sort keeps first-declared keys ahead on equal scores.
        best.sort_by(|a, b| b.score.total_cmp(&a.score));
        best.retain(|c| c.score >= self.threshold && c.score > 0.0);
        best
    }
}
