use super::{EntityCandidate, ExtractionMethod};
use crate::config::SemanticType;
use crate::nlu::{is_stopword, tokenize, Token};

/// Minimum similarity for a picklist option to count as mentioned.
pub const PICKLIST_THRESHOLD: f64 = 0.75;

/// 1 − Levenshtein distance / longer length, on lowercased text.
pub fn similarity(a: &str, b: &str) -> f64 {
    strsim::normalized_levenshtein(&a.to_lowercase(), &b.to_lowercase())
}

/// Contiguous token runs of `option` that start and end with a content word.
fn option_phrases(option: &str) -> Vec<(String, usize)> {
    let toks: Vec<String> = tokenize(option).into_iter().map(|t| t.norm).collect();
    let mut out = Vec::new();
    for i in 0..toks.len() {
        for j in i + 1..=toks.len() {
            let run = &toks[i..j];
            let edge_ok = !is_stopword(&run[0]) && !is_stopword(&run[run.len() - 1]);
            if edge_ok || run.len() == toks.len() {
                out.push((run.join(" "), run.len()));
            }
        }
    }
    out
}

struct Hit {
    score: f64,
    weight: usize,
    start: usize,
    end: usize,
}

fn best_hit(toks: &[Token], option: &str) -> Option<Hit> {
    let phrases = option_phrases(option);
    let max_len = phrases.iter().map(|p| p.1).max().unwrap_or(0);
    let mut best: Option<Hit> = None;
    for i in 0..toks.len() {
        for j in i + 1..=(i + max_len).min(toks.len()) {
            let window = &toks[i..j];
            if window.iter().all(|t| is_stopword(&t.norm)) {
                continue;
            }
            let text = window.iter().map(|t| t.norm.as_str()).collect::<Vec<_>>().join(" ");
            for (phrase, weight) in &phrases {
                let score = similarity(&text, phrase);
                let better = match &best {
                    None => true,
                    Some(b) => score > b.score || (score == b.score && *weight > b.weight),
                };
                if better {
                    best = Some(Hit {
                        score,
                        weight: *weight,
                        start: window[0].start,
                        end: window[window.len() - 1].end,
                    });
                }
            }
        }
    }
    best
}

/// Best option for the utterance, if any reaches [`PICKLIST_THRESHOLD`].
pub fn fuzzy_match_picklist(utterance: &str, options: &[String]) -> Option<(String, f64)> {
    let toks = tokenize(utterance);
    let mut best: Option<(usize, Hit)> = None;
    for (k, opt) in options.iter().enumerate() {
        if let Some(h) = best_hit(&toks, opt) {
            let better = match &best {
                None => true,
                Some((_, b)) => h.score > b.score || (h.score == b.score && h.weight > b.weight),
            };
            if better {
                best = Some((k, h));
            }
        }
    }
    best.filter(|(_, h)| h.score >= PICKLIST_THRESHOLD)
        .map(|(k, h)| (options[k].clone(), h.score))
}

/// Every option mentioned, keeping the better-scoring one where spans overlap.
pub fn picklist_matches(utterance: &str, options: &[String]) -> Vec<EntityCandidate> {
    let toks = tokenize(utterance);
    let mut hits: Vec<(usize, Hit)> = options
        .iter()
        .enumerate()
        .filter_map(|(k, o)| best_hit(&toks, o).map(|h| (k, h)))
        .filter(|(_, h)| h.score >= PICKLIST_THRESHOLD)
        .collect();
    hits.sort_by(|a, b| b.1.score.total_cmp(&a.1.score).then(b.1.weight.cmp(&a.1.weight)).then(a.0.cmp(&b.0)));
    let mut kept: Vec<(usize, Hit)> = Vec::new();
    for (k, h) in hits {
        if kept.iter().all(|(_, o)| h.end <= o.start || o.end <= h.start) {
            kept.push((k, h));
        }
    }
    kept.sort_by_key(|(_, h)| h.start);
    kept.into_iter()
        .map(|(k, h)| EntityCandidate {
            semantic_type: SemanticType::Picklist,
            span: (h.start, h.end),
            raw_text: utterance.chars().skip(h.start).take(h.end - h.start).collect(),
            normalized_value: options[k].clone(),
            method: ExtractionMethod::FuzzyMatching,
            confidence: h.score,
            entity_hint: None,
        })
        .collect()
}
