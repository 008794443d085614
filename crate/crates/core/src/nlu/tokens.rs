use std::collections::HashMap;

/// Fixed English stopword list used by the lexical scorer. Frozen: changing it changes scores.
pub const STOPWORDS: [&str; 50] = [
    "a", "an", "the", "i", "me", "my", "we", "our", "you", "your", //
    "it", "its", "is", "am", "are", "was", "be", "to", "of", "in", //
    "on", "at", "for", "from", "with", "and", "or", "but", "that", "this", //
    "do", "does", "can", "could", "would", "should", "will", "please", "want", "like", //
    "need", "help", "id", "im", "ive", "dont", "just", "oh", "there", "some",
];

pub fn is_stopword(norm: &str) -> bool {
    STOPWORDS.contains(&norm)
}

const CLAUSE_PUNCT: [char; 6] = [',', '.', ';', ':', '!', '?'];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    /// Text as written.
    pub raw: String,
    /// Lowercased with apostrophes removed.
    pub norm: String,
    /// Character offsets into the utterance.
    pub start: usize,
    pub end: usize,
    /// Clause punctuation occurs between the previous token and this one.
    pub break_before: bool,
}

fn is_apostrophe(c: char) -> bool {
    c == '\'' || c == '\u{2019}'
}

/// Splits into runs of alphanumerics and apostrophes. Hyphens and all other symbols separate words.
pub fn tokenize(text: &str) -> Vec<Token> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let mut pending_break = false;
    while i < chars.len() {
        let c = chars[i];
        if c.is_alphanumeric() {
            let start = i;
            while i < chars.len()
                && (chars[i].is_alphanumeric()
                    || (is_apostrophe(chars[i]) && chars.get(i + 1).is_some_and(|n| n.is_alphanumeric())))
            {
                i += 1;
            }
            let raw: String = chars[start..i].iter().collect();
            let norm: String = raw.chars().filter(|c| !is_apostrophe(*c)).flat_map(char::to_lowercase).collect();
            out.push(Token {
                raw,
                norm,
                start,
                end: i,
                break_before: pending_break,
            });
            pending_break = false;
        } else {
            if CLAUSE_PUNCT.contains(&c) {
                pending_break = true;
            }
            i += 1;
        }
    }
    out
}

/// Normalized content words. Falls back to every word when all are stopwords, so a
/// sample made only of stopwords still matches itself.
pub fn content_tokens(text: &str) -> Vec<String> {
    let all: Vec<String> = tokenize(text).into_iter().map(|t| t.norm).collect();
    let content: Vec<String> = all.iter().filter(|t| !is_stopword(t)).cloned().collect();
    if content.is_empty() {
        all
    } else {
        content
    }
}

/// Dice coefficient over token multisets, with the shared tokens.
pub fn dice(a: &[String], b: &[String]) -> (f64, Vec<String>) {
    if a.is_empty() || b.is_empty() {
        return (0.0, Vec::new());
    }
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for t in b {
        *counts.entry(t.as_str()).or_default() += 1;
    }
    let mut shared = Vec::new();
    for t in a {
        if let Some(c) = counts.get_mut(t.as_str()) {
            if *c > 0 {
                *c -= 1;
                shared.push(t.clone());
            }
        }
    }
    let score = 2.0 * shared.len() as f64 / (a.len() + b.len()) as f64;
    (score.clamp(0.0, 1.0), shared)
}
