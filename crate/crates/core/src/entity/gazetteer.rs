use std::sync::OnceLock;

use crate::nlu::tokenize;

const DATA: &str = include_str!("../../data/us_cities.txt");

/// Location names as normalized token sequences, longest first.
pub struct Gazetteer {
    entries: Vec<(Vec<String>, String)>,
}

impl Gazetteer {
    pub fn parse(text: &str) -> Self {
        let mut entries: Vec<(Vec<String>, String)> = Vec::new();
        for line in text.lines().map(str::trim) {
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let toks: Vec<String> = tokenize(line).into_iter().map(|t| t.norm).collect();
            if !toks.is_empty() && !entries.iter().any(|(t, _)| *t == toks) {
                entries.push((toks, line.to_string()));
            }
        }
        entries.sort_by_key(|e| std::cmp::Reverse(e.0.len()));
        Self { entries }
    }

    /// The shipped US list.
    pub fn builtin() -> &'static Gazetteer {
        static G: OnceLock<Gazetteer> = OnceLock::new();
        G.get_or_init(|| Gazetteer::parse(DATA))
    }

    /// Longest entry starting at `norms[0]`: (tokens consumed, canonical name).
    pub fn longest_at(&self, norms: &[&str]) -> Option<(usize, &str)> {
        self.entries
            .iter()
            .find(|(toks, _)| toks.len() <= norms.len() && toks.iter().zip(norms).all(|(a, b)| a == b))
            .map(|(toks, name)| (toks.len(), name.as_str()))
    }

    /// Exact (case-insensitive) entry for a whole phrase.
    pub fn canonical(&self, phrase: &str) -> Option<&str> {
        let toks: Vec<String> = tokenize(phrase).into_iter().map(|t| t.norm).collect();
        self.entries.iter().find(|(t, _)| *t == toks).map(|(_, n)| n.as_str())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}
