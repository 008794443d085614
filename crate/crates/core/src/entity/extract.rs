//! Pattern extractors for the built-in semantic types.

use std::collections::BTreeSet;
use std::sync::OnceLock;

use chrono::{Datelike, Duration, NaiveDate, Weekday};
use regex::Regex;

use super::gazetteer::Gazetteer;
use super::picklist::picklist_matches;
use super::{EntityCandidate, ExtractionMethod};
use crate::config::{EntityDef, SemanticType};
use crate::nlu::{is_stopword, tokenize};

const MONTHS: [&str; 12] = [
    "january", "february", "march", "april", "may", "june", "july", "august", "september", "october", "november",
    "december",
];
const WEEKDAYS: [(&str, Weekday); 7] = [
    ("monday", Weekday::Mon),
    ("tuesday", Weekday::Tue),
    ("wednesday", Weekday::Wed),
    ("thursday", Weekday::Thu),
    ("friday", Weekday::Fri),
    ("saturday", Weekday::Sat),
    ("sunday", Weekday::Sun),
];

/// Capitalized words that never start or extend a person name.
const NOT_NAMES: &[&str] = &[
    "i", "hi", "hello", "hey", "yes", "no", "not", "sure", "ok", "okay", "thanks", "thank", "please", "can", "could",
    "would", "will", "what", "when", "where", "which", "who", "why", "how", "my", "the", "a", "an", "oh", "wait",
    "it", "is", "this", "that", "do", "does", "did", "today", "tomorrow", "yesterday", "tonight", "noon", "midnight",
    "and", "or", "but", "in", "on", "at", "for", "from", "to", "with", "am", "pm", "let", "lets", "well", "also",
    "actually", "maybe", "nope", "yeah", "yep", "great", "good", "fine", "correct", "right", "wrong", "next", "last",
    "first", "dear", "doctor", "appointment", "we", "you", "me", "he", "she", "they", "his", "her", "their", "our",
    "your", "name", "im", "its", "id", "there", "here", "just", "so", "some", "any", "book", "check", "want", "need",
    "like", "see", "make", "get", "have", "has", "got", "go", "nothing", "something", "anything", "everything",
    "icu", "email", "zip", "code", "address", "order", "flight", "weather",
];
const TITLES: &[&str] = &["dr", "mr", "mrs", "ms", "miss", "prof", "doctor"];

fn re(cell: &'static OnceLock<Regex>, pat: &str) -> &'static Regex {
    cell.get_or_init(|| Regex::new(pat).expect("static pattern"))
}

fn month_pattern() -> &'static str {
    r"jan(?:uary)?|feb(?:ruary)?|mar(?:ch)?|apr(?:il)?|may|june?|july?|aug(?:ust)?|sep(?:t(?:ember)?)?|oct(?:ober)?|nov(?:ember)?|dec(?:ember)?"
}

fn month_index(s: &str) -> Option<u32> {
    let s = s.to_lowercase();
    let s = s.trim_end_matches('.');
    MONTHS
        .iter()
        .position(|m| m.starts_with(&s[..s.len().min(3)]) && s.len() >= 3)
        .map(|i| i as u32 + 1)
}

// ---------------------------------------------------------------------------
// Normalization
// ---------------------------------------------------------------------------

/// Canonical value for `text` of type `ty`, or `None` when it does not parse.
/// Applying it to its own output returns the same value.
pub fn normalize(ty: SemanticType, text: &str, today: NaiveDate) -> Option<String> {
    let text = text.trim();
    match ty {
        SemanticType::Date => parse_date(text, today).map(|d| d.format("%Y-%m-%d").to_string()),
        SemanticType::Time => parse_time(text),
        SemanticType::Cardinal => {
            let digits: String = text.chars().filter(|c| *c != ',').collect();
            let n: i64 = digits.parse().ok()?;
            Some(n.to_string())
        }
        SemanticType::Zipcode => {
            let d = text.get(..5)?;
            (text.len() == 5 && d.chars().all(|c| c.is_ascii_digit())).then(|| d.to_string())
        }
        SemanticType::Email => {
            static EMAIL: OnceLock<Regex> = OnceLock::new();
            let r = re(&EMAIL, r"^[A-Za-z0-9._%+-]+@[A-Za-z0-9.-]+\.[A-Za-z]{2,}$");
            r.is_match(text).then(|| text.to_lowercase())
        }
        SemanticType::Location => Gazetteer::builtin().canonical(text).map(str::to_string),
        SemanticType::Person | SemanticType::Picklist | SemanticType::UserUtt => {
            let s = text.split_whitespace().collect::<Vec<_>>().join(" ");
            (!s.is_empty()).then_some(s)
        }
    }
}

fn parse_date(text: &str, today: NaiveDate) -> Option<NaiveDate> {
    static ISO: OnceLock<Regex> = OnceLock::new();
    static MDY: OnceLock<Regex> = OnceLock::new();
    static MONTH_DAY: OnceLock<Regex> = OnceLock::new();
    static DAY_MONTH: OnceLock<Regex> = OnceLock::new();
    let lower = text.to_lowercase();
    let lower = lower.trim_end_matches("'s").trim_end_matches("’s");
    match lower {
        "today" => return Some(today),
        "tomorrow" => return today.succ_opt(),
        "yesterday" => return today.pred_opt(),
        _ => {}
    }
    let bare = lower.strip_prefix("next ").unwrap_or(lower);
    if let Some((_, wd)) = WEEKDAYS.iter().find(|(n, _)| *n == bare) {
        let mut d = today + Duration::days(1);
        while d.weekday() != *wd {
            d += Duration::days(1);
        }
        return Some(d);
    }
    if let Some(c) = re(&ISO, r"^(\d{4})-(\d{1,2})-(\d{1,2})$").captures(lower) {
        return NaiveDate::from_ymd_opt(c[1].parse().ok()?, c[2].parse().ok()?, c[3].parse().ok()?);
    }
    if let Some(c) = re(&MDY, r"^(\d{1,2})/(\d{1,2})/(\d{2}|\d{4})$").captures(lower) {
        return NaiveDate::from_ymd_opt(full_year(&c[3])?, c[1].parse().ok()?, c[2].parse().ok()?);
    }
    let md = format!(r"^({})\.?\s+(\d{{1,2}})(?:st|nd|rd|th)?(?:,?\s+(\d{{4}}))?$", month_pattern());
    if let Some(c) = re(&MONTH_DAY, &md).captures(lower) {
        let year = c.get(3).map(|y| y.as_str().parse().ok()).unwrap_or(Some(today.year()))?;
        return NaiveDate::from_ymd_opt(year, month_index(&c[1])?, c[2].parse().ok()?);
    }
    let dm = format!(r"^(\d{{1,2}})(?:st|nd|rd|th)?\s+(?:of\s+)?({})\.?(?:,?\s+(\d{{4}}))?$", month_pattern());
    if let Some(c) = re(&DAY_MONTH, &dm).captures(lower) {
        let year = c.get(3).map(|y| y.as_str().parse().ok()).unwrap_or(Some(today.year()))?;
        return NaiveDate::from_ymd_opt(year, month_index(&c[2])?, c[1].parse().ok()?);
    }
    None
}

fn full_year(y: &str) -> Option<i32> {
    let n: i32 = y.parse().ok()?;
    Some(match y.len() {
        2 if n < 50 => 2000 + n,
        2 => 1900 + n,
        _ => n,
    })
}

fn parse_time(text: &str) -> Option<String> {
    static AMPM: OnceLock<Regex> = OnceLock::new();
    static HHMM: OnceLock<Regex> = OnceLock::new();
    static OCLOCK: OnceLock<Regex> = OnceLock::new();
    let lower = text.to_lowercase();
    match lower.as_str() {
        "noon" => return Some("12:00".into()),
        "midnight" => return Some("00:00".into()),
        _ => {}
    }
    if let Some(c) = re(&AMPM, r"^(\d{1,2})(?::(\d{2}))?\s*([ap])\.?\s?m\.?$").captures(&lower) {
        let h: u32 = c[1].parse().ok()?;
        let m: u32 = c.get(2).map(|m| m.as_str().parse().ok()).unwrap_or(Some(0))?;
        if m > 59 || h > 23 {
            return None;
        }
        let h = match (h, &c[3]) {
            (h, _) if h > 12 => h,
            (12, "a") => 0,
            (12, _) => 12,
            (h, "p") => h + 12,
            (h, _) => h,
        };
        return Some(format!("{h:02}:{m:02}"));
    }
    if let Some(c) = re(&HHMM, r"^(\d{1,2}):(\d{2})$").captures(&lower) {
        let (h, m): (u32, u32) = (c[1].parse().ok()?, c[2].parse().ok()?);
        return (h < 24 && m < 60).then(|| format!("{h:02}:{m:02}"));
    }
    if let Some(c) = re(&OCLOCK, r"^(\d{1,2})\s*o'?clock$").captures(&lower) {
        let h: u32 = c[1].parse().ok()?;
        return (h < 24).then(|| format!("{h:02}:00"));
    }
    None
}

// ---------------------------------------------------------------------------
// Extraction
// ---------------------------------------------------------------------------

/// Char-offset view of a byte-offset regex match.
struct Text<'a> {
    s: &'a str,
    byte_to_char: Vec<usize>,
}

impl<'a> Text<'a> {
    fn new(s: &'a str) -> Self {
        let mut byte_to_char = vec![0; s.len() + 1];
        let mut ci = 0;
        for (bi, ch) in s.char_indices() {
            for k in 0..ch.len_utf8() {
                byte_to_char[bi + k] = ci;
            }
            ci += 1;
        }
        byte_to_char[s.len()] = ci;
        Self { s, byte_to_char }
    }

    fn chars(&self, b0: usize, b1: usize) -> (usize, usize) {
        (self.byte_to_char[b0], self.byte_to_char[b1])
    }
}

fn cand(
    ty: SemanticType,
    span: (usize, usize),
    raw: &str,
    value: String,
    method: ExtractionMethod,
    confidence: f64,
) -> EntityCandidate {
    EntityCandidate {
        semantic_type: ty,
        span,
        raw_text: raw.to_string(),
        normalized_value: value,
        method,
        confidence,
        entity_hint: None,
    }
}

fn regex_candidates(
    text: &Text<'_>,
    ty: SemanticType,
    pattern: &Regex,
    today: NaiveDate,
    out: &mut Vec<EntityCandidate>,
) {
    for m in pattern.find_iter(text.s) {
        let raw = m.as_str();
        if let Some(v) = normalize(ty, raw, today) {
            out.push(cand(ty, text.chars(m.start(), m.end()), raw, v, ExtractionMethod::Pattern, 1.0));
        }
    }
}

fn date_regex() -> &'static Regex {
    static R: OnceLock<Regex> = OnceLock::new();
    R.get_or_init(|| {
        let m = month_pattern();
        Regex::new(&format!(
            r"(?i)\b(?:\d{{4}}-\d{{1,2}}-\d{{1,2}}|\d{{1,2}}/\d{{1,2}}/(?:\d{{4}}|\d{{2}})|(?:{m})\.?\s+\d{{1,2}}(?:st|nd|rd|th)?(?:,?\s+\d{{4}})?|\d{{1,2}}(?:st|nd|rd|th)?\s+(?:of\s+)?(?:{m})\.?(?:,?\s+\d{{4}})?|today|tomorrow|yesterday|(?:next\s+)?(?:monday|tuesday|wednesday|thursday|friday|saturday|sunday))\b"
        ))
        .expect("date pattern")
    })
}

fn time_regex() -> &'static Regex {
    static R: OnceLock<Regex> = OnceLock::new();
    re(
        &R,
        r"(?i)\b(?:\d{1,2}(?::\d{2})?\s*[ap]\.?\s?m\b\.?|\d{1,2}:\d{2}\b|noon\b|midnight\b|\d{1,2}\s*o'?clock\b)",
    )
}

fn overlaps(a: (usize, usize), b: (usize, usize)) -> bool {
    a.0 < b.1 && b.0 < a.1
}

/// Candidates for the expected types, sorted by span start (then type order).
///
/// `defs` supplies picklist options; only PICKLIST entities among them are consulted.
pub fn extract_candidates(
    utterance: &str,
    expected: &BTreeSet<SemanticType>,
    defs: &[&EntityDef],
    today: NaiveDate,
) -> Vec<EntityCandidate> {
    static EMAIL: OnceLock<Regex> = OnceLock::new();
    static ZIP: OnceLock<Regex> = OnceLock::new();
    static CARDINAL: OnceLock<Regex> = OnceLock::new();

    let text = Text::new(utterance);
    let mut out = Vec::new();

    // Spans claimed by structured types; bare numbers inside them are not separate entities.
    let mut structured = Vec::new();
    regex_candidates(&text, SemanticType::Email, re(&EMAIL, r"[A-Za-z0-9._%+-]+@[A-Za-z0-9.-]+\.[A-Za-z]{2,}"), today, &mut structured);
    regex_candidates(&text, SemanticType::Date, date_regex(), today, &mut structured);
    regex_candidates(&text, SemanticType::Time, time_regex(), today, &mut structured);
    let claimed: Vec<(usize, usize)> = structured.iter().map(|c| c.span).collect();
    out.extend(structured.into_iter().filter(|c| expected.contains(&c.semantic_type)));

    if expected.contains(&SemanticType::Zipcode) {
        let mut z = Vec::new();
        regex_candidates(&text, SemanticType::Zipcode, re(&ZIP, r"\b\d{5}\b"), today, &mut z);
        out.extend(z.into_iter().filter(|c| !claimed.iter().any(|s| overlaps(*s, c.span))));
    }
    if expected.contains(&SemanticType::Cardinal) {
        let mut n = Vec::new();
        regex_candidates(&text, SemanticType::Cardinal, re(&CARDINAL, r"\b\d{1,3}(?:,\d{3})+\b|\b\d+\b"), today, &mut n);
        out.extend(n.into_iter().filter(|c| !claimed.iter().any(|s| overlaps(*s, c.span))));
    }
    if expected.contains(&SemanticType::Location) {
        out.extend(locations(utterance));
    }
    if expected.contains(&SemanticType::Person) {
        // Lower-case names are only guessed when a name is all that is asked for.
        out.extend(persons(utterance, expected.len() == 1));
    }
    if expected.contains(&SemanticType::Picklist) {
        for def in defs.iter().filter(|d| d.semantic_type == Some(SemanticType::Picklist)) {
            if let Some(options) = &def.methods.fuzzy_matching {
                out.extend(picklist_matches(utterance, options).into_iter().map(|mut c| {
                    c.entity_hint = Some(def.name.clone());
                    c
                }));
            }
        }
    }
    if expected.contains(&SemanticType::UserUtt) {
        let trimmed = utterance.trim();
        if !trimmed.is_empty() {
            let lead = utterance.chars().take_while(|c| c.is_whitespace()).count();
            let len = trimmed.chars().count();
            out.push(cand(
                SemanticType::UserUtt,
                (lead, lead + len),
                trimmed,
                trimmed.to_string(),
                ExtractionMethod::UserUtterance,
                1.0,
            ));
        }
    }

    out.sort_by_key(|c| (c.span.0, c.semantic_type));
    out
}

fn slice(utterance: &str, span: (usize, usize)) -> String {
    utterance.chars().skip(span.0).take(span.1 - span.0).collect()
}

fn locations(utterance: &str) -> Vec<EntityCandidate> {
    let toks = tokenize(utterance);
    let norms: Vec<&str> = toks.iter().map(|t| t.norm.as_str()).collect();
    let g = Gazetteer::builtin();
    let mut out = Vec::new();
    let mut i = 0;
    while i < toks.len() {
        if let Some((n, name)) = g.longest_at(&norms[i..]) {
            let span = (toks[i].start, toks[i + n - 1].end);
            out.push(cand(
                SemanticType::Location,
                span,
                &slice(utterance, span),
                name.to_string(),
                ExtractionMethod::Gazetteer,
                1.0,
            ));
            i += n;
        } else {
            i += 1;
        }
    }
    out
}

fn persons(utterance: &str, allow_lowercase: bool) -> Vec<EntityCandidate> {
    let toks = tokenize(utterance);
    let g = Gazetteer::builtin();
    let mut out = Vec::new();
    let mut i = 0;
    let capitalized = |t: &crate::nlu::Token| t.raw.chars().next().is_some_and(char::is_uppercase);
    while i < toks.len() {
        let t = &toks[i];
        if !capitalized(t) || NOT_NAMES.contains(&t.norm.as_str()) || TITLES.contains(&t.norm.as_str()) || MONTHS.contains(&t.norm.as_str()) || WEEKDAYS.iter().any(|(w, _)| *w == t.norm) {
            i += 1;
            continue;
        }
        let start = i;
        i += 1;
        while i < toks.len()
            && capitalized(&toks[i])
            && !toks[i].break_before
            && !NOT_NAMES.contains(&toks[i].norm.as_str())
            && !TITLES.contains(&toks[i].norm.as_str())
        {
            i += 1;
        }
        let span = (toks[start].start, toks[i - 1].end);
        let raw = slice(utterance, span);
        if g.canonical(&raw).is_none() {
            let value = toks[start..i].iter().map(|t| t.raw.as_str()).collect::<Vec<_>>().join(" ");
            out.push(cand(SemanticType::Person, span, &raw, value, ExtractionMethod::Pattern, 0.9));
        }
    }
    if out.is_empty() && allow_lowercase {
        // Lower-case short answers such as "john smith".
        let content: Vec<_> = toks.iter().filter(|t| !is_stopword(&t.norm)).collect();
        let plain = !toks.is_empty()
            && toks.len() <= 3
            && content.len() == toks.len()
            && toks.iter().all(|t| t.raw.chars().all(char::is_alphabetic) && !NOT_NAMES.contains(&t.norm.as_str()));
        if plain {
            let span = (toks[0].start, toks[toks.len() - 1].end);
            let raw = slice(utterance, span);
            if g.canonical(&raw).is_none() {
                let value = toks.iter().map(|t| title_case(&t.raw)).collect::<Vec<_>>().join(" ");
                out.push(cand(SemanticType::Person, span, &raw, value, ExtractionMethod::Pattern, 0.5));
            }
        }
    }
    out
}

fn title_case(w: &str) -> String {
    let mut c = w.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c.flat_map(char::to_lowercase)).collect(),
        None => String::new(),
    }
}
