//! The policy condition language.
//!
//! ```text
//! expr   := expr '||' term | term
//! term   := term '&&' factor | factor
//! factor := '!' factor | '(' expr ')' | path op literal | path | true | false
//! op     := == | != | < | <= | > | >=
//! ```

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateValue {
    Bool(bool),
    Int(i64),
    Str(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValueType {
    Bool,
    Int,
    Str,
}

impl StateValue {
    pub fn value_type(&self) -> ValueType {
        match self {
            StateValue::Bool(_) => ValueType::Bool,
            StateValue::Int(_) => ValueType::Int,
            StateValue::Str(_) => ValueType::Str,
        }
    }
}

impl fmt::Display for StateValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateValue::Bool(b) => write!(f, "{b}"),
            StateValue::Int(i) => write!(f, "{i}"),
            StateValue::Str(s) => write!(f, "\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\"")),
        }
    }
}

/// Every path a condition may reference, with its type.
pub const STATE_SCHEMA: &[(&str, ValueType)] = &[
    ("single.got_intent", ValueType::Bool),
    ("single.got_entity_info", ValueType::Bool),
    ("single.got_intent_and_info", ValueType::Bool),
    ("single.faq_hit", ValueType::Bool),
    ("single.intent_is_new", ValueType::Bool),
    ("single.is_greeting", ValueType::Bool),
    ("single.is_goodbye", ValueType::Bool),
    ("single.polarity", ValueType::Str),
    ("single.intent", ValueType::Str),
    ("single.suppressed_intent", ValueType::Str),
    ("single.candidate_count", ValueType::Int),
    ("multi.global_turn", ValueType::Int),
    ("multi.last_action", ValueType::Str),
    ("multi.expecting_yes_no", ValueType::Bool),
    ("multi.idle", ValueType::Bool),
    ("multi.pending_confirmation", ValueType::Bool),
    ("multi.pending_disambiguation", ValueType::Bool),
    ("multi.pending_repeat_offer", ValueType::Bool),
    ("tree.active", ValueType::Bool),
    ("tree.active_task", ValueType::Str),
    ("tree.current_entity", ValueType::Str),
    ("tree.stack_depth", ValueType::Int),
    ("tree.turn_limit_exceeded", ValueType::Bool),
    ("tree.task_turns", ValueType::Int),
];

pub fn path_type(path: &str) -> Option<ValueType> {
    STATE_SCHEMA.iter().find(|(p, _)| *p == path).map(|(_, t)| *t)
}

/// Flat view of the dialogue state that conditions are evaluated against.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateSnapshot {
    pub values: BTreeMap<String, StateValue>,
}

impl StateSnapshot {
    pub fn set(&mut self, path: &str, value: StateValue) {
        self.values.insert(path.to_string(), value);
    }

    pub fn set_bool(&mut self, path: &str, v: bool) {
        self.set(path, StateValue::Bool(v));
    }

    pub fn set_int(&mut self, path: &str, v: i64) {
        self.set(path, StateValue::Int(v));
    }

    pub fn set_str(&mut self, path: &str, v: impl Into<String>) {
        self.set(path, StateValue::Str(v.into()));
    }

    pub fn get(&self, path: &str) -> Option<&StateValue> {
        self.values.get(path)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompareOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CompareOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CompareOp::Eq => "==",
            CompareOp::Ne => "!=",
            CompareOp::Lt => "<",
            CompareOp::Le => "<=",
            CompareOp::Gt => ">",
            CompareOp::Ge => ">=",
        }
    }

    fn is_ordering(self) -> bool {
        !matches!(self, CompareOp::Eq | CompareOp::Ne)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConditionExpr {
    Literal(bool),
    Path(String),
    Compare {
        path: String,
        op: CompareOp,
        value: StateValue,
    },
    Not(Box<ConditionExpr>),
    And(Box<ConditionExpr>, Box<ConditionExpr>),
    Or(Box<ConditionExpr>, Box<ConditionExpr>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConditionError {
    #[error("syntax error at position {position}: {message}")]
    SyntaxError { position: usize, message: String },
    #[error("unknown state path `{0}`")]
    UnknownPath(String),
    #[error("type mismatch on `{path}`: {message}")]
    TypeMismatch { path: String, message: String },
}

impl ConditionExpr {
    pub fn always() -> Self {
        ConditionExpr::Literal(true)
    }

    /// Checks every path against [`STATE_SCHEMA`] and every comparison for type agreement.
    pub fn check(&self) -> Result<(), ConditionError> {
        match self {
            ConditionExpr::Literal(_) => Ok(()),
            ConditionExpr::Path(p) => match path_type(p) {
                None => Err(ConditionError::UnknownPath(p.clone())),
                Some(ValueType::Bool) => Ok(()),
                Some(_) => Err(ConditionError::TypeMismatch {
                    path: p.clone(),
                    message: "a bare path must be boolean; compare it to a literal".into(),
                }),
            },
            ConditionExpr::Compare { path, op, value } => {
                let ty = path_type(path).ok_or_else(|| ConditionError::UnknownPath(path.clone()))?;
                if ty != value.value_type() {
                    return Err(ConditionError::TypeMismatch {
                        path: path.clone(),
                        message: format!("compared with {value}"),
                    });
                }
                if op.is_ordering() && ty != ValueType::Int {
                    return Err(ConditionError::TypeMismatch {
                        path: path.clone(),
                        message: format!("`{}` needs an integer path", op.symbol()),
                    });
                }
                Ok(())
            }
            ConditionExpr::Not(e) => e.check(),
            ConditionExpr::And(a, b) | ConditionExpr::Or(a, b) => {
                a.check()?;
                b.check()
            }
        }
    }

    /// Short-circuit evaluation. Errors only arise for expressions that fail [`Self::check`]
    /// or for snapshots missing a path.
    pub fn evaluate(&self, state: &StateSnapshot) -> Result<bool, ConditionError> {
        match self {
            ConditionExpr::Literal(b) => Ok(*b),
            ConditionExpr::Path(p) => match state.get(p) {
                Some(StateValue::Bool(b)) => Ok(*b),
                Some(other) => Err(ConditionError::TypeMismatch {
                    path: p.clone(),
                    message: format!("expected a boolean, found {other}"),
                }),
                None => Err(ConditionError::UnknownPath(p.clone())),
            },
            ConditionExpr::Compare { path, op, value } => {
                let actual = state
                    .get(path)
                    .ok_or_else(|| ConditionError::UnknownPath(path.clone()))?;
                compare(path, actual, *op, value)
            }
            ConditionExpr::Not(e) => Ok(!e.evaluate(state)?),
            ConditionExpr::And(a, b) => Ok(a.evaluate(state)? && b.evaluate(state)?),
            ConditionExpr::Or(a, b) => Ok(a.evaluate(state)? || b.evaluate(state)?),
        }
    }

    /// All paths referenced, in source order.
    pub fn paths(&self) -> Vec<&str> {
        let mut out = Vec::new();
        fn go<'a>(e: &'a ConditionExpr, out: &mut Vec<&'a str>) {
            match e {
                ConditionExpr::Literal(_) => {}
                ConditionExpr::Path(p) | ConditionExpr::Compare { path: p, .. } => out.push(p),
                ConditionExpr::Not(e) => go(e, out),
                ConditionExpr::And(a, b) | ConditionExpr::Or(a, b) => {
                    go(a, out);
                    go(b, out);
                }
            }
        }
        go(self, &mut out);
        out
    }
}

fn compare(path: &str, actual: &StateValue, op: CompareOp, expected: &StateValue) -> Result<bool, ConditionError> {
    use std::cmp::Ordering;
    let ord: Ordering = match (actual, expected) {
        (StateValue::Int(a), StateValue::Int(b)) => a.cmp(b),
        (StateValue::Bool(a), StateValue::Bool(b)) if !op.is_ordering() => a.cmp(b),
        (StateValue::Str(a), StateValue::Str(b)) if !op.is_ordering() => a.cmp(b),
        _ => {
            return Err(ConditionError::TypeMismatch {
                path: path.to_string(),
                message: format!("cannot apply `{}` to {actual} and {expected}", op.symbol()),
            })
        }
    };
    Ok(match op {
        CompareOp::Eq => ord == Ordering::Equal,
        CompareOp::Ne => ord != Ordering::Equal,
        CompareOp::Lt => ord == Ordering::Less,
        CompareOp::Le => ord != Ordering::Greater,
        CompareOp::Gt => ord == Ordering::Greater,
        CompareOp::Ge => ord != Ordering::Less,
    })
}

impl fmt::Display for ConditionExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConditionExpr::Literal(b) => write!(f, "{b}"),
            ConditionExpr::Path(p) => f.write_str(p),
            ConditionExpr::Compare { path, op, value } => write!(f, "{path} {} {value}", op.symbol()),
            ConditionExpr::Not(e) => match **e {
                ConditionExpr::And(..) | ConditionExpr::Or(..) | ConditionExpr::Compare { .. } => {
                    write!(f, "!({e})")
                }
                _ => write!(f, "!{e}"),
            },
            ConditionExpr::And(a, b) => {
                write_operand(f, a, true)?;
                f.write_str(" && ")?;
                write_operand(f, b, true)
            }
            ConditionExpr::Or(a, b) => {
                write_operand(f, a, false)?;
                f.write_str(" || ")?;
                write_operand(f, b, false)
            }
        }
    }
}

// Parenthesise every nested binary operand; cheap and always unambiguous.
fn write_operand(f: &mut fmt::Formatter<'_>, e: &ConditionExpr, _in_and: bool) -> fmt::Result {
    match e {
        ConditionExpr::And(..) | ConditionExpr::Or(..) => write!(f, "({e})"),
        _ => write!(f, "{e}"),
    }
}

impl Serialize for ConditionExpr {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ConditionExpr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        parse_condition_expr(&text).map_err(serde::de::Error::custom)
    }
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(i64),
    Str(String),
    Op(CompareOp),
    Not,
    AndAnd,
    OrOr,
    LParen,
    RParen,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ConditionError> {
    let chars: Vec<char> = text.chars().collect();
    let err = |position: usize, message: String| ConditionError::SyntaxError { position, message };
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        let two = chars.get(i + 1).copied();
        match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '(' => {
                out.push((start, Tok::LParen));
                i += 1;
            }
            ')' => {
                out.push((start, Tok::RParen));
                i += 1;
            }
            '&' if two == Some('&') => {
                out.push((start, Tok::AndAnd));
                i += 2;
            }
            '|' if two == Some('|') => {
                out.push((start, Tok::OrOr));
                i += 2;
            }
            '=' if two == Some('=') => {
                out.push((start, Tok::Op(CompareOp::Eq)));
                i += 2;
            }
            '!' if two == Some('=') => {
                out.push((start, Tok::Op(CompareOp::Ne)));
                i += 2;
            }
            '!' => {
                out.push((start, Tok::Not));
                i += 1;
            }
            '<' | '>' => {
                let eq = two == Some('=');
                let op = match (c, eq) {
                    ('<', false) => CompareOp::Lt,
                    ('<', true) => CompareOp::Le,
                    ('>', false) => CompareOp::Gt,
                    _ => CompareOp::Ge,
                };
                out.push((start, Tok::Op(op)));
                i += if eq { 2 } else { 1 };
            }
            '"' | '\'' => {
                let quote = c;
                let mut s = String::new();
                i += 1;
                loop {
                    match chars.get(i) {
                        None => return Err(err(start, "unterminated string literal".into())),
                        Some('\\') => {
                            let Some(&next) = chars.get(i + 1) else {
                                return Err(err(i, "dangling escape".into()));
                            };
                            s.push(next);
                            i += 2;
                        }
                        Some(&ch) if ch == quote => {
                            i += 1;
                            break;
                        }
                        Some(&ch) => {
                            s.push(ch);
                            i += 1;
                        }
                    }
                }
                out.push((start, Tok::Str(s)));
            }
            c if c.is_ascii_digit() || (c == '-' && two.is_some_and(|d| d.is_ascii_digit())) => {
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let lit: String = chars[start..i].iter().collect();
                let n = lit
                    .parse::<i64>()
                    .map_err(|e| err(start, format!("bad integer `{lit}`: {e}")))?;
                out.push((start, Tok::Int(n)));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '.') {
                    i += 1;
                }
                out.push((start, Tok::Ident(chars[start..i].iter().collect())));
            }
            other => return Err(err(start, format!("unexpected character `{other}`"))),
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn err(&self, message: impl Into<String>) -> ConditionError {
        ConditionError::SyntaxError {
            position: self.here(),
            message: message.into(),
        }
    }

    fn expr(&mut self) -> Result<ConditionExpr, ConditionError> {
        let mut lhs = self.term()?;
        while self.peek() == Some(&Tok::OrOr) {
            self.pos += 1;
            let rhs = self.term()?;
            lhs = ConditionExpr::Or(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<ConditionExpr, ConditionError> {
        let mut lhs = self.factor()?;
        while self.peek() == Some(&Tok::AndAnd) {
            self.pos += 1;
            let rhs = self.factor()?;
            lhs = ConditionExpr::And(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<ConditionExpr, ConditionError> {
        match self.peek().cloned() {
            Some(Tok::Not) => {
                self.pos += 1;
                Ok(ConditionExpr::Not(Box::new(self.factor()?)))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(&Tok::RParen) {
                    return Err(self.err("expected `)`"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                match name.as_str() {
                    "true" => return Ok(ConditionExpr::Literal(true)),
                    "false" => return Ok(ConditionExpr::Literal(false)),
                    _ => {}
                }
                if name.starts_with('.') || name.ends_with('.') || name.contains("..") {
                    return Err(ConditionError::SyntaxError {
                        position: self.toks[self.pos - 1].0,
                        message: format!("malformed path `{name}`"),
                    });
                }
                if let Some(Tok::Op(op)) = self.peek().cloned() {
                    self.pos += 1;
                    let value = self.literal()?;
                    return Ok(ConditionExpr::Compare { path: name, op, value });
                }
                Ok(ConditionExpr::Path(name))
            }
            Some(other) => Err(self.err(format!("unexpected token {other:?}"))),
            None => Err(self.err("unexpected end of expression")),
        }
    }

    fn literal(&mut self) -> Result<StateValue, ConditionError> {
        let v = match self.peek().cloned() {
            Some(Tok::Int(n)) => StateValue::Int(n),
            Some(Tok::Str(s)) => StateValue::Str(s),
            Some(Tok::Ident(id)) if id == "true" => StateValue::Bool(true),
            Some(Tok::Ident(id)) if id == "false" => StateValue::Bool(false),
            _ => return Err(self.err("expected a literal (true, false, integer or quoted string)")),
        };
        self.pos += 1;
        Ok(v)
    }
}

pub fn parse_condition_expr(text: &str) -> Result<ConditionExpr, ConditionError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.chars().count(),
    };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(e)
}

pub fn evaluate_condition(expr: &ConditionExpr, state: &StateSnapshot) -> Result<bool, ConditionError> {
    expr.evaluate(state)
}
