//! Random policy trees, conditions and state snapshots with a reference selector.
#![allow(dead_code)]

use std::collections::BTreeMap;

use proptest::prelude::*;
use serde_yaml::{Mapping, Value};
use tod_core::dialogue::condition::{StateSnapshot, ValueType, STATE_SCHEMA};

pub fn paths_of(ty: ValueType) -> Vec<&'static str> {
    STATE_SCHEMA.iter().filter(|(_, t)| *t == ty).map(|(p, _)| *p).collect()
}

/// Reference state: plain maps, filled for every schema path.
#[derive(Debug, Clone)]
pub struct State {
    pub bools: BTreeMap<&'static str, bool>,
    pub ints: BTreeMap<&'static str, i64>,
    pub strs: BTreeMap<&'static str, &'static str>,
}

impl State {
    pub fn snapshot(&self) -> StateSnapshot {
        let mut s = StateSnapshot::default();
        for (p, v) in &self.bools {
            s.set_bool(p, *v);
        }
        for (p, v) in &self.ints {
            s.set_int(p, *v);
        }
        for (p, v) in &self.strs {
            s.set_str(p, *v);
        }
        s
    }
}

pub const WORDS: [&str; 3] = ["alpha", "beta", "gamma"];

pub fn state() -> impl Strategy<Value = State> {
    let b = paths_of(ValueType::Bool);
    let i = paths_of(ValueType::Int);
    let s = paths_of(ValueType::Str);
    (
        prop::collection::vec(any::<bool>(), b.len()),
        prop::collection::vec(-2i64..6, i.len()),
        prop::collection::vec(0usize..3, s.len()),
    )
        .prop_map(move |(bv, iv, sv)| State {
            bools: b.iter().copied().zip(bv).collect(),
            ints: i.iter().copied().zip(iv).collect(),
            strs: s.iter().copied().zip(sv.into_iter().map(|k| WORDS[k])).collect(),
        })
}

#[derive(Debug, Clone)]
pub enum Cond {
    Lit(bool),
    Flag(&'static str),
    Int(&'static str, &'static str, i64),
    Str(&'static str, bool, &'static str),
    Not(Box<Cond>),
    And(Box<Cond>, Box<Cond>),
    Or(Box<Cond>, Box<Cond>),
}

impl Cond {
    pub fn text(&self) -> String {
        match self {
            Cond::Lit(b) => b.to_string(),
            Cond::Flag(p) => p.to_string(),
            Cond::Int(p, op, v) => format!("{p} {op} {v}"),
            Cond::Str(p, eq, v) => format!("{p} {} '{v}'", if *eq { "==" } else { "!=" }),
            Cond::Not(c) => format!("!({})", c.text()),
            Cond::And(a, b) => format!("({}) && ({})", a.text(), b.text()),
            Cond::Or(a, b) => format!("({}) || ({})", a.text(), b.text()),
        }
    }

    pub fn eval(&self, s: &State) -> bool {
        match self {
            Cond::Lit(b) => *b,
            Cond::Flag(p) => s.bools[p],
            Cond::Int(p, op, v) => {
                let a = s.ints[p];
                match *op {
                    "==" => a == *v,
                    "!=" => a != *v,
                    "<" => a < *v,
                    "<=" => a <= *v,
                    ">" => a > *v,
                    _ => a >= *v,
                }
            }
            Cond::Str(p, eq, v) => (s.strs[p] == *v) == *eq,
            Cond::Not(c) => !c.eval(s),
            Cond::And(a, b) => a.eval(s) && b.eval(s),
            Cond::Or(a, b) => a.eval(s) || b.eval(s),
        }
    }
}

pub fn cond() -> impl Strategy<Value = Cond> {
    let b = paths_of(ValueType::Bool);
    let i = paths_of(ValueType::Int);
    let s = paths_of(ValueType::Str);
    let atom = prop_oneof![
        any::<bool>().prop_map(Cond::Lit),
        prop::sample::select(b).prop_map(Cond::Flag),
        (
            prop::sample::select(i),
            prop::sample::select(vec!["==", "!=", "<", "<=", ">", ">="]),
            -2i64..6
        )
            .prop_map(|(p, op, v)| Cond::Int(p, op, v)),
        (prop::sample::select(s), any::<bool>(), prop::sample::select(WORDS.to_vec()))
            .prop_map(|(p, eq, v)| Cond::Str(p, eq, v)),
    ];
    atom.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|c| Cond::Not(Box::new(c))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Cond::And(Box::new(a), Box::new(b))),
            (inner.clone(), inner).prop_map(|(a, b)| Cond::Or(Box::new(a), Box::new(b))),
        ]
    })
}

#[derive(Debug, Clone)]
pub enum Node {
    Action(String),
    Branch(Cond, Vec<Node>),
}

pub fn node() -> impl Strategy<Value = Node> {
    let action = (0u8..10).prop_map(|k| Node::Action(format!("act{k}")));
    action.prop_recursive(4, 40, 4, |inner| {
        (cond(), prop::collection::vec(inner, 1..=4)).prop_map(|(c, kids)| Node::Branch(c, kids))
    })
}

pub fn to_yaml(n: &Node) -> Value {
    let mut m = Mapping::new();
    match n {
        Node::Action(a) => {
            m.insert("action".into(), a.clone().into());
        }
        Node::Branch(c, kids) => {
            m.insert("cond".into(), c.text().into());
            m.insert("children".into(), Value::Sequence(kids.iter().map(to_yaml).collect()));
        }
    }
    Value::Mapping(m)
}

/// First action whose whole condition path holds, scanning leaves left to right.
pub fn reference(nodes: &[Node], s: &State) -> Option<String> {
    for n in nodes {
        match n {
            Node::Action(a) => return Some(a.clone()),
            Node::Branch(c, kids) => {
                if c.eval(s) {
                    if let Some(a) = reference(kids, s) {
                        return Some(a);
                    }
                }
            }
        }
    }
    None
}

