//! Random and-or success expressions with slot outcomes, and a direct boolean reference.
#![allow(dead_code)]

use indexmap::IndexMap;
use proptest::prelude::*;
use tod_core::config::{EntityGroup, EntitySlotSpec, FinishResponse, GroupOperator, SuccessExpr, TaskDef};
use tod_core::tree::{SlotOutcome, TaskTree};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Slot {
    Open,
    Filled,
    Failed,
}

#[derive(Debug, Clone)]
pub enum Expr {
    And(Vec<Expr>),
    Or(Vec<Expr>),
    Leaf {
        op: GroupOperator,
        min: Option<usize>,
        slots: Vec<Slot>,
    },
}

pub fn leaf() -> impl Strategy<Value = Expr> {
    let op = prop_oneof![
        Just(GroupOperator::Verify),
        Just(GroupOperator::Insert),
        Just(GroupOperator::Api),
        Just(GroupOperator::Inform),
    ];
    let slot = prop_oneof![Just(Slot::Open), Just(Slot::Filled), Just(Slot::Failed)];
    (op, prop::collection::vec(slot, 1..=3), any::<prop::sample::Index>(), any::<bool>()).prop_map(
        |(op, slots, idx, all)| {
            let min = (!all).then(|| idx.index(slots.len()) + 1);
            Expr::Leaf { op, min, slots }
        },
    )
}

/// Depth at most 5 counting the leaves, at most 4 children per node.
pub fn expr() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(4, 96, 4, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 1..=4).prop_map(Expr::And),
            prop::collection::vec(inner, 1..=4).prop_map(Expr::Or),
        ]
    })
}

pub fn depth(e: &Expr) -> usize {
    match e {
        Expr::Leaf { .. } => 1,
        Expr::And(c) | Expr::Or(c) => 1 + c.iter().map(depth).max().unwrap_or(0),
    }
}

/// (success, exhausted) computed straight from the expression.
pub fn oracle(e: &Expr) -> (bool, bool) {
    match e {
        Expr::Leaf { min, slots, .. } => {
            let need = min.unwrap_or(slots.len());
            let filled = slots.iter().filter(|s| **s == Slot::Filled).count();
            let failed = slots.iter().filter(|s| **s == Slot::Failed).count();
            let ok = filled >= need;
            (ok, !ok && slots.len() - failed < need)
        }
        Expr::And(c) => {
            let r: Vec<_> = c.iter().map(oracle).collect();
            let ok = r.iter().all(|x| x.0);
            (ok, !ok && r.iter().any(|x| x.1))
        }
        Expr::Or(c) => {
            let r: Vec<_> = c.iter().map(oracle).collect();
            let ok = r.iter().any(|x| x.0);
            (ok, !ok && r.iter().all(|x| x.1))
        }
    }
}

pub struct Built {
    pub def: TaskDef,
    /// group name -> slot states, by member
    pub states: Vec<(String, Vec<(String, Slot)>)>,
}

pub fn build(e: &Expr) -> Built {
    let mut specs = IndexMap::new();
    let mut groups = IndexMap::new();
    let mut states = Vec::new();
    fn go(
        e: &Expr,
        specs: &mut IndexMap<String, EntitySlotSpec>,
        groups: &mut IndexMap<String, EntityGroup>,
        states: &mut Vec<(String, Vec<(String, Slot)>)>,
    ) -> SuccessExpr {
        match e {
            Expr::And(c) => SuccessExpr::and(c.iter().map(|x| go(x, specs, groups, states)).collect()),
            Expr::Or(c) => SuccessExpr::or(c.iter().map(|x| go(x, specs, groups, states)).collect()),
            Expr::Leaf { op, min, slots } => {
                let g = format!("g{}", groups.len());
                let mut members = Vec::new();
                let mut st = Vec::new();
                for s in slots {
                    let name = format!("e{}", specs.len());
                    specs.insert(
                        name.clone(),
                        EntitySlotSpec {
                            function: None,
                            confirm: false,
                            prompt: vec![],
                            response: vec![],
                        },
                    );
                    members.push(name.clone());
                    st.push((name, *s));
                }
                groups.insert(
                    g.clone(),
                    EntityGroup {
                        members,
                        min_required: *min,
                    },
                );
                states.push((g.clone(), st));
                SuccessExpr::group(*op, g)
            }
        }
    }
    let success = go(e, &mut specs, &mut groups, &mut states);
    Built {
        def: TaskDef {
            name: "t".into(),
            description: "t".into(),
            samples: vec![],
            entity_specs: specs,
            entity_groups: groups,
            success: Some(success),
            finish_response: FinishResponse::default(),
            task_finish_function: None,
            repeat: false,
            repeat_response: vec![],
            max_turns: 10,
        },
        states,
    }
}

pub fn apply(tree: &mut TaskTree, states: &[(String, Vec<(String, Slot)>)]) {
    for (group, slots) in states {
        let leaf = tree
            .nodes()
            .iter()
            .find(|n| n.leaf.as_ref().is_some_and(|l| &l.group == group))
            .map(|n| n.id)
            .expect("leaf for group");
        for (entity, s) in slots {
            match s {
                Slot::Open => {}
                Slot::Filled => tree.force_slot(leaf, entity, SlotOutcome::Ok("v".into())).unwrap(),
                Slot::Failed => {
                    // Enough failures to use up any retry allowance.
                    for _ in 0..3 {
                        tree.force_slot(leaf, entity, SlotOutcome::Failed).unwrap();
                    }
                }
            }
        }
    }
}

