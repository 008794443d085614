use super::*;
use crate::config::{BotConfig, ConfigSources};

const TASKS: &str = r#"
Bot:
  bot_name: Tester
Task:
  main:
    description: do the main thing
    samples: [do the main thing]
    entities:
      a: {function: collect_info, prompt: [A?]}
      b: {function: collect_info, prompt: [B?]}
    entity_groups:
      a_group: [a]
      b_group: [b]
    success:
      AND:
        - TASK: [ident]
        - INSERT: [a_group]
        - VERIFY: [b_group]
    repeat: true
    max_turns: 3
  other:
    description: do the other thing
    samples: [do the other thing]
    entities:
      c: {function: collect_info, prompt: [C?]}
    entity_groups:
      c_group: [c]
    success:
      AND:
        - TASK: [ident]
        - INSERT: [c_group]
  ident:
    description: check who you are
    entities:
      email: {function: collect_info, prompt: [Email?]}
      zip: {function: collect_info, prompt: [Zip?]}
    entity_groups:
      email_group: [email]
      zip_group: [zip]
    success:
      OR:
        - VERIFY: [email_group]
        - VERIFY: [zip_group]
"#;

const ENTITIES: &str = r#"
Entity:
  a: {type: CARDINAL, methods: {ner: }}
  b: {type: CARDINAL, methods: {ner: }}
  c: {type: CARDINAL, methods: {ner: }}
  email: {type: EMAIL, methods: {ner: }}
  zip: {type: ZIPCODE, methods: {ner: }}
"#;

fn config() -> BotConfig {
    BotConfig::from_sources(&ConfigSources::new(TASKS, ENTITIES, "")).unwrap()
}

fn leaf_of(t: &Traversal) -> &Cursor {
    match t {
        Traversal::Leaf { cursor, .. } => cursor,
        other => panic!("expected a leaf, got {other:?}"),
    }
}

fn fill(tree: &mut TaskTree, value: &str) {
    let c = tree.cursor().cloned().expect("cursor");
    tree.record_slot_outcome(c.leaf, &c.entity, SlotOutcome::Ok(value.into())).unwrap();
}

fn fail(tree: &mut TaskTree) {
    let c = tree.cursor().cloned().expect("cursor");
    tree.record_slot_outcome(c.leaf, &c.entity, SlotOutcome::Failed).unwrap();
}

#[test]
fn add_task_descends_into_subtask() {
    let cfg = config();
    let mut t = TaskTree::new();
    let tr = t.add_task(&cfg, "main").unwrap();
    match &tr {
        Traversal::Leaf { cursor, entered } => {
            assert_eq!(cursor.task, "ident");
            assert_eq!(cursor.entity, "email");
            assert_eq!(entered, &["ident".to_string()]);
        }
        other => panic!("{other:?}"),
    }
    assert_eq!(t.active_task(), Some("ident"));
    assert_eq!(t.chain_owner(), Some("main"));
    assert_eq!(t.subtask_chain(), vec!["main", "ident"]);
    assert_eq!(t.stack()[0].kind, FrameKind::Subtask);
}

#[test]
fn verify_failure_falls_through_or() {
    let cfg = config();
    let mut t = TaskTree::new();
    t.add_task(&cfg, "main").unwrap();
    fail(&mut t);
    let tr = t.traverse_next_leaf(&cfg).unwrap();
    assert_eq!(leaf_of(&tr).entity, "zip");
    fill(&mut t, "94105");
    assert_eq!(t.traverse_next_leaf(&cfg).unwrap(), Traversal::TaskComplete("ident".into()));
    let PopResult::Resumed(tr) = t.finish_or_pop(&cfg).unwrap() else { panic!("idle") };
    assert_eq!(leaf_of(&tr).task, "main");
    assert_eq!(leaf_of(&tr).entity, "a");
}

#[test]
fn insert_gets_one_retry() {
    let cfg = config();
    let mut t = TaskTree::new();
    t.add_task(&cfg, "main").unwrap();
    fill(&mut t, "x@y.com");
    t.traverse_next_leaf(&cfg).unwrap();
    t.finish_or_pop(&cfg).unwrap();
    fail(&mut t);
    assert_eq!(t.cursor().unwrap().entity, "a", "first failure is retried");
    fail(&mut t);
    assert_eq!(t.traverse_next_leaf(&cfg).unwrap(), Traversal::TaskFailed("main".into()));
}

#[test]
fn completed_subtask_is_shared() {
    let cfg = config();
    let mut t = TaskTree::new();
    t.add_task(&cfg, "main").unwrap();
    fill(&mut t, "x@y.com");
    t.traverse_next_leaf(&cfg).unwrap();
    t.finish_or_pop(&cfg).unwrap();
    fill(&mut t, "1");
    t.traverse_next_leaf(&cfg).unwrap();
    fill(&mut t, "2");
    assert_eq!(t.traverse_next_leaf(&cfg).unwrap(), Traversal::TaskComplete("main".into()));
    assert_eq!(t.finish_or_pop(&cfg).unwrap(), PopResult::Idle);

    let tr = t.add_task(&cfg, "other").unwrap();
    let Traversal::Leaf { cursor, entered } = tr else { panic!() };
    assert_eq!(cursor.entity, "c");
    assert!(entered.is_empty());
    // One root per task, no copies of the sub-task.
    assert_eq!(t.task_names().filter(|n| *n == "ident").count(), 1);
}

#[test]
fn switch_pushes_and_pop_resumes_cursor() {
    let cfg = config();
    let mut t = TaskTree::new();
    t.add_task(&cfg, "other").unwrap();
    fill(&mut t, "a@b.co");
    t.traverse_next_leaf(&cfg).unwrap();
    t.finish_or_pop(&cfg).unwrap();
    assert_eq!(t.cursor().unwrap().entity, "c");
    t.add_task(&cfg, "main").unwrap();
    assert_eq!(t.active_task(), Some("main"));
    assert_eq!(t.stack().last().unwrap().task, "other");
    assert_eq!(t.stack().last().unwrap().kind, FrameKind::Switch);
    t.quit_task("main").unwrap();
    assert_eq!(t.traverse_next_leaf(&cfg).unwrap(), Traversal::TaskFailed("main".into()));
    let PopResult::Resumed(tr) = t.finish_or_pop(&cfg).unwrap() else { panic!() };
    assert_eq!(leaf_of(&tr).entity, "c");
    assert!(t.stack().is_empty());
}

#[test]
fn already_active_and_complete_errors() {
    let cfg = config();
    let mut t = TaskTree::new();
    t.add_task(&cfg, "other").unwrap();
    assert_eq!(t.add_task(&cfg, "other"), Err(TreeError::AlreadyActive("other".into())));
    assert_eq!(t.add_task(&cfg, "nope"), Err(TreeError::UnknownTask("nope".into())));
    fill(&mut t, "a@b.co");
    t.traverse_next_leaf(&cfg).unwrap();
    t.finish_or_pop(&cfg).unwrap();
    fill(&mut t, "7");
    t.traverse_next_leaf(&cfg).unwrap();
    t.finish_or_pop(&cfg).unwrap();
    assert_eq!(t.add_task(&cfg, "other"), Err(TreeError::TaskAlreadyComplete("other".into())));
    assert_eq!(t.reset_task("other"), Err(TreeError::TaskNotRepeatable("other".into())));
}

#[test]
fn reset_keeps_referenced_subtask() {
    let cfg = config();
    let mut t = TaskTree::new();
    t.add_task(&cfg, "main").unwrap();
    fill(&mut t, "a@b.co");
    t.traverse_next_leaf(&cfg).unwrap();
    t.finish_or_pop(&cfg).unwrap();
    fill(&mut t, "1");
    t.traverse_next_leaf(&cfg).unwrap();
    fill(&mut t, "2");
    t.traverse_next_leaf(&cfg).unwrap();
    t.finish_or_pop(&cfg).unwrap();
    assert!(t.task_succeeded("main"));

    t.reset_task("main").unwrap();
    assert!(!t.task_succeeded("main"));
    assert!(t.task_succeeded("ident"));
    assert!(t.collected("main").is_empty());
    let tr = t.add_task(&cfg, "main").unwrap();
    assert_eq!(leaf_of(&tr).entity, "a");
}

#[test]
fn turn_limit_counts_past_max() {
    let cfg = config();
    let mut t = TaskTree::new();
    t.add_task(&cfg, "main").unwrap();
    for _ in 0..3 {
        assert_eq!(t.tick_and_check_turn_limit("main"), TurnLimit::Within);
    }
    assert_eq!(t.tick_and_check_turn_limit("main"), TurnLimit::Exceeded);
    assert_eq!(t.task_turns("main"), 4);
}

#[test]
fn record_requires_current_leaf() {
    let cfg = config();
    let mut t = TaskTree::new();
    t.add_task(&cfg, "main").unwrap();
    let leaf = t.cursor().unwrap().leaf;
    assert_eq!(
        t.record_slot_outcome(leaf + 100, "email", SlotOutcome::Failed),
        Err(TreeError::NotCurrentLeaf(leaf + 100))
    );
    assert!(matches!(
        t.record_slot_outcome(leaf, "zip", SlotOutcome::Failed),
        Err(TreeError::UnknownEntity { .. })
    ));
}

#[test]
fn failed_never_overwrites_filled() {
    let cfg = config();
    let mut t = TaskTree::new();
    t.add_task(&cfg, "main").unwrap();
    let c = t.cursor().cloned().unwrap();
    t.force_slot(c.leaf, "email", SlotOutcome::Ok("a@b.co".into())).unwrap();
    t.force_slot(c.leaf, "email", SlotOutcome::Failed).unwrap();
    assert_eq!(t.leaf(c.leaf).unwrap().slot("email").unwrap().status, SlotStatus::FilledOk);
}

#[test]
fn snapshot_marks_current_and_resolves_refs() {
    let cfg = config();
    let mut t = TaskTree::new();
    t.add_task(&cfg, "main").unwrap();
    let s = t.snapshot();
    let cur: Vec<_> = s.nodes.iter().filter(|n| n.current).collect();
    assert_eq!(cur.len(), 1);
    assert_eq!(s.cursor.as_ref().unwrap().entity, "email");
    assert_eq!(s.stack, vec!["main".to_string()]);
    let r = s.nodes.iter().find(|n| n.kind == NodeKind::Ref).unwrap();
    assert_eq!(r.ref_target, t.task_root("ident"));
    let json = serde_json::to_value(&s).unwrap();
    assert!(json["nodes"][0].get("ref").is_some());
}

#[test]
fn serde_round_trip() {
    let cfg = config();
    let mut t = TaskTree::new();
    t.add_task(&cfg, "main").unwrap();
    fail(&mut t);
    let json = serde_json::to_string(&t).unwrap();
    let back: TaskTree = serde_json::from_str(&json).unwrap();
    assert_eq!(back, t);
}
