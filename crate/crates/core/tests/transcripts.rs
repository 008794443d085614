mod common;

use common::{memory_manager, play, replay_scripts, Chat, Script};
use tod_core::dialogue::actions::TreeOp;
use tod_core::TurnOutcome;

fn script(name: &str) -> Script {
    replay_scripts().into_iter().find(|s| s.name == name).expect("script")
}

fn replay(name: &str) -> Vec<TurnOutcome> {
    let s = script(name);
    let m = memory_manager(s.bot);
    let (_, outcomes, check) = play(&m, &s);
    check.unwrap();
    outcomes
}

#[test]
fn every_replay_script_matches() {
    for s in replay_scripts() {
        let m = memory_manager(s.bot);
        let (_, _, check) = play(&m, &s);
        check.unwrap();
    }
}

#[test]
fn trajectory_one_action_sequence() {
    let out = replay("order_status_email_verified");
    assert_eq!(out[0].action, "new_task");
    assert!(out[0].effect.tree_ops.contains(&TreeOp::AddTask("check_order_status".into())));
    assert!(out[0].effect.tree_ops.contains(&TreeOp::EnterSubtask("verify_identity".into())));
    assert_eq!(out[0].active_task.as_deref(), Some("verify_identity"));

    assert_eq!(out[1].action, "continue_task");
    assert!(out[1].effect.finished_tasks.contains(&"verify_identity".to_string()));
    assert_eq!(out[1].effect.prompted[0].entity, "order_id");
    assert_eq!(out[1].active_task.as_deref(), Some("check_order_status"));
}

#[test]
fn trajectory_two_action_sequence() {
    let out = replay("order_status_zip_fallback");
    let ops = &out[1].effect.tree_ops;
    assert!(ops.contains(&TreeOp::SlotFailed {
        task: "verify_identity".into(),
        entity: "email_address".into()
    }));
    assert_eq!(out[1].effect.prompted[0].entity, "zip_code");
    assert!(out[1].effect.finished_tasks.is_empty());

    assert!(out[2].effect.backend_calls.iter().any(|c| c.function == "verify_zip" && c.success));
    assert_eq!(out[2].effect.finished_tasks, vec!["verify_identity".to_string()]);
    assert_eq!(out[2].effect.prompted[0].entity, "order_id");
}

#[test]
fn task_switch_pushes_and_pops() {
    let s = script("flight_weather_switch_and_faq");
    let m = memory_manager(s.bot);
    let (id, greeting) = m.create_session().unwrap();
    assert_eq!(greeting, s.greeting);

    m.message(&id, s.turns[0].0).unwrap();
    let out = m.message(&id, s.turns[1].0).unwrap();
    assert_eq!(out.action, "switch_task");
    let snap = m.tree(&id).unwrap();
    assert_eq!(snap.stack, vec!["book_flight".to_string()]);
    assert_eq!(snap.cursor.as_ref().unwrap().task, "check_weather");

    let out = m.message(&id, s.turns[2].0).unwrap();
    assert_eq!(out.reply, s.turns[2].1);
    assert!(out.effect.tree_ops.contains(&TreeOp::Resume("book_flight".into())));
    let snap = m.tree(&id).unwrap();
    assert!(snap.stack.is_empty());
    assert_eq!(snap.cursor.as_ref().unwrap().entity, "origin");

    // Values gathered before the switch survive it.
    m.message(&id, s.turns[3].0).unwrap();
    m.message(&id, "check the weather").unwrap();
    let ctx = m.context(&id).unwrap();
    assert_eq!(ctx.tree.collected("book_flight").get("origin").map(String::as_str), Some("San Francisco"));
}

#[test]
fn faq_mid_task_keeps_task() {
    let s = script("flight_weather_switch_and_faq");
    let m = memory_manager(s.bot);
    let (id, _) = m.create_session().unwrap();
    for (u, _) in &s.turns[..4] {
        m.message(&id, u).unwrap();
    }
    let before = m.tree(&id).unwrap();
    let out = m.message(&id, "Do I have free checked bags?").unwrap();
    assert_eq!(out.action, "answer_faq");
    assert!(out.reply.starts_with("All frequent flyer program members will have one free checked bag."));
    assert!(out.effect.tree_ops.iter().all(|op| !matches!(op, TreeOp::AddTask(_))));
    assert_eq!(m.tree(&id).unwrap(), before);
}

#[test]
fn shared_subtask_not_asked_twice() {
    let mut c = Chat::new("shopping");
    let mut log = Vec::new();
    for u in ["I want to check my order status", "jane.doe@example.com", "12345"] {
        log.push(c.engine.process_turn_in_place(&mut c.ctx, u));
    }
    let mut second = Vec::new();
    for u in ["I want to update my order", "yes"] {
        second.push(c.engine.process_turn_in_place(&mut c.ctx, u));
    }
    let identity_prompts = second
        .iter()
        .flat_map(|o| &o.effect.prompted)
        .filter(|p| p.task == "verify_identity")
        .count();
    assert_eq!(identity_prompts, 0);
    // The order id from the first task is offered back for confirmation.
    assert_eq!(
        second[0].reply,
        "Oh sure, I'd be happy to help you update your order. Just to confirm, your order id is 12345, right?"
    );
    assert_eq!(second[1].effect.finished_tasks, vec!["update_order".to_string()]);
    assert!(log[1].effect.finished_tasks.contains(&"verify_identity".to_string()));
}

#[test]
fn repeat_resets_appointment_but_not_insurance() {
    let s = script("health_insurance_branch_and_repeat");
    let m = memory_manager(s.bot);
    let (id, _) = m.create_session().unwrap();
    for (u, want) in &s.turns[..8] {
        assert_eq!(m.message(&id, u).unwrap().reply, *want);
    }
    let ctx = m.context(&id).unwrap();
    assert!(ctx.tree.task_succeeded("health_appointment"));
    assert!(ctx.tree.task_succeeded("get_health_insurance_info"));

    let out = m.message(&id, "yes").unwrap();
    assert!(out.effect.tree_ops.contains(&TreeOp::ResetTask("health_appointment".into())));
    let ctx = m.context(&id).unwrap();
    assert!(!ctx.tree.task_succeeded("health_appointment"));
    assert!(ctx.tree.collected("health_appointment").is_empty());
    assert!(ctx.tree.task_succeeded("get_health_insurance_info"));
}

#[test]
fn turn_limit_quits_after_eleven_attributed_turns() {
    let mut c = Chat::new("health");
    let first = c.engine.process_turn_in_place(&mut c.ctx, "I want to make an appointment");
    assert_eq!(first.action, "new_task");
    let mut last = None;
    for i in 1..=11 {
        let out = c.engine.process_turn_in_place(&mut c.ctx, "I want to make an appointment");
        if i < 11 {
            assert_ne!(out.action, "quit_task_turn_limit", "quit early at attributed turn {i}");
        }
        last = Some(out);
    }
    let last = last.unwrap();
    assert_eq!(last.action, "quit_task_turn_limit");
    assert!(last.reply.starts_with("Sorry, I can't help you book an appointment."));
    assert!(last.effect.failed_tasks.contains(&"health_appointment".to_string()));
    assert!(c.ctx.tree.active_task().is_none());
    assert!(c.ctx.tree.stack().is_empty());
}

#[test]
fn turn_limit_with_non_answers() {
    let mut c = Chat::new("health");
    c.say("I want to make an appointment");
    let mut actions = Vec::new();
    for _ in 0..11 {
        let out = c.engine.process_turn_in_place(&mut c.ctx, "hmm");
        actions.push(out.action);
        if c.ctx.tree.active_task().is_none() {
            break;
        }
    }
    // The date slot gives up first (one retry) and the task fails before the limit.
    assert!(c.ctx.tree.active_task().is_none());
    assert!(actions.len() <= 11);
}

#[test]
fn negated_request_takes_failed_entity_path() {
    let mut c = Chat::new("shopping");
    c.say("I want to check order status");
    let out = c.engine.process_turn_in_place(&mut c.ctx, "I don't want to check order status anymore");
    assert_eq!(out.action, "continue_task");
    assert_eq!(
        out.reply,
        "I am sorry, but I could not recognize your email address. Could you please tell me your zip code?"
    );
    assert_eq!(c.ctx.tree.chain_owner(), Some("check_order_status"));
}

#[test]
fn two_cities_are_ambiguous() {
    let out = replay("round_trip_ambiguity");
    assert_eq!(out[0].action, "new_task_with_info");
    assert!(out[0].reply.contains("San Francisco and Los Angeles"));
    assert!(out[1].effect.tree_ops.contains(&TreeOp::SlotFilled {
        task: "book_flight".into(),
        entity: "origin".into(),
        value: "San Francisco".into()
    }));
}

#[test]
fn new_task_with_info_fills_and_calls_backend() {
    let mut c = Chat::new("flight");
    let out = c.engine.process_turn_in_place(&mut c.ctx, "I would like to check the weather for zip code 94105.");
    assert_eq!(out.action, "new_task_with_info");
    assert_eq!(
        out.reply,
        "I'd be happy to help you check the weather. Here is what I found: the weather in 94105, San Francisco is sunny. That's all I have about the weather. Is there anything else I can help you with?"
    );
}

#[test]
fn greeting_and_goodbye() {
    let mut c = Chat::new("health");
    let out = c.engine.process_turn_in_place(&mut c.ctx, "hello");
    assert_eq!(out.action, "greeting");
    let out = c.engine.process_turn_in_place(&mut c.ctx, "bye");
    assert_eq!(out.action, "goodbye");
}

#[test]
fn picklist_failure_suggests_values() {
    let mut c = Chat::new("health");
    for u in ["I want to make an appointment", "tomorrow", "3pm"] {
        c.say(u);
    }
    let reply = c.say("the cafeteria");
    assert!(reply.contains("You can choose from: ICU, Elderly services"), "{reply}");
}

#[test]
fn unknown_utterance_when_idle_falls_back() {
    let mut c = Chat::new("shopping");
    let out = c.engine.process_turn_in_place(&mut c.ctx, "purple monkey dishwasher");
    assert_eq!(out.action, "fallback_clarify");
    assert_eq!(out.turn, 1);
}
