mod common;

use std::collections::HashSet;
use std::sync::Arc;
use std::thread;
use std::time::Duration;

use common::{manager, memory_server, no_insurance_turns, spawn_server, Client, APPT_OPEN, NURSE_HELLO};
use serde_json::Value;
use tod_core::store::{ContextStore, KvServer, KvStore};
use tod_core::tree::NodeKind;
use tod_core::TreeSnapshot;

#[test]
fn health_conversation_over_http() {
    let c = Client::new(&memory_server("health"));
    let (id, greeting) = c.session();
    assert_eq!(greeting, NURSE_HELLO);
    let mut finished = Vec::new();
    for (i, (user, want)) in no_insurance_turns().into_iter().enumerate() {
        let (status, v) = c.say(&id, user);
        assert_eq!(status, 200);
        assert_eq!(v["reply"], want, "turn {i}: {user}");
        assert_eq!(v["session_id"], id.as_str());
        assert_eq!(v["turn"], (i + 1) as u64);
        finished.extend(v["finished_tasks"].as_array().unwrap().iter().map(|t| t.as_str().unwrap().to_string()));
    }
    assert!(finished.contains(&"health_appointment".to_string()), "{finished:?}");
}

#[test]
fn fresh_session_tree_is_root_only() {
    let c = Client::new(&memory_server("health"));
    let (id, _) = c.session();
    let (status, snap): (u16, TreeSnapshot) = c.tree(&id);
    assert_eq!(status, 200);
    assert_eq!(snap.nodes.len(), 1);
    assert!(snap.nodes[0].children.is_empty());
    assert!(snap.cursor.is_none());
    assert!(snap.stack.is_empty());
}

#[test]
fn tree_follows_the_conversation() {
    let c = Client::new(&memory_server("health"));
    let (id, _) = c.session();
    let (_, v) = c.say(&id, "I want to see a doctor");
    assert_eq!(v["reply"], APPT_OPEN);
    assert_eq!(v["active_task"], "health_appointment");

    let (status, snap): (u16, TreeSnapshot) = c.tree(&id);
    assert_eq!(status, 200);
    let cursor = snap.cursor.clone().expect("cursor");
    assert_eq!(cursor.task, "health_appointment");
    let leaf = snap.node(cursor.leaf).unwrap();
    assert_eq!(leaf.kind, NodeKind::Leaf);
    assert!(leaf.current);
    assert!(leaf.label.contains("date_time_group"), "{}", leaf.label);
    assert_eq!(snap.nodes.iter().filter(|n| n.current).count(), 1);

    let root = snap.node(snap.nodes[0].children[0]).unwrap();
    assert_eq!(root.kind, NodeKind::TaskRoot);
    assert_eq!(root.label, "health_appointment");

    // The raw JSON uses the documented field names.
    let (_, raw): (u16, Value) = c.tree(&id);
    let first = &raw["nodes"][0];
    for key in ["id", "kind", "label", "success", "exhausted", "current", "ref", "children"] {
        assert!(first.get(key).is_some(), "missing {key}");
    }
    assert_eq!(raw["cursor"]["entity"], cursor.entity.as_str());
}

#[test]
fn error_statuses() {
    let c = Client::new(&memory_server("health"));
    let (status, v) = c.say("no-such-session", "hello");
    assert_eq!(status, 404);
    assert!(v["error"].as_str().unwrap().contains("no-such-session"));
    let (status, _): (u16, Value) = c.tree("no-such-session");
    assert_eq!(status, 404);

    let (id, _) = c.session();
    // Empty text is a normal turn that gets the fallback reply.
    let (status, v) = c.say(&id, "");
    assert_eq!(status, 200);
    assert!(!v["reply"].as_str().unwrap().is_empty());

    assert_eq!(c.delete(&id), 204);
    assert_eq!(c.say(&id, "hello").0, 404);
}

#[test]
fn fifty_concurrent_sessions() {
    let c = Client::new(&memory_server("shopping"));
    let handles: Vec<_> = (0..50)
        .map(|i| {
            let c = c.clone();
            thread::spawn(move || {
                let (id, _) = c.session();
                c.reply(&id, "I want to check my order status");
                let verified = c.reply(&id, "jane.doe@example.com");
                assert!(verified.starts_with("I have verified your identity."), "{verified}");
                let order = 10000 + i;
                let done = c.reply(&id, &order.to_string());
                assert!(done.contains(&format!("Order {order}")), "{done}");
                id
            })
        })
        .collect();
    let ids: HashSet<String> = handles.into_iter().map(|h| h.join().unwrap()).collect();
    assert_eq!(ids.len(), 50);
}

#[test]
fn store_outage_is_503() {
    let kv = KvServer::start("127.0.0.1:0").unwrap();
    let store: Arc<dyn ContextStore> = Arc::new(KvStore::connect(&kv.addr().to_string()).unwrap());
    let c = Client::new(&spawn_server(manager("health", store)));
    let (id, _) = c.session();
    assert_eq!(c.reply(&id, "I want to make an appointment"), APPT_OPEN);

    kv.shutdown();
    thread::sleep(Duration::from_millis(50));
    let (status, v) = c.say(&id, "tomorrow");
    assert_eq!(status, 503, "{v}");
    assert!(v["error"].is_string());
    assert_eq!(c.create().0, 503);
}

#[test]
fn health_endpoint_reports_bot() {
    let base = memory_server("flight");
    let v: Value = ureq::get(format!("{base}/health")).call().unwrap().body_mut().read_json().unwrap();
    assert_eq!(v["status"], "ok");
    assert_eq!(v["bot"], "Sky Travel");
}
