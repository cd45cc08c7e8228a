use std::collections::BTreeMap;
use std::path::Path;

use buoyancy::core::{EventKind, ParameterSet};
use buoyancy::files::{parse_graph, parse_scenario, serialize_graph, serialize_scenario};
use buoyancy::generate::{generate, TEMPLATES};
use buoyancy::snapshot;
use buoyancy::ScenarioError;
use proptest::prelude::*;

fn corpus(template: &str) -> String {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("scenarios")
        .join(format!("{template}.json"));
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn corpus_matches_generator() {
    for t in TEMPLATES {
        let generated = serialize_scenario(&generate(t, 1, &BTreeMap::new()).unwrap());
        assert_eq!(generated, corpus(t), "scenarios/{t}.json is stale");
    }
}

#[test]
fn corpus_parses_and_validates() {
    for t in TEMPLATES {
        let s = parse_scenario(&corpus(t)).unwrap();
        assert_eq!(s.name, t);
        s.validate().unwrap();
    }
}

#[test]
fn rome_trip_matches_the_story() {
    let s = parse_scenario(&corpus("rome-trip")).unwrap();
    let label = |id: &str| s.graph.get(&id.into()).unwrap().label().to_owned();
    assert_eq!(label("ctx-rome"), "Trip to Rome in July 2018");
    assert_eq!(label("peter"), "Peter Stainer");
    assert_eq!(label("db"), "Deutsche Bahn");
    let revisit = s
        .events
        .iter()
        .rev()
        .find(|e| e.kind == EventKind::ContextSwitch && e.actor.as_str() == "user1");
    assert_eq!(revisit.unwrap().context.as_ref().unwrap().as_str(), "ctx-rome");
}

#[test]
fn unsorted_events_name_the_first_offender() {
    let text = r#"{
        "name": "unsorted",
        "horizon": "2018-06-06T00:00:00Z",
        "graph": {"things": [
            {"id": "u", "type": "User", "literals": ["U"]},
            {"id": "d", "type": "Document", "literals": ["D"]}
        ], "relations": []},
        "events": [
            {"t": "2018-06-04T10:00:00Z", "actor": "u", "kind": "View", "target": "d"},
            {"t": "2018-06-05T10:00:00Z", "actor": "u", "kind": "View", "target": "d"},
            {"t": "2018-06-04T11:00:00Z", "actor": "u", "kind": "View", "target": "d"},
            {"t": "2018-06-04T09:00:00Z", "actor": "u", "kind": "View", "target": "d"}
        ]
    }"#;
    assert_eq!(
        parse_scenario(text).unwrap_err(),
        ScenarioError::UnsortedEvents { index: 2 }
    );
}

#[test]
fn structural_violations_are_listed() {
    let text = r#"{
        "name": "bad",
        "horizon": "2018-06-03T00:00:00Z",
        "graph": {"things": [
            {"id": "u", "type": "User", "literals": ["U"]},
            {"id": "c", "type": "Context", "literals": ["C"]}
        ], "relations": []},
        "events": [
            {"t": "2018-06-04T10:00:00Z", "actor": "u", "kind": "ContextSwitch", "context": "c", "target": "c"}
        ]
    }"#;
    match parse_scenario(text).unwrap_err() {
        ScenarioError::Invalid(v) => assert_eq!(v.len(), 2, "{v:?}"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn graph_documents_round_trip() {
    let s = generate("group-task", 3, &BTreeMap::new()).unwrap();
    let text = serialize_graph(&s.graph);
    assert_eq!(parse_graph(&text).unwrap(), s.graph);
    assert!(text.contains("\"event_start\": \"2018-06-"));
}

#[test]
fn snapshot_of_a_finished_run_round_trips() {
    let s = parse_scenario(&corpus("group-task")).unwrap();
    let runner = {
        let mut r = buoyancy::run::Runner::new(s, ParameterSet::default()).unwrap();
        r.advance_to(usize::MAX).unwrap();
        r
    };
    let snap = runner.snapshot();
    let text = snapshot::to_json(&snap);
    let back = snapshot::from_json(&text).unwrap();
    assert_eq!(back, snap);
    // Completion marks travel with the graph.
    assert!(text.contains("\"completed\": true"));
}

#[test]
fn inconsistent_snapshot_is_rejected() {
    let s = parse_scenario(&corpus("rome-trip")).unwrap();
    let mut r = buoyancy::run::Runner::new(s, ParameterSet::default()).unwrap();
    r.advance_to(40).unwrap();
    let text = snapshot::to_json(&r.snapshot());
    let broken = text.replacen("\"frozen_at\": null", "\"frozen_at\": 1528100000", 1);
    assert_ne!(broken, text);
    let err = snapshot::from_json(&broken).unwrap_err().to_string();
    assert!(err.contains("frozen"), "{err}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn generated_scenarios_round_trip(template in 0..TEMPLATES.len(), seed in any::<u64>()) {
        let s = generate(TEMPLATES[template], seed, &BTreeMap::new()).unwrap();
        prop_assert!(s.validate().is_ok());
        let text = serialize_scenario(&s);
        let back = parse_scenario(&text).unwrap();
        prop_assert_eq!(&back, &s);
        prop_assert_eq!(serialize_scenario(&back), text);
    }
}
