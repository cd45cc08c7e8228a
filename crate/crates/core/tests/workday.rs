//! A small office day driven through the public API only.

use buoyancy_core::graph::MEMBER_OF_CONTEXT;
use buoyancy_core::query::{context_listing, forgetful_search, mb_report};
use buoyancy_core::{Engine, Event, EventKind, Graph, ParameterSet, ThingId, ThingType, Timestamp, DAY, HOUR};

const MONDAY: i64 = 1_528_070_400;

fn at(day: i64, hour: i64) -> Timestamp {
    Timestamp(MONDAY + day * DAY + hour * HOUR)
}

fn id(s: &str) -> ThingId {
    ThingId::new(s)
}

fn office() -> Graph {
    let mut g = Graph::new();
    for (name, kind, label) in [
        ("ana", ThingType::User, "Ana"),
        ("budget", ThingType::Context, "Budget 2019"),
        ("hiring", ThingType::Context, "Hiring"),
        ("sheet", ThingType::Document, "Budget sheet"),
        ("memo", ThingType::Email, "Budget memo"),
        ("cv", ThingType::Document, "Candidate CV"),
        ("boss", ThingType::Person, "Budget owner"),
    ] {
        g.add_thing(label, kind, Some(id(name))).unwrap();
    }
    for (member, ctx) in [
        ("sheet", "budget"),
        ("memo", "budget"),
        ("boss", "budget"),
        ("cv", "hiring"),
    ] {
        g.add_relation(&id(member), &id(ctx), MEMBER_OF_CONTEXT).unwrap();
    }
    g.add_relation(&id("memo"), &id("boss"), "sender").unwrap();
    g
}

fn morning() -> Engine {
    let mut e = Engine::new(office(), ParameterSet::default()).unwrap();
    for ev in [
        Event::switch(at(0, 8), "ana", "budget"),
        Event::interaction(at(0, 9), "ana", EventKind::Modify, "sheet"),
        Event::interaction(at(0, 10), "ana", EventKind::View, "memo"),
        Event::interaction(at(0, 11), "ana", EventKind::Modify, "sheet"),
        Event::switch(at(0, 12), "ana", "hiring"),
        Event::interaction(at(0, 13), "ana", EventKind::View, "cv"),
    ] {
        e.apply_event(&ev).unwrap();
    }
    e
}

#[test]
fn a_left_context_keeps_its_ranking() {
    let e = morning();
    let (ana, budget) = (id("ana"), id("budget"));
    let at_noon = context_listing(&e, &budget, &ana, at(0, 12)).unwrap();
    let a_week_later = context_listing(&e, &budget, &ana, at(7, 12)).unwrap();
    assert_eq!(at_noon, a_week_later);
    let order: Vec<&str> = at_noon.iter().map(|(t, _)| t.as_str()).collect();
    assert_eq!(order[0], "sheet");
    assert!(order.contains(&"boss"));
}

#[test]
fn absence_stops_the_decay() {
    let e = morning();
    let ana = id("ana");
    let later = |days| e.global_mb(&id("sheet"), &ana, at(days, 13)).unwrap();
    let series: Vec<f64> = (0..10).map(later).collect();
    // Two idle days still count, after that the user is simply away.
    assert!(series[1] < series[0] && series[2] < series[1], "{series:?}");
    assert!(series[2..].iter().all(|v| *v == series[2]), "{series:?}");
    assert!(series.iter().all(|v| (0.0..=1.0).contains(v)));
}

#[test]
fn search_hides_the_unused() {
    let e = morning();
    let now = at(1, 9);
    let all = forgetful_search(&e, "budget", 0.0, &id("ana"), now).unwrap();
    assert_eq!(all.hidden_count, 0);
    assert_eq!(all.coverage, 1.0);
    // The context itself and its owner match too.
    assert_eq!(all.hits.len(), 4);
    assert_eq!(all.hits[0].0.as_str(), "sheet");

    let cutoff = (all.hits[0].1 + all.hits[1].1) / 2.0;
    let strict = forgetful_search(&e, "budget", cutoff, &id("ana"), now).unwrap();
    assert_eq!(strict.hits.len(), 1);
    assert_eq!(strict.hidden_count, 3);
    assert_eq!(strict.coverage, 0.25);
    assert!(forgetful_search(&e, "budget", 1.5, &id("ana"), now).is_err());
}

#[test]
fn report_covers_every_scope() {
    let e = morning();
    let r = mb_report(&e, &id("sheet"), at(0, 14)).unwrap();
    assert_eq!(r.global.len(), 1);
    assert!(r.local.contains_key(&(id("ana"), id("budget"))));
    assert!(r.group > 0.0);
    let untouched = mb_report(&e, &id("boss"), at(0, 14)).unwrap();
    assert_eq!(untouched.global.len(), 1);
    // A score cannot be read before its own last update.
    assert!(mb_report(&e, &id("cv"), at(0, 12)).is_err());
}

#[test]
fn engine_state_survives_a_round_trip() {
    let mut e = morning();
    let copy = Engine::from_parts(e.to_parts()).unwrap();
    let next = Event::interaction(at(2, 9), "ana", EventKind::View, "memo");
    let mut resumed = copy;
    e.apply_event(&next).unwrap();
    resumed.apply_event(&next).unwrap();
    for thing in ["sheet", "memo", "boss", "cv"] {
        let a = mb_report(&e, &id(thing), at(3, 0)).unwrap();
        let b = mb_report(&resumed, &id(thing), at(3, 0)).unwrap();
        assert_eq!(a, b, "{thing}");
    }
}

#[test]
fn out_of_order_events_are_refused() {
    let mut e = morning();
    let late = Event::interaction(at(0, 10), "ana", EventKind::View, "cv");
    assert!(e.apply_event(&late).is_err());
}

/// Two users, a meeting context in use and a project context left behind,
/// loaded from plain state rather than replayed.
fn desk() -> Engine {
    use buoyancy_core::{ActivityClock, BuoyancyRecord, EngineParts};
    use std::collections::BTreeMap;

    let mut g = Graph::new();
    for (name, kind, label) in [
        ("user1", ThingType::User, "User 1"),
        ("user2", ThingType::User, "User 2"),
        ("mannheim", ThingType::Context, "Mannheim meeting"),
        ("mf", ThingType::Context, "MF project"),
        ("db", ThingType::WebPage, "Deutsche Bahn"),
    ] {
        g.add_thing(label, kind, Some(id(name))).unwrap();
    }
    for ctx in ["mannheim", "mf"] {
        g.add_relation(&id("db"), &id(ctx), MEMBER_OF_CONTEXT).unwrap();
    }
    let start = at(0, 9);
    let record = |base, frozen: bool| BuoyancyRecord {
        base,
        last_update: 0,
        stim_history: Vec::new(),
        frozen_at: frozen.then_some(start),
    };
    let local = BTreeMap::from([
        ((id("db"), id("user2"), id("mannheim")), record(0.68, false)),
        ((id("db"), id("user2"), id("mf")), record(0.38, true)),
        ((id("db"), id("user1"), id("mf")), record(0.0, true)),
    ]);
    let clocks = BTreeMap::from([
        (id("user1"), ActivityClock::starting_at(start)),
        (id("user2"), ActivityClock::starting_at(start)),
    ]);
    Engine::from_parts(EngineParts {
        graph: g,
        params: ParameterSet::default(),
        local,
        global: BTreeMap::new(),
        group: BTreeMap::new(),
        active_context: BTreeMap::from([(id("user2"), id("mannheim"))]),
        user_clocks: clocks,
        group_clock: Some(ActivityClock::starting_at(start)),
        origin: Some(start),
        last_applied: Some(start),
        rules_through: Some(start),
    })
    .unwrap()
}

#[test]
fn cross_section_of_a_shared_web_page() {
    let e = desk();
    let r = mb_report(&e, &id("db"), at(0, 9)).unwrap();
    assert_eq!(r.local[&(id("user2"), id("mannheim"))], 0.68);
    assert_eq!(r.local[&(id("user2"), id("mf"))], 0.38);
    assert_eq!(r.local[&(id("user1"), id("mf"))], 0.0);
    assert_eq!(r.group, 0.0);

    // Only the context in use keeps sinking.
    let later = mb_report(&e, &id("db"), at(30, 9)).unwrap();
    assert!(later.local[&(id("user2"), id("mannheim"))] < 0.68);
    assert_eq!(later.local[&(id("user2"), id("mf"))], 0.38);
    assert_eq!(
        context_listing(&e, &id("mf"), &id("user2"), at(30, 9)).unwrap(),
        vec![(id("db"), 0.38)]
    );
}
