//! Seeded scenario templates.
//!
//! A scenario is a pure function of `(template, seed, params)`: the only
//! source of randomness is a ChaCha8 stream seeded from `seed`, and graphs
//! and events are built in a fixed order.

use std::collections::BTreeMap;

use buoyancy_core::graph::{ATTENDEE, MEMBER_OF_CONTEXT};
use buoyancy_core::{Event, EventKind, Graph, Scenario, Thing, ThingId, ThingType, Timestamp, DAY, HOUR, MINUTE};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Error;

pub const TEMPLATES: [&str; 5] = [
    "solo-task",
    "group-task",
    "group-task-readers",
    "before-after-event",
    "rome-trip",
];

/// Monday 2018-06-04 00:00 UTC.
const BASE: Timestamp = Timestamp(1_528_070_400);

const RELATED: &str = "relatedTo";
const PART_OF: &str = "partOf";

pub fn generate(template: &str, seed: u64, params: &BTreeMap<String, String>) -> Result<Scenario, Error> {
    let mut p = Params::new(params);
    let mut b = Builder::new(template, seed);
    match template {
        "solo-task" => {
            let days = p.take("days", 10, 1, 3650)?;
            p.finish()?;
            solo_task(&mut b, days);
        }
        "group-task" => {
            let users = p.take("users", 3, 1, 100)?;
            let days = p.take("days", 14, 2, 3650)?;
            p.finish()?;
            team_task(&mut b, users, 0, days);
        }
        "group-task-readers" => {
            let active = p.take("active", 2, 1, 100)?;
            let readers = p.take("readers", 2, 0, 100)?;
            let days = p.take("days", 14, 2, 3650)?;
            p.finish()?;
            team_task(&mut b, active, readers, days);
        }
        "before-after-event" => {
            let before = p.take("before", 5, 1, 365)?;
            let after = p.take("after", 10, 1, 3650)?;
            p.finish()?;
            before_after(&mut b, before, after);
        }
        "rome-trip" => {
            let days = p.take("mannheim_days", 30, 1, 3650)?;
            p.finish()?;
            rome_trip(&mut b, days);
        }
        other => return Err(Error::UnknownTemplate(other.to_owned())),
    }
    Ok(b.finish())
}

/// Parses `k=v` pairs as given on the command line.
pub fn parse_param(s: &str) -> Result<(String, String), Error> {
    match s.split_once('=') {
        Some((k, v)) if !k.is_empty() => Ok((k.trim().to_owned(), v.trim().to_owned())),
        _ => Err(Error::BadParam(format!("expected key=value, got `{s}`"))),
    }
}

struct Params<'a> {
    given: &'a BTreeMap<String, String>,
    known: Vec<&'static str>,
}

impl<'a> Params<'a> {
    fn new(given: &'a BTreeMap<String, String>) -> Self {
        Self {
            given,
            known: Vec::new(),
        }
    }

    fn take(&mut self, key: &'static str, default: u32, min: u32, max: u32) -> Result<u32, Error> {
        self.known.push(key);
        let Some(raw) = self.given.get(key) else {
            return Ok(default);
        };
        let v: u32 = raw
            .parse()
            .map_err(|_| Error::BadParam(format!("{key}: `{raw}` is not a non-negative integer")))?;
        if !(min..=max).contains(&v) {
            return Err(Error::BadParam(format!("{key}: {v} outside {min}..={max}")));
        }
        Ok(v)
    }

    fn finish(self) -> Result<(), Error> {
        match self.given.keys().find(|k| !self.known.contains(&k.as_str())) {
            Some(k) => Err(Error::BadParam(format!(
                "unknown parameter `{k}` (expected one of: {})",
                self.known.join(", ")
            ))),
            None => Ok(()),
        }
    }
}

struct Builder {
    name: String,
    graph: Graph,
    events: Vec<Event>,
    rng: ChaCha8Rng,
    horizon: Option<Timestamp>,
}

fn id(s: &str) -> ThingId {
    ThingId::from(s)
}

/// Wall time on day `day` after the base date at `hour:minute`.
fn at(day: u32, hour: i64, minute: i64) -> Timestamp {
    BASE.plus(i64::from(day) * DAY + hour * HOUR + minute * MINUTE)
}

impl Builder {
    fn new(name: &str, seed: u64) -> Self {
        Self {
            name: name.to_owned(),
            graph: Graph::new(),
            events: Vec::new(),
            rng: ChaCha8Rng::seed_from_u64(seed),
            horizon: None,
        }
    }

    fn thing(&mut self, key: &str, kind: ThingType, label: &str) {
        self.graph
            .add_thing(label, kind, Some(id(key)))
            .expect("template ids are unique");
    }

    fn calendar(&mut self, key: &str, label: &str, start: Timestamp) {
        self.graph
            .insert(Thing::calendar_event(key, label, start))
            .expect("template ids are unique");
    }

    fn relate(&mut self, a: &str, b: &str, label: &str) {
        self.graph
            .add_relation(&id(a), &id(b), label)
            .expect("template relations are valid");
    }

    fn members(&mut self, ctx: &str, things: &[&str]) {
        for t in things {
            self.relate(t, ctx, MEMBER_OF_CONTEXT);
        }
    }

    fn jitter(&mut self, minutes: i64) -> i64 {
        self.rng.random_range(0..=minutes) * MINUTE
    }

    fn pick<'s>(&mut self, from: &[&'s str]) -> &'s str {
        from[self.rng.random_range(0..from.len())]
    }

    fn act(&mut self, t: Timestamp, actor: &str, kind: EventKind, target: &str) {
        self.events.push(Event::interaction(t, actor, kind, target));
    }

    fn switch(&mut self, t: Timestamp, actor: &str, ctx: &str) {
        self.events.push(Event::switch(t, actor, ctx));
    }

    fn finish(mut self) -> Scenario {
        self.events.sort_by_key(|e| e.at);
        let last = self.events.last().map(|e| e.at).unwrap_or(BASE);
        Scenario {
            name: self.name,
            graph: self.graph,
            horizon: self.horizon.unwrap_or(last).max(last),
            events: self.events,
        }
    }
}

/// One user modifying one task every day.
fn solo_task(b: &mut Builder, days: u32) {
    b.thing("user1", ThingType::User, "User1");
    b.thing("task", ThingType::Task, "Write the project report");
    b.thing("draft", ThingType::Document, "Project report draft");
    b.thing("ctx-report", ThingType::Context, "Project report");
    b.members("ctx-report", &["task", "draft"]);
    b.relate("draft", "task", RELATED);

    b.switch(at(0, 9, 0), "user1", "ctx-report");
    for d in 0..days {
        let t = at(d, 9, 30).plus(b.jitter(120));
        b.act(t, "user1", EventKind::Modify, "task");
        if b.rng.random_bool(0.5) {
            let later = t.plus(20 * MINUTE + b.jitter(60));
            b.act(later, "user1", EventKind::View, "draft");
        }
    }
}

/// A team preparing a review meeting; readers only look at the material.
fn team_task(b: &mut Builder, active: u32, readers: u32, days: u32) {
    let review_day = days - 2;
    let review = at(review_day, 14, 0);
    b.thing("task", ThingType::Task, "Prepare the project review");
    b.thing("subtask", ThingType::Task, "Collect the quarterly figures");
    b.thing("slides", ThingType::Presentation, "Review slides");
    b.calendar("review", "Project review meeting", review);
    b.thing("ctx-review", ThingType::Context, "Project review");
    b.members("ctx-review", &["task", "subtask", "slides", "review"]);
    b.relate("subtask", "task", PART_OF);
    b.relate("slides", "task", RELATED);
    b.relate("review", "task", RELATED);

    let workers: Vec<String> = (1..=active).map(|i| format!("user{i}")).collect();
    let lookers: Vec<String> = (1..=readers).map(|i| format!("reader{i}")).collect();
    for (i, u) in workers.iter().enumerate() {
        b.thing(u, ThingType::User, &format!("User{}", i + 1));
        b.relate("review", u, ATTENDEE);
    }
    for (i, u) in lookers.iter().enumerate() {
        b.thing(u, ThingType::User, &format!("Reader{}", i + 1));
        b.relate("review", u, ATTENDEE);
    }

    for (i, u) in workers.iter().enumerate() {
        b.switch(at(0, 9, 5 * i as i64), u, "ctx-review");
    }
    for d in 0..days {
        for u in &workers {
            if d == 0 || b.rng.random_bool(0.8) {
                let t = at(d, 10, 0).plus(b.jitter(6 * 60));
                let kind = [EventKind::Modify, EventKind::View, EventKind::Annotate][b.rng.random_range(0..3)];
                let target = b.pick(&["task", "subtask", "slides"]);
                b.act(t, u, kind, target);
            }
        }
        for u in &lookers {
            if b.rng.random_bool(0.5) {
                let t = at(d, 10, 0).plus(b.jitter(6 * 60));
                let target = b.pick(&["slides", "task"]);
                b.act(t, u, EventKind::View, target);
            }
        }
    }
    b.act(at(days / 2, 17, 0), &workers[0], EventKind::Complete, "subtask");
    for u in workers.iter().chain(&lookers) {
        let t = review.plus(b.jitter(15));
        b.act(t, u, EventKind::View, "review");
    }
    b.act(review.plus(90 * MINUTE), &workers[0], EventKind::Complete, "review");
    b.horizon = Some(at(days, 0, 0));
}

/// Preparation for a meeting, the meeting itself, and the quiet time after.
fn before_after(b: &mut Builder, before: u32, after: u32) {
    let start = at(before, 10, 0);
    b.thing("user1", ThingType::User, "User1");
    b.thing("ctx-planning", ThingType::Context, "Quarterly planning");
    b.calendar("meeting", "Quarterly planning meeting", start);
    b.thing("agenda", ThingType::Document, "Planning agenda");
    b.thing("inbox", ThingType::Generic, "Inbox");
    b.members("ctx-planning", &["meeting", "agenda"]);
    b.relate("agenda", "meeting", RELATED);
    b.relate("meeting", "user1", ATTENDEE);

    b.switch(at(0, 9, 0), "user1", "ctx-planning");
    b.act(at(0, 9, 10), "user1", EventKind::Create, "agenda");
    for d in 0..=before + after {
        let t = at(d, 8, 0).plus(b.jitter(60));
        b.act(t, "user1", EventKind::View, "inbox");
        if (1..before).contains(&d) {
            let t = at(d, 11, 0).plus(b.jitter(120));
            b.act(t, "user1", EventKind::Modify, "agenda");
        }
    }
    b.act(start, "user1", EventKind::View, "meeting");
    b.act(start.plus(90 * MINUTE), "user1", EventKind::Complete, "meeting");
    b.horizon = Some(at(before + after, 18, 0));
}

/// Planning a trip to Rome, a long detour into a Mannheim meeting that
/// shares people, places and websites with the trip, then a return.
fn rome_trip(b: &mut Builder, mannheim_days: u32) {
    const ROME: [&str; 8] = [
        "peter",
        "mannheim",
        "mail-hotel",
        "mail-reply",
        "db",
        "ticket",
        "hotel-a",
        "hotel-b",
    ];
    let away = 5;
    let back = away + mannheim_days;
    let meeting = at(away + mannheim_days / 2, 10, 0);

    b.thing("user1", ThingType::User, "User1");
    b.thing("user2", ThingType::User, "User2");
    b.thing("ctx-rome", ThingType::Context, "Trip to Rome in July 2018");
    b.thing("ctx-mannheim", ThingType::Context, "Meeting in Mannheim");
    b.thing("ctx-mf", ThingType::Context, "Managed Forgetting project");
    b.thing("peter", ThingType::Person, "Peter Stainer");
    b.thing("mannheim", ThingType::Topic, "Mannheim");
    b.thing("db", ThingType::WebPage, "Deutsche Bahn");
    b.thing("mail-hotel", ThingType::Email, "Which hotel should we stay in?");
    b.thing("mail-reply", ThingType::Email, "Re: Which hotel should we stay in?");
    b.thing("ticket", ThingType::Document, "Train ticket Mannheim - Rome");
    b.thing("hotel-a", ThingType::WebPage, "Hotel Campo de' Fiori");
    b.thing("hotel-b", ThingType::WebPage, "Hotel Santa Maria in Trastevere");
    b.calendar("meeting", "Project meeting in Mannheim", meeting);
    b.thing("agenda", ThingType::Document, "Mannheim meeting agenda");
    b.thing("mf-plan", ThingType::Document, "Managed Forgetting work plan");
    b.thing("mf-task", ThingType::Task, "Draft the forgetting deliverable");

    b.members("ctx-rome", &ROME);
    b.members("ctx-mannheim", &["peter", "mannheim", "db", "meeting", "agenda"]);
    b.members("ctx-mf", &["db", "mf-plan", "mf-task"]);
    for a in ["user1", "user2", "peter"] {
        b.relate("meeting", a, ATTENDEE);
    }
    b.relate("meeting", "mannheim", RELATED);
    b.relate("mail-reply", "mail-hotel", RELATED);
    b.relate("ticket", "db", RELATED);
    b.relate("agenda", "meeting", RELATED);
    b.relate("mf-task", "mf-plan", RELATED);

    // The golden thread: each step a little later than the one before.
    b.switch(at(0, 9, 0), "user1", "ctx-rome");
    let thread: [(u32, EventKind, &str); 9] = [
        (0, EventKind::View, "peter"),
        (0, EventKind::View, "mannheim"),
        (1, EventKind::Create, "mail-hotel"),
        (2, EventKind::View, "mail-reply"),
        (3, EventKind::View, "db"),
        (3, EventKind::Create, "ticket"),
        (4, EventKind::View, "hotel-a"),
        (4, EventKind::View, "hotel-b"),
        (4, EventKind::Annotate, "hotel-b"),
    ];
    let mut clock = at(0, 9, 0);
    for (day, kind, target) in thread {
        clock = clock.max(at(day, 10, 0)).plus(15 * MINUTE + b.jitter(90));
        b.act(clock, "user1", kind, target);
    }

    b.switch(at(away, 9, 0), "user1", "ctx-mannheim");
    for d in away..back {
        for k in 0..b.rng.random_range(1..=3) {
            let t = at(d, 9 + k, 15).plus(b.jitter(40));
            let target = b.pick(&["peter", "mannheim", "db", "agenda", "meeting"]);
            let kind = if target == "agenda" {
                EventKind::Modify
            } else {
                EventKind::View
            };
            b.act(t, "user1", kind, target);
        }
        if (d - away) % 7 == 3 {
            b.switch(at(d, 14, 0), "user1", "ctx-mf");
            let t = at(d, 14, 10).plus(b.jitter(20));
            b.act(t, "user1", EventKind::View, "mf-plan");
            b.switch(at(d, 15, 0), "user1", "ctx-mannheim");
        }
    }
    b.act(meeting.plus(2 * HOUR), "user1", EventKind::Complete, "meeting");

    for d in 0..=back {
        b.switch(at(d, 8, 30), "user2", "ctx-mannheim");
        let t = at(d, 8, 40).plus(b.jitter(30));
        b.act(t, "user2", EventKind::View, "db");
        b.switch(at(d, 13, 0), "user2", "ctx-mf");
        let t = at(d, 13, 10).plus(b.jitter(30));
        b.act(t, "user2", EventKind::Modify, "mf-plan");
        if b.rng.random_bool(0.3) {
            b.act(t.plus(30 * MINUTE), "user2", EventKind::View, "db");
        }
    }

    b.switch(at(back, 9, 0), "user1", "ctx-rome");
    b.act(at(back, 9, 30), "user1", EventKind::View, "ticket");
    b.horizon = Some(at(back, 18, 0));
}
