//! The personal/group information model: uniquely identified things with
//! types, literals and labelled relations.
//!
//! Relations are stored with a source and a target but every neighbourhood
//! query treats them as undirected.

use alloc::borrow::ToOwned;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use core::fmt;

use crate::error::GraphError;
use crate::time::Timestamp;

/// Relation label linking a thing to a context it belongs to.
pub const MEMBER_OF_CONTEXT: &str = "memberOfContext";
/// Relation label linking a calendar event to one of its attendees.
pub const ATTENDEE: &str = "attendee";

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct ThingId(String);

impl ThingId {
    pub fn new(id: impl Into<String>) -> Self {
        Self(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ThingId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for ThingId {
    fn from(s: &str) -> Self {
        Self(s.to_owned())
    }
}

impl From<String> for ThingId {
    fn from(s: String) -> Self {
        Self(s)
    }
}

impl core::borrow::Borrow<str> for ThingId {
    fn borrow(&self) -> &str {
        &self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum ThingType {
    Email,
    Person,
    Task,
    CalendarEvent,
    Document,
    Presentation,
    Project,
    Topic,
    WebPage,
    Context,
    User,
    Generic,
}

impl ThingType {
    pub const ALL: [ThingType; 12] = [
        ThingType::Email,
        ThingType::Person,
        ThingType::Task,
        ThingType::CalendarEvent,
        ThingType::Document,
        ThingType::Presentation,
        ThingType::Project,
        ThingType::Topic,
        ThingType::WebPage,
        ThingType::Context,
        ThingType::User,
        ThingType::Generic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ThingType::Email => "Email",
            ThingType::Person => "Person",
            ThingType::Task => "Task",
            ThingType::CalendarEvent => "CalendarEvent",
            ThingType::Document => "Document",
            ThingType::Presentation => "Presentation",
            ThingType::Project => "Project",
            ThingType::Topic => "Topic",
            ThingType::WebPage => "WebPage",
            ThingType::Context => "Context",
            ThingType::User => "User",
            ThingType::Generic => "Generic",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|t| t.name() == name)
    }

    /// Only tasks and calendar events can be finished.
    pub fn completable(self) -> bool {
        matches!(self, ThingType::Task | ThingType::CalendarEvent)
    }
}

impl fmt::Display for ThingType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Thing {
    pub id: ThingId,
    pub kind: ThingType,
    pub literals: BTreeSet<String>,
    /// Completion time, for finished tasks and calendar events.
    pub completed_at: Option<Timestamp>,
    pub event_start: Option<Timestamp>,
}

impl Thing {
    pub fn new(id: impl Into<ThingId>, kind: ThingType, label: impl Into<String>) -> Self {
        let mut literals = BTreeSet::new();
        literals.insert(label.into());
        Self {
            id: id.into(),
            kind,
            literals,
            completed_at: None,
            event_start: None,
        }
    }

    pub fn calendar_event(id: impl Into<ThingId>, label: impl Into<String>, start: Timestamp) -> Self {
        let mut thing = Self::new(id, ThingType::CalendarEvent, label);
        thing.event_start = Some(start);
        thing
    }

    pub fn is_completed(&self) -> bool {
        self.completed_at.is_some()
    }

    /// First literal in lexical order, used as a display label.
    pub fn label(&self) -> &str {
        self.literals.iter().next().map(String::as_str).unwrap_or("")
    }

    fn check(&self) -> Result<(), GraphError> {
        let invalid = |reason| GraphError::InvalidThing {
            id: self.id.clone(),
            reason,
        };
        if self.id.as_str().is_empty() {
            return Err(invalid("empty id"));
        }
        if self.literals.is_empty() {
            return Err(invalid("a thing needs at least one literal"));
        }
        if self.event_start.is_some() != (self.kind == ThingType::CalendarEvent) {
            return Err(invalid("event_start is required for calendar events and only for them"));
        }
        if self.completed_at.is_some() && !self.kind.completable() {
            return Err(invalid("only tasks and calendar events can be completed"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Relation {
    pub source: ThingId,
    pub target: ThingId,
    pub label: String,
}

impl Relation {
    pub fn other_end(&self, id: &ThingId) -> &ThingId {
        if &self.source == id {
            &self.target
        } else {
            &self.source
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Graph {
    things: BTreeMap<ThingId, Thing>,
    relations: BTreeSet<Relation>,
    /// Relation set per thing, both directions.
    incident: BTreeMap<ThingId, BTreeSet<Relation>>,
    next_generated: u64,
}

// The id counter is bookkeeping, not content.
impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.things == other.things && self.relations == other.relations
    }
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a thing with a single label. Without an explicit id one is
    /// generated from the insertion counter (`thing-1`, `thing-2`, ...).
    pub fn add_thing(
        &mut self,
        label: impl Into<String>,
        kind: ThingType,
        id: Option<ThingId>,
    ) -> Result<ThingId, GraphError> {
        let id = match id {
            Some(id) => id,
            None => self.generate_id(),
        };
        self.insert(Thing::new(id, kind, label))
    }

    fn generate_id(&mut self) -> ThingId {
        loop {
            self.next_generated += 1;
            let id = ThingId(format!("thing-{}", self.next_generated));
            if !self.things.contains_key(&id) {
                return id;
            }
        }
    }

    /// Inserts a fully specified thing.
    pub fn insert(&mut self, thing: Thing) -> Result<ThingId, GraphError> {
        thing.check()?;
        if self.things.contains_key(&thing.id) {
            return Err(GraphError::DuplicateThing(thing.id));
        }
        let id = thing.id.clone();
        self.incident.insert(id.clone(), BTreeSet::new());
        self.things.insert(id.clone(), thing);
        Ok(id)
    }

    pub fn add_relation(&mut self, source: &ThingId, target: &ThingId, label: &str) -> Result<Relation, GraphError> {
        let invalid = |reason| GraphError::InvalidRelation {
            from: source.clone(),
            to: target.clone(),
            label: label.to_owned(),
            reason,
        };
        if source == target {
            return Err(invalid("self-loops are not allowed"));
        }
        if label.is_empty() {
            return Err(invalid("empty label"));
        }
        self.get(source)?;
        self.get(target)?;
        let relation = Relation {
            source: source.clone(),
            target: target.clone(),
            label: label.to_owned(),
        };
        if self.relations.insert(relation.clone()) {
            for end in [source, target] {
                self.incident
                    .get_mut(end)
                    .expect("incident list exists for every thing")
                    .insert(relation.clone());
            }
        }
        Ok(relation)
    }

    pub fn get(&self, id: &ThingId) -> Result<&Thing, GraphError> {
        self.things.get(id).ok_or_else(|| GraphError::UnknownThing(id.clone()))
    }

    pub fn contains(&self, id: &ThingId) -> bool {
        self.things.contains_key(id)
    }

    pub fn things(&self) -> impl Iterator<Item = &Thing> {
        self.things.values()
    }

    pub fn relations(&self) -> impl Iterator<Item = &Relation> {
        self.relations.iter()
    }

    pub fn len(&self) -> usize {
        self.things.len()
    }

    pub fn is_empty(&self) -> bool {
        self.things.is_empty()
    }

    pub fn relation_count(&self) -> usize {
        self.relations.len()
    }

    pub fn ids_of_type(&self, kind: ThingType) -> impl Iterator<Item = &ThingId> {
        self.things.values().filter(move |t| t.kind == kind).map(|t| &t.id)
    }

    pub fn degree(&self, id: &ThingId) -> Result<usize, GraphError> {
        self.incident
            .get(id)
            .map(BTreeSet::len)
            .ok_or_else(|| GraphError::UnknownThing(id.clone()))
    }

    /// Every thing one relation away, paired with the connecting label.
    pub fn neighbors(&self, id: &ThingId) -> Result<BTreeSet<(ThingId, String)>, GraphError> {
        let incident = self
            .incident
            .get(id)
            .ok_or_else(|| GraphError::UnknownThing(id.clone()))?;
        Ok(incident
            .iter()
            .map(|r| (r.other_end(id).clone(), r.label.clone()))
            .collect())
    }

    /// Distinct neighbour ids in id order.
    pub fn neighbor_ids(&self, id: &ThingId) -> Result<BTreeSet<&ThingId>, GraphError> {
        let incident = self
            .incident
            .get(id)
            .ok_or_else(|| GraphError::UnknownThing(id.clone()))?;
        Ok(incident.iter().map(|r| r.other_end(id)).collect())
    }

    /// Neighbours connected through a relation with the given label.
    pub fn neighbors_via(&self, id: &ThingId, label: &str) -> Result<BTreeSet<ThingId>, GraphError> {
        let incident = self
            .incident
            .get(id)
            .ok_or_else(|| GraphError::UnknownThing(id.clone()))?;
        Ok(incident
            .iter()
            .filter(|r| r.label == label)
            .map(|r| r.other_end(id).clone())
            .collect())
    }

    /// Case-insensitive substring match over every literal. An empty keyword
    /// matches nothing.
    pub fn match_literal(&self, keyword: &str) -> BTreeSet<ThingId> {
        if keyword.is_empty() {
            return BTreeSet::new();
        }
        let needle = keyword.to_lowercase();
        self.things
            .values()
            .filter(|t| t.literals.iter().any(|l| l.to_lowercase().contains(&needle)))
            .map(|t| t.id.clone())
            .collect()
    }

    pub fn context_members(&self, context: &ThingId) -> Result<BTreeSet<ThingId>, GraphError> {
        self.require_context(context)?;
        self.neighbors_via(context, MEMBER_OF_CONTEXT)
    }

    pub fn require_context(&self, id: &ThingId) -> Result<&Thing, GraphError> {
        let thing = self.get(id)?;
        if thing.kind != ThingType::Context {
            return Err(GraphError::NotAContext(id.clone()));
        }
        Ok(thing)
    }

    /// Marks a task or calendar event as finished. Already finished things
    /// keep their original completion time.
    pub fn mark_completed(&mut self, id: &ThingId, at: Timestamp) -> Result<(), GraphError> {
        let thing = self
            .things
            .get_mut(id)
            .ok_or_else(|| GraphError::UnknownThing(id.clone()))?;
        if !thing.kind.completable() {
            return Err(GraphError::InvalidThing {
                id: id.clone(),
                reason: "only tasks and calendar events can be completed",
            });
        }
        thing.completed_at.get_or_insert(at);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    fn id(s: &str) -> ThingId {
        ThingId::from(s)
    }

    #[test]
    fn fresh_thing_has_no_edges() {
        let mut g = Graph::new();
        let db = g.add_thing("Deutsche Bahn", ThingType::WebPage, None).unwrap();
        assert_eq!(g.degree(&db).unwrap(), 0);
        assert!(g.neighbors(&db).unwrap().is_empty());
    }

    #[test]
    fn generated_ids_follow_insertion_order() {
        let mut a = Graph::new();
        let mut b = Graph::new();
        for g in [&mut a, &mut b] {
            g.add_thing("one", ThingType::Generic, None).unwrap();
            g.add_thing("two", ThingType::Generic, Some(id("thing-2"))).unwrap();
            g.add_thing("three", ThingType::Generic, None).unwrap();
        }
        let ids: Vec<_> = a.things().map(|t| t.id.as_str().to_owned()).collect();
        assert_eq!(ids, ["thing-1", "thing-2", "thing-3"]);
        assert_eq!(a, b);
    }

    #[test]
    fn context_thing_is_usable() {
        let mut g = Graph::new();
        let rome = g
            .add_thing("Trip to Rome in July 2018", ThingType::Context, None)
            .unwrap();
        assert!(g.context_members(&rome).unwrap().is_empty());
    }

    #[test]
    fn duplicate_id_rejected() {
        let mut g = Graph::new();
        g.add_thing("a", ThingType::Generic, Some(id("x"))).unwrap();
        assert_eq!(
            g.add_thing("b", ThingType::Generic, Some(id("x"))),
            Err(GraphError::DuplicateThing(id("x")))
        );
    }

    #[test]
    fn relation_degree_and_idempotence() {
        let mut g = Graph::new();
        let task = g.add_thing("task", ThingType::Task, None).unwrap();
        let person = g.add_thing("person", ThingType::Person, None).unwrap();
        g.add_relation(&task, &person, "assignedTo").unwrap();
        assert_eq!(g.degree(&task).unwrap(), 1);
        assert_eq!(g.degree(&person).unwrap(), 1);
        let before = g.clone();
        g.add_relation(&task, &person, "assignedTo").unwrap();
        assert_eq!(g, before);
        assert!(matches!(
            g.add_relation(&task, &task, "related"),
            Err(GraphError::InvalidRelation { .. })
        ));
        assert_eq!(
            g.add_relation(&task, &id("nope"), "x"),
            Err(GraphError::UnknownThing(id("nope")))
        );
    }

    #[test]
    fn neighbors_are_direction_agnostic() {
        let mut g = Graph::new();
        let hub = g.add_thing("hub", ThingType::Generic, None).unwrap();
        for i in 0..3 {
            let spoke = g.add_thing(format!("spoke {i}"), ThingType::Generic, None).unwrap();
            g.add_relation(&spoke, &hub, "related").unwrap();
        }
        assert_eq!(g.neighbors(&hub).unwrap().len(), 3);

        let mut chain = Graph::new();
        let a = chain.add_thing("a", ThingType::Generic, Some(id("a"))).unwrap();
        let b = chain.add_thing("b", ThingType::Generic, Some(id("b"))).unwrap();
        let c = chain.add_thing("c", ThingType::Generic, Some(id("c"))).unwrap();
        chain.add_relation(&a, &b, "next").unwrap();
        chain.add_relation(&b, &c, "next").unwrap();
        let around_b: Vec<_> = chain.neighbor_ids(&b).unwrap().into_iter().cloned().collect();
        assert_eq!(around_b, [a, c]);
        assert!(chain.neighbors(&id("zzz")).is_err());
    }

    #[test]
    fn literal_matching() {
        let mut g = Graph::new();
        let yannick = g.add_thing("Yannick", ThingType::Person, None).unwrap();
        let db = g.add_thing("Deutsche Bahn", ThingType::WebPage, None).unwrap();
        assert_eq!(g.match_literal("yannick").into_iter().collect::<Vec<_>>(), [yannick]);
        assert_eq!(g.match_literal("bahn").into_iter().collect::<Vec<_>>(), [db]);
        assert!(g.match_literal("").is_empty());
    }

    #[test]
    fn context_membership() {
        let mut g = Graph::new();
        let rome = g.add_thing("Rome", ThingType::Context, None).unwrap();
        let mannheim = g.add_thing("Mannheim", ThingType::Context, None).unwrap();
        let peter = g.add_thing("Peter Stainer", ThingType::Person, None).unwrap();
        for i in 0..7 {
            let m = g.add_thing(format!("member {i}"), ThingType::Email, None).unwrap();
            g.add_relation(&m, &rome, MEMBER_OF_CONTEXT).unwrap();
        }
        g.add_relation(&peter, &rome, MEMBER_OF_CONTEXT).unwrap();
        g.add_relation(&peter, &mannheim, MEMBER_OF_CONTEXT).unwrap();
        assert_eq!(g.context_members(&rome).unwrap().len(), 8);
        assert!(g.context_members(&mannheim).unwrap().contains(&peter));
        assert_eq!(g.context_members(&peter), Err(GraphError::NotAContext(peter.clone())));
    }

    #[test]
    fn thing_invariants() {
        let mut g = Graph::new();
        assert!(g.add_thing("meeting", ThingType::CalendarEvent, None).is_err());
        g.insert(Thing::calendar_event("ev", "meeting", Timestamp(10))).unwrap();
        let mut bad = Thing::new("x", ThingType::Email, "mail");
        bad.event_start = Some(Timestamp(1));
        assert!(g.insert(bad).is_err());
        let mut empty = Thing::new("y", ThingType::Email, "mail");
        empty.literals.clear();
        assert!(g.insert(empty).is_err());
        assert!(g.mark_completed(&id("ev"), Timestamp(20)).is_ok());
        assert_eq!(g.get(&id("ev")).unwrap().completed_at, Some(Timestamp(20)));
    }

    proptest::proptest! {
        #[test]
        fn random_growth_keeps_integrity(ops in proptest::collection::vec((0usize..20, 0usize..20, 0u8..3), 0..120)) {
            let mut g = Graph::new();
            let mut seen_matches = BTreeSet::new();
            for (a, b, op) in ops {
                if op == 0 || g.len() < 2 {
                    g.add_thing(format!("Item {a} label"), ThingType::Generic, None).unwrap();
                } else {
                    let ids: Vec<ThingId> = g.things().map(|t| t.id.clone()).collect();
                    let s = &ids[a % ids.len()];
                    let t = &ids[b % ids.len()];
                    let labels = ["related", "partOf"];
                    let res = g.add_relation(s, t, labels[(op as usize) % 2]);
                    proptest::prop_assert_eq!(res.is_err(), s == t);
                }
                let matches = g.match_literal("item 1");
                proptest::prop_assert!(seen_matches.is_subset(&matches));
                seen_matches = matches;
            }
            for r in g.relations() {
                proptest::prop_assert!(g.contains(&r.source) && g.contains(&r.target));
            }
            for t in g.things() {
                let recount = g.relations().filter(|r| r.source == t.id || r.target == t.id).count();
                proptest::prop_assert_eq!(g.degree(&t.id).unwrap(), recount);
            }
            for m in g.match_literal("label") {
                proptest::prop_assert!(g.contains(&m));
            }
        }
    }
}
