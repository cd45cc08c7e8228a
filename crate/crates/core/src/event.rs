//! User events and scenarios.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::graph::{Graph, ThingId, ThingType};
use crate::time::Timestamp;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum EventKind {
    View,
    Modify,
    Annotate,
    Create,
    Complete,
    ContextSwitch,
}

impl EventKind {
    pub const ALL: [EventKind; 6] = [
        EventKind::View,
        EventKind::Modify,
        EventKind::Annotate,
        EventKind::Create,
        EventKind::Complete,
        EventKind::ContextSwitch,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EventKind::View => "View",
            EventKind::Modify => "Modify",
            EventKind::Annotate => "Annotate",
            EventKind::Create => "Create",
            EventKind::Complete => "Complete",
            EventKind::ContextSwitch => "ContextSwitch",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }

    pub fn is_interaction(self) -> bool {
        self != EventKind::ContextSwitch
    }
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Event {
    pub at: Timestamp,
    pub actor: ThingId,
    pub kind: EventKind,
    pub target: Option<ThingId>,
    /// Required for context switches. On interactions it names the context
    /// the actor works in and switches to it first if needed.
    pub context: Option<ThingId>,
}

impl Event {
    pub fn interaction(at: Timestamp, actor: impl Into<ThingId>, kind: EventKind, target: impl Into<ThingId>) -> Self {
        Self {
            at,
            actor: actor.into(),
            kind,
            target: Some(target.into()),
            context: None,
        }
    }

    pub fn switch(at: Timestamp, actor: impl Into<ThingId>, context: impl Into<ThingId>) -> Self {
        Self {
            at,
            actor: actor.into(),
            kind: EventKind::ContextSwitch,
            target: None,
            context: Some(context.into()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub graph: Graph,
    pub events: Vec<Event>,
    /// Instant of the final evaluation.
    pub horizon: Timestamp,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    NonPositiveTimestamp {
        index: usize,
    },
    Unsorted {
        index: usize,
    },
    MissingTarget {
        index: usize,
    },
    UnexpectedTarget {
        index: usize,
    },
    MissingContext {
        index: usize,
    },
    UnknownReference {
        index: usize,
        id: ThingId,
    },
    WrongType {
        index: usize,
        id: ThingId,
        expected: ThingType,
    },
    NotCompletable {
        index: usize,
        id: ThingId,
    },
    HorizonBeforeLastEvent {
        horizon: Timestamp,
        last: Timestamp,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonPositiveTimestamp { index } => write!(f, "event {index}: timestamp must be positive"),
            Violation::Unsorted { index } => write!(f, "event {index}: earlier than the event before it"),
            Violation::MissingTarget { index } => write!(f, "event {index}: interaction without a target"),
            Violation::UnexpectedTarget { index } => write!(f, "event {index}: context switch must not have a target"),
            Violation::MissingContext { index } => write!(f, "event {index}: context switch without a context"),
            Violation::UnknownReference { index, id } => write!(f, "event {index}: unknown thing `{id}`"),
            Violation::WrongType { index, id, expected } => {
                write!(f, "event {index}: `{id}` is not a {expected}")
            }
            Violation::NotCompletable { index, id } => {
                write!(f, "event {index}: `{id}` is neither a task nor a calendar event")
            }
            Violation::HorizonBeforeLastEvent { horizon, last } => {
                write!(f, "horizon {horizon} lies before the last event {last}")
            }
        }
    }
}

impl Scenario {
    /// Checks every scenario invariant and lists all violations found.
    pub fn validate(&self) -> Result<(), Vec<Violation>> {
        let mut out = Vec::new();
        let check_ref =
            |out: &mut Vec<Violation>, index, id: &ThingId, expected: Option<ThingType>| match self.graph.get(id) {
                Err(_) => out.push(Violation::UnknownReference { index, id: id.clone() }),
                Ok(thing) => {
                    if let Some(expected) = expected {
                        if thing.kind != expected {
                            out.push(Violation::WrongType {
                                index,
                                id: id.clone(),
                                expected,
                            });
                        }
                    }
                }
            };
        for (index, ev) in self.events.iter().enumerate() {
            if ev.at.0 <= 0 {
                out.push(Violation::NonPositiveTimestamp { index });
            }
            if index > 0 && ev.at < self.events[index - 1].at {
                out.push(Violation::Unsorted { index });
            }
            check_ref(&mut out, index, &ev.actor, Some(ThingType::User));
            match ev.kind {
                EventKind::ContextSwitch => {
                    if ev.target.is_some() {
                        out.push(Violation::UnexpectedTarget { index });
                    }
                    match &ev.context {
                        None => out.push(Violation::MissingContext { index }),
                        Some(c) => check_ref(&mut out, index, c, Some(ThingType::Context)),
                    }
                }
                kind => {
                    match &ev.target {
                        None => out.push(Violation::MissingTarget { index }),
                        Some(t) => {
                            check_ref(&mut out, index, t, None);
                            if kind == EventKind::Complete {
                                if let Ok(thing) = self.graph.get(t) {
                                    if !thing.kind.completable() {
                                        out.push(Violation::NotCompletable { index, id: t.clone() });
                                    }
                                }
                            }
                        }
                    }
                    if let Some(c) = &ev.context {
                        check_ref(&mut out, index, c, Some(ThingType::Context));
                    }
                }
            }
        }
        if let Some(last) = self.events.last() {
            if self.horizon < last.at {
                out.push(Violation::HorizonBeforeLastEvent {
                    horizon: self.horizon,
                    last: last.at,
                });
            }
        }
        if out.is_empty() {
            Ok(())
        } else {
            Err(out)
        }
    }

    /// Wall-clock span from the first event to the horizon.
    pub fn span(&self) -> Option<(Timestamp, Timestamp)> {
        self.events.first().map(|e| (e.at, self.horizon))
    }
}
