//! The buoyancy engine: applies events to local, global and group records.
//!
//! Writes are serialized through `&mut self`; every read takes `&self` and
//! computes decay on the fly without storing it.
//!
//! Dispatch of an interaction by user `u` on thing `x`:
//!
//! - the global record `(x, u)` and the group record `x` are stimulated,
//! - if `u` has an active context `c`, so is the local record `(x, u, c)`,
//! - the same audience then receives a damped share through spreading.
//!
//! Local records of contexts other than the active one are frozen: their
//! value and their clock stand still until the context is entered again.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use crate::error::{EngineError, GraphError};
use crate::event::{Event, EventKind};
use crate::graph::{Graph, Thing, ThingId, ThingType, ATTENDEE};
use crate::params::ParameterSet;
use crate::record::BuoyancyRecord;
use crate::time::{ActivityClock, Timestamp, DAY};

/// Identifies one record in one of the three families.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RecordKey {
    Local {
        resource: ThingId,
        user: ThingId,
        context: ThingId,
    },
    Global {
        resource: ThingId,
        user: ThingId,
    },
    Group {
        resource: ThingId,
    },
}

impl RecordKey {
    pub fn resource(&self) -> &ThingId {
        match self {
            RecordKey::Local { resource, .. } | RecordKey::Global { resource, .. } | RecordKey::Group { resource } => {
                resource
            }
        }
    }

    /// The user whose activity clock drives this record, `None` for the
    /// shared group clock.
    pub fn clock_owner(&self) -> Option<&ThingId> {
        match self {
            RecordKey::Local { user, .. } | RecordKey::Global { user, .. } => Some(user),
            RecordKey::Group { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RecordOp {
    Stimulate { weight: f64 },
    Freeze,
    Unfreeze,
}

/// Optional write log, one entry per record mutation in application order.
#[derive(Debug, Clone, PartialEq)]
pub enum JournalEntry {
    Write {
        at: Timestamp,
        key: RecordKey,
        op: RecordOp,
    },
    Completed {
        at: Timestamp,
        thing: ThingId,
    },
}

/// Users that receive a stimulation, each with the context whose local
/// record is also touched.
#[derive(Debug, Clone)]
struct Audience {
    group: bool,
    users: Vec<(ThingId, Option<ThingId>)>,
}

/// The complete engine state in plain form, for persistence.
#[derive(Debug, Clone, PartialEq)]
pub struct EngineParts {
    pub graph: Graph,
    pub params: ParameterSet,
    /// Keyed `(resource, user, context)`.
    pub local: BTreeMap<(ThingId, ThingId, ThingId), BuoyancyRecord>,
    /// Keyed `(resource, user)`.
    pub global: BTreeMap<(ThingId, ThingId), BuoyancyRecord>,
    pub group: BTreeMap<ThingId, BuoyancyRecord>,
    pub active_context: BTreeMap<ThingId, ThingId>,
    pub user_clocks: BTreeMap<ThingId, ActivityClock>,
    pub group_clock: Option<ActivityClock>,
    pub origin: Option<Timestamp>,
    pub last_applied: Option<Timestamp>,
    pub rules_through: Option<Timestamp>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Engine {
    graph: Graph,
    params: ParameterSet,
    // Local records are stored user-major so a context can be scanned as a
    // contiguous range.
    local: BTreeMap<(ThingId, ThingId, ThingId), BuoyancyRecord>,
    global: BTreeMap<(ThingId, ThingId), BuoyancyRecord>,
    group: BTreeMap<ThingId, BuoyancyRecord>,
    active_context: BTreeMap<ThingId, ThingId>,
    user_clocks: BTreeMap<ThingId, ActivityClock>,
    group_clock: Option<ActivityClock>,
    origin: Option<Timestamp>,
    last_applied: Option<Timestamp>,
    rules_through: Option<Timestamp>,
    journal: Option<Vec<JournalEntry>>,
}

impl Engine {
    pub fn new(graph: Graph, params: ParameterSet) -> Result<Self, EngineError> {
        params.validate()?;
        Ok(Self {
            graph,
            params,
            local: BTreeMap::new(),
            global: BTreeMap::new(),
            group: BTreeMap::new(),
            active_context: BTreeMap::new(),
            user_clocks: BTreeMap::new(),
            group_clock: None,
            origin: None,
            last_applied: None,
            rules_through: None,
            journal: None,
        })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn params(&self) -> &ParameterSet {
        &self.params
    }

    pub fn origin(&self) -> Option<Timestamp> {
        self.origin
    }

    pub fn last_applied(&self) -> Option<Timestamp> {
        self.last_applied
    }

    pub fn active_context(&self, user: &ThingId) -> Option<&ThingId> {
        self.active_context.get(user)
    }

    /// Starts recording every record mutation.
    pub fn enable_journal(&mut self) {
        self.journal.get_or_insert_with(Vec::new);
    }

    pub fn take_journal(&mut self) -> Vec<JournalEntry> {
        self.journal.as_mut().map(core::mem::take).unwrap_or_default()
    }

    // ------------------------------------------------------------------
    // Persistence

    pub fn to_parts(&self) -> EngineParts {
        EngineParts {
            graph: self.graph.clone(),
            params: self.params,
            local: self
                .local
                .iter()
                .map(|((u, c, r), rec)| ((r.clone(), u.clone(), c.clone()), rec.clone()))
                .collect(),
            global: self
                .global
                .iter()
                .map(|((u, r), rec)| ((r.clone(), u.clone()), rec.clone()))
                .collect(),
            group: self.group.clone(),
            active_context: self.active_context.clone(),
            user_clocks: self.user_clocks.clone(),
            group_clock: self.group_clock.clone(),
            origin: self.origin,
            last_applied: self.last_applied,
            rules_through: self.rules_through,
        }
    }

    /// Rebuilds an engine, checking every state invariant.
    pub fn from_parts(parts: EngineParts) -> Result<Self, EngineError> {
        let EngineParts {
            graph,
            params,
            local,
            global,
            group,
            active_context,
            user_clocks,
            group_clock,
            origin,
            last_applied,
            rules_through,
        } = parts;
        params.validate()?;
        let need = |id: &ThingId, kind: Option<ThingType>| -> Result<(), EngineError> {
            let thing = graph.get(id)?;
            match kind {
                Some(k) if thing.kind != k => Err(EngineError::UnknownReference(id.clone())),
                _ => Ok(()),
            }
        };
        let check_record = |rec: &BuoyancyRecord| -> Result<(), EngineError> {
            if !(0.0..=1.0).contains(&rec.base) {
                return Err(EngineError::InvalidParams {
                    name: "record.base",
                    reason: "must lie in [0, 1]",
                });
            }
            if rec.stim_history.iter().any(|&s| s > rec.last_update) || rec.stim_history.windows(2).any(|w| w[0] > w[1])
            {
                return Err(EngineError::InvalidParams {
                    name: "record.stim_history",
                    reason: "must be sorted and not after last_update",
                });
            }
            Ok(())
        };
        for (user, ctx) in &active_context {
            need(user, Some(ThingType::User))?;
            need(ctx, Some(ThingType::Context))?;
        }
        let mut local_by_user = BTreeMap::new();
        for ((r, u, c), rec) in local {
            need(&r, None)?;
            need(&u, Some(ThingType::User))?;
            need(&c, Some(ThingType::Context))?;
            check_record(&rec)?;
            let active = active_context.get(&u) == Some(&c);
            if active == rec.is_frozen() {
                return Err(EngineError::InvalidParams {
                    name: "record.frozen_at",
                    reason: "local records are frozen exactly when their context is inactive",
                });
            }
            local_by_user.insert((u, c, r), rec);
        }
        let mut global_by_user = BTreeMap::new();
        for ((r, u), rec) in global {
            need(&r, None)?;
            need(&u, Some(ThingType::User))?;
            check_record(&rec)?;
            if rec.is_frozen() {
                return Err(EngineError::InvalidParams {
                    name: "record.frozen_at",
                    reason: "only local records can be frozen",
                });
            }
            global_by_user.insert((u, r), rec);
        }
        for (r, rec) in &group {
            need(r, None)?;
            check_record(rec)?;
            if rec.is_frozen() {
                return Err(EngineError::InvalidParams {
                    name: "record.frozen_at",
                    reason: "only local records can be frozen",
                });
            }
        }
        for user in user_clocks.keys() {
            need(user, Some(ThingType::User))?;
        }
        if let (Some(a), Some(b)) = (last_applied, rules_through) {
            if b < a {
                return Err(EngineError::ClockRegression { last: a, now: b });
            }
        }
        Ok(Self {
            graph,
            params,
            local: local_by_user,
            global: global_by_user,
            group,
            active_context,
            user_clocks,
            group_clock,
            origin,
            last_applied,
            rules_through,
            journal: None,
        })
    }

    // ------------------------------------------------------------------
    // Clocks

    fn fresh_clock_at(&self, wall: Timestamp) -> i64 {
        match self.origin {
            Some(o) => ActivityClock::starting_at(o).at(wall, self.params.idle_cap_secs),
            None => 0,
        }
    }

    /// Activity seconds of `user` at wall time `wall`.
    pub fn user_activity(&self, user: &ThingId, wall: Timestamp) -> i64 {
        match self.user_clocks.get(user) {
            Some(c) => c.at(wall, self.params.idle_cap_secs),
            None => self.fresh_clock_at(wall),
        }
    }

    /// Activity seconds of the merged group clock at `wall`.
    pub fn group_activity(&self, wall: Timestamp) -> i64 {
        match &self.group_clock {
            Some(c) => c.at(wall, self.params.idle_cap_secs),
            None => self.fresh_clock_at(wall),
        }
    }

    /// Activity time `user` accumulated between two wall instants.
    pub fn activity_elapsed(&self, user: &ThingId, t0: Timestamp, t1: Timestamp) -> Result<i64, EngineError> {
        if t0 > t1 {
            return Err(EngineError::InvalidInterval { start: t0, end: t1 });
        }
        Ok(self.user_activity(user, t1) - self.user_activity(user, t0))
    }

    fn activity_for(&self, key: &RecordKey, wall: Timestamp) -> i64 {
        match key.clock_owner() {
            Some(user) => self.user_activity(user, wall),
            None => self.group_activity(wall),
        }
    }

    pub fn user_clock(&self, user: &ThingId) -> Option<&ActivityClock> {
        self.user_clocks.get(user)
    }

    // ------------------------------------------------------------------
    // Record access

    pub fn record(&self, key: &RecordKey) -> Option<&BuoyancyRecord> {
        match key {
            RecordKey::Local {
                resource,
                user,
                context,
            } => self.local.get(&(user.clone(), context.clone(), resource.clone())),
            RecordKey::Global { resource, user } => self.global.get(&(user.clone(), resource.clone())),
            RecordKey::Group { resource } => self.group.get(resource),
        }
    }

    fn record_slot(&mut self, key: &RecordKey) -> Option<&mut BuoyancyRecord> {
        match key {
            RecordKey::Local {
                resource,
                user,
                context,
            } => self.local.get_mut(&(user.clone(), context.clone(), resource.clone())),
            RecordKey::Global { resource, user } => self.global.get_mut(&(user.clone(), resource.clone())),
            RecordKey::Group { resource } => self.group.get_mut(resource),
        }
    }

    fn store(&mut self, key: RecordKey, rec: BuoyancyRecord) {
        match key {
            RecordKey::Local {
                resource,
                user,
                context,
            } => {
                self.local.insert((user, context, resource), rec);
            }
            RecordKey::Global { resource, user } => {
                self.global.insert((user, resource), rec);
            }
            RecordKey::Group { resource } => {
                self.group.insert(resource, rec);
            }
        }
    }

    /// Every stored record with its key, in key order per family.
    pub fn records(&self) -> impl Iterator<Item = (RecordKey, &BuoyancyRecord)> {
        let local = self.local.iter().map(|((u, c, r), rec)| {
            (
                RecordKey::Local {
                    resource: r.clone(),
                    user: u.clone(),
                    context: c.clone(),
                },
                rec,
            )
        });
        let global = self.global.iter().map(|((u, r), rec)| {
            (
                RecordKey::Global {
                    resource: r.clone(),
                    user: u.clone(),
                },
                rec,
            )
        });
        let group = self
            .group
            .iter()
            .map(|(r, rec)| (RecordKey::Group { resource: r.clone() }, rec));
        local.chain(global).chain(group)
    }

    /// Contexts in which `user` has a local record for `resource`.
    pub fn local_contexts_of(&self, resource: &ThingId, user: &ThingId) -> BTreeSet<ThingId> {
        self.local
            .keys()
            .filter(|(u, _, r)| u == user && r == resource)
            .map(|(_, c, _)| c.clone())
            .collect()
    }

    /// Value of the record behind `key` at wall time `now`; 0 when absent.
    pub fn value(&self, key: &RecordKey, now: Timestamp) -> Result<f64, EngineError> {
        let Some(rec) = self.record(key) else {
            return Ok(0.0);
        };
        let thing = self.graph.get(key.resource())?;
        let act = self.activity_for(key, now);
        rec.value_at(act, self.params.row(thing.kind), thing.is_completed(), &self.params)
    }

    fn require(&self, id: &ThingId, kind: Option<ThingType>) -> Result<&Thing, EngineError> {
        let thing = self
            .graph
            .get(id)
            .map_err(|_| EngineError::UnknownReference(id.clone()))?;
        match kind {
            Some(k) if thing.kind != k => Err(EngineError::UnknownReference(id.clone())),
            _ => Ok(thing),
        }
    }

    pub fn local_mb(
        &self,
        resource: &ThingId,
        user: &ThingId,
        context: &ThingId,
        now: Timestamp,
    ) -> Result<f64, EngineError> {
        self.require(resource, None)?;
        self.require(user, Some(ThingType::User))?;
        self.require(context, Some(ThingType::Context))?;
        self.value(
            &RecordKey::Local {
                resource: resource.clone(),
                user: user.clone(),
                context: context.clone(),
            },
            now,
        )
    }

    pub fn global_mb(&self, resource: &ThingId, user: &ThingId, now: Timestamp) -> Result<f64, EngineError> {
        self.require(resource, None)?;
        self.require(user, Some(ThingType::User))?;
        self.value(
            &RecordKey::Global {
                resource: resource.clone(),
                user: user.clone(),
            },
            now,
        )
    }

    pub fn group_mb(&self, resource: &ThingId, now: Timestamp) -> Result<f64, EngineError> {
        self.graph.get(resource)?;
        self.value(
            &RecordKey::Group {
                resource: resource.clone(),
            },
            now,
        )
    }

    // ------------------------------------------------------------------
    // Writes

    fn log(&mut self, entry: JournalEntry) {
        if let Some(j) = self.journal.as_mut() {
            j.push(entry);
        }
    }

    fn write(&mut self, key: RecordKey, at: Timestamp, op: RecordOp) -> Result<(), EngineError> {
        let thing = self.graph.get(key.resource())?;
        let row = self.params.row(thing.kind);
        let completed = thing.is_completed();
        let act = self.activity_for(&key, at);
        let params = self.params;
        let next = match (op, self.record(&key)) {
            (RecordOp::Stimulate { weight }, Some(rec)) => Some(rec.stimulate(weight, act, row, completed, &params)?),
            (RecordOp::Stimulate { weight }, None) => {
                let rec = BuoyancyRecord::empty(act).stimulate(weight, act, row, completed, &params)?;
                // Zero-strength stimuli do not create records.
                (!rec.stim_history.is_empty()).then_some(rec)
            }
            (RecordOp::Freeze, Some(rec)) if !rec.is_frozen() => Some(rec.freeze(act, at, row, completed, &params)?),
            (RecordOp::Unfreeze, Some(rec)) => Some(rec.unfreeze(act)),
            _ => None,
        };
        if let Some(next) = next {
            match self.record_slot(&key) {
                Some(slot) => *slot = next,
                None => self.store(key.clone(), next),
            }
        }
        self.log(JournalEntry::Write { at, key, op });
        Ok(())
    }

    fn stimulate_audience(
        &mut self,
        thing: &ThingId,
        weight: f64,
        at: Timestamp,
        audience: &Audience,
    ) -> Result<(), EngineError> {
        let op = RecordOp::Stimulate { weight };
        for (user, context) in &audience.users {
            self.write(
                RecordKey::Global {
                    resource: thing.clone(),
                    user: user.clone(),
                },
                at,
                op,
            )?;
            if let Some(context) = context {
                self.write(
                    RecordKey::Local {
                        resource: thing.clone(),
                        user: user.clone(),
                        context: context.clone(),
                    },
                    at,
                    op,
                )?;
            }
        }
        if audience.group {
            self.write(
                RecordKey::Group {
                    resource: thing.clone(),
                },
                at,
                op,
            )?;
        }
        Ok(())
    }

    /// Breadth-first spreading activation from `source`. The source itself is
    /// not stimulated. A child of `parent` receives
    /// `w · ρ / (1 + log2(degree(parent)))`; propagation stops below the
    /// cutoff or past the maximum depth, and every thing is reached at most
    /// once, at its shallowest depth.
    fn spread_to(
        &mut self,
        source: &ThingId,
        base_weight: f64,
        at: Timestamp,
        audience: &Audience,
    ) -> Result<(), EngineError> {
        let mut visited = BTreeSet::new();
        visited.insert(source.clone());
        let mut frontier = alloc::vec![(source.clone(), base_weight)];
        for _ in 0..self.params.spread_depth {
            let mut next = Vec::new();
            for (parent, weight) in &frontier {
                let child_weight = self.child_weight(parent, *weight)?;
                if child_weight < self.params.spread_cutoff {
                    continue;
                }
                let children: Vec<ThingId> = self.graph.neighbor_ids(parent)?.into_iter().cloned().collect();
                for child in children {
                    if visited.insert(child.clone()) {
                        self.stimulate_audience(&child, child_weight, at, audience)?;
                        next.push((child, child_weight));
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            frontier = next;
        }
        Ok(())
    }

    /// Weight a neighbour of `parent` receives when `parent` was reached
    /// with `weight`.
    pub fn child_weight(&self, parent: &ThingId, weight: f64) -> Result<f64, GraphError> {
        let degree = self.graph.degree(parent)?;
        if degree == 0 {
            return Ok(0.0);
        }
        Ok(weight * self.params.spread_rho / (1.0 + libm::log2(degree as f64)))
    }

    /// Spreads a stimulus of `base_weight` from `source` to the global and
    /// group records (and the local records in `context`, if given) of every
    /// thing within reach.
    pub fn spread(
        &mut self,
        source: &ThingId,
        base_weight: f64,
        user: &ThingId,
        context: Option<&ThingId>,
        now: Timestamp,
    ) -> Result<(), EngineError> {
        if !(base_weight > 0.0 && base_weight <= 1.0) {
            return Err(EngineError::InvalidWeight(base_weight));
        }
        self.require(source, None)?;
        self.require(user, Some(ThingType::User))?;
        if let Some(c) = context {
            self.require(c, Some(ThingType::Context))?;
        }
        self.check_time(now)?;
        self.origin.get_or_insert(now);
        let audience = Audience {
            group: true,
            users: alloc::vec![(user.clone(), context.cloned())],
        };
        self.spread_to(source, base_weight, now, &audience)
    }

    fn check_time(&self, now: Timestamp) -> Result<(), EngineError> {
        match self.last_applied {
            Some(last) if now < last => Err(EngineError::ClockRegression { last, now }),
            _ => Ok(()),
        }
    }

    fn check_event(&self, event: &Event) -> Result<(), EngineError> {
        self.require(&event.actor, Some(ThingType::User))?;
        match event.kind {
            EventKind::ContextSwitch => {
                if event.target.is_some() {
                    return Err(EngineError::MalformedEvent {
                        kind: "ContextSwitch",
                        field: "absence of a target",
                    });
                }
                let ctx = event.context.as_ref().ok_or(EngineError::MalformedEvent {
                    kind: "ContextSwitch",
                    field: "context",
                })?;
                self.require(ctx, Some(ThingType::Context))?;
            }
            kind => {
                let target = event.target.as_ref().ok_or(EngineError::MalformedEvent {
                    kind: kind.name(),
                    field: "target",
                })?;
                let thing = self.require(target, None)?;
                if kind == EventKind::Complete && !thing.kind.completable() {
                    return Err(EngineError::UnknownReference(target.clone()));
                }
                if let Some(ctx) = &event.context {
                    self.require(ctx, Some(ThingType::Context))?;
                }
            }
        }
        Ok(())
    }

    /// Applies one event. Events must arrive in non-decreasing time order.
    pub fn apply_event(&mut self, event: &Event) -> Result<(), EngineError> {
        let at = event.at;
        self.check_time(at)?;
        self.check_event(event)?;
        let origin = *self.origin.get_or_insert(at);
        self.fire_rules_until(at)?;

        let cap = self.params.idle_cap_secs;
        self.user_clocks
            .entry(event.actor.clone())
            .or_insert_with(|| ActivityClock::starting_at(origin))
            .advance(at, cap)?;
        self.group_clock
            .get_or_insert_with(|| ActivityClock::starting_at(origin))
            .advance(at, cap)?;

        match event.kind {
            EventKind::ContextSwitch => {
                let ctx = event.context.clone().expect("checked above");
                self.do_switch(&event.actor, &ctx, at)?;
            }
            kind => {
                let target = event.target.clone().expect("checked above");
                if let Some(ctx) = &event.context {
                    if self.active_context.get(&event.actor) != Some(ctx) {
                        self.do_switch(&event.actor, ctx, at)?;
                    }
                }
                let weight = self
                    .params
                    .weights
                    .weight(kind)
                    .expect("interaction kinds carry a weight");
                let audience = Audience {
                    group: true,
                    users: alloc::vec![(event.actor.clone(), self.active_context.get(&event.actor).cloned())],
                };
                self.stimulate_audience(&target, weight, at, &audience)?;
                if weight > 0.0 {
                    self.spread_to(&target, weight, at, &audience)?;
                }
                if kind == EventKind::Complete && !self.graph.get(&target)?.is_completed() {
                    self.graph.mark_completed(&target, at)?;
                    self.log(JournalEntry::Completed { at, thing: target });
                }
            }
        }
        self.last_applied = Some(at);
        Ok(())
    }

    /// Makes `context` the active context of `user`, as a context switch
    /// event at `now` would.
    pub fn switch_context(&mut self, user: &ThingId, context: &ThingId, now: Timestamp) -> Result<(), EngineError> {
        self.graph.require_context(context)?;
        self.apply_event(&Event::switch(now, user.clone(), context.clone()))
    }

    fn do_switch(&mut self, user: &ThingId, context: &ThingId, at: Timestamp) -> Result<(), EngineError> {
        let previous = self.active_context.get(user).cloned();
        if previous.as_ref() != Some(context) {
            if let Some(prev) = previous {
                for resource in self.local_resources(user, &prev) {
                    self.write(
                        RecordKey::Local {
                            resource,
                            user: user.clone(),
                            context: prev.clone(),
                        },
                        at,
                        RecordOp::Freeze,
                    )?;
                }
            }
            for resource in self.local_resources(user, context) {
                self.write(
                    RecordKey::Local {
                        resource,
                        user: user.clone(),
                        context: context.clone(),
                    },
                    at,
                    RecordOp::Unfreeze,
                )?;
            }
            self.active_context.insert(user.clone(), context.clone());
        }
        self.write(
            RecordKey::Global {
                resource: context.clone(),
                user: user.clone(),
            },
            at,
            RecordOp::Stimulate {
                weight: self.params.system_weight,
            },
        )
    }

    fn local_resources(&self, user: &ThingId, context: &ThingId) -> Vec<ThingId> {
        let start = (user.clone(), context.clone(), ThingId::new(""));
        self.local
            .range(start..)
            .take_while(|((u, c, _), _)| u == user && c == context)
            .map(|((_, _, r), _)| r.clone())
            .collect()
    }

    /// Fires every due time rule up to `upto`.
    ///
    /// Each calendar event gets one tick per day inside the lead window
    /// before its start. A tick stimulates the event's group record and the
    /// global record of every attending user with the system weight, then
    /// spreads from the event. Ticks are processed in time order, ties by
    /// event id, and none is skipped across calls.
    pub fn fire_time_rules(&mut self, upto: Timestamp) -> Result<(), EngineError> {
        self.check_time(upto)?;
        self.fire_rules_until(upto)
    }

    /// Wall times of the lead-window ticks of a calendar event.
    pub fn ticks_for(&self, event_start: Timestamp) -> impl Iterator<Item = Timestamp> {
        let days = self.params.lead_window_secs / DAY;
        (1..=days).rev().map(move |k| event_start.plus(-k * DAY))
    }

    fn fire_rules_until(&mut self, upto: Timestamp) -> Result<(), EngineError> {
        let Some(origin) = self.origin else {
            return Ok(());
        };
        let after = self.rules_through.unwrap_or(origin.plus(-1));
        if upto <= after {
            return Ok(());
        }
        let mut due: Vec<(Timestamp, ThingId)> = Vec::new();
        for thing in self.graph.things() {
            let Some(start) = thing.event_start else { continue };
            for tick in self.ticks_for(start) {
                if tick > after && tick <= upto && tick >= origin {
                    due.push((tick, thing.id.clone()));
                }
            }
        }
        due.sort();
        for (tick, event) in due {
            let attendees: Vec<(ThingId, Option<ThingId>)> = self
                .graph
                .neighbors_via(&event, ATTENDEE)?
                .into_iter()
                .filter(|a| self.graph.get(a).map(|t| t.kind == ThingType::User).unwrap_or(false))
                .map(|a| (a, None))
                .collect();
            let audience = Audience {
                group: true,
                users: attendees,
            };
            let weight = self.params.system_weight;
            self.stimulate_audience(&event, weight, tick, &audience)?;
            if weight > 0.0 {
                self.spread_to(&event, weight, tick, &audience)?;
            }
        }
        self.rules_through = Some(upto);
        Ok(())
    }
}
