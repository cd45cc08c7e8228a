//! Event-by-event replay with before/after tables.

use buoyancy_core::query::mb_report;
use buoyancy_core::{Engine, Event, MbReport, ParameterSet, Scenario, ThingId, Timestamp};

use crate::error::Error;
use crate::snapshot::Snapshot;

/// Buoyancy of every watched thing at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct MbTable {
    pub at: Timestamp,
    pub reports: Vec<MbReport>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EventStep {
    /// Position of the event in the scenario.
    pub index: usize,
    pub event: Event,
    pub before: MbTable,
    pub after: MbTable,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub scenario: String,
    pub watched: Vec<ThingId>,
    pub steps: Vec<EventStep>,
    /// Cross-section at the scenario horizon.
    pub last: MbTable,
}

/// Replays one scenario, one event at a time.
#[derive(Debug, Clone)]
pub struct Runner {
    scenario: Scenario,
    engine: Engine,
    cursor: usize,
    watched: Vec<ThingId>,
}

impl Runner {
    pub fn new(scenario: Scenario, params: ParameterSet) -> Result<Self, Error> {
        let engine = Engine::new(scenario.graph.clone(), params)?;
        let watched = scenario.graph.things().map(|t| t.id.clone()).collect();
        Ok(Self {
            scenario,
            engine,
            cursor: 0,
            watched,
        })
    }

    /// Continues a replay from a snapshot taken of the same scenario.
    pub fn resume(scenario: Scenario, snapshot: Snapshot) -> Result<Self, Error> {
        if snapshot.scenario.as_deref() != Some(scenario.name.as_str()) {
            return Err(Error::Snapshot(format!(
                "scenario: snapshot belongs to {}, not `{}`",
                snapshot.scenario.map_or("no scenario".to_owned(), |s| format!("`{s}`")),
                scenario.name
            )));
        }
        if snapshot.cursor > scenario.events.len() {
            return Err(Error::Snapshot(format!(
                "cursor: {} exceeds the {} events of `{}`",
                snapshot.cursor,
                scenario.events.len(),
                scenario.name
            )));
        }
        let watched = scenario.graph.things().map(|t| t.id.clone()).collect();
        Ok(Self {
            scenario,
            engine: snapshot.engine,
            cursor: snapshot.cursor,
            watched,
        })
    }

    /// Restricts the tables to `ids`, in the given order.
    pub fn watch(&mut self, ids: Vec<ThingId>) -> Result<(), Error> {
        if let Some(missing) = ids.iter().find(|id| !self.scenario.graph.contains(id)) {
            return Err(Error::Usage(format!(
                "watched thing `{missing}` is not in the scenario graph"
            )));
        }
        self.watched = ids;
        Ok(())
    }

    pub fn engine(&self) -> &Engine {
        &self.engine
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    /// Number of events applied so far.
    pub fn cursor(&self) -> usize {
        self.cursor
    }

    pub fn is_done(&self) -> bool {
        self.cursor == self.scenario.events.len()
    }

    pub fn snapshot(&self) -> Snapshot {
        Snapshot {
            scenario: Some(self.scenario.name.clone()),
            cursor: self.cursor,
            engine: self.engine.clone(),
        }
    }

    pub fn table(&self, at: Timestamp) -> Result<MbTable, Error> {
        let reports = self
            .watched
            .iter()
            .map(|id| mb_report(&self.engine, id, at))
            .collect::<Result<_, _>>()?;
        Ok(MbTable { at, reports })
    }

    /// Applies the next event. Time rules due by then fire before the
    /// "before" table is taken.
    pub fn step(&mut self) -> Result<Option<EventStep>, Error> {
        let Some(event) = self.scenario.events.get(self.cursor).cloned() else {
            return Ok(None);
        };
        self.engine.fire_time_rules(event.at)?;
        let before = self.table(event.at)?;
        self.engine.apply_event(&event)?;
        let after = self.table(event.at)?;
        let index = self.cursor;
        self.cursor += 1;
        Ok(Some(EventStep {
            index,
            event,
            before,
            after,
        }))
    }

    /// Applies events until `cursor` of them have been applied.
    pub fn advance_to(&mut self, cursor: usize) -> Result<Vec<EventStep>, Error> {
        let mut steps = Vec::new();
        while self.cursor < cursor.min(self.scenario.events.len()) {
            steps.extend(self.step()?);
        }
        Ok(steps)
    }

    /// Applies the remaining events and evaluates at the horizon.
    pub fn finish(mut self) -> Result<(RunReport, Engine), Error> {
        let steps = self.advance_to(usize::MAX)?;
        let horizon = self.scenario.horizon;
        self.engine.fire_time_rules(horizon)?;
        let last = self.table(horizon)?;
        let report = RunReport {
            scenario: self.scenario.name.clone(),
            watched: self.watched,
            steps,
            last,
        };
        Ok((report, self.engine))
    }
}

/// Runs a scenario from start to horizon.
pub fn run(scenario: Scenario, params: ParameterSet, watch: Option<Vec<ThingId>>) -> Result<RunReport, Error> {
    let mut runner = Runner::new(scenario, params)?;
    if let Some(ids) = watch {
        runner.watch(ids)?;
    }
    Ok(runner.finish()?.0)
}
