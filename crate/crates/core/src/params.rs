//! Tunable engine parameters and their defaults.

use crate::error::EngineError;
use crate::event::EventKind;
use crate::graph::ThingType;
use crate::time::{DAY, HOUR};

/// Decay shape for one thing type: `(1 + Δ/τ)^(-α)` with `Δ` and `τ` in days.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct DecayRow {
    pub tau_days: f64,
    pub alpha: f64,
}

impl DecayRow {
    pub const fn new(tau_days: f64, alpha: f64) -> Self {
        Self { tau_days, alpha }
    }
}

/// One decay row per thing type.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
#[allow(non_snake_case)]
pub struct TypeRows {
    pub Email: DecayRow,
    pub Person: DecayRow,
    pub Task: DecayRow,
    pub CalendarEvent: DecayRow,
    pub Document: DecayRow,
    pub Presentation: DecayRow,
    pub Project: DecayRow,
    pub Topic: DecayRow,
    pub WebPage: DecayRow,
    pub Context: DecayRow,
    pub User: DecayRow,
    pub Generic: DecayRow,
}

impl Default for TypeRows {
    fn default() -> Self {
        Self {
            Email: DecayRow::new(2.0, 1.2),
            Person: DecayRow::new(30.0, 0.6),
            Task: DecayRow::new(7.0, 1.0),
            CalendarEvent: DecayRow::new(7.0, 1.0),
            Document: DecayRow::new(14.0, 0.8),
            Presentation: DecayRow::new(14.0, 0.8),
            Project: DecayRow::new(60.0, 0.5),
            Topic: DecayRow::new(30.0, 0.7),
            WebPage: DecayRow::new(7.0, 1.0),
            Context: DecayRow::new(30.0, 0.7),
            User: DecayRow::new(30.0, 0.6),
            Generic: DecayRow::new(7.0, 1.0),
        }
    }
}

impl TypeRows {
    pub fn row(&self, kind: ThingType) -> DecayRow {
        match kind {
            ThingType::Email => self.Email,
            ThingType::Person => self.Person,
            ThingType::Task => self.Task,
            ThingType::CalendarEvent => self.CalendarEvent,
            ThingType::Document => self.Document,
            ThingType::Presentation => self.Presentation,
            ThingType::Project => self.Project,
            ThingType::Topic => self.Topic,
            ThingType::WebPage => self.WebPage,
            ThingType::Context => self.Context,
            ThingType::User => self.User,
            ThingType::Generic => self.Generic,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct EventWeights {
    pub view: f64,
    pub modify: f64,
    pub annotate: f64,
    pub create: f64,
    pub complete: f64,
}

impl Default for EventWeights {
    fn default() -> Self {
        Self {
            view: 0.7,
            modify: 0.9,
            annotate: 0.8,
            create: 1.0,
            complete: 0.5,
        }
    }
}

impl EventWeights {
    /// Stimulus weight of an interaction; context switches carry none.
    pub fn weight(&self, kind: EventKind) -> Option<f64> {
        match kind {
            EventKind::View => Some(self.view),
            EventKind::Modify => Some(self.modify),
            EventKind::Annotate => Some(self.annotate),
            EventKind::Create => Some(self.create),
            EventKind::Complete => Some(self.complete),
            EventKind::ContextSwitch => None,
        }
    }
}

/// Every knob of the engine. Durations other than decay times are in
/// seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct ParameterSet {
    pub rows: TypeRows,
    /// Share of the remaining headroom a full-weight stimulus closes.
    pub gain: f64,
    pub weights: EventWeights,
    pub system_weight: f64,
    pub refractory_secs: i64,
    pub idle_cap_secs: i64,
    pub spread_rho: f64,
    pub spread_depth: u32,
    pub spread_cutoff: f64,
    pub window_secs: i64,
    /// Growth of the decay time per stimulation inside the window.
    pub frequency_coeff: f64,
    /// Multiplier on the decay exponent of finished tasks and events.
    pub completion_boost: f64,
    /// Quiet period after which a finished thing starts sinking faster.
    pub completion_quiet_secs: i64,
    pub lead_window_secs: i64,
}

impl Default for ParameterSet {
    fn default() -> Self {
        Self {
            rows: TypeRows::default(),
            gain: 0.5,
            weights: EventWeights::default(),
            system_weight: 0.3,
            refractory_secs: HOUR,
            idle_cap_secs: 48 * HOUR,
            spread_rho: 0.5,
            spread_depth: 2,
            spread_cutoff: 0.01,
            window_secs: 14 * DAY,
            frequency_coeff: 0.5,
            completion_boost: 1.5,
            completion_quiet_secs: 7 * DAY,
            lead_window_secs: 3 * DAY,
        }
    }
}

impl ParameterSet {
    pub fn row(&self, kind: ThingType) -> DecayRow {
        self.rows.row(kind)
    }

    pub fn validate(&self) -> Result<(), EngineError> {
        let bad = |name, reason| Err(EngineError::InvalidParams { name, reason });
        if !(self.gain > 0.0 && self.gain <= 1.0) {
            return bad("gain", "must lie in (0, 1]");
        }
        let w = &self.weights;
        for (name, v) in [
            ("weights.view", w.view),
            ("weights.modify", w.modify),
            ("weights.annotate", w.annotate),
            ("weights.create", w.create),
            ("weights.complete", w.complete),
            ("system_weight", self.system_weight),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return bad(name, "must lie in [0, 1]");
            }
        }
        for kind in ThingType::ALL {
            let row = self.row(kind);
            if !(row.tau_days > 0.0 && row.tau_days.is_finite()) {
                return bad("rows.tau_days", "must be positive");
            }
            if !(row.alpha > 0.0 && row.alpha.is_finite()) {
                return bad("rows.alpha", "must be positive");
            }
        }
        if !(self.spread_rho > 0.0 && self.spread_rho < 1.0) {
            return bad("spread_rho", "must lie in (0, 1)");
        }
        if !(self.spread_cutoff > 0.0 && self.spread_cutoff < 1.0) {
            return bad("spread_cutoff", "must lie in (0, 1)");
        }
        if self.spread_depth < 1 {
            return bad("spread_depth", "must be at least 1");
        }
        if self.refractory_secs <= 0 {
            return bad("refractory_secs", "must be positive");
        }
        if self.idle_cap_secs < 0 {
            return bad("idle_cap_secs", "must not be negative");
        }
        if self.window_secs < 0 {
            return bad("window_secs", "must not be negative");
        }
        if !(self.frequency_coeff >= 0.0 && self.frequency_coeff.is_finite()) {
            return bad("frequency_coeff", "must not be negative");
        }
        if !(self.completion_boost >= 1.0 && self.completion_boost.is_finite()) {
            return bad("completion_boost", "must be at least 1");
        }
        if self.completion_quiet_secs < 0 {
            return bad("completion_quiet_secs", "must not be negative");
        }
        if self.lead_window_secs < 0 {
            return bad("lead_window_secs", "must not be negative");
        }
        Ok(())
    }
}
