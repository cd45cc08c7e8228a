//! A single buoyancy score, split into a static part (the base value as of
//! the last write) and a dynamic part (decay since then, computed on read).
//!
//! All times in this module are activity seconds of the clock that owns the
//! record, never wall time.

use alloc::vec::Vec;

use crate::error::EngineError;
use crate::params::{DecayRow, ParameterSet};
use crate::time::{Timestamp, DAY};

/// Power-law decay `(1 + Δ/τ_eff)^(-α)` with `τ_eff = τ·(1 + κ·recent_count)`.
///
/// `elapsed_days` is activity time. Returns 1 at zero elapsed time and
/// declines steeply at first, then with a long tail.
pub fn decay_factor(
    row: DecayRow,
    elapsed_days: f64,
    recent_count: usize,
    frequency_coeff: f64,
) -> Result<f64, EngineError> {
    if elapsed_days.is_nan() || elapsed_days < 0.0 {
        return Err(EngineError::InvalidDuration(elapsed_days));
    }
    if elapsed_days == 0.0 {
        return Ok(1.0);
    }
    let tau_eff = row.tau_days * (1.0 + frequency_coeff * recent_count as f64);
    Ok(libm::pow(1.0 + elapsed_days / tau_eff, -row.alpha))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BuoyancyRecord {
    /// Value as of `last_update`, always within `[0, 1]`.
    pub base: f64,
    pub last_update: i64,
    /// Recent stimulation times, oldest first, none older than the window.
    pub stim_history: Vec<i64>,
    /// Wall time at which the owning context was left.
    pub frozen_at: Option<Timestamp>,
}

impl BuoyancyRecord {
    /// A never-stimulated record at activity time `now`.
    pub fn empty(now: i64) -> Self {
        Self {
            base: 0.0,
            last_update: now,
            stim_history: Vec::new(),
            frozen_at: None,
        }
    }

    pub fn is_frozen(&self) -> bool {
        self.frozen_at.is_some()
    }

    pub fn last_stimulation(&self) -> Option<i64> {
        self.stim_history.last().copied()
    }

    /// Whether a finished thing has been left alone long enough for the
    /// faster completion decay to apply.
    pub fn completion_boosted(&self, now: i64, completed: bool, params: &ParameterSet) -> bool {
        completed
            && self
                .last_stimulation()
                .is_none_or(|s| now - s >= params.completion_quiet_secs)
    }

    fn effective_row(&self, row: DecayRow, now: i64, completed: bool, params: &ParameterSet) -> DecayRow {
        if self.completion_boosted(now, completed, params) {
            DecayRow::new(row.tau_days, row.alpha * params.completion_boost)
        } else {
            row
        }
    }

    /// Current value without touching the stored state. Frozen records report
    /// their base unchanged.
    pub fn value_at(
        &self,
        now: i64,
        row: DecayRow,
        completed: bool,
        params: &ParameterSet,
    ) -> Result<f64, EngineError> {
        if self.is_frozen() {
            return Ok(self.base);
        }
        let elapsed = now - self.last_update;
        if elapsed < 0 {
            return Err(EngineError::ClockRegression {
                last: Timestamp(self.last_update),
                now: Timestamp(now),
            });
        }
        let row = self.effective_row(row, now, completed, params);
        let factor = decay_factor(
            row,
            elapsed as f64 / DAY as f64,
            self.stim_history.len(),
            params.frequency_coeff,
        )?;
        Ok(self.base * factor)
    }

    /// Folds the decay up to `now` into the static part.
    pub fn refresh(
        &self,
        now: i64,
        row: DecayRow,
        completed: bool,
        params: &ParameterSet,
    ) -> Result<Self, EngineError> {
        if self.is_frozen() {
            return Err(EngineError::FrozenRecord);
        }
        let base = self.value_at(now, row, completed, params)?;
        let horizon = now - params.window_secs;
        Ok(Self {
            base,
            last_update: now,
            stim_history: self.stim_history.iter().copied().filter(|&s| s >= horizon).collect(),
            frozen_at: None,
        })
    }

    /// Refreshes to `now`, then closes part of the gap to 1:
    /// `base + (1 - base)·g·w·r`, where `r` ramps linearly from 0 to 1 over
    /// the refractory period since the previous stimulation.
    pub fn stimulate(
        &self,
        weight: f64,
        now: i64,
        row: DecayRow,
        completed: bool,
        params: &ParameterSet,
    ) -> Result<Self, EngineError> {
        if self.is_frozen() {
            return Err(EngineError::FrozenRecord);
        }
        if !(0.0..=1.0).contains(&weight) {
            return Err(EngineError::InvalidWeight(weight));
        }
        let mut next = self.refresh(now, row, completed, params)?;
        let ramp = match self.last_stimulation() {
            None => 1.0,
            Some(prev) => ((now - prev) as f64 / params.refractory_secs as f64).min(1.0),
        };
        let step = params.gain * weight * ramp;
        if step > 0.0 {
            next.base = (next.base + (1.0 - next.base) * step).clamp(0.0, 1.0);
            next.stim_history.push(now);
        }
        Ok(next)
    }

    /// Folds decay up to `now` and stops the record's clock.
    pub fn freeze(
        &self,
        now: i64,
        wall: Timestamp,
        row: DecayRow,
        completed: bool,
        params: &ParameterSet,
    ) -> Result<Self, EngineError> {
        let mut next = self.refresh(now, row, completed, params)?;
        next.frozen_at = Some(wall);
        Ok(next)
    }

    /// Restarts a frozen record at activity time `now`, shifting its
    /// timestamps so the frozen interval never happened.
    pub fn unfreeze(&self, now: i64) -> Self {
        if !self.is_frozen() {
            return self.clone();
        }
        let shift = (now - self.last_update).max(0);
        Self {
            base: self.base,
            last_update: self.last_update + shift,
            stim_history: self.stim_history.iter().map(|s| s + shift).collect(),
            frozen_at: None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::ThingType;
    use crate::time::{HOUR, MINUTE};

    fn params() -> ParameterSet {
        ParameterSet::default()
    }

    fn generic() -> DecayRow {
        params().row(ThingType::Generic)
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn decay_identity_and_closed_form() {
        assert_eq!(decay_factor(generic(), 0.0, 0, 0.5).unwrap(), 1.0);
        // (1 + 7/7)^-1
        assert!(close(decay_factor(generic(), 7.0, 0, 0.5).unwrap(), 0.5, 1e-15));
        // τ_eff = 7·(1 + 0.5·14) = 56, (1 + 1/56)^-1 = 56/57
        let f = decay_factor(generic(), 1.0, 14, 0.5).unwrap();
        assert!(close(f, 56.0 / 57.0, 1e-15));
        assert!(close(f, 0.98246, 1e-5));
        assert!(matches!(
            decay_factor(generic(), -1.0, 0, 0.5),
            Err(EngineError::InvalidDuration(_))
        ));
    }

    #[test]
    fn refresh_examples() {
        let p = params();
        let rec = BuoyancyRecord {
            base: 0.8,
            last_update: 0,
            stim_history: Vec::new(),
            frozen_at: None,
        };
        let later = rec.refresh(7 * DAY, generic(), false, &p).unwrap();
        assert!(close(later.base, 0.4, 1e-15));
        assert_eq!(later.last_update, 7 * DAY);

        let zero = BuoyancyRecord::empty(0)
            .refresh(30 * DAY, generic(), false, &p)
            .unwrap();
        assert_eq!(zero.base, 0.0);

        assert_eq!(rec.refresh(0, generic(), false, &p).unwrap(), rec);
        assert!(matches!(
            later.refresh(DAY, generic(), false, &p),
            Err(EngineError::ClockRegression { .. })
        ));
    }

    #[test]
    fn stimulate_examples() {
        let p = params();
        let once = BuoyancyRecord::empty(0)
            .stimulate(0.7, 0, generic(), false, &p)
            .unwrap();
        assert!(close(once.base, 0.35, 1e-15));

        // One minute later the refractory ramp is at 1/60. The minute of
        // decay in between is folded in first.
        let again = once.stimulate(0.7, MINUTE, generic(), false, &p).unwrap();
        let decayed = 0.35 * decay_factor(generic(), 1.0 / 1440.0, 1, 0.5).unwrap();
        let expected = decayed + (1.0 - decayed) * 0.5 * 0.7 / 60.0;
        assert!(close(again.base, expected, 1e-15));
        assert!(close(again.base, 0.3538, 1e-4));

        let idle = once.stimulate(0.0, HOUR, generic(), false, &p).unwrap();
        assert_eq!(idle, once.refresh(HOUR, generic(), false, &p).unwrap());

        let same_instant = once.stimulate(0.7, 0, generic(), false, &p).unwrap();
        assert_eq!(same_instant, once);

        assert!(matches!(
            once.stimulate(1.2, HOUR, generic(), false, &p),
            Err(EngineError::InvalidWeight(_))
        ));
    }

    #[test]
    fn completion_boost_and_escape_clause() {
        let p = params();
        let rec = BuoyancyRecord {
            base: 1.0,
            last_update: 0,
            stim_history: alloc::vec![0],
            frozen_at: None,
        };
        // τ_eff = 7·1.5 = 10.5 because of the single recent stimulation.
        let normal = rec.value_at(7 * DAY, generic(), true, &p);
        let expected = libm::pow(1.0 + 7.0 / 10.5, -1.5);
        assert!(close(normal.unwrap(), expected, 1e-15));

        let no_history = BuoyancyRecord {
            stim_history: Vec::new(),
            ..rec.clone()
        };
        let boosted = no_history.value_at(7 * DAY, generic(), true, &p).unwrap();
        assert!(close(boosted, libm::pow(2.0, -1.5), 1e-15));
        assert!(close(boosted, 0.354, 1e-3));

        let viewed_yesterday = BuoyancyRecord {
            stim_history: alloc::vec![6 * DAY],
            ..rec
        };
        let plain = viewed_yesterday.value_at(7 * DAY, generic(), true, &p).unwrap();
        let unboosted = viewed_yesterday.value_at(7 * DAY, generic(), false, &p).unwrap();
        assert_eq!(plain, unboosted);
    }

    #[test]
    fn freeze_pauses_everything() {
        let p = params();
        let rec = BuoyancyRecord::empty(0)
            .stimulate(0.9, 0, generic(), false, &p)
            .unwrap();
        let frozen = rec.freeze(DAY, Timestamp(99), generic(), false, &p).unwrap();
        assert_eq!(frozen.value_at(400 * DAY, generic(), false, &p).unwrap(), frozen.base);
        assert!(matches!(
            frozen.stimulate(0.5, 2 * DAY, generic(), false, &p),
            Err(EngineError::FrozenRecord)
        ));
        let thawed = frozen.unfreeze(31 * DAY);
        assert_eq!(thawed.last_update, 31 * DAY);
        assert_eq!(thawed.stim_history, [30 * DAY]);
        assert_eq!(
            thawed.value_at(32 * DAY, generic(), false, &p).unwrap(),
            BuoyancyRecord {
                frozen_at: None,
                ..frozen.clone()
            }
            .value_at(2 * DAY, generic(), false, &p)
            .unwrap()
        );
    }

    proptest::proptest! {
        #[test]
        fn stimulation_stays_normalized(
            steps in proptest::collection::vec((0i64..5 * DAY, 0.0f64..=1.0), 1..60)
        ) {
            let p = params();
            let mut rec = BuoyancyRecord::empty(0);
            let mut now = 0;
            for (gap, w) in steps {
                now += gap;
                let before = rec.value_at(now, generic(), false, &p).unwrap();
                rec = rec.stimulate(w, now, generic(), false, &p).unwrap();
                proptest::prop_assert!((0.0..=1.0).contains(&rec.base));
                proptest::prop_assert!(rec.base >= before);
            }
        }

        #[test]
        fn refractory_ramp_is_monotone(base in 0.0f64..1.0, gap1 in 0i64..3 * HOUR, extra in 0i64..3 * HOUR) {
            // For a fixed pre-stimulation base the result grows with the gap.
            let p = ParameterSet { frequency_coeff: 0.0, ..params() };
            let rec = BuoyancyRecord { base, last_update: 0, stim_history: alloc::vec![0], frozen_at: None };
            let step = |gap: i64| {
                let r = (gap as f64 / p.refractory_secs as f64).min(1.0);
                base + (1.0 - base) * p.gain * 0.7 * r
            };
            proptest::prop_assert!(step(gap1) <= step(gap1 + extra));
            // With no decay in between the engine equals the closed form.
            let no_decay = BuoyancyRecord { last_update: gap1, ..rec };
            let got = no_decay.stimulate(0.7, gap1, generic(), false, &p).unwrap().base;
            proptest::prop_assert!((got - step(gap1)).abs() < 1e-12);
        }

        #[test]
        fn long_tail(d1 in 0.0f64..200.0, gap in 0.01f64..200.0, delta in 0.01f64..5.0) {
            let d2 = d1 + gap;
            let row = generic();
            let f = |x: f64| decay_factor(row, x, 0, 0.5).unwrap();
            proptest::prop_assert!(f(d1) - f(d1 + delta) > f(d2) - f(d2 + delta));
            proptest::prop_assert!(f(d1 + delta) < f(d1));
        }
    }
}
