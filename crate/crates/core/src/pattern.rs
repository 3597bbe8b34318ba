//! Exact piecewise-constant periodic waveforms.
//!
//! A [`SwitchingPattern`] stores the level transitions of one period of a
//! periodic step function. Levels are small integers (gate states, cell
//! levels, composite phase or line levels); voltage scaling is applied by the
//! caller. The value at an event instant is the post-event level.

use rustfft::num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{invalid, Result};

/// Pulses narrower than this are treated as comparator artefacts and removed.
pub const GLITCH_WIDTH_S: f64 = 1e-9;

/// A level transition at `instant` (seconds within the period).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event {
    pub instant: f64,
    pub level: i32,
}

/// One period of a periodic step function.
///
/// `initial_level` is the level immediately before `t = 0`. Because the
/// waveform is periodic it always equals the level after the last event.
#[derive(Debug, Clone, PartialEq)]
pub struct SwitchingPattern {
    period: f64,
    initial_level: i32,
    events: Vec<Event>,
}

impl SwitchingPattern {
    /// Builds a pattern from an ordered event list, validating every invariant.
    pub fn new(period: f64, initial_level: i32, events: Vec<Event>) -> Result<Self> {
        if !(period.is_finite() && period > 0.0) {
            return Err(invalid("period", format!("must be positive, got {period}")));
        }
        let mut level = initial_level;
        let mut last = f64::NEG_INFINITY;
        for e in &events {
            if !(e.instant >= 0.0 && e.instant < period) {
                return Err(invalid(
                    "events",
                    format!("instant {} outside [0, {period})", e.instant),
                ));
            }
            if e.instant <= last {
                return Err(invalid("events", "instants must be strictly increasing"));
            }
            if e.level == level {
                return Err(invalid(
                    "events",
                    format!("event at {} does not change the level", e.instant),
                ));
            }
            last = e.instant;
            level = e.level;
        }
        if level != initial_level {
            return Err(invalid(
                "initial_level",
                "must equal the level after the last event (periodicity)",
            ));
        }
        Ok(Self {
            period,
            initial_level,
            events,
        })
    }

    pub fn constant(period: f64, level: i32) -> Self {
        Self {
            period,
            initial_level: level,
            events: Vec::new(),
        }
    }

    /// Builds a pattern from unordered `(instant, level)` transitions.
    ///
    /// Instants are wrapped into `[0, period)`, coincident transitions keep the
    /// last level, no-op transitions are dropped and sub-nanosecond glitches are
    /// removed. `level_at_zero` is only used when no transition survives.
    pub(crate) fn from_transitions(
        period: f64,
        level_at_zero: i32,
        mut transitions: Vec<(f64, i32)>,
    ) -> Self {
        for tr in &mut transitions {
            tr.0 = tr.0.rem_euclid(period);
            if tr.0 >= period {
                tr.0 = 0.0;
            }
        }
        transitions.sort_by(|a, b| a.0.total_cmp(&b.0));

        let mut merged: Vec<Event> = Vec::with_capacity(transitions.len());
        for (instant, level) in transitions {
            match merged.last_mut() {
                Some(prev) if prev.instant == instant => prev.level = level,
                _ => merged.push(Event { instant, level }),
            }
        }
        let mut pattern = Self {
            period,
            initial_level: level_at_zero,
            events: merged,
        };
        pattern.canonicalize();
        pattern.remove_glitches(GLITCH_WIDTH_S);
        pattern
    }

    fn canonicalize(&mut self) {
        let Some(last) = self.events.last() else {
            return;
        };
        let mut current = last.level;
        self.events.retain(|e| {
            if e.level == current {
                false
            } else {
                current = e.level;
                true
            }
        });
        if let Some(last) = self.events.last() {
            self.initial_level = last.level;
        }
    }

    /// Removes pulses shorter than `width` that return to the previous level.
    pub(crate) fn remove_glitches(&mut self, width: f64) {
        loop {
            let n = self.events.len();
            if n < 2 {
                return;
            }
            let mut removed = false;
            for i in 0..n {
                let j = (i + 1) % n;
                let gap = if j > i {
                    self.events[j].instant - self.events[i].instant
                } else {
                    self.events[j].instant + self.period - self.events[i].instant
                };
                let before = if i == 0 {
                    self.events[n - 1].level
                } else {
                    self.events[i - 1].level
                };
                if gap < width && self.events[j].level == before {
                    let (a, b) = if i < j { (i, j) } else { (j, i) };
                    self.events.remove(b);
                    self.events.remove(a);
                    removed = true;
                    break;
                }
            }
            if !removed {
                self.canonicalize();
                return;
            }
        }
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn initial_level(&self) -> i32 {
        self.initial_level
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    /// Number of level transitions per period.
    pub fn transition_count(&self) -> usize {
        self.events.len()
    }

    /// Level at time `t` (wrapped into one period); post-event at event instants.
    pub fn level_at(&self, t: f64) -> i32 {
        let t = t.rem_euclid(self.period);
        let idx = self.events.partition_point(|e| e.instant <= t);
        if idx == 0 {
            self.initial_level
        } else {
            self.events[idx - 1].level
        }
    }

    /// Iterates over `(start, end, level)` segments covering `[0, period)`.
    pub fn segments(&self) -> impl Iterator<Item = (f64, f64, i32)> + '_ {
        let n = self.events.len();
        let head = (0.0, self.events.first().map_or(self.period, |e| e.instant), self.initial_level);
        std::iter::once(head)
            .chain((0..n).map(move |i| {
                let end = if i + 1 < n {
                    self.events[i + 1].instant
                } else {
                    self.period
                };
                (self.events[i].instant, end, self.events[i].level)
            }))
            .filter(|(a, b, _)| b > a)
    }

    pub fn min_level(&self) -> i32 {
        self.events
            .iter()
            .map(|e| e.level)
            .fold(self.initial_level, i32::min)
    }

    pub fn max_level(&self) -> i32 {
        self.events
            .iter()
            .map(|e| e.level)
            .fold(self.initial_level, i32::max)
    }

    /// Time average of the level over one period.
    pub fn mean_level(&self) -> f64 {
        self.segments()
            .map(|(a, b, l)| f64::from(l) * (b - a))
            .sum::<f64>()
            / self.period
    }

    /// Mean square of the level over one period.
    pub fn mean_square_level(&self) -> f64 {
        self.segments()
            .map(|(a, b, l)| f64::from(l * l) * (b - a))
            .sum::<f64>()
            / self.period
    }

    /// Exact complex Fourier coefficient `c_n = (1/T) ∫ x(t) e^{-i n ω t} dt`.
    ///
    /// The peak amplitude of harmonic `n ≥ 1` is `2·|c_n|`.
    pub fn fourier_coefficient(&self, n: u32) -> Complex64 {
        if n == 0 {
            return Complex64::new(self.mean_level(), 0.0);
        }
        let w = 2.0 * PI * f64::from(n) / self.period;
        // Summation by parts: only the jumps contribute.
        let mut acc = Complex64::new(0.0, 0.0);
        let mut prev = self.initial_level;
        for e in &self.events {
            let jump = f64::from(e.level - prev);
            acc += jump * Complex64::from_polar(1.0, -w * e.instant);
            prev = e.level;
        }
        acc / Complex64::new(0.0, w * self.period)
    }

    /// Combines two patterns of equal period level by level.
    pub fn combine(&self, other: &Self, f: impl Fn(i32, i32) -> i32) -> Result<Self> {
        if (self.period - other.period).abs() > 1e-12 * self.period {
            return Err(invalid(
                "period",
                format!("mismatched periods {} and {}", self.period, other.period),
            ));
        }
        let mut instants: Vec<f64> = self
            .events
            .iter()
            .chain(other.events.iter())
            .map(|e| e.instant)
            .collect();
        instants.sort_by(f64::total_cmp);
        instants.dedup();
        let transitions = instants
            .into_iter()
            .map(|t| (t, f(self.level_at(t), other.level_at(t))))
            .collect();
        let at_zero = f(self.level_at(0.0), other.level_at(0.0));
        Ok(Self::from_transitions(self.period, at_zero, transitions))
    }

    /// Sums a non-empty list of equal-period patterns.
    pub fn sum<'a>(patterns: impl IntoIterator<Item = &'a Self>) -> Result<Self> {
        let mut iter = patterns.into_iter();
        let first = iter
            .next()
            .ok_or_else(|| invalid("patterns", "cannot sum an empty list"))?
            .clone();
        iter.try_fold(first, |acc, p| acc.combine(p, |a, b| a + b))
    }

    /// The pattern delayed by `dt` seconds: `y(t) = x(t - dt)`.
    pub fn delayed(&self, dt: f64) -> Self {
        if self.events.is_empty() {
            return self.clone();
        }
        let transitions = self
            .events
            .iter()
            .map(|e| (e.instant + dt, e.level))
            .collect();
        Self::from_transitions(self.period, self.level_at(-dt), transitions)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square(period: f64) -> SwitchingPattern {
        SwitchingPattern::new(
            period,
            -1,
            vec![
                Event { instant: 0.0, level: 1 },
                Event { instant: period / 2.0, level: -1 },
            ],
        )
        .unwrap()
    }

    #[test]
    fn rejects_non_periodic_closure() {
        let err = SwitchingPattern::new(1.0, 0, vec![Event { instant: 0.5, level: 1 }]);
        assert!(err.is_err());
    }

    #[test]
    fn level_at_event_is_post_event() {
        let sq = square(0.02);
        assert_eq!(sq.level_at(0.0), 1);
        assert_eq!(sq.level_at(0.01), -1);
        assert_eq!(sq.level_at(0.0099999), 1);
        assert_eq!(sq.level_at(0.02), 1);
        assert_eq!(sq.mean_level(), 0.0);
    }

    #[test]
    fn square_fourier_series() {
        let sq = square(1.0);
        for n in 1..20u32 {
            let amp = 2.0 * sq.fourier_coefficient(n).norm();
            let expected = if n % 2 == 1 { 4.0 / (PI * f64::from(n)) } else { 0.0 };
            assert!((amp - expected).abs() < 1e-12, "n={n}: {amp} vs {expected}");
        }
    }

    #[test]
    fn glitches_are_removed() {
        let p = SwitchingPattern::from_transitions(
            1.0,
            0,
            vec![(0.25, 1), (0.25 + 1e-12, 0), (0.5, 1), (0.75, 0)],
        );
        assert_eq!(p.transition_count(), 2);
        assert_eq!(p.level_at(0.6), 1);
    }

    #[test]
    fn combine_and_delay() {
        let sq = square(1.0);
        let shifted = sq.delayed(0.25);
        assert_eq!(shifted.level_at(0.1), -1);
        assert_eq!(shifted.level_at(0.3), 1);
        let diff = sq.combine(&shifted, |a, b| a - b).unwrap();
        assert_eq!(diff.level_at(0.1), 2);
        assert_eq!(diff.level_at(0.3), 0);
        assert_eq!(diff.level_at(0.6), -2);
        assert_eq!(diff.max_level(), 2);
        assert_eq!(diff.min_level(), -2);
    }

    #[test]
    fn sum_cancels_to_constant() {
        let sq = square(1.0);
        let neg = sq.combine(&sq, |a, _| -a).unwrap();
        let total = SwitchingPattern::sum([&sq, &neg]).unwrap();
        assert_eq!(total.transition_count(), 0);
        assert_eq!(total.level_at(0.3), 0);
    }
}
