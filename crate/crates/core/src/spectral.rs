//! Synchronous sampling and harmonic analysis of exact switching waveforms.
//!
//! Waveforms are sampled on a grid that holds an integer number of samples
//! per fundamental period, so every harmonic falls exactly on a DFT bin and no
//! window is needed. Amplitudes in a [`HarmonicTable`] are peak values.

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{invalid, Error, Result};
use crate::pattern::SwitchingPattern;

pub const DEFAULT_SAMPLES_PER_PERIOD: usize = 65536;
pub const DEFAULT_MAX_ORDER: usize = 50;
pub const DEFAULT_LOAD_R: f64 = 3.5;
pub const DEFAULT_LOAD_L: f64 = 10e-3;

/// Uniformly sampled periodic signal.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledWaveform {
    pub samples: Vec<f64>,
    pub sample_rate: f64,
    pub fundamental: f64,
    pub periods_captured: usize,
}

impl SampledWaveform {
    /// Wraps samples of a signal with an integer number of samples per period.
    pub fn new(samples: Vec<f64>, fundamental: f64, periods_captured: usize) -> Result<Self> {
        if periods_captured == 0 || samples.is_empty() || !samples.len().is_multiple_of(periods_captured) {
            return Err(invalid(
                "samples",
                "sample count must be a positive multiple of the captured periods",
            ));
        }
        if !(fundamental.is_finite() && fundamental > 0.0) {
            return Err(invalid("fundamental", format!("must be > 0, got {fundamental}")));
        }
        let per_period = samples.len() / periods_captured;
        Ok(Self {
            sample_rate: per_period as f64 * fundamental,
            samples,
            fundamental,
            periods_captured,
        })
    }

    pub fn samples_per_period(&self) -> usize {
        self.samples.len() / self.periods_captured
    }

    /// Time-domain RMS over the record.
    pub fn rms(&self) -> f64 {
        (self.samples.iter().map(|x| x * x).sum::<f64>() / self.samples.len() as f64).sqrt()
    }

    /// Sample instants in seconds.
    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        let dt = 1.0 / self.sample_rate;
        (0..self.samples.len()).map(move |k| k as f64 * dt)
    }
}

/// Samples `scale · pattern` at `samples_per_period` uniform instants per
/// period over `periods` periods.
///
/// Each sample is the exact average of the waveform over the sampling cell
/// centred on its instant. Point samples of a step waveform only converge as
/// `1/N` because every edge is rounded to the grid; the cell average keeps the
/// edge positions, so harmonic amplitudes converge as `1/N²` and the sample
/// at a jump takes the intermediate value.
pub fn sample_pattern(
    pattern: &SwitchingPattern,
    scale: f64,
    samples_per_period: usize,
    periods: usize,
) -> Result<SampledWaveform> {
    if samples_per_period < 4096 || !samples_per_period.is_power_of_two() {
        return Err(invalid(
            "samples_per_period",
            format!("must be a power of two >= 4096, got {samples_per_period}"),
        ));
    }
    if periods == 0 {
        return Err(invalid("periods", "must be >= 1"));
    }
    let period = pattern.period();
    let dt = period / samples_per_period as f64;
    let one: Vec<f64> = (0..samples_per_period)
        .map(|k| {
            let centre = k as f64 * dt;
            let (a, b) = (centre - 0.5 * dt, centre + 0.5 * dt);
            let pieces = if a < 0.0 {
                vec![segment_area(pattern, a + period, period), segment_area(pattern, 0.0, b)]
            } else {
                vec![segment_area(pattern, a, b)]
            };
            // A cell on a single level keeps that level exactly.
            let uniform = pieces.iter().map(|p| p.1).reduce(|x, y| if x == y { x } else { None });
            match uniform.flatten() {
                Some(level) => scale * f64::from(level),
                None => scale * pieces.iter().map(|p| p.0).sum::<f64>() / dt,
            }
        })
        .collect();
    let mut samples = Vec::with_capacity(samples_per_period * periods);
    for _ in 0..periods {
        samples.extend_from_slice(&one);
    }
    SampledWaveform::new(samples, 1.0 / period, periods)
}

/// `∫ₐᵇ x(t) dt` for `0 ≤ a ≤ b ≤ period`, with the level when it is constant
/// over the interval.
fn segment_area(pattern: &SwitchingPattern, a: f64, b: f64) -> (f64, Option<i32>) {
    let events = pattern.events();
    let first = events.partition_point(|e| e.instant <= a);
    let mut level = if first == 0 {
        pattern.initial_level()
    } else {
        events[first - 1].level
    };
    let inside = events[first..].iter().take_while(|e| e.instant < b);
    let mut at = a;
    let mut area = 0.0;
    let mut split = false;
    for e in inside {
        area += f64::from(level) * (e.instant - at);
        at = e.instant;
        level = e.level;
        split = true;
    }
    if !split {
        return (f64::from(level) * (b - a), Some(level));
    }
    (area + f64::from(level) * (b - at), None)
}

/// One harmonic line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HarmonicEntry {
    pub order: usize,
    pub frequency_hz: f64,
    /// Peak amplitude.
    pub amplitude: f64,
    pub percent_of_fundamental: f64,
    pub phase: f64,
}

/// Harmonic amplitudes of orders `1..=max_order` with summary values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HarmonicTable {
    pub fundamental_hz: f64,
    pub dc: f64,
    pub entries: Vec<HarmonicEntry>,
    pub fundamental_rms: f64,
    pub thd_percent: f64,
    pub max_order: usize,
    /// Set when the highest entry sits on the Nyquist bin, whose power is
    /// `a²` rather than `a²/2`.
    pub includes_nyquist: bool,
}

impl HarmonicTable {
    /// Builds a table from `(order, amplitude, phase)` triples, filling the
    /// derived columns.
    pub fn from_lines(
        fundamental_hz: f64,
        dc: f64,
        lines: impl IntoIterator<Item = (usize, f64, f64)>,
    ) -> Self {
        let lines: Vec<(usize, f64, f64)> = lines.into_iter().collect();
        let a1 = lines
            .iter()
            .find(|l| l.0 == 1)
            .map(|l| l.1)
            .unwrap_or(0.0);
        let entries: Vec<HarmonicEntry> = lines
            .iter()
            .map(|&(order, amplitude, phase)| HarmonicEntry {
                order,
                frequency_hz: order as f64 * fundamental_hz,
                amplitude,
                percent_of_fundamental: if a1 > 0.0 { 100.0 * amplitude / a1 } else { 0.0 },
                phase,
            })
            .collect();
        let max_order = entries.iter().map(|e| e.order).max().unwrap_or(0);
        let mut table = Self {
            fundamental_hz,
            dc,
            entries,
            fundamental_rms: a1 / 2f64.sqrt(),
            thd_percent: f64::NAN,
            max_order,
            includes_nyquist: false,
        };
        table.thd_percent = thd(&table).unwrap_or(f64::NAN);
        table
    }

    pub fn amplitude(&self, order: usize) -> Option<f64> {
        self.entry(order).map(|e| e.amplitude)
    }

    pub fn entry(&self, order: usize) -> Option<&HarmonicEntry> {
        self.entries.iter().find(|e| e.order == order)
    }

    pub fn percent(&self, order: usize) -> Option<f64> {
        self.entry(order).map(|e| e.percent_of_fundamental)
    }
}

fn forward_fft(samples: &[f64]) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let fft = FftPlanner::new().plan_fft_forward(buf.len());
    fft.process(&mut buf);
    buf
}

/// Harmonic table of orders `1..=max_order` from a synchronously sampled record.
///
/// `max_order` may reach half the samples per period, in which case the last
/// entry is the Nyquist bin.
pub fn spectrum(s: &SampledWaveform, max_order: usize) -> Result<HarmonicTable> {
    let spp = s.samples_per_period();
    if max_order == 0 || max_order > spp / 2 {
        return Err(invalid(
            "max_order",
            format!("must lie in [1, {}], got {max_order}", spp / 2),
        ));
    }
    let bins = forward_fft(&s.samples);
    let n = bins.len() as f64;
    let nyquist = bins.len() / 2;
    let lines = (1..=max_order).map(|order| {
        let bin = order * s.periods_captured;
        let c = bins[bin];
        let scale = if bin == nyquist { 1.0 } else { 2.0 };
        (order, scale * c.norm() / n, c.arg() + PI / 2.0)
    });
    let mut table = HarmonicTable::from_lines(s.fundamental, bins[0].re / n, lines);
    table.includes_nyquist = max_order * s.periods_captured == nyquist;
    Ok(table)
}

/// Total harmonic distortion `100·√(Σ_{n≥2} a_n²)/a_1` over the table's orders.
pub fn thd(table: &HarmonicTable) -> Result<f64> {
    let a1 = table.amplitude(1).unwrap_or(0.0);
    if a1 <= 0.0 {
        return Err(Error::UndefinedThd);
    }
    let harmonics: f64 = table
        .entries
        .iter()
        .filter(|e| e.order >= 2)
        .map(|e| e.amplitude * e.amplitude)
        .sum();
    Ok(100.0 * harmonics.sqrt() / a1)
}

/// RMS of the fundamental, `a₁/√2`.
pub fn fundamental_rms(table: &HarmonicTable) -> f64 {
    table.amplitude(1).unwrap_or(0.0) / 2f64.sqrt()
}

/// Current harmonics through a series R-L load driven by the voltage table.
pub fn current_spectrum(v: &HarmonicTable, r: f64, l: f64) -> Result<HarmonicTable> {
    if !(r >= 0.0 && l >= 0.0) || !(r.is_finite() && l.is_finite()) {
        return Err(invalid("load", "R and L must be finite and non-negative"));
    }
    if r == 0.0 && l == 0.0 {
        return Err(Error::InvalidLoad);
    }
    let omega = 2.0 * PI * v.fundamental_hz;
    let lines = v.entries.iter().map(|e| {
        let z = Complex64::new(r, e.order as f64 * omega * l);
        (e.order, e.amplitude / z.norm(), e.phase - z.arg())
    });
    let dc = if r > 0.0 { v.dc / r } else { 0.0 };
    let mut table = HarmonicTable::from_lines(v.fundamental_hz, dc, lines);
    table.includes_nyquist = v.includes_nyquist;
    Ok(table)
}

/// Relative difference between the time-domain RMS and the RMS rebuilt from
/// the table, `√(DC² + Σ a_n²/2)`.
///
/// With a table covering every bin of a one-period record this is a pure
/// Parseval check; with a truncated table it measures the energy beyond
/// `max_order`.
pub fn parseval_check(s: &SampledWaveform, table: &HarmonicTable) -> f64 {
    let time_ms = s.samples.iter().map(|x| x * x).sum::<f64>() / s.samples.len() as f64;
    let spectral_ms = table.dc * table.dc
        + table
            .entries
            .iter()
            .map(|e| {
                if table.includes_nyquist && e.order == table.max_order {
                    e.amplitude * e.amplitude
                } else {
                    e.amplitude * e.amplitude / 2.0
                }
            })
            .sum::<f64>();
    let time_rms = time_ms.sqrt();
    if time_rms == 0.0 {
        return spectral_ms.sqrt();
    }
    (time_rms - spectral_ms.sqrt()).abs() / time_rms
}

/// Parseval check over every DFT bin of the record.
pub fn parseval_check_full(s: &SampledWaveform) -> f64 {
    let bins = forward_fft(&s.samples);
    let n = bins.len() as f64;
    let spectral_ms = bins.iter().map(|c| c.norm_sqr()).sum::<f64>() / (n * n);
    let time_ms = s.samples.iter().map(|x| x * x).sum::<f64>() / n;
    if time_ms == 0.0 {
        return spectral_ms.sqrt();
    }
    (time_ms.sqrt() - spectral_ms.sqrt()).abs() / time_ms.sqrt()
}
