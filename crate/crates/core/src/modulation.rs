//! Modulating waves, triangular carriers and exact comparator events.
//!
//! Two carrier families are supported:
//!
//! - a constant-frequency triangle (classical sinusoidal PWM);
//! - a truncated frequency-modulated triangle whose instantaneous pulsation
//!   follows `A_M·ω_m·max(cos²(ω_m t) − K, 0)`. The pulsation is zero in the
//!   truncation windows around the modulator peaks, and `A_M` is chosen so
//!   that exactly `M̄` carrier cycles occur per fundamental period.
//!
//! Both carriers are locked to the modulator angle `x = ω_m t + φ`, so a
//! phase-offset modulator carries its carrier with it. The carrier phase is
//! integrated in closed form; comparator crossings are bracketed on a scan
//! grid and refined by bisection.

use std::f64::consts::PI;

use crate::error::{invalid, Error, Result};
use crate::pattern::SwitchingPattern;

/// Fundamental and third-harmonic coefficients of the classical
/// maximum-linear-range third-harmonic injection.
pub const DEFAULT_INJECTION: [Harmonic; 2] = [
    Harmonic {
        order: 1,
        coefficient: 1.1547,
    },
    Harmonic {
        order: 3,
        coefficient: 0.1925,
    },
];

/// Upper bound accepted for the modulation index.
pub const MAX_AMPLITUDE: f64 = 1.2;

/// Guaranteed resolution of crossing instants (bisection runs to machine
/// precision); also the probe offset used around the period boundary.
pub const CROSSING_TOLERANCE_S: f64 = 1e-12;

/// Minimum number of scan points per shortest triangle half-cycle.
pub const SCAN_POINTS_PER_HALF_CYCLE: f64 = 64.0;

/// One injected harmonic of the modulating wave: `coefficient·sin(order·x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Harmonic {
    pub order: u32,
    pub coefficient: f64,
}

/// Reference wave `m(t) = amplitude · Σ c_h sin(h (ω_m t + φ))`.
///
/// `amplitude` scales the whole coefficient list, so a harmonic-injected wave
/// with the default coefficients has a fundamental of `1.1547·amplitude`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModulatingSpec {
    f_fund: f64,
    amplitude: f64,
    harmonics: Vec<Harmonic>,
    phase_offset: f64,
}

impl ModulatingSpec {
    pub fn new(
        f_fund: f64,
        amplitude: f64,
        harmonics: Vec<Harmonic>,
        phase_offset: f64,
    ) -> Result<Self> {
        if !(f_fund.is_finite() && f_fund > 0.0) {
            return Err(invalid("f_fund", format!("must be > 0, got {f_fund}")));
        }
        if !(0.0..=MAX_AMPLITUDE).contains(&amplitude) {
            return Err(invalid(
                "amplitude",
                format!("must lie in [0, {MAX_AMPLITUDE}], got {amplitude}"),
            ));
        }
        if harmonics.is_empty() {
            return Err(invalid("harmonics", "at least one harmonic is required"));
        }
        for h in &harmonics {
            if h.order % 2 == 0 {
                return Err(invalid(
                    "harmonics",
                    format!("order {} is not odd; half-wave symmetry requires odd orders", h.order),
                ));
            }
            if !h.coefficient.is_finite() {
                return Err(invalid("harmonics", "coefficients must be finite"));
            }
        }
        if !phase_offset.is_finite() {
            return Err(invalid("phase_offset", "must be finite"));
        }
        Ok(Self {
            f_fund,
            amplitude,
            harmonics,
            phase_offset,
        })
    }

    pub fn pure_sine(f_fund: f64, amplitude: f64) -> Result<Self> {
        Self::new(
            f_fund,
            amplitude,
            vec![Harmonic {
                order: 1,
                coefficient: 1.0,
            }],
            0.0,
        )
    }

    /// Third-harmonic-injected wave with [`DEFAULT_INJECTION`].
    pub fn harmonic_injected(f_fund: f64, amplitude: f64) -> Result<Self> {
        Self::new(f_fund, amplitude, DEFAULT_INJECTION.to_vec(), 0.0)
    }

    pub fn with_phase_offset(&self, phase_offset: f64) -> Self {
        Self {
            phase_offset,
            ..self.clone()
        }
    }

    pub fn with_amplitude(&self, amplitude: f64) -> Result<Self> {
        Self::new(self.f_fund, amplitude, self.harmonics.clone(), self.phase_offset)
    }

    pub fn f_fund(&self) -> f64 {
        self.f_fund
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn harmonics(&self) -> &[Harmonic] {
        &self.harmonics
    }

    pub fn phase_offset(&self) -> f64 {
        self.phase_offset
    }

    /// Angular frequency ω_m in rad/s.
    pub fn omega(&self) -> f64 {
        2.0 * PI * self.f_fund
    }

    /// Fundamental period T_m in seconds.
    pub fn period(&self) -> f64 {
        1.0 / self.f_fund
    }

    /// Modulator angle `ω_m t + φ`.
    pub fn angle(&self, t: f64) -> f64 {
        self.omega() * t + self.phase_offset
    }

    /// Fundamental coefficient after amplitude scaling.
    pub fn fundamental_coefficient(&self) -> f64 {
        self.amplitude
            * self
                .harmonics
                .iter()
                .filter(|h| h.order == 1)
                .map(|h| h.coefficient)
                .sum::<f64>()
    }

    pub fn evaluate_at_angle(&self, x: f64) -> f64 {
        self.amplitude
            * self
                .harmonics
                .iter()
                .map(|h| h.coefficient * (f64::from(h.order) * x).sin())
                .sum::<f64>()
    }

    pub fn evaluate(&self, t: f64) -> f64 {
        self.evaluate_at_angle(self.angle(t))
    }
}

/// Carrier family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CarrierKind {
    /// Truncated frequency-modulated triangle with truncation level `K` and
    /// amplitude parameter `A_M`.
    Truncated {
        truncation: f64,
        amplitude_parameter: f64,
    },
    /// Constant-frequency triangle.
    Fixed { frequency_hz: f64 },
}

/// Triangular carrier description.
///
/// `phase_offset_cycles` is added to the accumulated carrier phase, so
/// shifting a frequency-modulated carrier keeps it synchronised with the
/// modulator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CarrierSpec {
    kind: CarrierKind,
    m_bar: u32,
    phase_offset_cycles: f64,
}

impl CarrierSpec {
    /// Truncated frequency-modulated carrier with `A_M` solved from `(M̄, K)`.
    pub fn truncated(m_bar: u32, truncation: f64) -> Result<Self> {
        let amplitude_parameter = solve_amplitude_parameter(m_bar, truncation)?;
        Ok(Self {
            kind: CarrierKind::Truncated {
                truncation,
                amplitude_parameter,
            },
            m_bar,
            phase_offset_cycles: 0.0,
        })
    }

    /// Constant-frequency carrier at `M̄·f_fund`.
    pub fn fixed(m_bar: u32, f_fund: f64) -> Result<Self> {
        if m_bar == 0 {
            return Err(invalid("m_bar", "must be >= 1"));
        }
        if !(f_fund.is_finite() && f_fund > 0.0) {
            return Err(invalid("f_fund", format!("must be > 0, got {f_fund}")));
        }
        Ok(Self {
            kind: CarrierKind::Fixed {
                frequency_hz: f64::from(m_bar) * f_fund,
            },
            m_bar,
            phase_offset_cycles: 0.0,
        })
    }

    pub fn with_phase_offset(self, cycles: f64) -> Self {
        Self {
            phase_offset_cycles: cycles.rem_euclid(1.0),
            ..self
        }
    }

    pub fn kind(&self) -> CarrierKind {
        self.kind
    }

    pub fn m_bar(&self) -> u32 {
        self.m_bar
    }

    pub fn phase_offset_cycles(&self) -> f64 {
        self.phase_offset_cycles
    }

    pub fn truncation(&self) -> Option<f64> {
        match self.kind {
            CarrierKind::Truncated { truncation, .. } => Some(truncation),
            CarrierKind::Fixed { .. } => None,
        }
    }

    pub fn amplitude_parameter(&self) -> Option<f64> {
        match self.kind {
            CarrierKind::Truncated {
                amplitude_parameter,
                ..
            } => Some(amplitude_parameter),
            CarrierKind::Fixed { .. } => None,
        }
    }

    /// Largest instantaneous modulation order `A_M·(1 − K)` (or `f_c / f`).
    pub fn max_modulation_order(&self, f_fund: f64) -> f64 {
        match self.kind {
            CarrierKind::Truncated {
                truncation,
                amplitude_parameter,
            } => amplitude_parameter * (1.0 - truncation),
            CarrierKind::Fixed { frequency_hz } => frequency_hz / f_fund,
        }
    }
}

/// Times at which the truncated carrier stops and restarts within one period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationWindow {
    pub t1: f64,
    pub t2: f64,
    pub t3: f64,
    pub t4: f64,
    /// Set for `K = 0`: the windows shrink to the single instants `T/4`, `3T/4`.
    pub degenerate: bool,
}

/// Angle `θ₀ = arccos(√K)` at which `cos²θ₀ = K`.
fn cutoff_angle(truncation: f64) -> f64 {
    truncation.sqrt().acos()
}

/// `∫₀ˣ (cos²u − K) du`.
fn pulsation_integral(truncation: f64, x: f64) -> f64 {
    (0.5 - truncation) * x + (2.0 * x).sin() / 4.0
}

fn check_truncation(truncation: f64) -> Result<()> {
    if !(0.0..1.0).contains(&truncation) {
        return Err(invalid(
            "K",
            format!("truncation level must lie in [0, 1), got {truncation}"),
        ));
    }
    Ok(())
}

/// Amplitude parameter `A_M` giving exactly `M̄` carrier cycles per period.
///
/// `A_M = M̄·π / (2·[(1/2 − K)·θ₀ + sin(2θ₀)/4])`, `θ₀ = arccos(√K)`.
pub fn solve_amplitude_parameter(m_bar: u32, truncation: f64) -> Result<f64> {
    if m_bar == 0 {
        return Err(invalid("m_bar", "must be >= 1"));
    }
    check_truncation(truncation)?;
    let theta0 = cutoff_angle(truncation);
    let area = pulsation_integral(truncation, theta0);
    Ok(f64::from(m_bar) * PI / (2.0 * area))
}

/// Instantaneous carrier pulsation in rad/s.
///
/// For the truncated carrier this is `max(A_M·ω_m·(cos²x − K), 0)` with `x`
/// the modulator angle; for a fixed carrier it is `2π·f_c`.
pub fn instantaneous_pulsation(spec: &CarrierSpec, modulating: &ModulatingSpec, t: f64) -> f64 {
    match spec.kind {
        CarrierKind::Truncated {
            truncation,
            amplitude_parameter,
        } => {
            let c = modulating.angle(t).cos();
            (amplitude_parameter * modulating.omega() * (c * c - truncation)).max(0.0)
        }
        CarrierKind::Fixed { frequency_hz } => 2.0 * PI * frequency_hz,
    }
}

/// Truncation instants `t1..t4` of one fundamental period.
pub fn truncation_instants(truncation: f64, f_fund: f64) -> Result<TruncationWindow> {
    check_truncation(truncation)?;
    if !(f_fund.is_finite() && f_fund > 0.0) {
        return Err(invalid("f_fund", format!("must be > 0, got {f_fund}")));
    }
    let period = 1.0 / f_fund;
    let t1 = cutoff_angle(truncation) / (2.0 * PI * f_fund);
    Ok(TruncationWindow {
        t1,
        t2: period / 2.0 - t1,
        t3: period / 2.0 + t1,
        t4: period - t1,
        degenerate: truncation == 0.0,
    })
}

/// Accumulated carrier phase in cycles as a function of the modulator angle.
fn phase_at_angle(spec: &CarrierSpec, f_fund: f64, x: f64) -> f64 {
    let cycles = match spec.kind {
        CarrierKind::Fixed { frequency_hz } => frequency_hz / f_fund * x / (2.0 * PI),
        CarrierKind::Truncated {
            truncation,
            amplitude_parameter,
        } => {
            let theta0 = cutoff_angle(truncation);
            let active = pulsation_integral(truncation, theta0);
            let half_turns = (x / PI).floor();
            let r = x - half_turns * PI;
            let partial = if r <= theta0 {
                pulsation_integral(truncation, r)
            } else if r < PI - theta0 {
                active
            } else {
                active + pulsation_integral(truncation, r)
                    - pulsation_integral(truncation, PI - theta0)
            };
            amplitude_parameter * (half_turns * 2.0 * active + partial) / (2.0 * PI)
        }
    };
    cycles + spec.phase_offset_cycles
}

/// Carrier phase θ(t) in cycles.
///
/// θ is zero at the origin of the modulator angle (plus the carrier phase
/// offset), continuous, non-decreasing and advances by exactly `M̄` per
/// fundamental period.
pub fn carrier_phase(spec: &CarrierSpec, modulating: &ModulatingSpec, t: f64) -> f64 {
    phase_at_angle(spec, modulating.f_fund(), modulating.angle(t))
}

/// Unit symmetric triangle: `+1` at integer cycles, descending first.
pub fn triangle(cycles: f64) -> f64 {
    let u = cycles - cycles.floor();
    if u < 0.5 {
        1.0 - 4.0 * u
    } else {
        4.0 * u - 3.0
    }
}

/// Carrier value in `[−1, 1]` at time `t`.
pub fn carrier_value(spec: &CarrierSpec, modulating: &ModulatingSpec, t: f64) -> f64 {
    triangle(carrier_phase(spec, modulating, t))
}

/// How the unit carrier is mapped before comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CarrierPlacement {
    /// Full-range carrier in `[−1, 1]`.
    Full,
    /// Carrier rescaled into the amplitude band `[lo, hi]` (level shifting).
    Band { lo: f64, hi: f64 },
}

impl CarrierPlacement {
    fn map(self, unit: f64) -> f64 {
        match self {
            Self::Full => unit,
            Self::Band { lo, hi } => lo + (hi - lo) * (unit + 1.0) / 2.0,
        }
    }
}

/// Gate polarity: on when the modulator is above or below the carrier.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarity {
    Above,
    Below,
}

/// One comparator: modulator phase shift, carrier mapping and polarity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Comparison {
    /// Extra phase applied to the modulator only (e.g. `π` for the right leg).
    pub modulator_phase: f64,
    pub placement: CarrierPlacement,
    pub polarity: Polarity,
}

impl Comparison {
    pub fn full(modulator_phase: f64) -> Self {
        Self {
            modulator_phase,
            placement: CarrierPlacement::Full,
            polarity: Polarity::Above,
        }
    }
}

struct Comparator<'a> {
    modulating: &'a ModulatingSpec,
    carrier: &'a CarrierSpec,
    comparison: Comparison,
}

impl Comparator<'_> {
    fn difference(&self, x: f64) -> f64 {
        let m = self
            .modulating
            .evaluate_at_angle(x + self.comparison.modulator_phase);
        let c = self
            .comparison
            .placement
            .map(triangle(phase_at_angle(self.carrier, self.modulating.f_fund(), x)));
        m - c
    }

    fn state(&self, x: f64) -> Result<bool> {
        let d = self.difference(x);
        if !d.is_finite() {
            return Err(Error::NumericFailure(format!(
                "non-finite comparator difference at angle {x}"
            )));
        }
        Ok(match self.comparison.polarity {
            Polarity::Above => d > 0.0,
            Polarity::Below => d < 0.0,
        })
    }

    /// Smallest scan step in modulator angle.
    fn scan_step(&self) -> f64 {
        let f = self.modulating.f_fund();
        let max_order = self.carrier.max_modulation_order(f).max(1.0);
        // A triangle half-cycle spans π / max_order radians at the fastest point.
        let half_cycle = PI / max_order;
        let highest_harmonic = self
            .modulating
            .harmonics()
            .iter()
            .map(|h| h.order)
            .max()
            .unwrap_or(1);
        (half_cycle / SCAN_POINTS_PER_HALF_CYCLE)
            .min(2.0 * PI / (512.0 * f64::from(highest_harmonic)))
    }

    /// Refines a bracketed sign change until the bracket stops shrinking.
    fn bisect(&self, mut lo: f64, mut hi: f64) -> Result<f64> {
        let s_lo = self.state(lo)?;
        if self.state(hi)? == s_lo {
            return Err(Error::NumericFailure(format!(
                "comparator bracket [{lo}, {hi}] rad has no sign change"
            )));
        }
        loop {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.state(mid)? == s_lo {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(hi)
    }
}

/// Truncation windows `(a, b)` in modulator angle overlapping `[start, end]`.
fn windows_in(truncation: f64, start: f64, end: f64) -> Vec<(f64, f64)> {
    let theta0 = cutoff_angle(truncation);
    if theta0 >= PI / 2.0 {
        return Vec::new();
    }
    let first = (start / PI).floor() as i64 - 1;
    let last = (end / PI).floor() as i64 + 1;
    (first..=last)
        .map(|k| {
            let base = k as f64 * PI;
            (base + theta0, base + PI - theta0)
        })
        .filter(|&(a, b)| b > start && a < end)
        .collect()
}

/// Exact switching pattern of one comparator over a fundamental period.
///
/// The output is `1` while the comparison holds and `0` otherwise. Crossing
/// instants are located to [`CROSSING_TOLERANCE_S`]. With `latch_truncation`
/// set and a truncated carrier, the output is held at its window-entry value
/// throughout every truncation window, so those windows contain no events.
pub fn comparator_events_with(
    modulating: &ModulatingSpec,
    carrier: &CarrierSpec,
    comparison: Comparison,
    latch_truncation: bool,
) -> Result<SwitchingPattern> {
    let cmp = Comparator {
        modulating,
        carrier,
        comparison,
    };
    let omega = modulating.omega();
    let period = modulating.period();
    let start = modulating.phase_offset();
    let end = start + 2.0 * PI;
    let tol = CROSSING_TOLERANCE_S * omega;

    let windows = match (latch_truncation, carrier.kind) {
        (true, CarrierKind::Truncated { truncation, .. }) => windows_in(truncation, start, end),
        _ => Vec::new(),
    };

    // Active stretches between windows, plus the held state of each window.
    let mut breakpoints = vec![start];
    for &(a, b) in &windows {
        for p in [a, b] {
            if p > start && p < end {
                breakpoints.push(p);
            }
        }
    }
    breakpoints.push(end);
    breakpoints.sort_by(f64::total_cmp);

    let held_window = |x: f64| windows.iter().find(|&&(a, b)| x > a && x < b).copied();
    let state_at = |x: f64| -> Result<bool> {
        match held_window(x) {
            Some((a, _)) => cmp.state(a),
            None => cmp.state(x),
        }
    };

    // The level just after t = 0 and just before t = T; evaluating exactly at
    // the origin would be ambiguous when a crossing sits there.
    let initial = state_at(start + tol)?;
    let mut transitions: Vec<(f64, i32)> = Vec::new();
    let mut current = initial;
    let step = cmp.scan_step();

    let last_segment = breakpoints.len() - 2;
    for (i, seg) in breakpoints.windows(2).enumerate() {
        let a = if i == 0 { start + tol } else { seg[0] };
        let b = if i == last_segment { end - tol } else { seg[1] };
        if b <= a {
            continue;
        }
        let mid = 0.5 * (a + b);
        if held_window(mid).is_some() {
            // Held inside the window; the output may only change at its end.
            let exit = state_at(b)?;
            if exit != current {
                current = exit;
                transitions.push(((b - start) / omega, i32::from(current)));
            }
            continue;
        }
        // Entering an active stretch from a window boundary can itself be an event.
        let entry = cmp.state(a)?;
        if entry != current {
            current = entry;
            transitions.push(((a - start) / omega, i32::from(current)));
        }
        let n = ((b - a) / step).ceil().max(1.0) as usize;
        let mut lo = a;
        for i in 1..=n {
            let hi = if i == n { b } else { a + (b - a) * i as f64 / n as f64 };
            let s = cmp.state(hi)?;
            if s != current {
                let x = cmp.bisect(lo, hi)?;
                current = s;
                transitions.push(((x - start) / omega, i32::from(current)));
            }
            lo = hi;
        }
    }
    if current != initial {
        transitions.push((0.0, i32::from(initial)));
    }

    Ok(SwitchingPattern::from_transitions(
        period,
        i32::from(initial),
        transitions,
    ))
}

/// Comparator of the modulator (shifted by `mod_phase`) against the full-range
/// carrier; see [`comparator_events_with`].
pub fn comparator_events(
    modulating: &ModulatingSpec,
    carrier: &CarrierSpec,
    mod_phase: f64,
    latch_truncation: bool,
) -> Result<SwitchingPattern> {
    comparator_events_with(
        modulating,
        carrier,
        Comparison::full(mod_phase),
        latch_truncation,
    )
}
