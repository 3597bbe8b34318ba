//! Cascaded H-bridge (CHB) gating and phase/line voltage synthesis.
//!
//! Each cell is a full bridge with two legs. A leg gate is produced by one
//! comparator; the cell output is `(left − right)·vdc ∈ {−vdc, 0, +vdc}` and
//! the phase voltage is the sum of the cell outputs.
//!
//! Strategies:
//!
//! | kind          | modulator          | carriers                                   |
//! |---------------|--------------------|--------------------------------------------|
//! | `SPWM_I`      | sine               | level-shifted, phase disposition           |
//! | `SPWM_II`     | sine               | phase-shifted, fixed frequency             |
//! | `SPWM_III`    | harmonic-injected  | phase-shifted, fixed frequency             |
//! | `HIPWM_FMTCt` | harmonic-injected  | phase-shifted, truncated frequency-modulated |

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::modulation::{
    comparator_events_with, CarrierKind, CarrierPlacement, CarrierSpec, Comparison, Harmonic,
    ModulatingSpec, Polarity, DEFAULT_INJECTION, MAX_AMPLITUDE,
};
use crate::pattern::SwitchingPattern;

/// Series-connected H-bridge cells per phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChbTopology {
    cells_per_phase: usize,
    vdc_per_cell: f64,
    phases: usize,
}

impl Default for ChbTopology {
    fn default() -> Self {
        Self {
            cells_per_phase: 2,
            vdc_per_cell: 75.0,
            phases: 3,
        }
    }
}

impl ChbTopology {
    pub fn new(cells_per_phase: usize, vdc_per_cell: f64, phases: usize) -> Result<Self> {
        if cells_per_phase == 0 {
            return Err(invalid("cells", "at least one cell per phase is required"));
        }
        if !(vdc_per_cell.is_finite() && vdc_per_cell > 0.0) {
            return Err(invalid("vdc", format!("must be > 0, got {vdc_per_cell}")));
        }
        if phases == 0 {
            return Err(invalid("phases", "must be >= 1"));
        }
        Ok(Self {
            cells_per_phase,
            vdc_per_cell,
            phases,
        })
    }

    pub fn cells_per_phase(&self) -> usize {
        self.cells_per_phase
    }

    pub fn vdc_per_cell(&self) -> f64 {
        self.vdc_per_cell
    }

    pub fn phases(&self) -> usize {
        self.phases
    }

    /// Number of distinct phase-voltage levels, `2N + 1`.
    pub fn phase_levels(&self) -> usize {
        2 * self.cells_per_phase + 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StrategyKind {
    #[serde(rename = "SPWM_I")]
    SpwmI,
    #[serde(rename = "SPWM_II")]
    SpwmII,
    #[serde(rename = "SPWM_III")]
    SpwmIII,
    #[serde(rename = "HIPWM_FMTCt")]
    HipwmFmtct,
}

impl StrategyKind {
    pub const ALL: [StrategyKind; 4] = [Self::SpwmI, Self::SpwmII, Self::SpwmIII, Self::HipwmFmtct];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::SpwmI => "SPWM_I",
            Self::SpwmII => "SPWM_II",
            Self::SpwmIII => "SPWM_III",
            Self::HipwmFmtct => "HIPWM_FMTCt",
        }
    }

    pub fn is_phase_shifted(self) -> bool {
        !matches!(self, Self::SpwmI)
    }

    pub fn uses_injection(self) -> bool {
        matches!(self, Self::SpwmIII | Self::HipwmFmtct)
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StrategyKind {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                invalid(
                    "strategy",
                    format!("unknown strategy `{s}` (expected SPWM_I, SPWM_II, SPWM_III or HIPWM_FMTCt)"),
                )
            })
    }
}

/// A complete modulation strategy: kind, modulator and carrier.
#[derive(Debug, Clone, PartialEq)]
pub struct StrategyConfig {
    kind: StrategyKind,
    modulating: ModulatingSpec,
    carrier: CarrierSpec,
    latch_truncation: bool,
}

impl StrategyConfig {
    pub fn new(kind: StrategyKind, modulating: ModulatingSpec, carrier: CarrierSpec) -> Result<Self> {
        let pure_sine = modulating.harmonics().iter().all(|h| h.order == 1);
        if !kind.uses_injection() && !pure_sine {
            return Err(invalid(
                "modulating",
                format!("{kind} requires a pure-sine modulator"),
            ));
        }
        match (kind, carrier.kind()) {
            (StrategyKind::HipwmFmtct, CarrierKind::Truncated { .. }) => {}
            (StrategyKind::HipwmFmtct, _) => {
                return Err(invalid("carrier", "HIPWM_FMTCt requires a truncated FM carrier"))
            }
            (_, CarrierKind::Fixed { frequency_hz }) => {
                let expected = f64::from(carrier.m_bar()) * modulating.f_fund();
                if (frequency_hz - expected).abs() > 1e-9 * expected {
                    return Err(invalid(
                        "carrier",
                        format!("{kind} carrier must run at M̄·f = {expected} Hz, got {frequency_hz}"),
                    ));
                }
            }
            (_, _) => {
                return Err(invalid("carrier", format!("{kind} requires a fixed-frequency carrier")))
            }
        }
        Ok(Self {
            kind,
            modulating,
            carrier,
            latch_truncation: kind == StrategyKind::HipwmFmtct,
        })
    }

    /// Builds a strategy with its standard modulator and carrier.
    ///
    /// `injection` overrides [`DEFAULT_INJECTION`] for the harmonic-injected
    /// kinds; `truncation` is only used by `HIPWM_FMTCt`.
    pub fn standard(
        kind: StrategyKind,
        f_fund: f64,
        amplitude: f64,
        m_bar: u32,
        truncation: f64,
        injection: Option<&[Harmonic]>,
    ) -> Result<Self> {
        let modulating = if kind.uses_injection() {
            let harmonics = injection.unwrap_or(&DEFAULT_INJECTION).to_vec();
            ModulatingSpec::new(f_fund, amplitude, harmonics, 0.0)?
        } else {
            ModulatingSpec::pure_sine(f_fund, amplitude)?
        };
        let carrier = match kind {
            StrategyKind::HipwmFmtct => CarrierSpec::truncated(m_bar, truncation)?,
            _ => CarrierSpec::fixed(m_bar, f_fund)?,
        };
        Self::new(kind, modulating, carrier)
    }

    pub fn with_amplitude(&self, amplitude: f64) -> Result<Self> {
        Ok(Self {
            modulating: self.modulating.with_amplitude(amplitude)?,
            ..self.clone()
        })
    }

    /// Enables or disables the comparator latch in truncation windows.
    pub fn with_latch(self, latch_truncation: bool) -> Self {
        Self {
            latch_truncation,
            ..self
        }
    }

    pub fn kind(&self) -> StrategyKind {
        self.kind
    }

    pub fn modulating(&self) -> &ModulatingSpec {
        &self.modulating
    }

    pub fn carrier(&self) -> &CarrierSpec {
        &self.carrier
    }

    pub fn latch_truncation(&self) -> bool {
        self.latch_truncation
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Leg {
    Left,
    Right,
}

/// Carrier used by a leg: a phase offset of the shared carrier or an
/// amplitude band.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CarrierArrangement {
    PhaseShift { offset_cycles: f64 },
    Band { lo: f64, hi: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateAssignment {
    pub cell: usize,
    pub leg: Leg,
    /// Phase of the modulator seen by this leg, radians.
    pub modulator_phase: f64,
    pub carrier: CarrierArrangement,
    pub polarity: Polarity,
}

/// Comparator wiring for every leg of one phase.
///
/// Phase-shifted kinds: cell `j` compares the 0° modulator (left leg) and the
/// 180° modulator (right leg) against the carrier offset by `j/(2N)` cycles.
/// `SPWM_I`: `2N` in-phase carriers stacked in bands over `[−1, 1]`; cell `j`
/// switches its left leg on the upper band `N + j` and its right leg on the
/// mirrored lower band `N − 1 − j`.
pub fn gate_assignments(kind: StrategyKind, topology: &ChbTopology) -> Vec<GateAssignment> {
    let n = topology.cells_per_phase();
    let mut out = Vec::with_capacity(2 * n);
    for j in 0..n {
        if kind.is_phase_shifted() {
            let carrier = CarrierArrangement::PhaseShift {
                offset_cycles: j as f64 / (2 * n) as f64,
            };
            out.push(GateAssignment {
                cell: j,
                leg: Leg::Left,
                modulator_phase: 0.0,
                carrier,
                polarity: Polarity::Above,
            });
            out.push(GateAssignment {
                cell: j,
                leg: Leg::Right,
                modulator_phase: PI,
                carrier,
                polarity: Polarity::Above,
            });
        } else {
            let width = 1.0 / n as f64;
            let band = |b: usize| CarrierArrangement::Band {
                lo: -1.0 + b as f64 * width,
                hi: -1.0 + (b + 1) as f64 * width,
            };
            out.push(GateAssignment {
                cell: j,
                leg: Leg::Left,
                modulator_phase: 0.0,
                carrier: band(n + j),
                polarity: Polarity::Above,
            });
            out.push(GateAssignment {
                cell: j,
                leg: Leg::Right,
                modulator_phase: 0.0,
                carrier: band(n - 1 - j),
                polarity: Polarity::Below,
            });
        }
    }
    out
}

/// Gate patterns and output of one H-bridge cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellWaveform {
    pub left: SwitchingPattern,
    pub right: SwitchingPattern,
    /// Cell level in `{−1, 0, 1}`.
    pub output: SwitchingPattern,
}

/// Exact phase voltage of a CHB leg: per-cell patterns and their sum.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseWaveform {
    pub topology: ChbTopology,
    pub cells: Vec<CellWaveform>,
    /// Composite level in `[−N, N]`; volts = level · vdc.
    pub composite: SwitchingPattern,
}

impl PhaseWaveform {
    pub fn vdc(&self) -> f64 {
        self.topology.vdc_per_cell()
    }

    pub fn voltage_at(&self, t: f64) -> f64 {
        f64::from(self.composite.level_at(t)) * self.vdc()
    }

    /// Gate transitions summed over every leg of the phase.
    pub fn gate_transitions(&self) -> usize {
        self.cells
            .iter()
            .map(|c| c.left.transition_count() + c.right.transition_count())
            .sum()
    }
}

/// Exact line-to-line voltage `v_a − v_b`.
#[derive(Debug, Clone, PartialEq)]
pub struct LineWaveform {
    pub phase_a: PhaseWaveform,
    pub phase_b: PhaseWaveform,
    /// Level in `[−2N, 2N]`; volts = level · vdc.
    pub pattern: SwitchingPattern,
}

impl LineWaveform {
    pub fn vdc(&self) -> f64 {
        self.phase_a.vdc()
    }

    pub fn voltage_at(&self, t: f64) -> f64 {
        f64::from(self.pattern.level_at(t)) * self.vdc()
    }

    /// RMS of the fundamental line voltage, from the exact Fourier coefficient.
    pub fn fundamental_rms(&self) -> f64 {
        2.0 * self.pattern.fourier_coefficient(1).norm() * self.vdc() / 2f64.sqrt()
    }
}

/// Line fundamental RMS the default operating point aims for, volts.
pub const DEFAULT_TARGET_LINE_RMS: f64 = 220.0;

/// Index used when the target RMS cannot be reached.
pub const FALLBACK_AMPLITUDE: f64 = 1.0;

/// Default operating index: calibrated to `target_rms` when reachable,
/// otherwise [`FALLBACK_AMPLITUDE`].
pub fn operating_amplitude(
    strategy: &StrategyConfig,
    topology: &ChbTopology,
    target_rms: f64,
) -> Result<f64> {
    Ok(calibrate_amplitude(strategy, topology, target_rms)?.unwrap_or(FALLBACK_AMPLITUDE))
}

/// Modulation index at which the line fundamental reaches `target_rms` volts.
///
/// The fundamental is not monotone in the index for every strategy (a
/// latched cell can jump to the rail), so this bisects for a crossing of the
/// target on `[0, MAX_AMPLITUDE]`. Returns `None` when even the largest index
/// falls short.
pub fn calibrate_amplitude(
    strategy: &StrategyConfig,
    topology: &ChbTopology,
    target_rms: f64,
) -> Result<Option<f64>> {
    if !(target_rms.is_finite() && target_rms > 0.0) {
        return Err(invalid("target_rms", format!("must be > 0, got {target_rms}")));
    }
    let rms_at = |ma: f64| -> Result<f64> {
        Ok(synthesize_line(&strategy.with_amplitude(ma)?, topology)?.fundamental_rms())
    };
    let (mut lo, mut hi) = (0.0, MAX_AMPLITUDE);
    if rms_at(hi)? < target_rms {
        return Ok(None);
    }
    while hi - lo > 1e-7 {
        let mid = 0.5 * (lo + hi);
        if rms_at(mid)? >= target_rms {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(hi))
}

/// Synthesizes one phase whose modulator (and synchronised carrier) is
/// advanced by `phase_angle` radians.
pub fn synthesize_phase(
    strategy: &StrategyConfig,
    topology: &ChbTopology,
    phase_angle: f64,
) -> Result<PhaseWaveform> {
    let modulating = strategy
        .modulating()
        .with_phase_offset(strategy.modulating().phase_offset() + phase_angle);
    let assignments = gate_assignments(strategy.kind(), topology);

    let mut cells = Vec::with_capacity(topology.cells_per_phase());
    for pair in assignments.chunks(2) {
        let mut legs = pair.iter().map(|g| {
            let (carrier, placement) = match g.carrier {
                CarrierArrangement::PhaseShift { offset_cycles } => (
                    strategy
                        .carrier()
                        .with_phase_offset(strategy.carrier().phase_offset_cycles() + offset_cycles),
                    CarrierPlacement::Full,
                ),
                CarrierArrangement::Band { lo, hi } => {
                    (*strategy.carrier(), CarrierPlacement::Band { lo, hi })
                }
            };
            let comparison = Comparison {
                modulator_phase: g.modulator_phase,
                placement,
                polarity: g.polarity,
            };
            comparator_events_with(&modulating, &carrier, comparison, strategy.latch_truncation())
        });
        let left = legs.next().expect("left leg")?;
        let right = legs.next().expect("right leg")?;
        let output = left.combine(&right, |l, r| l - r)?;
        cells.push(CellWaveform {
            left,
            right,
            output,
        });
    }
    let composite = SwitchingPattern::sum(cells.iter().map(|c| &c.output))?;
    Ok(PhaseWaveform {
        topology: *topology,
        cells,
        composite,
    })
}

/// Line voltage between phase `a` and phase `b`, whose modulator lags by
/// `2π/m₁`.
pub fn synthesize_line(strategy: &StrategyConfig, topology: &ChbTopology) -> Result<LineWaveform> {
    if topology.phases() < 2 {
        return Err(invalid("phases", "a line voltage needs at least two phases"));
    }
    let lag = 2.0 * PI / topology.phases() as f64;
    let phase_a = synthesize_phase(strategy, topology, 0.0)?;
    let phase_b = synthesize_phase(strategy, topology, -lag)?;
    let pattern = phase_a.composite.combine(&phase_b.composite, |a, b| a - b)?;
    Ok(LineWaveform {
        phase_a,
        phase_b,
        pattern,
    })
}
