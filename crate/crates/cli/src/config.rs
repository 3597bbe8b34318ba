//! JSON run configuration, command-line overrides and validation.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use mlpwm::acoustics::{HousingGeometry, MaterialSpec, StatorGeometry};
use mlpwm::inverter::{ChbTopology, StrategyConfig, StrategyKind, DEFAULT_TARGET_LINE_RMS};
use mlpwm::modulation::{Harmonic, DEFAULT_INJECTION, MAX_AMPLITUDE};
use mlpwm::spectral::{DEFAULT_LOAD_L, DEFAULT_LOAD_R, DEFAULT_MAX_ORDER, DEFAULT_SAMPLES_PER_PERIOD};

use crate::error::CliError;

/// Largest truncation level accepted from the command line or a config file.
pub const MAX_TRUNCATION: f64 = 0.95;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Strategies to run; `synth` uses the first, `compare` uses all.
    pub strategies: Vec<StrategyKind>,
    pub topology: TopologyConfig,
    pub modulating: ModulatingConfig,
    pub carrier: CarrierConfig,
    pub analysis: AnalysisConfig,
    pub motor: MotorConfig,
    pub sweep: SweepConfig,
    pub output: OutputConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            strategies: StrategyKind::ALL.to_vec(),
            topology: TopologyConfig::default(),
            modulating: ModulatingConfig::default(),
            carrier: CarrierConfig::default(),
            analysis: AnalysisConfig::default(),
            motor: MotorConfig::default(),
            sweep: SweepConfig::default(),
            output: OutputConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TopologyConfig {
    pub cells_per_phase: usize,
    /// Volts per cell.
    pub vdc_per_cell: f64,
    pub phases: usize,
}

impl Default for TopologyConfig {
    fn default() -> Self {
        let t = ChbTopology::default();
        Self {
            cells_per_phase: t.cells_per_phase(),
            vdc_per_cell: t.vdc_per_cell(),
            phases: t.phases(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InjectionTerm {
    pub order: u32,
    pub coefficient: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModulatingConfig {
    /// Fundamental frequency, Hz.
    pub f_fund: f64,
    /// Modulation index; `null` calibrates to `target_line_rms`.
    pub amplitude: Option<f64>,
    /// Line fundamental RMS (volts) used when `amplitude` is `null`.
    pub target_line_rms: f64,
    /// Harmonic list of the injected modulators (SPWM_III, HIPWM_FMTCt).
    pub injection: Vec<InjectionTerm>,
}

impl Default for ModulatingConfig {
    fn default() -> Self {
        Self {
            f_fund: 50.0,
            amplitude: None,
            target_line_rms: DEFAULT_TARGET_LINE_RMS,
            injection: DEFAULT_INJECTION
                .iter()
                .map(|h| InjectionTerm {
                    order: h.order,
                    coefficient: h.coefficient,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CarrierConfig {
    /// Frequency-modulation order: average carrier cycles per period.
    pub m_bar: u32,
    /// Truncation level of the frequency-modulated carrier.
    pub k: f64,
}

impl Default for CarrierConfig {
    fn default() -> Self {
        Self { m_bar: 15, k: 0.55 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisConfig {
    pub samples_per_period: usize,
    pub max_order: usize,
    /// Series load resistance, ohms.
    pub load_r: f64,
    /// Series load inductance, henries.
    pub load_l: f64,
    pub risk_window_hz: f64,
    pub risk_threshold_pct: f64,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            samples_per_period: DEFAULT_SAMPLES_PER_PERIOD,
            max_order: DEFAULT_MAX_ORDER,
            load_r: DEFAULT_LOAD_R,
            load_l: DEFAULT_LOAD_L,
            risk_window_hz: mlpwm::acoustics::DEFAULT_RISK_WINDOW_HZ,
            risk_threshold_pct: mlpwm::acoustics::DEFAULT_RISK_THRESHOLD_PCT,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MotorConfig {
    pub stator: Option<StatorGeometry>,
    pub material: MaterialSpec,
    pub housing: Option<HousingGeometry>,
    pub m_max: u32,
    pub n_max: u32,
    /// Relative added mass of windings and teeth, `Δ` in `1/√(1 + Δ)`.
    pub mass_addition: f64,
    /// Measured natural frequencies added to the predicted ones, Hz.
    pub extra_resonances_hz: Vec<f64>,
}

impl Default for MotorConfig {
    fn default() -> Self {
        Self {
            stator: Some(StatorGeometry::default()),
            material: MaterialSpec::default(),
            housing: Some(HousingGeometry::default()),
            m_max: 8,
            n_max: 4,
            mass_addition: 0.0,
            extra_resonances_hz: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub k_grid: Vec<f64>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            k_grid: vec![0.2, 0.3, 0.4, 0.45, 0.5, 0.55, 0.6, 0.7, 0.8],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub format: Format,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("mlpwm-out"),
            format: Format::Csv,
        }
    }
}

/// Command-line values that replace config fields when present.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub k: Option<f64>,
    pub m_bar: Option<u32>,
    pub strategies: Vec<StrategyKind>,
    pub cells: Option<usize>,
    pub vdc: Option<f64>,
    pub f: Option<f64>,
    pub samples: Option<usize>,
    pub max_order: Option<usize>,
    pub amplitude: Option<f64>,
}

fn bad(field: &str, reason: impl Into<String>) -> CliError {
    CliError::Config(format!("{field}: {}", reason.into()))
}

fn positive(field: &str, v: f64) -> Result<(), CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(bad(field, format!("must be a positive number, got {v}")))
    }
}

fn check_k(field: &str, k: f64) -> Result<(), CliError> {
    if (0.0..=MAX_TRUNCATION).contains(&k) {
        Ok(())
    } else {
        Err(bad(field, format!("K must lie in [0, {MAX_TRUNCATION}], got {k}")))
    }
}

impl RunConfig {
    /// Reads `path`, or the defaults when `path` is `None`.
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("config {}: {e}", path.display())))
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(v) = &o.out {
            self.output.dir = v.clone();
        }
        if let Some(v) = o.format {
            self.output.format = v;
        }
        if let Some(v) = o.k {
            self.carrier.k = v;
        }
        if let Some(v) = o.m_bar {
            self.carrier.m_bar = v;
        }
        if !o.strategies.is_empty() {
            self.strategies = o.strategies.clone();
        }
        if let Some(v) = o.cells {
            self.topology.cells_per_phase = v;
        }
        if let Some(v) = o.vdc {
            self.topology.vdc_per_cell = v;
        }
        if let Some(v) = o.f {
            self.modulating.f_fund = v;
        }
        if let Some(v) = o.samples {
            self.analysis.samples_per_period = v;
        }
        if let Some(v) = o.max_order {
            self.analysis.max_order = v;
        }
        if o.amplitude.is_some() {
            self.modulating.amplitude = o.amplitude;
        }
    }

    /// Checks every field; errors name the offending field.
    pub fn validate(&self) -> Result<(), CliError> {
        if self.strategies.is_empty() {
            return Err(bad("strategies", "at least one strategy is required"));
        }
        let t = &self.topology;
        if t.cells_per_phase == 0 {
            return Err(bad("topology.cells_per_phase", "must be >= 1"));
        }
        if t.phases < 2 {
            return Err(bad("topology.phases", "line voltages need at least 2 phases"));
        }
        positive("topology.vdc_per_cell", t.vdc_per_cell)?;

        let m = &self.modulating;
        positive("modulating.f_fund", m.f_fund)?;
        if let Some(a) = m.amplitude {
            if !(a > 0.0 && a <= MAX_AMPLITUDE) {
                return Err(bad(
                    "modulating.amplitude",
                    format!("must lie in (0, {MAX_AMPLITUDE}], got {a}"),
                ));
            }
        }
        positive("modulating.target_line_rms", m.target_line_rms)?;
        if m.injection.is_empty() {
            return Err(bad("modulating.injection", "at least one term is required"));
        }
        for h in &m.injection {
            if h.order % 2 == 0 {
                return Err(bad(
                    "modulating.injection",
                    format!("order {} is even; only odd orders are allowed", h.order),
                ));
            }
            if !h.coefficient.is_finite() {
                return Err(bad("modulating.injection", "coefficients must be finite"));
            }
        }

        if self.carrier.m_bar == 0 {
            return Err(bad("carrier.m_bar", "must be >= 1"));
        }
        check_k("carrier.k", self.carrier.k)?;

        let a = &self.analysis;
        if a.samples_per_period < 4096 || !a.samples_per_period.is_power_of_two() {
            return Err(bad(
                "analysis.samples_per_period",
                format!("must be a power of two >= 4096, got {}", a.samples_per_period),
            ));
        }
        if a.max_order == 0 || a.max_order > a.samples_per_period / 2 {
            return Err(bad(
                "analysis.max_order",
                format!("must lie in [1, {}], got {}", a.samples_per_period / 2, a.max_order),
            ));
        }
        if !(a.load_r >= 0.0 && a.load_l >= 0.0 && a.load_r.is_finite() && a.load_l.is_finite())
            || (a.load_r == 0.0 && a.load_l == 0.0)
        {
            return Err(bad("analysis.load_r/load_l", "must be non-negative and not both zero"));
        }
        positive("analysis.risk_window_hz", a.risk_window_hz)?;
        if !(a.risk_threshold_pct >= 0.0 && a.risk_threshold_pct.is_finite()) {
            return Err(bad("analysis.risk_threshold_pct", "must be >= 0"));
        }

        let motor = &self.motor;
        if let Some(s) = &motor.stator {
            s.validate().map_err(|e| bad("motor.stator", e.to_string()))?;
        }
        motor.material.validate().map_err(|e| bad("motor.material", e.to_string()))?;
        if let Some(h) = &motor.housing {
            h.validate().map_err(|e| bad("motor.housing", e.to_string()))?;
        }
        if !(motor.mass_addition > -1.0 && motor.mass_addition.is_finite()) {
            return Err(bad("motor.mass_addition", "must be > -1"));
        }
        if motor.extra_resonances_hz.iter().any(|f| !(f.is_finite() && *f > 0.0)) {
            return Err(bad("motor.extra_resonances_hz", "frequencies must be positive"));
        }

        if self.sweep.k_grid.is_empty() {
            return Err(bad("sweep.k_grid", "must contain at least one value"));
        }
        for &k in &self.sweep.k_grid {
            check_k("sweep.k_grid", k)?;
        }
        Ok(())
    }

    pub fn topology(&self) -> Result<ChbTopology, CliError> {
        let t = &self.topology;
        Ok(ChbTopology::new(t.cells_per_phase, t.vdc_per_cell, t.phases)?)
    }

    /// Strategy at the configured settings with truncation `k`. The amplitude
    /// is a placeholder until the operating point is resolved.
    pub fn strategy(&self, kind: StrategyKind, k: f64) -> Result<StrategyConfig, CliError> {
        let injection: Vec<Harmonic> = self
            .modulating
            .injection
            .iter()
            .map(|h| Harmonic {
                order: h.order,
                coefficient: h.coefficient,
            })
            .collect();
        Ok(StrategyConfig::standard(
            kind,
            self.modulating.f_fund,
            self.modulating.amplitude.unwrap_or(1.0),
            self.carrier.m_bar,
            k,
            Some(&injection),
        )?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate_and_round_trip() {
        let c = RunConfig::default();
        c.validate().unwrap();
        let json = serde_json::to_string(&c).unwrap();
        let back: RunConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"carrier": {"K": 0.5}}"#).is_err());
        assert!(serde_json::from_str::<RunConfig>(r#"{"colour": 1}"#).is_err());
    }

    #[test]
    fn overrides_replace_fields() {
        let mut c = RunConfig::default();
        c.apply(&Overrides {
            k: Some(0.3),
            m_bar: Some(11),
            strategies: vec![StrategyKind::SpwmI],
            ..Overrides::default()
        });
        assert_eq!(c.carrier.k, 0.3);
        assert_eq!(c.carrier.m_bar, 11);
        assert_eq!(c.strategies, vec![StrategyKind::SpwmI]);
    }

    #[test]
    fn out_of_range_k_names_the_field() {
        let mut c = RunConfig::default();
        c.carrier.k = 1.2;
        let msg = c.validate().unwrap_err().to_string();
        assert!(msg.contains("carrier.k") && msg.contains("[0, 0.95]"), "{msg}");
    }
}
