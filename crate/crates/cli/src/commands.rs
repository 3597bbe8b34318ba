use std::f64::consts::PI;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Deserialize;

use mlpwm::acoustics::{
    donnell_coefficients, housing_roots, resonance_risk, resonance_table, Resonance, ResonanceSource, RiskReport,
};
use mlpwm::inverter::{operating_amplitude, synthesize_line, ChbTopology, StrategyKind};
use mlpwm::modulation::{solve_amplitude_parameter, truncation_instants};
use mlpwm::spectral::{current_spectrum, sample_pattern, spectrum, thd, HarmonicTable, SampledWaveform};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{Cell, Table};

pub const SWEEP_HEADERS: [&str; 7] = ["K", "A_M", "t1_ms", "max_mod_order", "thd_pct", "vrms_fund", "risk_score"];
pub const COMPARE_HEADERS: [&str; 6] = ["strategy", "m_a", "thd_pct", "vrms_fund", "events_per_period", "risk_score"];
pub const HARMONIC_HEADERS: [&str; 4] = ["order", "freq_hz", "amplitude", "percent"];
pub const WAVEFORM_HEADERS: [&str; 2] = ["t", "value"];
pub const RESONANCE_HEADERS: [&str; 4] = ["source", "m", "n", "frequency_hz"];
pub const RISK_HEADERS: [&str; 8] = [
    "force_frequency_hz",
    "nearest_resonance_hz",
    "m",
    "n",
    "separation_hz",
    "order",
    "percent",
    "weight",
];

/// Validated configuration with the derived objects every command needs.
pub struct Context {
    pub cfg: RunConfig,
    pub topology: ChbTopology,
    pub resonances: Vec<Resonance>,
}

impl Context {
    pub fn new(cfg: RunConfig) -> Result<Self, CliError> {
        cfg.validate()?;
        let topology = cfg.topology()?;
        let resonances = structural_resonances(&cfg)?;
        Ok(Self {
            cfg,
            topology,
            resonances,
        })
    }

    fn out_dir(&self) -> &Path {
        &self.cfg.output.dir
    }
}

/// Predicted stator/housing modes plus user-supplied frequencies. Without a
/// stator only the user frequencies are available.
fn structural_resonances(cfg: &RunConfig) -> Result<Vec<Resonance>, CliError> {
    let motor = &cfg.motor;
    let mut out = match &motor.stator {
        Some(stator) => resonance_table(
            stator,
            &motor.material,
            motor.housing.as_ref(),
            motor.m_max,
            motor.n_max,
            motor.mass_addition,
        )?,
        None => Vec::new(),
    };
    out.extend(motor.extra_resonances_hz.iter().map(|&f| Resonance {
        frequency_hz: f,
        mode: (0, 0),
        source: ResonanceSource::User,
    }));
    out.sort_by(|a, b| a.frequency_hz.total_cmp(&b.frequency_hz));
    Ok(out)
}

/// Everything computed for one strategy at one truncation level.
pub struct Case {
    pub kind: StrategyKind,
    pub m_a: f64,
    pub record: SampledWaveform,
    pub voltage: HarmonicTable,
    pub thd_pct: f64,
    pub events_per_period: usize,
    pub risk: RiskReport,
}

pub fn evaluate(ctx: &Context, kind: StrategyKind, k: f64) -> Result<Case, CliError> {
    let cfg = &ctx.cfg;
    let base = cfg.strategy(kind, k)?;
    let m_a = match cfg.modulating.amplitude {
        Some(a) => a,
        None => operating_amplitude(&base, &ctx.topology, cfg.modulating.target_line_rms)?,
    };
    let strategy = base.with_amplitude(m_a)?;
    let line = synthesize_line(&strategy, &ctx.topology)?;
    let a = &cfg.analysis;
    let record = sample_pattern(&line.pattern, ctx.topology.vdc_per_cell(), a.samples_per_period, 1)?;
    let voltage = spectrum(&record, a.max_order)?;
    let thd_pct = thd(&voltage)?;
    // Force lines follow the current, so risk uses the load current spectrum.
    let current = current_spectrum(&voltage, a.load_r, a.load_l)?;
    let risk = resonance_risk(&current, &ctx.resonances, a.risk_window_hz, a.risk_threshold_pct)?;
    Ok(Case {
        kind,
        m_a,
        record,
        voltage,
        thd_pct,
        events_per_period: line.phase_a.gate_transitions(),
        risk,
    })
}

pub fn synth(ctx: &Context) -> Result<(), CliError> {
    let kind = ctx.cfg.strategies[0];
    let case = evaluate(ctx, kind, ctx.cfg.carrier.k)?;
    let format = ctx.cfg.output.format;

    let mut wave = Table::new(&WAVEFORM_HEADERS);
    for (t, v) in case.record.times().zip(&case.record.samples) {
        wave.push(vec![t.into(), (*v).into()]);
    }
    let wave_path = wave.write(ctx.out_dir(), "waveform", format)?;
    let harm_path = harmonic_table(&case.voltage).write(ctx.out_dir(), "harmonics", format)?;

    println!("strategy {kind}, m_a = {:.6}", case.m_a);
    println!("THD = {:.6} % (orders 2..{})", case.thd_pct, ctx.cfg.analysis.max_order);
    println!("fundamental line RMS = {:.6} V", case.voltage.fundamental_rms);
    println!("wrote {}", wave_path.display());
    println!("wrote {}", harm_path.display());
    Ok(())
}

pub fn harmonic_table(t: &HarmonicTable) -> Table {
    let mut table = Table::new(&HARMONIC_HEADERS);
    for e in &t.entries {
        table.push(vec![
            e.order.into(),
            e.frequency_hz.into(),
            e.amplitude.into(),
            e.percent_of_fundamental.into(),
        ]);
    }
    table
}

pub fn sweep_k(ctx: &Context) -> Result<Table, CliError> {
    let cfg = &ctx.cfg;
    let rows: Vec<Vec<Cell>> = cfg
        .sweep
        .k_grid
        .par_iter()
        .map(|&k| -> Result<Vec<Cell>, CliError> {
            let a_m = solve_amplitude_parameter(cfg.carrier.m_bar, k)?;
            let t1 = truncation_instants(k, cfg.modulating.f_fund)?.t1;
            let case = evaluate(ctx, StrategyKind::HipwmFmtct, k)?;
            Ok(vec![
                k.into(),
                a_m.into(),
                (1e3 * t1).into(),
                (a_m * (1.0 - k)).into(),
                case.thd_pct.into(),
                case.voltage.fundamental_rms.into(),
                case.risk.score.into(),
            ])
        })
        .collect::<Result<_, _>>()?;
    let mut table = Table::new(&SWEEP_HEADERS);
    rows.into_iter().for_each(|r| table.push(r));
    Ok(table)
}

pub fn compare(ctx: &Context) -> Result<Table, CliError> {
    let cfg = &ctx.cfg;
    if cfg.strategies.len() < 2 {
        return Err(CliError::Config(format!(
            "strategies: compare needs at least 2 strategies, got {}",
            cfg.strategies.len()
        )));
    }
    let cases: Vec<Case> = cfg
        .strategies
        .par_iter()
        .map(|&kind| evaluate(ctx, kind, cfg.carrier.k))
        .collect::<Result<_, _>>()?;
    let mut table = Table::new(&COMPARE_HEADERS);
    for c in cases {
        table.push(vec![
            c.kind.as_str().into(),
            c.m_a.into(),
            c.thd_pct.into(),
            c.voltage.fundamental_rms.into(),
            c.events_per_period.into(),
            c.risk.score.into(),
        ]);
    }
    Ok(table)
}

/// Housing breathing mode evaluated with `λ → 0` on the casing geometry,
/// next to the ring form `P = 1` it must approach.
pub struct LimitCheck {
    pub housing_hz: f64,
    pub ring_hz: f64,
}

pub fn lambda_limit(ctx: &Context) -> Result<Option<LimitCheck>, CliError> {
    let Some(hg) = &ctx.cfg.motor.housing else {
        return Ok(None);
    };
    let kappa_sq = hg.h_f * hg.h_f / (12.0 * hg.r_f() * hg.r_f());
    let (_, p) = housing_roots(&donnell_coefficients(0.0, 1e-9, kappa_sq, hg.material.nu, 0.0))?;
    let scale = hg.material.wave_speed() / (PI * hg.d_f);
    Ok(Some(LimitCheck {
        housing_hz: p * scale,
        ring_hz: scale,
    }))
}

pub fn resonance_tables(ctx: &Context) -> Result<(Table, Option<LimitCheck>), CliError> {
    if ctx.cfg.motor.stator.is_none() {
        return Err(CliError::Config("motor.stator: stator geometry is required".into()));
    }
    let mut table = Table::new(&RESONANCE_HEADERS);
    for r in &ctx.resonances {
        let source = match r.source {
            ResonanceSource::Stator => "stator",
            ResonanceSource::Housing => "housing",
            ResonanceSource::User => "user",
        };
        table.push(vec![source.into(), r.mode.0.into(), r.mode.1.into(), r.frequency_hz.into()]);
    }
    let limit = lambda_limit(ctx)?;
    if let Some(l) = &limit {
        table.push(vec!["housing_lambda0".into(), 0u32.into(), 0u32.into(), l.housing_hz.into()]);
    }
    Ok((table, limit))
}

fn breathing_mode_hz(ctx: &Context) -> Option<f64> {
    ctx.resonances
        .iter()
        .find(|r| r.source == ResonanceSource::Stator && r.mode == (0, 0))
        .map(|r| r.frequency_hz)
}

fn resonance_notes(ctx: &Context, limit: Option<&LimitCheck>) -> String {
    let mut s = String::new();
    if let Some(f0) = breathing_mode_hz(ctx) {
        let _ = writeln!(
            s,
            "note: the stator breathing mode (m = 0) is predicted at {f0:.1} Hz from the ring equation alone. \
             Measured tables for comparable machines often list much lower values; the corrections behind them \
             (tooth and winding mass, mode assignment) are not modelled here. Use motor.mass_addition or \
             motor.extra_resonances_hz to fold in measured data."
        );
    }
    if let Some(l) = limit {
        let _ = writeln!(
            s,
            "check: housing m = 0 with lambda -> 0 gives {:.3} Hz, ring form gives {:.3} Hz (relative difference {:.2e})",
            l.housing_hz,
            l.ring_hz,
            (l.housing_hz - l.ring_hz).abs() / l.ring_hz
        );
    }
    s
}

#[derive(Debug, Deserialize)]
struct HarmonicRow {
    order: usize,
    freq_hz: f64,
    amplitude: f64,
}

/// Reads a harmonics CSV as written by `synth`.
pub fn read_spectrum(path: &Path) -> Result<HarmonicTable, CliError> {
    let bad = |e: String| CliError::Config(format!("spectrum file {}: {e}", path.display()));
    let mut reader = csv::Reader::from_path(path).map_err(|e| bad(e.to_string()))?;
    let rows: Vec<HarmonicRow> = reader
        .deserialize()
        .collect::<Result<_, _>>()
        .map_err(|e| bad(e.to_string()))?;
    let fundamental = rows
        .iter()
        .find(|r| r.order == 1)
        .map(|r| r.freq_hz)
        .ok_or_else(|| bad("no order-1 row".into()))?;
    if !(fundamental.is_finite() && fundamental > 0.0) {
        return Err(bad(format!("fundamental frequency must be > 0, got {fundamental}")));
    }
    Ok(HarmonicTable::from_lines(
        fundamental,
        0.0,
        rows.into_iter().map(|r| (r.order, r.amplitude, 0.0)),
    ))
}

pub fn risk_table(report: &RiskReport) -> Table {
    let mut table = Table::new(&RISK_HEADERS);
    for e in &report.entries {
        table.push(vec![
            e.force_frequency_hz.into(),
            e.nearest_resonance_hz.into(),
            e.mode.0.into(),
            e.mode.1.into(),
            e.separation_hz.into(),
            e.order.into(),
            e.percent.into(),
            e.weight.into(),
        ]);
    }
    table
}

pub fn resonance(ctx: &Context, spectrum_file: Option<&Path>) -> Result<(), CliError> {
    let format = ctx.cfg.output.format;
    let (table, limit) = resonance_tables(ctx)?;
    let path = table.write(ctx.out_dir(), "resonances", format)?;
    for row in &table.rows {
        let cells: Vec<String> = row
            .iter()
            .map(|c| match c {
                Cell::Int(v) => v.to_string(),
                Cell::Float(v) => format!("{v:.1}"),
                Cell::Text(s) => s.clone(),
            })
            .collect();
        println!("{}", cells.join("\t"));
    }
    print!("{}", resonance_notes(ctx, limit.as_ref()));
    println!("wrote {}", path.display());

    if let Some(file) = spectrum_file {
        let spec = read_spectrum(file)?;
        let a = &ctx.cfg.analysis;
        let report = resonance_risk(&spec, &ctx.resonances, a.risk_window_hz, a.risk_threshold_pct)?;
        let risk_path = risk_table(&report).write(ctx.out_dir(), "risk", format)?;
        println!("risk score = {:.6} ({} force lines in window)", report.score, report.entries.len());
        println!("wrote {}", risk_path.display());
    }
    Ok(())
}

pub fn write_table(ctx: &Context, table: &Table, stem: &str) -> Result<PathBuf, CliError> {
    let path = table.write(ctx.out_dir(), stem, ctx.cfg.output.format)?;
    println!("wrote {}", path.display());
    Ok(path)
}

/// Runs the K sweep, the strategy comparison and the resonance table, and
/// writes a plain-text summary next to them.
pub fn reproduce(ctx: &Context) -> Result<(), CliError> {
    let sweep = sweep_k(ctx)?;
    write_table(ctx, &sweep, "sweep_k")?;
    let cmp = compare(ctx)?;
    write_table(ctx, &cmp, "compare")?;
    let (res, limit) = resonance_tables(ctx)?;
    write_table(ctx, &res, "resonances")?;

    let mut s = String::new();
    let cfg = &ctx.cfg;
    let _ = writeln!(
        s,
        "mlpwm summary: {} cells/phase, {} V/cell, f = {} Hz, M = {}",
        cfg.topology.cells_per_phase, cfg.topology.vdc_per_cell, cfg.modulating.f_fund, cfg.carrier.m_bar
    );
    let _ = writeln!(s, "\nK sweep (HIPWM_FMTCt):");
    let _ = writeln!(s, "{:>6} {:>12} {:>9} {:>10} {:>9} {:>10}", "K", "A_M", "t1_ms", "thd_pct", "vrms", "risk");
    let mut best: Option<(f64, f64)> = None;
    for row in &sweep.rows {
        let v: Vec<f64> = row.iter().map(as_f64).collect();
        let _ = writeln!(
            s,
            "{:>6.3} {:>12.5} {:>9.4} {:>10.3} {:>9.2} {:>10.3}",
            v[0], v[1], v[2], v[4], v[5], v[6]
        );
        if best.is_none_or(|(_, t)| v[4] < t) {
            best = Some((v[0], v[4]));
        }
    }
    if let Some((k, t)) = best {
        let _ = writeln!(s, "lowest THD {t:.3} % at K = {k}");
    }
    let _ = writeln!(s, "\nStrategy comparison at K = {}:", cfg.carrier.k);
    let _ = writeln!(s, "{:>12} {:>8} {:>10} {:>9} {:>7} {:>10}", "strategy", "m_a", "thd_pct", "vrms", "events", "risk");
    for row in &cmp.rows {
        let name = match &row[0] {
            Cell::Text(t) => t.as_str(),
            _ => "",
        };
        let _ = writeln!(
            s,
            "{:>12} {:>8.4} {:>10.3} {:>9.2} {:>7} {:>10.3}",
            name,
            as_f64(&row[1]),
            as_f64(&row[2]),
            as_f64(&row[3]),
            as_f64(&row[4]),
            as_f64(&row[5])
        );
    }
    let _ = writeln!(s, "\nStructural resonances: {} modes", ctx.resonances.len());
    s.push_str(&resonance_notes(ctx, limit.as_ref()));

    fs::create_dir_all(ctx.out_dir())?;
    let path = ctx.out_dir().join("summary.txt");
    fs::write(&path, &s)?;
    print!("{s}");
    println!("wrote {}", path.display());
    Ok(())
}

fn as_f64(c: &Cell) -> f64 {
    match c {
        Cell::Int(v) => *v as f64,
        Cell::Float(v) => *v,
        Cell::Text(_) => f64::NAN,
    }
}
