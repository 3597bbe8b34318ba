//! Structural resonances of an induction motor and the force frequencies that
//! can excite them.
//!
//! Stator core modes use the infinite-cylinder ring model; housing modes use
//! the Donnell–Mushtari characteristic cubic in `P²` for a finite cylinder.
//! Force-frequency predictors cover stator time harmonics, rotor slot
//! harmonics and carrier sidebands, and [`resonance_risk`] scores how close
//! the lines of a spectrum land to the structural resonances.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;

use crate::error::{invalid, Error, Result};
use crate::spectral::HarmonicTable;

pub const DEFAULT_RISK_WINDOW_HZ: f64 = 75.0;
pub const DEFAULT_RISK_THRESHOLD_PCT: f64 = 0.5;

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(invalid(name, format!("must be > 0, got {v}")))
    }
}

/// Stator core dimensions (metres) and slotting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StatorGeometry {
    /// Mean core diameter D_c.
    pub d_c: f64,
    /// Yoke thickness h_c.
    pub h_c: f64,
    /// Core length L_s.
    pub l_s: f64,
    pub s1: u32,
    pub s2: u32,
    /// Pole pairs.
    pub p: u32,
    /// Tooth height h_t (reported only).
    pub h_t: f64,
    /// Tooth width c_t (reported only).
    pub c_t: f64,
}

impl Default for StatorGeometry {
    fn default() -> Self {
        Self {
            d_c: 0.176,
            h_c: 0.01,
            l_s: 0.25,
            s1: 36,
            s2: 26,
            p: 2,
            h_t: 0.008,
            c_t: 0.0087,
        }
    }
}

impl StatorGeometry {
    pub fn validate(&self) -> Result<()> {
        positive("d_c", self.d_c)?;
        positive("h_c", self.h_c)?;
        positive("l_s", self.l_s)?;
        positive("h_t", self.h_t)?;
        positive("c_t", self.c_t)?;
        for (name, v) in [("s1", self.s1), ("s2", self.s2), ("p", self.p)] {
            if v == 0 {
                return Err(invalid(name, "must be >= 1"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialSpec {
    /// Modulus of elasticity, Pa.
    pub e: f64,
    /// Density, kg/m³.
    pub rho: f64,
    /// Poisson ratio.
    pub nu: f64,
}

impl Default for MaterialSpec {
    fn default() -> Self {
        Self {
            e: 200e9,
            rho: 7700.0,
            nu: 0.3,
        }
    }
}

impl MaterialSpec {
    pub fn validate(&self) -> Result<()> {
        positive("e", self.e)?;
        positive("rho", self.rho)?;
        if !(0.0..0.5).contains(&self.nu) {
            return Err(invalid("nu", format!("must lie in [0, 0.5), got {}", self.nu)));
        }
        Ok(())
    }

    /// Plate wave speed `√(E / (ρ(1 − ν²)))`, m/s.
    pub fn wave_speed(&self) -> f64 {
        (self.e / (self.rho * (1.0 - self.nu * self.nu))).sqrt()
    }
}

/// Frame (casing) dimensions in metres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HousingGeometry {
    /// Mean casing diameter D_f.
    pub d_f: f64,
    /// Casing thickness h_f.
    pub h_f: f64,
    /// Casing length L_f.
    pub l_f: f64,
    pub material: MaterialSpec,
}

impl Default for HousingGeometry {
    fn default() -> Self {
        Self {
            d_f: 0.22,
            h_f: 0.008,
            l_f: 0.3,
            material: MaterialSpec::default(),
        }
    }
}

impl HousingGeometry {
    pub fn validate(&self) -> Result<()> {
        positive("d_f", self.d_f)?;
        positive("h_f", self.h_f)?;
        positive("l_f", self.l_f)?;
        if self.h_f >= self.d_f {
            return Err(invalid("h_f", "casing thickness must be smaller than its diameter"));
        }
        self.material.validate()
    }

    /// Mean casing radius R_f = D_f / 2.
    pub fn r_f(&self) -> f64 {
        self.d_f / 2.0
    }
}

/// Dimensionless thickness parameter `κ² = h_c² / (3·D_c²)`.
pub fn thickness_parameter(g: &StatorGeometry) -> f64 {
    g.h_c * g.h_c / (3.0 * g.d_c * g.d_c)
}

/// Roots of the ring equation of motion for circumferential mode `m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CylinderRoot {
    /// Flexural (lower) branch; used for resonance prediction.
    pub flexural: f64,
    /// Extensional (upper) branch; `None` for the breathing mode `m = 0`.
    pub extensional: Option<f64>,
}

/// `P_m = ½·√((1 + m² + κ²m⁴) ± √((1 + m² + κ²m⁴)² − 4κ²m⁶))`, with `P_0 = 1`.
pub fn cylinder_root(m: u32, kappa_sq: f64) -> Result<CylinderRoot> {
    if !(kappa_sq.is_finite() && kappa_sq >= 0.0) {
        return Err(invalid("kappa_sq", format!("must be >= 0, got {kappa_sq}")));
    }
    if m == 0 {
        return Ok(CylinderRoot {
            flexural: 1.0,
            extensional: None,
        });
    }
    let m = f64::from(m);
    let m2 = m * m;
    let b = 1.0 + m2 + kappa_sq * m2 * m2;
    let c = kappa_sq * m2 * m2 * m2;
    let disc = b * b - 4.0 * c;
    if disc < 0.0 {
        return Err(Error::NumericFailure(format!(
            "negative discriminant {disc} in ring equation for m = {m}"
        )));
    }
    let root = disc.sqrt();
    // b - √disc loses precision when κ²m⁶ is tiny; use the product of roots.
    let upper_sq = b + root;
    let lower_sq = if upper_sq > 0.0 { 4.0 * c / upper_sq } else { 0.0 };
    Ok(CylinderRoot {
        flexural: 0.5 * lower_sq.sqrt(),
        extensional: Some(0.5 * upper_sq.sqrt()),
    })
}

/// Stator ring resonance `f_m = P_m/(π·D_c)·√(E/(ρ(1 − ν²)))` in Hz.
pub fn stator_resonance(m: u32, g: &StatorGeometry, mat: &MaterialSpec) -> Result<f64> {
    stator_resonance_with_mass(m, g, mat, 0.0)
}

/// Stator resonance scaled by the mass-addition factor `1/√(1 + Δ)`.
pub fn stator_resonance_with_mass(
    m: u32,
    g: &StatorGeometry,
    mat: &MaterialSpec,
    mass_addition: f64,
) -> Result<f64> {
    g.validate()?;
    mat.validate()?;
    if !(mass_addition.is_finite() && mass_addition > -1.0) {
        return Err(invalid("mass_addition", format!("must be > -1, got {mass_addition}")));
    }
    let p = cylinder_root(m, thickness_parameter(g))?.flexural;
    Ok(p / (PI * g.d_c) * mat.wave_speed() / (1.0 + mass_addition).sqrt())
}

/// Coefficients of `P⁶ − C₂P⁴ + C₁P² − C₀ = 0` for housing mode `(m, n)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HousingCoefficients {
    pub c2: f64,
    pub c1: f64,
    pub c0: f64,
    pub lambda: f64,
    pub kappa_sq: f64,
    pub l0: f64,
}

/// Donnell–Mushtari coefficients from the casing geometry.
///
/// `λ = 0.5·n·π·(D_f − h_f)/(L_f − L₀)`, `L₀ = L_f·0.3/(n + 0.3)`,
/// thickness parameter `h_f²/(12·R_f²)`.
pub fn housing_coefficients(m: u32, n: u32, hg: &HousingGeometry) -> Result<HousingCoefficients> {
    hg.validate()?;
    if n == 0 {
        return Err(invalid("n", "axial mode must be >= 1"));
    }
    let nf = f64::from(n);
    let l0 = hg.l_f * 0.3 / (nf + 0.3);
    let lambda = 0.5 * nf * PI * (hg.d_f - hg.h_f) / (hg.l_f - l0);
    let kappa_sq = hg.h_f * hg.h_f / (12.0 * hg.r_f() * hg.r_f());
    Ok(donnell_coefficients(f64::from(m), lambda, kappa_sq, hg.material.nu, l0))
}

/// Eq. coefficients for explicit `(m, λ, κ², ν)`; `λ → 0` is allowed.
pub fn donnell_coefficients(m: f64, lambda: f64, kappa_sq: f64, nu: f64, l0: f64) -> HousingCoefficients {
    let m2 = m * m;
    let l2 = lambda * lambda;
    let s = m2 + l2;
    let c2 = 1.0 + 0.5 * (3.0 - nu) * s + kappa_sq * s * s;
    let c1 = 0.5 * (1.0 - nu) * ((3.0 + 2.0 * nu) * l2 + m2 + s * s)
        + (3.0 - nu) / (1.0 - nu) * kappa_sq * s * s;
    let c0 = 0.5 * (1.0 - nu) * ((1.0 - nu * nu) * l2 * l2 + kappa_sq * s.powi(4));
    HousingCoefficients {
        c2,
        c1,
        c0,
        lambda,
        kappa_sq,
        l0,
    }
}

/// Real roots of `y³ + a·y² + b·y + c = 0`, ascending.
///
/// Uses the trigonometric form when all three roots are real and Cardano's
/// formula otherwise, then polishes each root with Newton steps.
pub fn solve_cubic(a: f64, b: f64, c: f64) -> Vec<f64> {
    let p = b - a * a / 3.0;
    let q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    let shift = -a / 3.0;
    let disc = (q / 2.0).powi(2) + (p / 3.0).powi(3);
    let scale = 1.0 + a.abs().max(b.abs()).max(c.abs());
    let mut roots = if p.abs() <= f64::EPSILON * scale && q.abs() <= f64::EPSILON * scale {
        vec![shift; 3]
    } else if disc <= 1e-12 * ((q / 2.0).powi(2) + (p / 3.0).abs().powi(3)) {
        let r = (-p / 3.0).sqrt();
        let arg = if r > 0.0 {
            (3.0 * q / (2.0 * p * r)).clamp(-1.0, 1.0)
        } else {
            0.0
        };
        let phi = arg.acos() / 3.0;
        (0..3)
            .map(|k| 2.0 * r * (phi - 2.0 * PI * f64::from(k) / 3.0).cos() + shift)
            .collect()
    } else {
        let sq = disc.sqrt();
        let u = (-q / 2.0 + sq).cbrt();
        let v = (-q / 2.0 - sq).cbrt();
        vec![u + v + shift]
    };
    for y in &mut roots {
        for _ in 0..4 {
            let f = ((*y + a) * *y + b) * *y + c;
            let df = (3.0 * *y + 2.0 * a) * *y + b;
            if df == 0.0 || f == 0.0 {
                break;
            }
            let next = *y - f / df;
            if !next.is_finite() || (((next + a) * next + b) * next + c).abs() > f.abs() {
                break;
            }
            *y = next;
        }
    }
    roots.sort_by(f64::total_cmp);
    roots
}

/// Housing natural frequency of mode `(m, n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HousingMode {
    pub m: u32,
    pub n: u32,
    pub coefficients: HousingCoefficients,
    /// Real roots in `P²`, ascending and non-negative (one or three).
    pub roots_p_sq: Vec<f64>,
    /// Smallest positive root `P`.
    pub p: f64,
    pub frequency_hz: f64,
}

/// Residual of the characteristic cubic at `P`, scaled by its largest coefficient.
pub fn housing_residual(coeff: &HousingCoefficients, p: f64) -> f64 {
    let y = p * p;
    let r = ((y - coeff.c2) * y + coeff.c1) * y - coeff.c0;
    r.abs() / 1f64.max(coeff.c2).max(coeff.c1).max(coeff.c0)
}

/// Solves the characteristic cubic of housing mode `(m, n)` and converts the
/// smallest positive root to Hz with the casing wave speed.
pub fn housing_resonances(m: u32, n: u32, hg: &HousingGeometry) -> Result<HousingMode> {
    let coefficients = housing_coefficients(m, n, hg)?;
    let (roots_p_sq, p) = housing_roots(&coefficients)?;
    Ok(HousingMode {
        m,
        n,
        coefficients,
        roots_p_sq,
        p,
        frequency_hz: p / (PI * hg.d_f) * hg.material.wave_speed(),
    })
}

/// Non-negative real roots in `P²`, ascending, and the smallest positive `P`.
///
/// The printed coefficients do not guarantee three real roots for every
/// geometry; a complex pair is skipped and the real root kept. Negative
/// roots are dropped.
pub fn housing_roots(coeff: &HousingCoefficients) -> Result<(Vec<f64>, f64)> {
    let scale = 1f64.max(coeff.c2).max(coeff.c1).max(coeff.c0);
    let tiny = 1e-12 * scale;
    let roots: Vec<f64> = solve_cubic(-coeff.c2, coeff.c1, -coeff.c0)
        .into_iter()
        .filter(|&y| y >= -tiny)
        .map(|y| y.max(0.0))
        .collect();
    let smallest = roots.iter().copied().find(|&y| y > tiny).ok_or_else(|| {
        Error::NumericFailure(format!(
            "no positive real root (C2 = {}, C1 = {}, C0 = {})",
            coeff.c2, coeff.c1, coeff.c0
        ))
    })?;
    Ok((roots, smallest.sqrt()))
}

/// Reduced fraction `num/den` with `den > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Rational {
    pub num: i64,
    pub den: i64,
}

impl Rational {
    pub fn new(num: i64, den: i64) -> Self {
        fn gcd(a: i64, b: i64) -> i64 {
            if b == 0 {
                a.abs()
            } else {
                gcd(b, a % b)
            }
        }
        let g = gcd(num, den).max(1) * den.signum();
        Self {
            num: num / g,
            den: den / g,
        }
    }

    pub fn is_integer(&self) -> bool {
        self.den == 1
    }

    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ToothOrders {
    /// `(k, order)` pairs, `k·s₁/p − 1` before `k·s₁/p + 1`.
    pub orders: Vec<(u32, Rational)>,
    /// Set when `s₁` is not divisible by `p`, so orders are fractional.
    pub fractional: bool,
}

/// Stator tooth (slot) harmonic orders `ν = k·s₁/p ± 1`, `k = 1..=k_max`.
pub fn tooth_harmonic_orders(s1: u32, p: u32, k_max: u32) -> Result<ToothOrders> {
    if k_max == 0 {
        return Err(invalid("k_max", "must be >= 1"));
    }
    if p == 0 {
        return Err(invalid("p", "must be >= 1"));
    }
    let (s1, p) = (i64::from(s1), i64::from(p));
    let mut orders = Vec::with_capacity(2 * k_max as usize);
    for k in 1..=k_max {
        let base = i64::from(k) * s1;
        orders.push((k, Rational::new(base - p, p)));
        orders.push((k, Rational::new(base + p, p)));
    }
    Ok(ToothOrders {
        orders,
        fractional: s1 % p != 0,
    })
}

fn sorted_unique(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v.dedup_by(|a, b| (*a - *b).abs() <= 1e-9 * b.abs().max(1.0));
    v
}

fn check_frequency(name: &'static str, f: f64) -> Result<()> {
    if f.is_finite() && f >= 0.0 {
        Ok(())
    } else {
        Err(invalid(name, format!("must be >= 0, got {f}")))
    }
}

/// Stator force frequencies `2f·(2k·m₁ ± 1)`, sorted and de-duplicated.
pub fn stator_force_frequencies(f: f64, m1: u32, k_max: u32) -> Result<Vec<f64>> {
    check_frequency("f", f)?;
    let mut out = Vec::new();
    for k in 1..=k_max {
        let base = 2.0 * f64::from(k) * f64::from(m1);
        out.push(2.0 * f * (base - 1.0).abs());
        out.push(2.0 * f * (base + 1.0));
    }
    Ok(sorted_unique(out))
}

/// Rotor slot force frequencies `2f·(2k·m₁ ± 1)·(s₂/p ± 1)`, all four sign
/// combinations per `k`, sorted and de-duplicated.
pub fn rotor_force_frequencies(f: f64, m1: u32, s2: u32, p: u32, k_max: u32) -> Result<Vec<f64>> {
    check_frequency("f", f)?;
    if p == 0 {
        return Err(invalid("p", "must be >= 1"));
    }
    let slot = f64::from(s2) / f64::from(p);
    let mut out = Vec::new();
    for k in 1..=k_max {
        let base = 2.0 * f64::from(k) * f64::from(m1);
        for time in [base - 1.0, base + 1.0] {
            for space in [slot - 1.0, slot + 1.0] {
                out.push((2.0 * f * time * space).abs());
            }
        }
    }
    Ok(sorted_unique(out))
}

/// Carrier sideband force frequencies `|±(n·f_c ± n'·f) − f|` for
/// `n = 1..=n_max`, `n' = 0..=nprime_max` of opposite parity.
pub fn carrier_sideband_frequencies(f_c: f64, f: f64, n_max: u32, nprime_max: u32) -> Result<Vec<f64>> {
    check_frequency("f_c", f_c)?;
    check_frequency("f", f)?;
    let mut out = Vec::new();
    for n in 1..=n_max {
        for np in (0..=nprime_max).filter(|np| (n + np) % 2 == 1) {
            for inner in [-1.0, 1.0] {
                let electrical = f64::from(n) * f_c + inner * f64::from(np) * f;
                for outer in [-1.0, 1.0] {
                    out.push((outer * electrical - f).abs());
                }
            }
        }
    }
    Ok(sorted_unique(out))
}

/// Origin of a structural resonance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ResonanceSource {
    Stator,
    Housing,
    User,
}

/// A structural natural frequency with its `(m, n)` mode label
/// (`n = 0` for stator ring modes and user-supplied values).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Resonance {
    pub frequency_hz: f64,
    pub mode: (u32, u32),
    pub source: ResonanceSource,
}

/// Stator modes `m = 0..=m_max` and housing modes `m = 0..=m_max`,
/// `n = 1..=n_max`, sorted by frequency.
pub fn resonance_table(
    stator: &StatorGeometry,
    material: &MaterialSpec,
    housing: Option<&HousingGeometry>,
    m_max: u32,
    n_max: u32,
    mass_addition: f64,
) -> Result<Vec<Resonance>> {
    let mut out = Vec::new();
    for m in 0..=m_max {
        out.push(Resonance {
            frequency_hz: stator_resonance_with_mass(m, stator, material, mass_addition)?,
            mode: (m, 0),
            source: ResonanceSource::Stator,
        });
    }
    if let Some(hg) = housing {
        for n in 1..=n_max {
            for m in 0..=m_max {
                out.push(Resonance {
                    frequency_hz: housing_resonances(m, n, hg)?.frequency_hz,
                    mode: (m, n),
                    source: ResonanceSource::Housing,
                });
            }
        }
    }
    out.sort_by(|a, b| a.frequency_hz.total_cmp(&b.frequency_hz));
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RiskEntry {
    pub force_frequency_hz: f64,
    pub nearest_resonance_hz: f64,
    pub mode: (u32, u32),
    pub separation_hz: f64,
    /// Electrical harmonic order that produces the force line.
    pub order: usize,
    pub percent: f64,
    /// `percent² · max(0, 1 − separation/window)`.
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RiskReport {
    pub entries: Vec<RiskEntry>,
    pub score: f64,
}

/// Scores how close the force lines of a spectrum fall to the resonances.
///
/// Every harmonic line of order ≥ 2 with a percent-of-fundamental at or above
/// `threshold_pct` produces force lines at `n·f ± f`. Each force line is
/// matched to its nearest resonance and weighted by
/// `percent²·max(0, 1 − separation/window)`; lines outside every window are
/// dropped. The score is the sum of the weights.
pub fn resonance_risk(
    table: &HarmonicTable,
    resonances: &[Resonance],
    window_hz: f64,
    threshold_pct: f64,
) -> Result<RiskReport> {
    if !(window_hz.is_finite() && window_hz > 0.0) {
        return Err(invalid("window", format!("must be > 0, got {window_hz}")));
    }
    let f = table.fundamental_hz;
    let mut entries = Vec::new();
    if !resonances.is_empty() {
        for line in table
            .entries
            .iter()
            .filter(|e| e.order >= 2 && e.percent_of_fundamental >= threshold_pct)
        {
            for force in [line.frequency_hz - f, line.frequency_hz + f] {
                let nearest = resonances
                    .iter()
                    .min_by(|a, b| {
                        (a.frequency_hz - force)
                            .abs()
                            .total_cmp(&(b.frequency_hz - force).abs())
                    })
                    .expect("non-empty resonances");
                let separation = (nearest.frequency_hz - force).abs();
                let weight = line.percent_of_fundamental.powi(2) * (1.0 - separation / window_hz).max(0.0);
                if weight > 0.0 {
                    entries.push(RiskEntry {
                        force_frequency_hz: force,
                        nearest_resonance_hz: nearest.frequency_hz,
                        mode: nearest.mode,
                        separation_hz: separation,
                        order: line.order,
                        percent: line.percent_of_fundamental,
                        weight,
                    });
                }
            }
        }
    }
    // Float sums start at -0.0; report an empty set as +0.
    let score = entries.iter().map(|e| e.weight).sum::<f64>() + 0.0;
    Ok(RiskReport { entries, score })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thickness_parameter_values() {
        let g = StatorGeometry::default();
        assert!((thickness_parameter(&g) - 1.0761e-3).abs() < 1e-7);
        let thick = StatorGeometry {
            h_c: g.d_c * 3f64.sqrt(),
            ..g
        };
        assert!((thickness_parameter(&thick) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ring_roots_satisfy_quadratic() {
        // (2P)² solves s² − 2b·s + 4c = 0 for both branches.
        for m in 1..8u32 {
            for &k2 in &[0.0, 1e-3, 0.05] {
                let r = cylinder_root(m, k2).unwrap();
                let mf = f64::from(m);
                let b = 1.0 + mf * mf + k2 * mf.powi(4);
                let c = k2 * mf.powi(6);
                for p in [r.flexural, r.extensional.unwrap()] {
                    let s = 4.0 * p * p;
                    assert!((s * s - 2.0 * b * s + 4.0 * c).abs() < 1e-9 * b * b);
                }
                assert!(r.flexural <= r.extensional.unwrap());
            }
        }
        let r = cylinder_root(1, 0.0).unwrap();
        assert_eq!(r.flexural, 0.0);
        assert!((r.extensional.unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(cylinder_root(0, 0.3).unwrap().flexural, 1.0);
    }

    #[test]
    fn breathing_mode_frequency() {
        let f = stator_resonance(0, &StatorGeometry::default(), &MaterialSpec::default()).unwrap();
        assert!((f - 9662.0).abs() / 9662.0 < 0.01, "{f}");
    }

    #[test]
    fn tooth_orders_for_36_slots() {
        let t = tooth_harmonic_orders(36, 2, 2).unwrap();
        let v: Vec<i64> = t.orders.iter().map(|o| o.1.num).collect();
        assert_eq!(v, vec![17, 19, 35, 37]);
        assert!(!t.fractional);
        let t = tooth_harmonic_orders(24, 2, 1).unwrap();
        assert_eq!(t.orders[0].1, Rational::new(11, 1));
        assert_eq!(t.orders[1].1, Rational::new(13, 1));
        let frac = tooth_harmonic_orders(36, 5, 1).unwrap();
        assert!(frac.fractional);
        assert_eq!(frac.orders[0].1, Rational::new(31, 5));
    }

    #[test]
    fn force_frequency_predictors() {
        assert_eq!(stator_force_frequencies(50.0, 3, 1).unwrap(), vec![500.0, 700.0]);
        assert_eq!(stator_force_frequencies(50.0, 3, 2).unwrap(), vec![500.0, 700.0, 1100.0, 1300.0]);
        assert_eq!(stator_force_frequencies(0.0, 3, 2).unwrap(), vec![0.0]);
        let rotor = rotor_force_frequencies(50.0, 3, 26, 2, 1).unwrap();
        assert!(rotor.contains(&7000.0) && rotor.contains(&6000.0));
        assert_eq!(rotor.len(), 4);
        let degenerate = rotor_force_frequencies(50.0, 3, 2, 2, 1).unwrap();
        assert!(degenerate.contains(&0.0) && degenerate.contains(&1000.0));
    }

    #[test]
    fn sideband_examples() {
        assert_eq!(carrier_sideband_frequencies(750.0, 50.0, 1, 0).unwrap(), vec![700.0, 800.0]);
        assert_eq!(
            carrier_sideband_frequencies(750.0, 50.0, 1, 2).unwrap(),
            vec![600.0, 700.0, 800.0, 900.0]
        );
    }

    #[test]
    fn cubic_solver_known_roots() {
        // (y − 1)(y − 2)(y − 3)
        let r = solve_cubic(-6.0, 11.0, -6.0);
        assert_eq!(r.len(), 3);
        for (a, b) in r.iter().zip([1.0, 2.0, 3.0]) {
            assert!((a - b).abs() < 1e-12);
        }
        // y³ − y² = 0
        let r = solve_cubic(-1.0, 0.0, 0.0);
        assert_eq!(r.len(), 3);
        assert!((r[2] - 1.0).abs() < 1e-12 && r[0].abs() < 1e-12);
        // y³ + y + 2 = (y + 1)(y² − y + 2): one real root.
        let r = solve_cubic(0.0, 1.0, 2.0);
        assert_eq!(r.len(), 1);
        assert!((r[0] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn risk_empty_resonances() {
        let t = HarmonicTable::from_lines(50.0, 0.0, vec![(1, 1.0, 0.0), (31, 0.1, 0.0)]);
        let r = resonance_risk(&t, &[], 75.0, 0.5).unwrap();
        assert!(r.entries.is_empty());
        assert_eq!(r.score, 0.0);
        assert!(resonance_risk(&t, &[], 0.0, 0.5).is_err());
    }
}
