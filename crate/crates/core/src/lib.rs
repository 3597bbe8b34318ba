//! Simulation and analysis of carrier-based PWM for cascaded H-bridge
//! multilevel inverters.
//!
//! The crate is organised bottom-up:
//!
//! - [`modulation`]: modulating waves, fixed and truncated frequency-modulated
//!   triangular carriers, and exact comparator event generation.
//! - [`pattern`]: the exact piecewise-constant [`SwitchingPattern`] shared by
//!   every stage.
//! - [`inverter`]: cascaded H-bridge gating for level-shifted, phase-shifted,
//!   harmonic-injected and truncated-FM strategies; phase and line voltages.
//! - [`spectral`]: synchronous sampling, harmonic tables, THD, fundamental RMS
//!   and R-L current spectra.
//! - [`acoustics`]: stator and housing resonances, tooth harmonics, force
//!   frequencies and resonance-proximity risk.

pub mod acoustics;
pub mod error;
pub mod inverter;
pub mod modulation;
pub mod pattern;
pub mod spectral;

pub use error::{Error, Result};
pub use pattern::SwitchingPattern;
