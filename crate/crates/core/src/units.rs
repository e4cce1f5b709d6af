//! Trap operating parameters and the dimensionless scales derived from them.

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Atomic mass unit in kilogram.
pub const AMU: f64 = 1.660_539_066_60e-27;
/// Elementary charge in coulomb.
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;

/// Above this `q` the adiabatic secular-frequency formula is flagged.
pub const ADIABATIC_Q_WARN: f64 = 0.3;

/// rf drive, ion species and geometric scale, all in SI units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrapParams {
    /// Ω in rad/s.
    pub rf_angular_frequency: f64,
    /// Peak rf voltage in volt.
    pub rf_peak_voltage: f64,
    /// Ion mass in kilogram.
    pub ion_mass: f64,
    /// Ion charge in coulomb.
    pub ion_charge: f64,
    /// Ion to electrode-plane distance `d` in meter.
    pub ion_plane_distance: f64,
}

/// On-disk representation of [`TrapParams`] in laboratory units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrapConfig {
    pub rf_frequency_hz: f64,
    pub rf_voltage_v: f64,
    pub ion_mass_amu: f64,
    pub ion_charge_e: f64,
    pub height_um: f64,
}

impl TrapParams {
    pub fn new(
        rf_angular_frequency: f64,
        rf_peak_voltage: f64,
        ion_mass: f64,
        ion_charge: f64,
        ion_plane_distance: f64,
    ) -> Result<Self> {
        let p = TrapParams { rf_angular_frequency, rf_peak_voltage, ion_mass, ion_charge, ion_plane_distance };
        p.validate()?;
        Ok(p)
    }

    /// Builds parameters from laboratory units: ordinary rf frequency in Hz,
    /// mass in AMU, charge in units of `e`, height in µm.
    pub fn from_lab_units(
        rf_frequency_hz: f64,
        rf_voltage_v: f64,
        ion_mass_amu: f64,
        ion_charge_e: f64,
        height_um: f64,
    ) -> Result<Self> {
        Self::new(
            2.0 * PI * rf_frequency_hz,
            rf_voltage_v,
            ion_mass_amu * AMU,
            ion_charge_e * ELEMENTARY_CHARGE,
            height_um * 1e-6,
        )
    }

    /// The reference operating point used throughout the documentation:
    /// Ω = 2π·100 MHz, V_rf = 100 V, M = 10 AMU, Q = +e, d = 100 µm.
    pub fn reference() -> Self {
        Self::from_lab_units(100e6, 100.0, 10.0, 1.0, 100.0).expect("reference parameters are valid")
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("rf_angular_frequency", self.rf_angular_frequency),
            ("rf_peak_voltage", self.rf_peak_voltage),
            ("ion_mass", self.ion_mass),
            ("ion_charge", self.ion_charge),
            ("ion_plane_distance", self.ion_plane_distance),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::domain(format!("{name} must be finite and positive, got {v}")));
            }
        }
        Ok(())
    }

    pub fn to_config(&self) -> TrapConfig {
        TrapConfig {
            rf_frequency_hz: self.rf_angular_frequency / (2.0 * PI),
            rf_voltage_v: self.rf_peak_voltage,
            ion_mass_amu: self.ion_mass / AMU,
            ion_charge_e: self.ion_charge / ELEMENTARY_CHARGE,
            height_um: self.ion_plane_distance * 1e6,
        }
    }

    /// Returns a copy with a different ion height.
    pub fn with_distance(&self, d: f64) -> Result<Self> {
        let p = TrapParams { ion_plane_distance: d, ..*self };
        p.validate()?;
        Ok(p)
    }

    pub fn with_rf_voltage(&self, v: f64) -> Result<Self> {
        let p = TrapParams { rf_peak_voltage: v, ..*self };
        p.validate()?;
        Ok(p)
    }

    /// Field unit `V_rf/d` in V/m.
    pub fn field_unit(&self) -> f64 {
        self.rf_peak_voltage / self.ion_plane_distance
    }
}

impl TrapConfig {
    pub fn into_params(self) -> Result<TrapParams> {
        TrapParams::from_lab_units(
            self.rf_frequency_hz,
            self.rf_voltage_v,
            self.ion_mass_amu,
            self.ion_charge_e,
            self.height_um,
        )
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let s = std::fs::read_to_string(path)?;
        Self::from_json_str(&s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaleFactors {
    /// `q0 = 4 V_rf Q / (M Ω² d²)`.
    pub q0: f64,
    /// `U0 = Q² V_rf² / (4 M Ω² d²)` in joule.
    pub u0: f64,
    /// Adiabatic secular frequency at the strongest SE quadrupole, `q = q0/2π`, in Hz.
    pub max_secular_frequency: f64,
}

impl ScaleFactors {
    pub fn u0_ev(&self) -> f64 {
        self.u0 / ELEMENTARY_CHARGE
    }
}

pub fn scale_factors(params: &TrapParams) -> Result<ScaleFactors> {
    params.validate()?;
    let TrapParams {
        rf_angular_frequency: omega,
        rf_peak_voltage: v,
        ion_mass: m,
        ion_charge: q,
        ion_plane_distance: d,
    } = *params;
    let denom = m * omega * omega * d * d;
    let q0 = 4.0 * v * q / denom;
    let u0 = q * v * q0 / 16.0;
    let max_secular_frequency = secular_frequency(q0 / (2.0 * PI), omega)?.frequency_hz;
    Ok(ScaleFactors { q0, u0, max_secular_frequency })
}

/// `v_c = Q V_bias / U0`, the dimensionless rf-bias strength.
pub fn control_bias_strength(bias_voltage: f64, params: &TrapParams) -> Result<f64> {
    let s = scale_factors(params)?;
    Ok(params.ion_charge * bias_voltage / s.u0)
}

/// Inverse of [`control_bias_strength`].
pub fn bias_voltage(v_c: f64, params: &TrapParams) -> Result<f64> {
    let s = scale_factors(params)?;
    Ok(v_c * s.u0 / params.ion_charge)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SecularFrequency {
    /// Ordinary frequency `q Ω / (2π √8)` in Hz.
    pub frequency_hz: f64,
    /// Set when `q` exceeds [`ADIABATIC_Q_WARN`].
    pub beyond_adiabatic: bool,
}

/// Adiabatic secular frequency `q Ω/√8`, converted to Hz.
pub fn secular_frequency(q: f64, rf_angular_frequency: f64) -> Result<SecularFrequency> {
    if !(q.is_finite() && q >= 0.0) {
        return Err(Error::domain(format!("q must be finite and non-negative, got {q}")));
    }
    if !(rf_angular_frequency.is_finite() && rf_angular_frequency > 0.0) {
        return Err(Error::domain("rf angular frequency must be positive"));
    }
    Ok(SecularFrequency {
        frequency_hz: q * rf_angular_frequency / 8f64.sqrt() / (2.0 * PI),
        beyond_adiabatic: q > ADIABATIC_Q_WARN,
    })
}
