//! Unit-tagged quantities used by the device, waveform and schedule files.
//!
//! Internally every frequency is angular (rad/us), times are microseconds,
//! lengths micrometres and C6 is rad/us * um^6. Files carry an explicit tag per
//! field and are converted on ingestion.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A numeric value with its unit tag, as it appears on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tagged {
    pub value: f64,
    pub unit: String,
}

impl Tagged {
    pub fn new(value: f64, unit: &str) -> Self {
        Self { value, unit: unit.to_string() }
    }

    pub fn frequency(&self) -> Result<f64> {
        Ok(self.value * frequency_factor(&self.unit)?)
    }

    pub fn c6(&self) -> Result<f64> {
        Ok(self.value * c6_factor(&self.unit)?)
    }

    pub fn time(&self) -> Result<f64> {
        Ok(self.value * time_factor(&self.unit)?)
    }

    pub fn length(&self) -> Result<f64> {
        Ok(self.value * length_factor(&self.unit)?)
    }
}

/// Factor converting a frequency tag into rad/us.
///
/// `MHz` is a cyclic frequency and picks up 2*pi; `rad/us` is taken as-is.
pub fn frequency_factor(unit: &str) -> Result<f64> {
    match unit {
        "rad/us" => Ok(1.0),
        "MHz" | "2pi*MHz" => Ok(TAU),
        "kHz" => Ok(TAU * 1e-3),
        other => Err(Error::UnknownUnit(other.to_string())),
    }
}

pub fn c6_factor(unit: &str) -> Result<f64> {
    match unit {
        "rad/us*um^6" => Ok(1.0),
        "MHz*um^6" | "2pi*MHz*um^6" => Ok(TAU),
        other => Err(Error::UnknownUnit(other.to_string())),
    }
}

pub fn time_factor(unit: &str) -> Result<f64> {
    match unit {
        "us" => Ok(1.0),
        "ns" => Ok(1e-3),
        other => Err(Error::UnknownUnit(other.to_string())),
    }
}

pub fn length_factor(unit: &str) -> Result<f64> {
    match unit {
        "um" => Ok(1.0),
        "nm" => Ok(1e-3),
        other => Err(Error::UnknownUnit(other.to_string())),
    }
}
