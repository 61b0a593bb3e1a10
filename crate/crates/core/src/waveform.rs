//! Control schedules Omega(t), Delta(t) as breakpoint lists.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::units::{frequency_factor, time_factor};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Breakpoint {
    pub t: f64,
    pub omega: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Interpolation {
    /// Straight lines between breakpoints.
    #[default]
    Linear,
    /// Each breakpoint's value holds until the next one.
    Step,
}

/// A schedule in internal units (us, rad/us).
#[derive(Debug, Clone, PartialEq)]
pub struct Waveform {
    breakpoints: Vec<Breakpoint>,
    interpolation: Interpolation,
}

impl Waveform {
    /// Checks that times start at 0 and strictly increase, and that Omega is
    /// non-negative at every breakpoint.
    pub fn new(breakpoints: Vec<Breakpoint>, interpolation: Interpolation) -> Result<Self> {
        if breakpoints.len() < 2 {
            return Err(invalid("waveform needs at least two breakpoints"));
        }
        if breakpoints[0].t != 0.0 {
            return Err(invalid(format!("waveform must start at t = 0, got {}", breakpoints[0].t)));
        }
        for w in breakpoints.windows(2) {
            if !(w[1].t > w[0].t) {
                return Err(invalid(format!(
                    "breakpoint times must strictly increase ({} then {})",
                    w[0].t, w[1].t
                )));
            }
        }
        for b in &breakpoints {
            if !(b.omega >= 0.0) || !b.omega.is_finite() || !b.delta.is_finite() {
                return Err(invalid(format!("bad amplitude at t = {}", b.t)));
            }
        }
        Ok(Self { breakpoints, interpolation })
    }

    pub fn linear(breakpoints: Vec<Breakpoint>) -> Result<Self> {
        Self::new(breakpoints, Interpolation::Linear)
    }

    pub fn breakpoints(&self) -> &[Breakpoint] {
        &self.breakpoints
    }

    pub fn interpolation(&self) -> Interpolation {
        self.interpolation
    }

    pub fn duration(&self) -> f64 {
        self.breakpoints.last().map_or(0.0, |b| b.t)
    }

    /// `(omega, delta)` at time `t`, clamped to the schedule's span.
    pub fn at(&self, t: f64) -> (f64, f64) {
        let bp = &self.breakpoints;
        let k = bp.partition_point(|b| b.t <= t);
        if k == 0 {
            return (bp[0].omega, bp[0].delta);
        }
        if k == bp.len() {
            let last = bp[bp.len() - 1];
            return (last.omega, last.delta);
        }
        let (a, b) = (bp[k - 1], bp[k]);
        match self.interpolation {
            Interpolation::Step => (a.omega, a.delta),
            Interpolation::Linear => {
                let s = (t - a.t) / (b.t - a.t);
                (a.omega + s * (b.omega - a.omega), a.delta + s * (b.delta - a.delta))
            }
        }
    }

    /// Whether Omega starts and ends at zero, as hardware requires.
    pub fn is_hardware_closed(&self) -> bool {
        let (first, last) = (self.breakpoints[0], self.breakpoints[self.breakpoints.len() - 1]);
        first.omega == 0.0 && last.omega == 0.0 && self.interpolation == Interpolation::Linear
    }

    pub fn to_file(&self) -> WaveformFile {
        WaveformFile {
            time_unit: "us".into(),
            frequency_unit: "rad/us".into(),
            interpolation: self.interpolation,
            breakpoints: self.breakpoints.clone(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_file())?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str::<WaveformFile>(text)?.into_waveform()
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        serde_json::from_str::<WaveformFile>(&text)
            .map_err(|source| Error::Parse { path: path.to_path_buf(), line: source.line(), source })?
            .into_waveform()
    }
}

/// Waveform as stored on disk, with unit tags for every column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveformFile {
    pub time_unit: String,
    pub frequency_unit: String,
    #[serde(default)]
    pub interpolation: Interpolation,
    pub breakpoints: Vec<Breakpoint>,
}

impl WaveformFile {
    pub fn into_waveform(self) -> Result<Waveform> {
        let tf = time_factor(&self.time_unit)?;
        let ff = frequency_factor(&self.frequency_unit)?;
        let bps = self
            .breakpoints
            .into_iter()
            .map(|b| Breakpoint { t: b.t * tf, omega: b.omega * ff, delta: b.delta * ff })
            .collect();
        Waveform::new(bps, self.interpolation)
    }
}
