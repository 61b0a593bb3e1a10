//! QAA and analog-QAOA schedules and device-limit validation.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::device::DeviceSpec;
use crate::error::{invalid, Result};
use crate::waveform::{Breakpoint, Interpolation, Waveform};

/// Relative slack when comparing amplitudes and durations against limits.
const LIMIT_REL_TOL: f64 = 1e-12;

/// Three-stage annealing schedule: Omega ramps up at fixed `delta_in`,
/// Delta sweeps linearly at fixed `omega_max`, Omega ramps down at `delta_fin`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QaaParams {
    pub omega_max: f64,
    pub delta_in: f64,
    pub delta_fin: f64,
    pub t_rise: f64,
    pub t_sweep: f64,
    pub t_fall: f64,
}

impl QaaParams {
    /// Amplitudes 5.5 / -5.5 / +5.5 rad/us with a 1:6:1 rise/sweep/fall split.
    pub fn standard(t_tot: f64) -> Self {
        Self {
            omega_max: 5.5,
            delta_in: -5.5,
            delta_fin: 5.5,
            t_rise: t_tot / 8.0,
            t_sweep: 0.75 * t_tot,
            t_fall: t_tot / 8.0,
        }
    }

    pub fn t_tot(&self) -> f64 {
        self.t_rise + self.t_sweep + self.t_fall
    }

    pub fn check(&self) -> Result<()> {
        if !(self.delta_in < 0.0 && self.delta_fin > 0.0) {
            return Err(invalid("QAA needs delta_in < 0 < delta_fin"));
        }
        if !(self.t_rise > 0.0 && self.t_sweep > 0.0 && self.t_fall > 0.0) {
            return Err(invalid("QAA stage durations must be positive"));
        }
        if !(self.omega_max >= 0.0) {
            return Err(invalid("QAA omega_max must be non-negative"));
        }
        Ok(())
    }
}

pub fn build_qaa_schedule(params: &QaaParams) -> Result<Waveform> {
    params.check()?;
    let t1 = params.t_rise;
    let t2 = t1 + params.t_sweep;
    let t3 = t2 + params.t_fall;
    Waveform::linear(vec![
        Breakpoint { t: 0.0, omega: 0.0, delta: params.delta_in },
        Breakpoint { t: t1, omega: params.omega_max, delta: params.delta_in },
        Breakpoint { t: t2, omega: params.omega_max, delta: params.delta_fin },
        Breakpoint { t: t3, omega: 0.0, delta: params.delta_fin },
    ])
}

/// Layered analog schedule: layer `k` sets `(omegas[k], deltas[k])`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QaoaParams {
    pub p: usize,
    pub omegas: Vec<f64>,
    pub deltas: Vec<f64>,
    pub t_tot: f64,
}

impl QaoaParams {
    pub fn new(omegas: Vec<f64>, deltas: Vec<f64>, t_tot: f64) -> Result<Self> {
        let p = omegas.len();
        let params = Self { p, omegas, deltas, t_tot };
        params.check()?;
        Ok(params)
    }

    pub fn check(&self) -> Result<()> {
        if self.p == 0 || self.omegas.len() != self.p || self.deltas.len() != self.p {
            return Err(invalid("QAOA needs p >= 1 and p values per knob"));
        }
        if !(self.t_tot > 0.0) {
            return Err(invalid("QAOA total time must be positive"));
        }
        if self.omegas.iter().any(|&w| !(w >= 0.0)) {
            return Err(invalid("QAOA omegas must be non-negative"));
        }
        Ok(())
    }

    /// Samples a waveform at the `p` segment midpoints.
    pub fn from_waveform(waveform: &Waveform, p: usize) -> Result<Self> {
        if p == 0 {
            return Err(invalid("p must be at least 1"));
        }
        let t_tot = waveform.duration();
        let (omegas, deltas) = segment_midpoints(t_tot, p)
            .map(|t| waveform.at(t))
            .unzip();
        Self::new(omegas, deltas, t_tot)
    }

    /// Flattened `[omegas.., deltas..]`.
    pub fn to_vector(&self) -> Vec<f64> {
        self.omegas.iter().chain(&self.deltas).copied().collect()
    }
}

fn segment_midpoints(t_tot: f64, p: usize) -> impl Iterator<Item = f64> {
    (0..p).map(move |k| (k as f64 + 0.5) * t_tot / p as f64)
}

/// Builds the analog QAOA waveform.
///
/// With [`Interpolation::Linear`] the node values sit at segment midpoints
/// and Omega is pinned to zero at both ends (Delta holds its first/last node
/// value there). With [`Interpolation::Step`] each segment is constant.
pub fn build_qaoa_schedule(params: &QaoaParams, interpolation: Interpolation) -> Result<Waveform> {
    params.check()?;
    let (p, t_tot) = (params.p, params.t_tot);
    match interpolation {
        Interpolation::Linear => {
            let mut bps = Vec::with_capacity(p + 2);
            bps.push(Breakpoint { t: 0.0, omega: 0.0, delta: params.deltas[0] });
            for (k, t) in segment_midpoints(t_tot, p).enumerate() {
                bps.push(Breakpoint { t, omega: params.omegas[k], delta: params.deltas[k] });
            }
            bps.push(Breakpoint { t: t_tot, omega: 0.0, delta: params.deltas[p - 1] });
            Waveform::new(bps, Interpolation::Linear)
        }
        Interpolation::Step => {
            let mut bps: Vec<Breakpoint> = (0..p)
                .map(|k| Breakpoint {
                    t: k as f64 * t_tot / p as f64,
                    omega: params.omegas[k],
                    delta: params.deltas[k],
                })
                .collect();
            bps.push(Breakpoint { t: t_tot, omega: 0.0, delta: params.deltas[p - 1] });
            Waveform::new(bps, Interpolation::Step)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    RabiTooLarge { t: f64, value: f64, limit: f64 },
    DetuningTooLarge { t: f64, value: f64, limit: f64 },
    DurationTooLong { value: f64, limit: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::RabiTooLarge { t, value, limit } => {
                write!(f, "Omega = {value} rad/us at t = {t} us exceeds {limit}")
            }
            Violation::DetuningTooLarge { t, value, limit } => {
                write!(f, "|Delta| = {value} rad/us at t = {t} us exceeds {limit}")
            }
            Violation::DurationTooLong { value, limit } => {
                write!(f, "duration {value} us exceeds {limit} us")
            }
        }
    }
}

fn exceeds(value: f64, limit: f64) -> bool {
    value > limit * (1.0 + LIMIT_REL_TOL)
}

/// Hardware-limit check. Reports at most one violation per kind, at the
/// worst breakpoint; both interpolations peak on breakpoints.
pub fn validate_schedule(waveform: &Waveform, device: &DeviceSpec) -> Vec<Violation> {
    let mut out = Vec::new();
    let bps = waveform.breakpoints();
    let worst_omega = bps.iter().max_by(|a, b| a.omega.total_cmp(&b.omega)).unwrap();
    if exceeds(worst_omega.omega, device.omega_max) {
        out.push(Violation::RabiTooLarge {
            t: worst_omega.t,
            value: worst_omega.omega,
            limit: device.omega_max,
        });
    }
    let worst_delta = bps.iter().max_by(|a, b| a.delta.abs().total_cmp(&b.delta.abs())).unwrap();
    if exceeds(worst_delta.delta.abs(), device.delta_abs_max) {
        out.push(Violation::DetuningTooLarge {
            t: worst_delta.t,
            value: worst_delta.delta.abs(),
            limit: device.delta_abs_max,
        });
    }
    if exceeds(waveform.duration(), device.t_max_us) {
        out.push(Violation::DurationTooLong { value: waveform.duration(), limit: device.t_max_us });
    }
    out
}
