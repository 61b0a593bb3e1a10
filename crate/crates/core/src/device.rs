//! Device specifications for analog neutral-atom processors.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::units::Tagged;

const FRESNEL_JSON: &str = include_str!("../data/devices/pasqal_fresnel.json");
const AQUILA_JSON: &str = include_str!("../data/devices/quera_aquila.json");

/// Hardware limits, stored in internal units (rad/us, um, us).
#[derive(Debug, Clone, PartialEq)]
pub struct DeviceSpec {
    pub name: String,
    pub c6: f64,
    pub max_atoms: usize,
    pub a_min_um: f64,
    pub t_max_us: f64,
    pub omega_max: f64,
    pub delta_abs_max: f64,
}

/// On-disk form with an explicit unit tag on every dimensional field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviceFile {
    pub name: String,
    pub c6: Tagged,
    pub max_atoms: usize,
    pub a_min: Tagged,
    pub t_max: Tagged,
    pub omega_max: Tagged,
    pub delta_abs_max: Tagged,
}

impl TryFrom<DeviceFile> for DeviceSpec {
    type Error = Error;

    fn try_from(f: DeviceFile) -> Result<Self> {
        let spec = DeviceSpec {
            c6: f.c6.c6()?,
            max_atoms: f.max_atoms,
            a_min_um: f.a_min.length()?,
            t_max_us: f.t_max.time()?,
            omega_max: f.omega_max.frequency()?,
            delta_abs_max: f.delta_abs_max.frequency()?,
            name: f.name,
        };
        spec.check()?;
        Ok(spec)
    }
}

impl From<&DeviceSpec> for DeviceFile {
    fn from(d: &DeviceSpec) -> Self {
        DeviceFile {
            name: d.name.clone(),
            c6: Tagged::new(d.c6, "rad/us*um^6"),
            max_atoms: d.max_atoms,
            a_min: Tagged::new(d.a_min_um, "um"),
            t_max: Tagged::new(d.t_max_us, "us"),
            omega_max: Tagged::new(d.omega_max, "rad/us"),
            delta_abs_max: Tagged::new(d.delta_abs_max, "rad/us"),
        }
    }
}

impl DeviceSpec {
    pub fn pasqal_fresnel() -> Self {
        Self::from_json(FRESNEL_JSON).expect("bundled Fresnel spec parses")
    }

    pub fn quera_aquila() -> Self {
        Self::from_json(AQUILA_JSON).expect("bundled Aquila spec parses")
    }

    /// Looks up a bundled device by name (`fresnel`, `aquila`, or the full
    /// `pasqal_fresnel` / `quera_aquila`).
    pub fn bundled(name: &str) -> Option<Self> {
        match name {
            "fresnel" | "pasqal_fresnel" => Some(Self::pasqal_fresnel()),
            "aquila" | "quera_aquila" => Some(Self::quera_aquila()),
            _ => None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: DeviceFile = serde_json::from_str(text)?;
        file.try_into()
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let file: DeviceFile = serde_json::from_str(&text).map_err(|source| Error::Parse {
            path: path.to_path_buf(),
            line: source.line(),
            source,
        })?;
        file.try_into()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&DeviceFile::from(self))?)
    }

    fn check(&self) -> Result<()> {
        let fields = [
            ("c6", self.c6),
            ("a_min", self.a_min_um),
            ("t_max", self.t_max_us),
            ("omega_max", self.omega_max),
            ("delta_abs_max", self.delta_abs_max),
        ];
        for (name, v) in fields {
            if !(v > 0.0) || !v.is_finite() {
                return Err(invalid(format!("device {}: {name} must be positive", self.name)));
            }
        }
        if self.max_atoms == 0 {
            return Err(invalid(format!("device {}: max_atoms must be positive", self.name)));
        }
        Ok(())
    }

    /// Nearest-neighbour interaction C6 / a^6 at lattice constant `a`.
    pub fn interaction_at(&self, distance_um: f64) -> f64 {
        self.c6 / distance_um.powi(6)
    }
}
