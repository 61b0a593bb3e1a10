//! Classical MIS cost, the diagonal Rydberg energy and interaction terms.
//!
//! Frequencies are angular (rad/us) with hbar = 1, lengths in um.

use crate::device::DeviceSpec;
use crate::error::{invalid, Error, Result};
use crate::instance::DuggInstance;

pub const DEFAULT_PENALTY: f64 = 2.0;
/// Default interaction cutoff in units of the lattice constant.
pub const DEFAULT_CUTOFF_SPACINGS: f64 = 2.5;
const DISTANCE_REL_TOL: f64 = 1e-9;

/// Weights of the diagonal cost `sum_i w_i x_i + sum_(i,j) in E l_ij x_i x_j`.
///
/// `pair_weights` is aligned with the instance edge list, so pair terms only
/// ever sit on graph edges.
#[derive(Debug, Clone, PartialEq)]
pub struct CostModel {
    pub linear_weights: Vec<f64>,
    pub pair_weights: Vec<f64>,
    pub penalty: f64,
}

impl CostModel {
    /// Unit vertex weights and `-penalty` on every edge.
    pub fn mis(instance: &DuggInstance, penalty: f64) -> Result<Self> {
        if !(penalty > 1.0) {
            return Err(invalid(format!("penalty must exceed 1, got {penalty}")));
        }
        Ok(Self {
            linear_weights: vec![1.0; instance.n_qubits()],
            pair_weights: vec![-penalty; instance.edges.len()],
            penalty,
        })
    }
}

/// Classical cost, higher is better. Independent sets score their size.
pub fn cost_value(bits: &[bool], instance: &DuggInstance, cost: &CostModel) -> Result<f64> {
    let n = instance.n_qubits();
    if bits.len() != n {
        return Err(Error::LengthMismatch { expected: n, got: bits.len() });
    }
    if cost.linear_weights.len() != n || cost.pair_weights.len() != instance.edges.len() {
        return Err(invalid("cost model does not match instance"));
    }
    let linear: f64 = bits
        .iter()
        .zip(&cost.linear_weights)
        .filter(|(&b, _)| b)
        .map(|(_, w)| w)
        .sum();
    let pairs: f64 = instance
        .edges
        .iter()
        .zip(&cost.pair_weights)
        .filter(|(&(i, j), _)| bits[i] && bits[j])
        .map(|(_, l)| l)
        .sum();
    Ok(linear + pairs)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interaction {
    pub i: usize,
    pub j: usize,
    pub v: f64,
}

/// Geometry-dependent part of the Rydberg Hamiltonian.
///
/// The drive enters uniformly as `Omega(t)/2` on every sigma_x and
/// `-Delta(t)` on every occupation operator; only the van der Waals couplings
/// `V_ij = C6 / R_ij^6` are stored, for pairs within the cutoff.
#[derive(Debug, Clone, PartialEq)]
pub struct RydbergTerms {
    pub n_qubits: usize,
    pub interactions: Vec<Interaction>,
}

impl RydbergTerms {
    /// Dense symmetric coupling matrix, row-major `n x n`.
    pub fn coupling_matrix(&self) -> Vec<f64> {
        let n = self.n_qubits;
        let mut m = vec![0.0; n * n];
        for &Interaction { i, j, v } in &self.interactions {
            m[i * n + j] += v;
            m[j * n + i] += v;
        }
        m
    }
}

pub fn default_cutoff_um(instance: &DuggInstance) -> f64 {
    DEFAULT_CUTOFF_SPACINGS * instance.spacing_um
}

/// Interaction terms for `instance` laid out at its own spacing on `device`.
///
/// Pass `f64::INFINITY` as the cutoff to keep every pair.
pub fn build_rydberg_terms(
    instance: &DuggInstance,
    device: &DeviceSpec,
    cutoff_um: f64,
) -> Result<RydbergTerms> {
    let n = instance.n_qubits();
    if n > device.max_atoms {
        return Err(Error::DeviceConstraint(format!(
            "{n} atoms exceed {} limit of {}",
            device.name, device.max_atoms
        )));
    }
    if instance.spacing_um < device.a_min_um * (1.0 - DISTANCE_REL_TOL) {
        return Err(Error::DeviceConstraint(format!(
            "spacing {} um below {} minimum {} um",
            instance.spacing_um, device.name, device.a_min_um
        )));
    }
    let pos = instance.positions_um();
    let mut interactions = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let r = (pos[i].0 - pos[j].0).hypot(pos[i].1 - pos[j].1);
            if r < device.a_min_um * (1.0 - DISTANCE_REL_TOL) {
                return Err(Error::DeviceConstraint(format!(
                    "atoms {i} and {j} are {r} um apart, below {} um",
                    device.a_min_um
                )));
            }
            if r <= cutoff_um * (1.0 + DISTANCE_REL_TOL) {
                interactions.push(Interaction { i, j, v: device.c6 / r.powi(6) });
            }
        }
    }
    Ok(RydbergTerms { n_qubits: n, interactions })
}

/// Lattice constant on the destination device giving the same C6 / a^6.
pub fn calibrate_spacing(c6_src: f64, a_src_um: f64, c6_dst: f64) -> Result<f64> {
    for (name, v) in [("c6_src", c6_src), ("a_src", a_src_um), ("c6_dst", c6_dst)] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(invalid(format!("{name} must be positive, got {v}")));
        }
    }
    Ok(a_src_um * (c6_dst / c6_src).powf(1.0 / 6.0))
}

/// `-delta * sum n_i + sum V_ij n_i n_j` for one basis configuration.
pub fn diagonal_energy(bits: &[bool], terms: &RydbergTerms, delta: f64) -> Result<f64> {
    if bits.len() != terms.n_qubits {
        return Err(Error::LengthMismatch { expected: terms.n_qubits, got: bits.len() });
    }
    let excited = bits.iter().filter(|&&b| b).count() as f64;
    let interaction: f64 = terms
        .interactions
        .iter()
        .filter(|t| bits[t.i] && bits[t.j])
        .map(|t| t.v)
        .sum();
    Ok(-delta * excited + interaction)
}
