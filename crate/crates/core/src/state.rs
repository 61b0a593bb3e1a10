//! State vectors over the computational basis of `n` two-level atoms.
//!
//! Basis index bit `i` set means atom `i` is in the Rydberg state.

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::hamiltonian::RydbergTerms;
use crate::rng::{rng_from_seed, uniform01};
use crate::samples::{Bitstring, SampleSet};

/// Largest register the simulator will allocate.
pub const SIMULATOR_CAP: usize = 30;
pub const NORM_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

fn check_cap(n_qubits: usize) -> Result<()> {
    if n_qubits > SIMULATOR_CAP {
        return Err(Error::SimulatorCapExceeded { n_qubits, cap: SIMULATOR_CAP });
    }
    Ok(())
}

impl StateVector {
    /// All atoms in the ground state.
    pub fn ground(n_qubits: usize) -> Result<Self> {
        Self::basis(n_qubits, 0)
    }

    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        check_cap(n_qubits)?;
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(invalid(format!("basis index {index} out of range for {n_qubits} qubits")));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { n_qubits, amps })
    }

    /// Wraps raw amplitudes; the length must be a power of two. No
    /// normalization check is done here.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let dim = amps.len();
        if dim == 0 || !dim.is_power_of_two() {
            return Err(invalid(format!("amplitude count {dim} is not a power of two")));
        }
        let n_qubits = dim.trailing_zeros() as usize;
        check_cap(n_qubits)?;
        Ok(Self { n_qubits, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn check_normalized(&self) -> Result<()> {
        let n = self.norm_sqr();
        if (n - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(n));
        }
        Ok(())
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `|<self|other>|^2`.
    pub fn fidelity(&self, other: &StateVector) -> f64 {
        self.inner(other).norm_sqr()
    }

    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    /// Euclidean distance `||self - other||`.
    pub fn distance(&self, other: &StateVector) -> f64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

/// Interaction energy `sum V_ij n_i n_j` of every basis state.
pub(crate) fn interaction_table(terms: &RydbergTerms) -> Vec<f64> {
    let n = terms.n_qubits;
    let coupling = terms.coupling_matrix();
    let mut table = vec![0.0; 1usize << n];
    for z in 1..table.len() {
        let low = z.trailing_zeros() as usize;
        let rest = z & (z - 1);
        let mut e = table[rest];
        let mut r = rest;
        while r != 0 {
            let j = r.trailing_zeros() as usize;
            e += coupling[low * n + j];
            r &= r - 1;
        }
        table[z] = e;
    }
    table
}

/// Exact `<psi| -delta sum n + sum V n n |psi>`.
pub fn expectation_diagonal(state: &StateVector, terms: &RydbergTerms, delta: f64) -> Result<f64> {
    if state.n_qubits != terms.n_qubits {
        return Err(Error::LengthMismatch { expected: terms.n_qubits, got: state.n_qubits });
    }
    state.check_normalized()?;
    let table = interaction_table(terms);
    Ok(expectation_with_table(state, &table, delta))
}

pub(crate) fn expectation_with_table(state: &StateVector, table: &[f64], delta: f64) -> f64 {
    state
        .amps
        .iter()
        .zip(table)
        .enumerate()
        .map(|(z, (a, v))| a.norm_sqr() * (v - delta * z.count_ones() as f64))
        .sum()
}

/// Draws `n_shots` i.i.d. basis outcomes from `|amp|^2`, deterministically in `seed`.
pub fn sample(state: &StateVector, n_shots: u64, seed: u64) -> Result<SampleSet> {
    if n_shots == 0 {
        return Err(invalid("n_shots must be at least 1"));
    }
    state.check_normalized()?;
    let mut cdf = Vec::with_capacity(state.dim());
    let mut acc = 0.0;
    for a in &state.amps {
        acc += a.norm_sqr();
        cdf.push(acc);
    }
    let last_nonzero = state.amps.iter().rposition(|a| a.norm_sqr() > 0.0).unwrap_or(0);
    let mut counts = vec![0u64; state.dim()];
    let mut rng = rng_from_seed(seed);
    for _ in 0..n_shots {
        let u = uniform01(&mut rng) * acc;
        let idx = cdf.partition_point(|&c| c <= u).min(last_nonzero);
        counts[idx] += 1;
    }
    let n = state.n_qubits;
    Ok(SampleSet::from_counts(
        n,
        counts
            .into_iter()
            .enumerate()
            .filter(|(_, c)| *c > 0)
            .map(|(z, c)| (Bitstring::from_index(z, n), c)),
        seed,
    ))
}
