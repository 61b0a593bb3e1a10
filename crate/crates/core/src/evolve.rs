//! Time evolution under the Rydberg Hamiltonian
//! `H(t) = Omega(t)/2 sum sigma_x - Delta(t) sum n + sum V_ij n_i n_j`.
//!
//! Each step of length `h` applies the symmetric split
//! `exp(-i D h/2) exp(-i X h) exp(-i D h/2)` with `Omega` and `Delta` taken at
//! the step midpoint. The drive factorizes into exact single-atom rotations,
//! the diagonal part into phases, so every step is unitary to round-off and
//! the global error is second order in `h`.

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::hamiltonian::RydbergTerms;
use crate::state::{expectation_with_table, interaction_table, StateVector};
use crate::waveform::Waveform;

pub const DEFAULT_DT_US: f64 = 1e-3;
/// Registers up to this size keep a precomputed interaction-energy table.
pub const TABLE_QUBIT_LIMIT: usize = 26;
/// Registers up to this size also keep the per-step phase table.
const PHASE_TABLE_QUBIT_LIMIT: usize = 20;

enum Energies {
    Table(Vec<f64>),
    OnTheFly { n: usize, coupling: Vec<f64> },
}

impl Energies {
    fn get(&self, z: usize) -> f64 {
        match self {
            Energies::Table(t) => t[z],
            Energies::OnTheFly { n, coupling } => {
                let mut e = 0.0;
                let mut a = z;
                while a != 0 {
                    let i = a.trailing_zeros() as usize;
                    a &= a - 1;
                    let mut b = a;
                    while b != 0 {
                        let j = b.trailing_zeros() as usize;
                        b &= b - 1;
                        e += coupling[i * n + j];
                    }
                }
                e
            }
        }
    }
}

/// Reusable propagator for one set of interaction terms.
pub struct Simulator {
    n_qubits: usize,
    energies: Energies,
}

impl Simulator {
    pub fn new(terms: &RydbergTerms) -> Result<Self> {
        let n = terms.n_qubits;
        if n > crate::state::SIMULATOR_CAP {
            return Err(Error::SimulatorCapExceeded {
                n_qubits: n,
                cap: crate::state::SIMULATOR_CAP,
            });
        }
        let energies = if n <= TABLE_QUBIT_LIMIT {
            Energies::Table(interaction_table(terms))
        } else {
            Energies::OnTheFly { n, coupling: terms.coupling_matrix() }
        };
        Ok(Self { n_qubits: n, energies })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Exact diagonal expectation `<psi| -delta sum n + sum V n n |psi>`.
    pub fn expectation(&self, state: &StateVector, delta: f64) -> f64 {
        match &self.energies {
            Energies::Table(t) => expectation_with_table(state, t, delta),
            e => state
                .amplitudes()
                .iter()
                .enumerate()
                .map(|(z, a)| a.norm_sqr() * (e.get(z) - delta * z.count_ones() as f64))
                .sum(),
        }
    }

    /// Evolves `initial` over the whole waveform with steps no longer than `dt_us`.
    pub fn evolve(&self, waveform: &Waveform, dt_us: f64, initial: StateVector) -> Result<StateVector> {
        self.evolve_observed(waveform, dt_us, initial, |_, _| {})
    }

    /// As [`Simulator::evolve`], calling `observe(step, state)` after every step.
    pub fn evolve_observed(
        &self,
        waveform: &Waveform,
        dt_us: f64,
        initial: StateVector,
        mut observe: impl FnMut(usize, &StateVector),
    ) -> Result<StateVector> {
        if !(dt_us > 0.0) || !dt_us.is_finite() {
            return Err(invalid(format!("time step must be positive, got {dt_us}")));
        }
        if initial.n_qubits() != self.n_qubits {
            return Err(Error::LengthMismatch { expected: self.n_qubits, got: initial.n_qubits() });
        }
        initial.check_normalized()?;
        let total = waveform.duration();
        let n_steps = ((total / dt_us) - 1e-9).ceil().max(1.0) as usize;
        let h = total / n_steps as f64;

        let interaction_phase: Option<Vec<Complex64>> = match &self.energies {
            Energies::Table(t) if self.n_qubits <= PHASE_TABLE_QUBIT_LIMIT => {
                Some(t.iter().map(|&v| Complex64::from_polar(1.0, -v * h / 2.0)).collect())
            }
            _ => None,
        };

        let mut state = initial;
        let mut detuning_phase = vec![Complex64::new(1.0, 0.0); self.n_qubits + 1];
        for step in 0..n_steps {
            let (omega, delta) = waveform.at((step as f64 + 0.5) * h);
            // exp(+i delta k h/2) for k excited atoms
            let unit = Complex64::from_polar(1.0, delta * h / 2.0);
            for k in 1..=self.n_qubits {
                detuning_phase[k] = detuning_phase[k - 1] * unit;
            }
            self.apply_diagonal(&mut state, interaction_phase.as_deref(), &detuning_phase, h);
            apply_drive(&mut state, omega * h / 2.0);
            self.apply_diagonal(&mut state, interaction_phase.as_deref(), &detuning_phase, h);
            observe(step, &state);
        }
        Ok(state)
    }

    fn apply_diagonal(
        &self,
        state: &mut StateVector,
        interaction_phase: Option<&[Complex64]>,
        detuning_phase: &[Complex64],
        h: f64,
    ) {
        let amps = state.amplitudes_mut();
        match interaction_phase {
            Some(phase) => {
                for (z, (a, p)) in amps.iter_mut().zip(phase).enumerate() {
                    *a *= p * detuning_phase[z.count_ones() as usize];
                }
            }
            None => {
                for (z, a) in amps.iter_mut().enumerate() {
                    let p = Complex64::from_polar(1.0, -self.energies.get(z) * h / 2.0);
                    *a *= p * detuning_phase[z.count_ones() as usize];
                }
            }
        }
    }
}

/// `exp(-i theta sigma_x)` on every atom.
fn apply_drive(state: &mut StateVector, theta: f64) {
    if theta == 0.0 {
        return;
    }
    let (s, c) = theta.sin_cos();
    let n = state.n_qubits();
    let amps = state.amplitudes_mut();
    for q in 0..n {
        let stride = 1usize << q;
        for block in amps.chunks_exact_mut(2 * stride) {
            let (lo, hi) = block.split_at_mut(stride);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                // c*x - i*s*y, c*y - i*s*x
                *a = Complex64::new(c * x.re + s * y.im, c * x.im - s * y.re);
                *b = Complex64::new(c * y.re + s * x.im, c * y.im - s * x.re);
            }
        }
    }
}

/// One-shot evolution; builds a [`Simulator`] for `terms`.
pub fn evolve(
    terms: &RydbergTerms,
    waveform: &Waveform,
    dt_us: f64,
    initial: StateVector,
) -> Result<StateVector> {
    Simulator::new(terms)?.evolve(waveform, dt_us, initial)
}
