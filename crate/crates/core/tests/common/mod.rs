#![allow(dead_code)]

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rydbench::*;

/// Full Hamiltonian at fixed (omega, delta) as a dense real symmetric matrix.
pub fn dense_hamiltonian(terms: &RydbergTerms, omega: f64, delta: f64) -> DMatrix<f64> {
    let n = terms.n_qubits;
    let dim = 1usize << n;
    let mut h = DMatrix::zeros(dim, dim);
    for z in 0..dim {
        let mut diag = -delta * z.count_ones() as f64;
        for t in &terms.interactions {
            if z >> t.i & 1 == 1 && z >> t.j & 1 == 1 {
                diag += t.v;
            }
        }
        h[(z, z)] = diag;
        for q in 0..n {
            h[(z ^ (1 << q), z)] = omega / 2.0;
        }
    }
    h
}

/// Reference propagation: `exp(-i H(t_mid) h)` by eigendecomposition on the
/// same step grid the simulator uses.
pub fn dense_evolve(terms: &RydbergTerms, waveform: &Waveform, dt: f64) -> Vec<Complex64> {
    let dim = 1usize << terms.n_qubits;
    let total = waveform.duration();
    let n_steps = ((total / dt) - 1e-9).ceil().max(1.0) as usize;
    let h = total / n_steps as f64;
    let mut psi = DVector::<Complex64>::zeros(dim);
    psi[0] = Complex64::new(1.0, 0.0);
    for k in 0..n_steps {
        let (omega, delta) = waveform.at((k as f64 + 0.5) * h);
        let eig = SymmetricEigen::new(dense_hamiltonian(terms, omega, delta));
        let v = eig.eigenvectors.map(|x| Complex64::new(x, 0.0));
        let phases = DVector::from_iterator(
            dim,
            eig.eigenvalues.iter().map(|&e| Complex64::from_polar(1.0, -e * h)),
        );
        let coeffs = v.adjoint() * &psi;
        psi = &v * coeffs.component_mul(&phases);
    }
    psi.iter().copied().collect()
}

pub fn fidelity(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<Complex64>().norm_sqr()
}

/// First `count` 4x4 grids at 80% occupation (seeds from `start`) with exactly `n` atoms.
pub fn instances_of_size(n: usize, count: usize, start: u64) -> Vec<DuggInstance> {
    let mut out = Vec::new();
    let mut seed = start;
    while out.len() < count {
        if let Ok(inst) = generate_dugg(4, 4, 0.8, 5.0, seed) {
            if inst.n_qubits() == n {
                out.push(inst);
            }
        }
        seed += 1;
    }
    out
}

/// First `count` 4x4 grids at 70% occupation with 10 to 12 atoms.
pub fn training_instances(count: usize) -> Vec<DuggInstance> {
    let mut out = Vec::new();
    let mut seed = 0;
    while out.len() < count {
        if let Ok(inst) = generate_dugg(4, 4, 0.7, 5.0, seed) {
            if (10..=12).contains(&inst.n_qubits()) {
                out.push(inst);
            }
        }
        seed += 1;
    }
    out
}

pub fn six_atom_block() -> DuggInstance {
    DuggInstance::from_sites("block2x3", 2, 3, 5.0, (0..2).flat_map(|r| (0..3).map(move |c| (r, c))).collect())
        .unwrap()
}
