//! Fixtures shared by the benchmarks.

use rydbench::{generate_dugg, DuggInstance};

/// First seeded square-grid instance with exactly `n` atoms, on a grid one
/// row and column larger than needed.
pub fn instance_with_atoms(n: usize) -> DuggInstance {
    let side = (n as f64).sqrt().ceil() as usize + 1;
    let p = (n as f64 / (side * side) as f64).min(1.0);
    (0..)
        .filter_map(|seed| generate_dugg(side, side, p, 5.0, seed).ok())
        .find(|inst| inst.n_qubits() == n)
        .expect("some seed hits the size")
}
