//! Benchmarking analog neutral-atom processors on maximum-independent-set
//! problems over diagonal-connected unit-disk grid graphs (DUGGs).
//!
//! The crate covers the whole pipeline: seeded instance generation and exact
//! solving, Rydberg Hamiltonian assembly, second-order Trotter state-vector
//! evolution, QAA and analog-QAOA schedule construction with Nelder-Mead
//! transfer training, readout-error modelling and the benchmark metrics, plus
//! the campaign runner used by the command-line tool.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod campaign;
pub mod device;
pub mod error;
pub mod evolve;
pub mod hamiltonian;
pub mod instance;
pub mod metrics;
pub mod mis;
pub mod nelder_mead;
pub mod rng;
pub mod samples;
pub mod schedule;
pub mod spam;
pub mod state;
pub mod train;
pub mod units;
pub mod waveform;

pub use device::DeviceSpec;
pub use error::{Error, Result};
pub use evolve::{evolve, Simulator};
pub use hamiltonian::{
    build_rydberg_terms, calibrate_spacing, cost_value, diagonal_energy, CostModel, RydbergTerms,
};
pub use instance::{edges_from_positions, generate_dugg, DuggInstance};
pub use metrics::{
    approximation_ratio, success_probability, valid_fraction, MetricsReport, RatioOutcome,
};
pub use mis::{solve_mis_exact, solve_mis_greedy, MisSolution};
pub use nelder_mead::{nelder_mead, NelderMeadResult, OptimizerConfig};
pub use samples::{estimate_fp, Bitstring, SampleSet, Shot};
pub use schedule::{
    build_qaa_schedule, build_qaoa_schedule, validate_schedule, QaaParams, QaoaParams, Violation,
};
pub use spam::{apply_spam, post_select, SpamParams};
pub use state::{expectation_diagonal, sample, StateVector};
pub use train::{train_transfer_params, TrainOutcome, TrainSettings};
pub use waveform::{Breakpoint, Interpolation, Waveform};
