//! State-preparation-and-measurement error channel and shot post-selection.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::rng::{bernoulli, rng_from_seed};
use crate::samples::{Bitstring, SampleSet};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SpamParams {
    /// Preparation error: the atom reads as ground regardless of its state.
    pub eta: f64,
    /// False positive, 0 read as 1.
    pub eps: f64,
    /// False negative, 1 read as 0.
    pub eps_prime: f64,
    /// Per-shot probability of a readout-fault flag.
    pub flag_prob: f64,
}

impl SpamParams {
    pub fn new(eta: f64, eps: f64, eps_prime: f64, flag_prob: f64) -> Result<Self> {
        let p = Self { eta, eps, eps_prime, flag_prob };
        p.check()?;
        Ok(p)
    }

    pub fn check(&self) -> Result<()> {
        for (name, v) in [
            ("eta", self.eta),
            ("eps", self.eps),
            ("eps_prime", self.eps_prime),
            ("flag_prob", self.flag_prob),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(invalid(format!("SPAM {name} must be in [0, 1], got {v}")));
            }
        }
        Ok(())
    }

    pub fn is_ideal(&self) -> bool {
        *self == Self::default()
    }
}

/// Passes every shot through the SPAM channel, one shot at a time in
/// canonical order. Per atom: preparation loss, then the readout flip; then
/// one flag draw per shot. Existing flags are kept.
pub fn apply_spam(samples: &SampleSet, spam: &SpamParams, seed: u64) -> Result<SampleSet> {
    spam.check()?;
    let mut rng = rng_from_seed(seed);
    let mut draws = Vec::with_capacity(samples.n_shots as usize);
    for (bits, flagged) in samples.expanded() {
        let mut out = Vec::with_capacity(bits.len());
        for &b in bits.bits() {
            let prepared = b && !bernoulli(&mut rng, spam.eta);
            let read = if prepared {
                !bernoulli(&mut rng, spam.eps_prime)
            } else {
                bernoulli(&mut rng, spam.eps)
            };
            out.push(read);
        }
        let flag = bernoulli(&mut rng, spam.flag_prob);
        draws.push((Bitstring(out), flagged || flag));
    }
    Ok(SampleSet::from_draws(samples.n_qubits, draws, samples.seed))
}

/// Drops flagged shots.
pub fn post_select(samples: &SampleSet) -> SampleSet {
    let shots: Vec<_> = samples.shots.iter().filter(|s| !s.flagged).cloned().collect();
    let n_shots = shots.iter().map(|s| s.count).sum();
    SampleSet { n_qubits: samples.n_qubits, shots, n_shots, seed: samples.seed }
}
