//! Measured bitstrings and the sampled cost estimator.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};

use crate::error::{invalid, Error, Result};
use crate::hamiltonian::{cost_value, CostModel};
use crate::instance::DuggInstance;

/// Measurement outcome, one entry per atom; `true` is the Rydberg state.
///
/// Printed and serialized as a `0`/`1` string starting with atom 0.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Bitstring(pub Vec<bool>);

impl Bitstring {
    pub fn from_index(index: usize, n: usize) -> Self {
        Self((0..n).map(|i| index >> i & 1 == 1).collect())
    }

    pub fn to_index(&self) -> usize {
        self.0.iter().enumerate().fold(0, |acc, (i, &b)| acc | (b as usize) << i)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn popcount(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }
}

impl fmt::Display for Bitstring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for Bitstring {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(invalid(format!("bad bit character {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Bitstring)
    }
}

impl Serialize for Bitstring {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Bitstring {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Shot {
    pub bits: Bitstring,
    pub count: u64,
    #[serde(default)]
    pub flagged: bool,
}

/// Histogram of measured bitstrings. Shots are kept sorted by
/// `(bits, flagged)` with no duplicate keys.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleSet {
    pub n_qubits: usize,
    pub shots: Vec<Shot>,
    pub n_shots: u64,
    pub seed: u64,
}

impl SampleSet {
    /// Builds a canonical sample set from individual `(bits, flagged)` draws.
    pub fn from_draws(
        n_qubits: usize,
        draws: impl IntoIterator<Item = (Bitstring, bool)>,
        seed: u64,
    ) -> Self {
        let mut hist: BTreeMap<(Bitstring, bool), u64> = BTreeMap::new();
        for key in draws {
            *hist.entry(key).or_default() += 1;
        }
        Self::from_histogram(n_qubits, hist, seed)
    }

    pub fn from_counts(
        n_qubits: usize,
        counts: impl IntoIterator<Item = (Bitstring, u64)>,
        seed: u64,
    ) -> Self {
        let mut hist: BTreeMap<(Bitstring, bool), u64> = BTreeMap::new();
        for (bits, c) in counts {
            *hist.entry((bits, false)).or_default() += c;
        }
        Self::from_histogram(n_qubits, hist, seed)
    }

    fn from_histogram(n_qubits: usize, hist: BTreeMap<(Bitstring, bool), u64>, seed: u64) -> Self {
        let shots: Vec<Shot> = hist
            .into_iter()
            .filter(|(_, c)| *c > 0)
            .map(|((bits, flagged), count)| Shot { bits, count, flagged })
            .collect();
        let n_shots = shots.iter().map(|s| s.count).sum();
        Self { n_qubits, shots, n_shots, seed }
    }

    pub fn is_empty(&self) -> bool {
        self.n_shots == 0
    }

    /// Each shot's key repeated `count` times, in canonical order.
    pub fn expanded(&self) -> impl Iterator<Item = (&Bitstring, bool)> + '_ {
        self.shots
            .iter()
            .flat_map(|s| std::iter::repeat_n((&s.bits, s.flagged), s.count as usize))
    }

    /// Hex SHA-256 over the canonical `bits,flagged,count` lines.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        h.update(format!("{}:{}\n", self.n_qubits, self.n_shots));
        for s in &self.shots {
            h.update(format!("{},{},{}\n", s.bits, s.flagged as u8, s.count));
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn check_lengths(&self) -> Result<()> {
        match self.shots.iter().find(|s| s.bits.len() != self.n_qubits) {
            Some(s) => Err(Error::LengthMismatch { expected: self.n_qubits, got: s.bits.len() }),
            None => Ok(()),
        }
    }
}

/// Shot-weighted mean of the classical cost over all shots.
pub fn estimate_fp(samples: &SampleSet, instance: &DuggInstance, cost: &CostModel) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptySamples);
    }
    let mut total = 0.0;
    for s in &samples.shots {
        total += s.count as f64 * cost_value(s.bits.bits(), instance, cost)?;
    }
    Ok(total / samples.n_shots as f64)
}
