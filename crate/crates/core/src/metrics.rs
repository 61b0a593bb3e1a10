//! Benchmark metrics over sample sets.
//!
//! Only unflagged shots count as solutions. The approximation ratio is the
//! mean cost of the valid shots over the optimum (with a worst cost of 0);
//! valid fraction and success probability are taken over all shots.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::hamiltonian::{cost_value, CostModel};
use crate::instance::DuggInstance;
use crate::mis::is_independent;
use crate::samples::{Bitstring, SampleSet};

/// Approximation ratio, or the marker that no shot was a valid solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", content = "value", rename_all = "snake_case")]
pub enum RatioOutcome {
    Ratio(f64),
    NoValidSolutions,
}

impl RatioOutcome {
    pub fn value(self) -> Option<f64> {
        match self {
            RatioOutcome::Ratio(r) => Some(r),
            RatioOutcome::NoValidSolutions => None,
        }
    }
}

pub fn approximation_ratio(
    samples: &SampleSet,
    instance: &DuggInstance,
    cost: &CostModel,
    c_opt: f64,
) -> Result<RatioOutcome> {
    if !(c_opt > 0.0) {
        return Err(invalid(format!("optimal cost must be positive, got {c_opt}")));
    }
    let (mut weight, mut total) = (0u64, 0.0);
    for s in samples.shots.iter().filter(|s| !s.flagged) {
        if is_independent(s.bits.bits(), &instance.edges) {
            weight += s.count;
            total += s.count as f64 * cost_value(s.bits.bits(), instance, cost)?;
        }
    }
    if weight == 0 {
        return Ok(RatioOutcome::NoValidSolutions);
    }
    Ok(RatioOutcome::Ratio(total / weight as f64 / c_opt))
}

fn valid_count(samples: &SampleSet, instance: &DuggInstance) -> u64 {
    samples
        .shots
        .iter()
        .filter(|s| !s.flagged && is_independent(s.bits.bits(), &instance.edges))
        .map(|s| s.count)
        .sum()
}

/// Share of shots that are unflagged independent sets; 0 for an empty set.
pub fn valid_fraction(samples: &SampleSet, instance: &DuggInstance) -> f64 {
    if samples.n_shots == 0 {
        return 0.0;
    }
    valid_count(samples, instance) as f64 / samples.n_shots as f64
}

/// Share of shots landing on one of the optimal solutions.
pub fn success_probability(samples: &SampleSet, optimal: &HashSet<Bitstring>) -> Result<f64> {
    if optimal.is_empty() {
        return Err(invalid("optimal solution set is empty"));
    }
    if samples.n_shots == 0 {
        return Ok(0.0);
    }
    let hits: u64 = samples
        .shots
        .iter()
        .filter(|s| !s.flagged && optimal.contains(&s.bits))
        .map(|s| s.count)
        .sum();
    Ok(hits as f64 / samples.n_shots as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub n_shots: u64,
    pub n_valid: u64,
    pub valid_fraction: f64,
    /// `None` when no valid solution was sampled.
    pub approximation_ratio: Option<f64>,
    pub success_probability: f64,
    /// Largest cost among valid shots, `None` without valid shots.
    pub best_cost: Option<f64>,
    pub c_opt: f64,
    pub c_worst: f64,
}

impl MetricsReport {
    pub fn score(
        samples: &SampleSet,
        instance: &DuggInstance,
        cost: &CostModel,
        c_opt: f64,
        optimal: &HashSet<Bitstring>,
    ) -> Result<Self> {
        let n_valid = valid_count(samples, instance);
        let mut best_cost: Option<f64> = None;
        for s in samples.shots.iter().filter(|s| !s.flagged) {
            if is_independent(s.bits.bits(), &instance.edges) {
                let c = cost_value(s.bits.bits(), instance, cost)?;
                best_cost = Some(best_cost.map_or(c, |b| b.max(c)));
            }
        }
        Ok(Self {
            n_shots: samples.n_shots,
            n_valid,
            valid_fraction: valid_fraction(samples, instance),
            approximation_ratio: approximation_ratio(samples, instance, cost, c_opt)?.value(),
            success_probability: if optimal.is_empty() {
                0.0
            } else {
                success_probability(samples, optimal)?
            },
            best_cost,
            c_opt,
            c_worst: 0.0,
        })
    }
}
