//! Transfer-learned analog QAOA parameters.
//!
//! One schedule is optimized for a whole set of small instances at once: the
//! objective is the mean, over instances, of the final diagonal energy at the
//! target detuning, whose ground states are the maximum independent sets.
//! The search starts from the QAA schedule sampled at the layer midpoints.

use std::cell::RefCell;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::device::DeviceSpec;
use crate::error::{invalid, Error, Result};
use crate::evolve::{Simulator, DEFAULT_DT_US};
use crate::hamiltonian::{build_rydberg_terms, DEFAULT_CUTOFF_SPACINGS};
use crate::instance::DuggInstance;
use crate::nelder_mead::{nelder_mead, OptimizerConfig};
use crate::rng::splitmix64;
use crate::schedule::{build_qaa_schedule, build_qaoa_schedule, QaaParams, QaoaParams};
use crate::state::{sample, StateVector};
use crate::waveform::Interpolation;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum ObjectiveMode {
    /// Exact expectation from the state vector.
    Exact,
    /// Shot estimate; evaluation `k` samples with seed `splitmix64(seed + k)`.
    Sampled { n_shots: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainSettings {
    pub p: usize,
    pub t_tot: f64,
    pub dt_us: f64,
    /// Annealing schedule the search starts from.
    pub start: QaaParams,
    /// Detuning at which the final diagonal energy is scored.
    pub target_delta: f64,
    /// Weight of the quadratic penalty on knobs outside device limits.
    pub penalty_weight: f64,
    pub interpolation: Interpolation,
    pub cutoff_spacings: f64,
    pub objective: ObjectiveMode,
}

impl TrainSettings {
    pub fn new(p: usize, t_tot: f64) -> Self {
        let start = QaaParams::standard(t_tot);
        Self {
            p,
            t_tot,
            dt_us: DEFAULT_DT_US,
            start,
            target_delta: start.delta_fin,
            penalty_weight: 100.0,
            interpolation: Interpolation::Linear,
            cutoff_spacings: DEFAULT_CUTOFF_SPACINGS,
            objective: ObjectiveMode::Exact,
        }
    }

    /// The QAA start discretized onto `p` layers.
    pub fn initial_params(&self) -> Result<QaoaParams> {
        QaoaParams::from_waveform(&build_qaa_schedule(&self.start)?, self.p)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub instance_ids: Vec<String>,
    pub seed: u64,
    pub device: String,
    pub settings: TrainSettings,
    pub config: OptimizerConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainOutcome {
    pub params: QaoaParams,
    pub initial_params: QaoaParams,
    pub initial_objective: f64,
    pub final_objective: f64,
    pub evals: usize,
    pub iterations: usize,
    pub converged: bool,
    pub provenance: Provenance,
}

/// Trained-parameter file layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedParamsFile {
    pub p: usize,
    pub t_tot_us: f64,
    pub omegas: Vec<f64>,
    pub deltas: Vec<f64>,
    pub provenance: Provenance,
}

impl TrainedParamsFile {
    pub fn params(&self) -> Result<QaoaParams> {
        let params = QaoaParams::new(self.omegas.clone(), self.deltas.clone(), self.t_tot_us)?;
        if params.p != self.p {
            return Err(invalid(format!("file declares p = {} but has {} layers", self.p, params.p)));
        }
        Ok(params)
    }
}

impl From<&TrainOutcome> for TrainedParamsFile {
    fn from(o: &TrainOutcome) -> Self {
        Self {
            p: o.params.p,
            t_tot_us: o.params.t_tot,
            omegas: o.params.omegas.clone(),
            deltas: o.params.deltas.clone(),
            provenance: o.provenance.clone(),
        }
    }
}

/// Mean final diagonal energy of a QAOA schedule over a prepared instance set.
pub struct TransferObjective {
    simulators: Vec<Simulator>,
    settings: TrainSettings,
    omega_max: f64,
    delta_abs_max: f64,
    seed: u64,
}

impl TransferObjective {
    pub fn new(
        instances: &[DuggInstance],
        settings: &TrainSettings,
        device: &DeviceSpec,
        seed: u64,
    ) -> Result<Self> {
        if instances.is_empty() {
            return Err(invalid("training needs at least one instance"));
        }
        if settings.p == 0 {
            return Err(invalid("p must be at least 1"));
        }
        let simulators = instances
            .iter()
            .map(|inst| {
                let cutoff = settings.cutoff_spacings * inst.spacing_um;
                Simulator::new(&build_rydberg_terms(inst, device, cutoff)?)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            simulators,
            settings: settings.clone(),
            omega_max: device.omega_max,
            delta_abs_max: device.delta_abs_max,
            seed,
        })
    }

    /// Splits a flat vector into layer knobs, clamping Omega at zero.
    pub fn params_from(&self, x: &[f64]) -> QaoaParams {
        let p = self.settings.p;
        QaoaParams {
            p,
            omegas: x[..p].iter().map(|w| w.max(0.0)).collect(),
            deltas: x[p..].to_vec(),
            t_tot: self.settings.t_tot,
        }
    }

    pub fn penalty(&self, x: &[f64]) -> f64 {
        let p = self.settings.p;
        let sq = |v: f64| if v > 0.0 { v * v } else { 0.0 };
        let omega: f64 = x[..p].iter().map(|&w| sq(-w) + sq(w - self.omega_max)).sum();
        let delta: f64 = x[p..].iter().map(|&d| sq(d.abs() - self.delta_abs_max)).sum();
        self.settings.penalty_weight * (omega + delta)
    }

    /// Final states for every instance under `params`.
    pub fn final_states(&self, params: &QaoaParams) -> Result<Vec<StateVector>> {
        let waveform = build_qaoa_schedule(params, self.settings.interpolation)?;
        self.simulators
            .par_iter()
            .map(|sim| {
                sim.evolve(&waveform, self.settings.dt_us, StateVector::ground(sim.n_qubits())?)
            })
            .collect()
    }

    /// Objective at `x`; `eval_index` picks the shot seed in sampled mode.
    pub fn evaluate(&self, x: &[f64], eval_index: u64) -> Result<f64> {
        let params = self.params_from(x);
        let states = self.final_states(&params)?;
        let delta = self.settings.target_delta;
        let mut energies = Vec::with_capacity(states.len());
        for (sim, state) in self.simulators.iter().zip(&states) {
            let e = match self.settings.objective {
                ObjectiveMode::Exact => sim.expectation(state, delta),
                ObjectiveMode::Sampled { n_shots } => {
                    let shots = sample(state, n_shots, splitmix64(self.seed.wrapping_add(eval_index)))?;
                    let mut total = 0.0;
                    for s in &shots.shots {
                        let basis = StateVector::basis(sim.n_qubits(), s.bits.to_index())?;
                        total += s.count as f64 * sim.expectation(&basis, delta);
                    }
                    total / shots.n_shots as f64
                }
            };
            energies.push(e);
        }
        let mean = energies.iter().sum::<f64>() / energies.len() as f64;
        Ok(mean + self.penalty(x))
    }
}

pub fn train_transfer_params(
    instances: &[DuggInstance],
    settings: &TrainSettings,
    device: &DeviceSpec,
    config: &OptimizerConfig,
    seed: u64,
) -> Result<TrainOutcome> {
    let objective = TransferObjective::new(instances, settings, device, seed)?;
    let initial_params = settings.initial_params()?;
    let x0 = initial_params.to_vector();
    let initial_objective = objective.evaluate(&x0, 0)?;

    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let mut counter = 0u64;
    let result = nelder_mead(
        |x| {
            counter += 1;
            match objective.evaluate(x, counter) {
                Ok(v) => v,
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    f64::NAN
                }
            }
        },
        &x0,
        config,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let result = result?;

    Ok(TrainOutcome {
        params: objective.params_from(&result.x),
        initial_params,
        initial_objective,
        final_objective: result.value,
        evals: result.evals,
        iterations: result.iterations,
        converged: result.converged,
        provenance: Provenance {
            instance_ids: instances.iter().map(|i| i.id.clone()).collect(),
            seed,
            device: device.name.clone(),
            settings: settings.clone(),
            config: config.clone(),
        },
    })
}
