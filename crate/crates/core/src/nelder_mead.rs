//! Nelder-Mead downhill simplex minimizer.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub max_evals: usize,
    /// Stop once `f(worst) - f(best)` over the simplex drops below this.
    pub simplex_spread_tol: f64,
    pub reflection: f64,
    pub expansion: f64,
    pub contraction: f64,
    pub shrink: f64,
    /// Initial simplex offset along each axis, relative to `|x0_i|`.
    pub initial_step: f64,
    /// Absolute offset used where `x0_i == 0`.
    pub zero_step: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            max_evals: 2000,
            simplex_spread_tol: 1e-4,
            reflection: 1.0,
            expansion: 2.0,
            contraction: 0.5,
            shrink: 0.5,
            initial_step: 0.05,
            zero_step: 0.00025,
        }
    }
}

impl OptimizerConfig {
    pub fn check(&self) -> Result<()> {
        if self.max_evals == 0 {
            return Err(invalid("max_evals must be positive"));
        }
        if !(self.reflection > 0.0) {
            return Err(invalid("reflection coefficient must be > 0"));
        }
        if !(self.expansion > 1.0) {
            return Err(invalid("expansion coefficient must be > 1"));
        }
        if !(self.contraction > 0.0 && self.contraction < 1.0) {
            return Err(invalid("contraction coefficient must be in (0, 1)"));
        }
        if !(self.shrink > 0.0 && self.shrink < 1.0) {
            return Err(invalid("shrink coefficient must be in (0, 1)"));
        }
        if !(self.simplex_spread_tol >= 0.0) {
            return Err(invalid("spread tolerance must be non-negative"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NelderMeadResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub evals: usize,
    pub iterations: usize,
    /// `true` when the spread criterion fired, `false` when the budget ran out.
    pub converged: bool,
}

struct Counted<F> {
    f: F,
    evals: usize,
    max: usize,
}

impl<F: FnMut(&[f64]) -> f64> Counted<F> {
    /// `Ok(None)` once the evaluation budget is spent.
    fn eval(&mut self, x: &[f64]) -> Result<Option<f64>> {
        if self.evals >= self.max {
            return Ok(None);
        }
        self.evals += 1;
        let v = (self.f)(x);
        if !v.is_finite() {
            return Err(Error::NonFiniteObjective { value: v, point: x.to_vec() });
        }
        Ok(Some(v))
    }
}

fn lerp(from: &[f64], to: &[f64], s: f64) -> Vec<f64> {
    from.iter().zip(to).map(|(a, b)| a + s * (b - a)).collect()
}

/// Minimizes `objective` from `x0`. Deterministic for a given `x0` and config.
pub fn nelder_mead<F>(objective: F, x0: &[f64], config: &OptimizerConfig) -> Result<NelderMeadResult>
where
    F: FnMut(&[f64]) -> f64,
{
    config.check()?;
    let d = x0.len();
    if d == 0 {
        return Err(invalid("cannot optimize over zero parameters"));
    }
    let mut f = Counted { f: objective, evals: 0, max: config.max_evals };

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(d + 1);
    let mut vertices = vec![x0.to_vec()];
    for i in 0..d {
        let mut v = x0.to_vec();
        v[i] += if x0[i] != 0.0 { config.initial_step * x0[i] } else { config.zero_step };
        vertices.push(v);
    }
    for v in vertices {
        match f.eval(&v)? {
            Some(fv) => simplex.push((v, fv)),
            None => break,
        }
    }

    let mut iterations = 0;
    let mut converged = false;
    let (alpha, chi, gamma, sigma) =
        (config.reflection, config.expansion, config.contraction, config.shrink);

    'outer: while simplex.len() == d + 1 {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        if simplex[d].1 - simplex[0].1 <= config.simplex_spread_tol {
            converged = true;
            break;
        }
        iterations += 1;

        let mut centroid = vec![0.0; d];
        for (v, _) in &simplex[..d] {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x / d as f64;
            }
        }
        let worst = simplex[d].clone();
        let reflected = lerp(&centroid, &worst.0, -alpha);
        let Some(fr) = f.eval(&reflected)? else { break };

        if fr < simplex[0].1 {
            let expanded = lerp(&centroid, &reflected, chi);
            let Some(fe) = f.eval(&expanded)? else {
                simplex[d] = (reflected, fr);
                break;
            };
            simplex[d] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
            continue;
        }
        if fr < simplex[d - 1].1 {
            simplex[d] = (reflected, fr);
            continue;
        }
        let (trial, limit) = if fr < worst.1 {
            (lerp(&centroid, &reflected, gamma), fr)
        } else {
            (lerp(&centroid, &worst.0, gamma), worst.1)
        };
        let Some(fc) = f.eval(&trial)? else { break };
        if fc < limit || (fr < worst.1 && fc <= limit) {
            simplex[d] = (trial, fc);
            continue;
        }
        let best = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            let x = lerp(&best, &vertex.0, sigma);
            let Some(fx) = f.eval(&x)? else { break 'outer };
            *vertex = (x, fx);
        }
    }

    let (x, value) = simplex
        .into_iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("at least x0 was evaluated");
    Ok(NelderMeadResult { x, value, evals: f.evals, iterations, converged })
}
