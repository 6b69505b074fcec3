use serde::{Deserialize, Serialize};

use super::lbfgs::LbfgsOptions;
use crate::error::{Error, Result};

/// Settings for the global search and its local minimiser.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OptimizerConfig {
    pub m_operators: usize,
    pub bh_steps_per_cycle: usize,
    pub bh_perturbation_scale: f64,
    pub bh_temperature: f64,
    /// Initial temperature for uphill discrete moves.
    pub discrete_temperature: f64,
    /// Factor applied to the discrete temperature after every macro-cycle.
    pub discrete_annealing: f64,
    pub max_macro_cycles: usize,
    pub grad_tolerance: f64,
    pub energy_tolerance: f64,
    pub rng_seed: u64,
    pub restarts: usize,
    /// Half-width of the uniform distribution for initial amplitudes.
    pub init_amplitude_scale: f64,
    /// Amplitude used when a warm start is not finite.
    pub fallback_amplitude: f64,
    pub max_local_iterations: usize,
    /// Iteration cap for candidate relaxations inside discrete moves.
    pub candidate_max_iterations: Option<usize>,
    pub lbfgs_memory: usize,
    pub max_operators: usize,
    /// Stop a restart once its energy is at or below this value.
    pub target_energy: Option<f64>,
    /// Evaluate discrete candidates on the rayon pool.
    pub parallel: bool,
    /// Apply mutations and swaps position by position instead of once per move.
    pub discrete_sweep: bool,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            m_operators: 0,
            bh_steps_per_cycle: 10,
            bh_perturbation_scale: 0.5,
            bh_temperature: 1e-3,
            discrete_temperature: 5e-3,
            discrete_annealing: 0.9,
            max_macro_cycles: 20,
            grad_tolerance: 1e-9,
            energy_tolerance: 1e-10,
            rng_seed: 0,
            restarts: 5,
            init_amplitude_scale: 0.1,
            fallback_amplitude: 0.05,
            max_local_iterations: 2000,
            candidate_max_iterations: None,
            lbfgs_memory: 20,
            max_operators: 1024,
            target_energy: None,
            parallel: true,
            discrete_sweep: false,
        }
    }
}

impl OptimizerConfig {
    pub fn with_m(m: usize) -> Self {
        Self {
            m_operators: m,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("grad_tolerance", self.grad_tolerance),
            ("energy_tolerance", self.energy_tolerance),
            ("bh_temperature", self.bh_temperature),
            ("discrete_temperature", self.discrete_temperature),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive and finite, got {v}")));
            }
        }
        let non_negative = [
            ("bh_perturbation_scale", self.bh_perturbation_scale),
            ("init_amplitude_scale", self.init_amplitude_scale),
        ];
        for (name, v) in non_negative {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be non-negative and finite, got {v}")));
            }
        }
        if !(self.discrete_annealing > 0.0 && self.discrete_annealing <= 1.0) {
            return Err(Error::Config("discrete_annealing must lie in (0, 1]".into()));
        }
        if !self.fallback_amplitude.is_finite() {
            return Err(Error::Config("fallback_amplitude must be finite".into()));
        }
        if self.restarts == 0 {
            return Err(Error::Config("restarts must be at least 1".into()));
        }
        if self.lbfgs_memory == 0 || self.max_local_iterations == 0 {
            return Err(Error::Config("lbfgs_memory and max_local_iterations must be positive".into()));
        }
        if self.candidate_max_iterations == Some(0) {
            return Err(Error::Config("candidate_max_iterations must be positive".into()));
        }
        if self.m_operators > self.max_operators {
            return Err(Error::Config(format!(
                "m_operators {} exceeds max_operators {}",
                self.m_operators, self.max_operators
            )));
        }
        Ok(())
    }

    pub(crate) fn lbfgs(&self, max_iterations: usize) -> LbfgsOptions {
        LbfgsOptions {
            memory: self.lbfgs_memory,
            grad_tolerance: self.grad_tolerance,
            max_iterations,
            ..LbfgsOptions::default()
        }
    }

    pub(crate) fn candidate_iterations(&self) -> usize {
        self.candidate_max_iterations.unwrap_or(self.max_local_iterations)
    }
}
