use serde::{Deserialize, Serialize};

use super::config::OptimizerConfig;
use super::disco::to_ansatz;
use super::search::{Context, Point};
use crate::ansatz::{Ansatz, Evaluator};
use crate::error::{Error, Result};
use crate::hamiltonian::SectorHamiltonian;
use crate::pool::PoolTables;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AdaptTermination {
    /// Every selection gradient fell below the tolerance.
    Converged,
    MaxOperators,
}

#[derive(Debug, Clone)]
pub struct AdaptResult {
    pub ansatz: Ansatz,
    pub energy: f64,
    /// Energy after each addition (entry 0 is the reference energy).
    pub energies: Vec<f64>,
    /// Largest selection gradient at each step.
    pub selection_gradients: Vec<f64>,
    pub selected: Vec<usize>,
    pub termination: AdaptTermination,
}

/// `2 <Hψ| κ_k |ψ>` for every pool operator at the current state.
pub fn selection_gradients(
    ham: &SectorHamiltonian,
    tables: &PoolTables,
    indices: &[usize],
    amplitudes: &[f64],
    reference: usize,
) -> Vec<f64> {
    let mut eval = Evaluator::new(ham, tables);
    let (psi, sigma) = eval.state_and_sigma(indices, amplitudes, reference);
    (0..tables.pool().len())
        .map(|k| 2.0 * tables.generator_matrix_element(k, sigma, psi))
        .collect()
}

/// Greedy growth: append the operator with the largest selection gradient and
/// relax all amplitudes.
pub fn adapt_vqe(
    ham: &SectorHamiltonian,
    tables: &PoolTables,
    reference: usize,
    max_operators: usize,
    selection_tolerance: f64,
    config: &OptimizerConfig,
) -> Result<AdaptResult> {
    config.validate()?;
    if tables.dim() != ham.dim() {
        return Err(Error::dim(ham.dim(), tables.dim()));
    }
    if !(selection_tolerance > 0.0) {
        return Err(Error::Config("selection_tolerance must be positive".into()));
    }
    let ctx = Context {
        ham,
        tables,
        reference,
        config,
    };
    let mut current: Point = ctx.local(Vec::new(), Vec::new());
    let mut energies = vec![current.energy];
    let mut sel = Vec::new();
    let mut selected = Vec::new();
    let termination = loop {
        let g = selection_gradients(ham, tables, &current.indices, &current.amplitudes, reference);
        let (k, gmax) = g
            .iter()
            .enumerate()
            .fold((0, -1.0), |(bk, bv), (k, v)| if v.abs() > bv { (k, v.abs()) } else { (bk, bv) });
        sel.push(gmax);
        if gmax < selection_tolerance {
            break AdaptTermination::Converged;
        }
        if current.indices.len() >= max_operators {
            break AdaptTermination::MaxOperators;
        }
        let mut idx = current.indices.clone();
        let mut amps = current.amplitudes.clone();
        idx.push(k);
        amps.push(0.0);
        let next = ctx.local(idx, amps);
        // relaxation from a warm start cannot rise, but guard against a failed line search
        current = if next.energy <= current.energy {
            next
        } else {
            let mut amps = current.amplitudes.clone();
            amps.push(0.0);
            let mut idx = current.indices.clone();
            idx.push(k);
            Point {
                indices: idx,
                amplitudes: amps,
                ..current
            }
        };
        selected.push(k);
        energies.push(current.energy);
    };
    Ok(AdaptResult {
        ansatz: to_ansatz(tables, &current, reference),
        energy: current.energy,
        energies,
        selection_gradients: sel,
        selected,
        termination,
    })
}
