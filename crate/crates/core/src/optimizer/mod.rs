//! Local minimisation, basin-hopping, discrete moves, DISCO-VQE and ADAPT-VQE.
//!
//! The public wrappers take and return [`Ansatz`] values; the search itself
//! works on pool indices.

mod adapt;
mod config;
mod disco;
pub mod lbfgs;
mod record;
mod search;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use adapt::{adapt_vqe, selection_gradients, AdaptResult, AdaptTermination};
pub use config::OptimizerConfig;
pub use disco::{disco_vqe, restart_seed, Biminimum, RestartSummary};
pub use record::{read_records, write_records, MoveDetail, MoveKind, MoveRecord};
pub use search::Point;

use crate::ansatz::Ansatz;
use crate::error::{Error, Result};
use crate::hamiltonian::SectorHamiltonian;
use crate::pool::PoolTables;
use search::Context;

/// Result of a continuous or discrete step on an ansatz.
#[derive(Debug, Clone)]
pub struct StepResult {
    pub ansatz: Ansatz,
    pub energy: f64,
    pub grad_norm: f64,
    pub converged: bool,
    /// Candidate relaxations performed.
    pub relaxations: usize,
    pub detail: MoveDetail,
}

fn context<'a>(
    ansatz: &Ansatz,
    ham: &'a SectorHamiltonian,
    tables: &'a PoolTables,
    config: &'a OptimizerConfig,
) -> Result<(Context<'a>, Vec<usize>)> {
    config.validate()?;
    if tables.dim() != ham.dim() {
        return Err(Error::dim(ham.dim(), tables.dim()));
    }
    let idx = ansatz.pool_indices(tables)?;
    if let Some(t) = ansatz.amplitudes.iter().find(|t| !t.is_finite()) {
        return Err(Error::InvalidArgument(format!("non-finite amplitude {t}")));
    }
    Ok((
        Context {
            ham,
            tables,
            reference: ansatz.reference,
            config,
        },
        idx,
    ))
}

fn step(tables: &PoolTables, reference: usize, p: Point, relaxations: usize, detail: MoveDetail) -> StepResult {
    StepResult {
        ansatz: disco::to_ansatz(tables, &p, reference),
        energy: p.energy,
        grad_norm: p.grad_norm,
        converged: p.converged,
        relaxations,
        detail,
    }
}

/// Quasi-Newton relaxation of all amplitudes; the operator sequence is kept.
pub fn local_minimize(
    ansatz: &Ansatz,
    ham: &SectorHamiltonian,
    tables: &PoolTables,
    config: &OptimizerConfig,
) -> Result<StepResult> {
    let (ctx, idx) = context(ansatz, ham, tables, config)?;
    let p = ctx.local(idx, ansatz.amplitudes.clone());
    Ok(step(tables, ansatz.reference, p, 1, MoveDetail::None))
}

/// One basin-hopping cycle seeded from `config.rng_seed`.
pub fn basin_hop(
    ansatz: &Ansatz,
    ham: &SectorHamiltonian,
    tables: &PoolTables,
    config: &OptimizerConfig,
) -> Result<(StepResult, usize)> {
    let (ctx, idx) = context(ansatz, ham, tables, config)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    let start = ctx.local(idx, ansatz.amplitudes.clone());
    let out = search::basin_hop(&ctx, start, &mut rng);
    Ok((step(tables, ansatz.reference, out.best, out.relaxations, MoveDetail::None), out.skipped))
}

fn discrete(
    ansatz: &Ansatz,
    ham: &SectorHamiltonian,
    tables: &PoolTables,
    config: &OptimizerConfig,
    mv: fn(&Context, &Point) -> search::MoveOutcome,
) -> Result<StepResult> {
    let (ctx, idx) = context(ansatz, ham, tables, config)?;
    let (energy, g) = ctx.evaluate(&idx, &ansatz.amplitudes);
    let grad_norm = crate::linalg::max_abs(&g);
    let input = Point {
        indices: idx,
        amplitudes: ansatz.amplitudes.clone(),
        energy,
        grad_norm,
        converged: grad_norm <= config.grad_tolerance,
    };
    let out = mv(&ctx, &input);
    Ok(match out.best {
        Some((p, detail)) => step(tables, ansatz.reference, p, out.relaxations, detail),
        None => step(tables, ansatz.reference, input, 0, MoveDetail::None),
    })
}

/// Lowest relaxed candidate over the `M - 1` nontrivial cyclic rotations.
pub fn cyclic_move(ansatz: &Ansatz, ham: &SectorHamiltonian, tables: &PoolTables, config: &OptimizerConfig) -> Result<StepResult> {
    discrete(ansatz, ham, tables, config, search::cyclic)
}

/// Lowest relaxed candidate over all `M (|pool| - 1)` single-position replacements.
pub fn mutation_move(ansatz: &Ansatz, ham: &SectorHamiltonian, tables: &PoolTables, config: &OptimizerConfig) -> Result<StepResult> {
    discrete(ansatz, ham, tables, config, search::mutation)
}

/// Lowest relaxed candidate over all `M (M - 1) / 2` position swaps.
pub fn swap_move(ansatz: &Ansatz, ham: &SectorHamiltonian, tables: &PoolTables, config: &OptimizerConfig) -> Result<StepResult> {
    discrete(ansatz, ham, tables, config, search::swap)
}
