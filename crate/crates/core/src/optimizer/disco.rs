use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::OptimizerConfig;
use super::record::{MoveDetail, MoveKind, MoveRecord};
use super::search::{basin_hop, cyclic, metropolis, mutation, mutation_sweep, swap, swap_sweep, Context, MoveOutcome, Point};
use crate::ansatz::Ansatz;
use crate::error::{Error, Result};
use crate::hamiltonian::SectorHamiltonian;
use crate::pool::PoolTables;

/// Seed of restart `r` derived from the configured seed.
pub fn restart_seed(seed: u64, restart: usize) -> u64 {
    let mut z = seed.wrapping_add((restart as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestartSummary {
    pub restart: usize,
    pub seed: u64,
    pub energy: f64,
    pub certified: bool,
    pub cycles: usize,
    pub relaxations: usize,
}

/// Best configuration found by the search.
#[derive(Debug, Clone)]
pub struct Biminimum {
    pub ansatz: Ansatz,
    pub energy: f64,
    pub grad_norm: f64,
    pub certified: bool,
    pub restart: usize,
    pub seed: u64,
    pub move_history: Vec<MoveRecord>,
    pub restarts: Vec<RestartSummary>,
}

pub(crate) fn to_ansatz(tables: &PoolTables, p: &Point, reference: usize) -> Ansatz {
    Ansatz {
        sequence: p.indices.iter().map(|&k| tables.pool().get(k)).collect(),
        amplitudes: p.amplitudes.clone(),
        reference,
    }
}

struct RunResult {
    best: Point,
    certified: bool,
    cycles: usize,
    relaxations: usize,
    history: Vec<MoveRecord>,
}

/// Runs `config.restarts` seeded searches and returns the lowest.
pub fn disco_vqe(
    ham: &SectorHamiltonian,
    tables: &PoolTables,
    reference: usize,
    config: &OptimizerConfig,
) -> Result<Biminimum> {
    config.validate()?;
    if tables.dim() != ham.dim() {
        return Err(Error::dim(ham.dim(), tables.dim()));
    }
    if reference >= ham.dim() {
        return Err(Error::InvalidArgument(format!("reference index {reference} outside the sector")));
    }
    if tables.pool().is_empty() {
        return Err(Error::InvalidArgument("operator pool is empty".into()));
    }
    let ctx = Context {
        ham,
        tables,
        reference,
        config,
    };
    let mut summaries = Vec::with_capacity(config.restarts);
    let mut history = Vec::new();
    let mut best: Option<(usize, u64, RunResult)> = None;
    for r in 0..config.restarts {
        let seed = restart_seed(config.rng_seed, r);
        let run = single_run(&ctx, r, seed);
        summaries.push(RestartSummary {
            restart: r,
            seed,
            energy: run.best.energy,
            certified: run.certified,
            cycles: run.cycles,
            relaxations: run.relaxations,
        });
        history.extend(run.history.iter().cloned());
        let better = match &best {
            None => true,
            Some((_, _, b)) => run.best.energy < b.best.energy - config.energy_tolerance,
        };
        if better {
            best = Some((r, seed, run));
        }
        if let Some(target) = config.target_energy {
            if best.as_ref().is_some_and(|(_, _, b)| b.best.energy <= target) {
                break;
            }
        }
    }
    let (restart, seed, run) = best.expect("at least one restart");
    Ok(Biminimum {
        ansatz: to_ansatz(tables, &run.best, reference),
        energy: run.best.energy,
        grad_norm: run.best.grad_norm,
        certified: run.certified,
        restart,
        seed,
        move_history: history,
        restarts: summaries,
    })
}

fn single_run(ctx: &Context, restart: usize, seed: u64) -> RunResult {
    let cfg = ctx.config;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pool_len = ctx.tables.pool().len();
    let m = cfg.m_operators;
    let indices: Vec<usize> = (0..m).map(|_| rng.gen_range(0..pool_len)).collect();
    let s = cfg.init_amplitude_scale;
    let amps: Vec<f64> = (0..m).map(|_| if s > 0.0 { rng.gen_range(-s..=s) } else { 0.0 }).collect();

    let mut history = Vec::new();
    let mut relaxations = 1;
    let mut current = ctx.local(indices, amps);
    let mut best = current.clone();
    let record = |kind, detail, accepted, uphill, before: f64, cand: &Point, best: &Point, relax, temp, cycle, rng: &ChaCha8Rng| MoveRecord {
        restart,
        cycle,
        kind,
        detail,
        accepted,
        uphill,
        energy_before: before,
        candidate_energy: cand.energy,
        best_energy: best.energy,
        grad_norm: cand.grad_norm,
        relaxations: relax,
        temperature: temp,
        seed,
        rng_word_pos: rng.get_word_pos().to_string(),
    };
    history.push(record(MoveKind::Initial, MoveDetail::None, true, false, current.energy, &current, &best, 1, 0.0, 0, &rng));

    let reached = |p: &Point| cfg.target_energy.is_some_and(|t| p.energy <= t);
    if m == 0 || reached(&best) {
        return RunResult {
            best,
            certified: m == 0,
            cycles: 0,
            relaxations,
            history,
        };
    }

    let mut temperature = cfg.discrete_temperature;
    let mut certified = false;
    let mut cycles = 0;
    for cycle in 1..=cfg.max_macro_cycles {
        cycles = cycle;
        let before = current.energy;
        let bh = basin_hop(ctx, current, &mut rng);
        relaxations += bh.relaxations;
        current = bh.best;
        if current.energy < best.energy {
            best = current.clone();
        }
        history.push(record(MoveKind::BasinHop, MoveDetail::None, true, false, before, &current, &best, bh.relaxations, cfg.bh_temperature, cycle, &rng));
        if reached(&best) {
            break;
        }

        // certification holds if the same state survives all three moves without a downhill neighbour
        let mut unchanged = current.converged;
        for kind in [MoveKind::Cyclic, MoveKind::Mutation, MoveKind::Swap] {
            let outcome = if cfg.discrete_sweep && kind != MoveKind::Cyclic {
                let sw = if kind == MoveKind::Mutation { mutation_sweep(ctx, &current) } else { swap_sweep(ctx, &current) };
                relaxations += sw.relaxations;
                if !sw.steps.is_empty() {
                    unchanged = false;
                    let per_step = sw.relaxations / sw.steps.len();
                    for (cand, detail) in sw.steps {
                        let before = current.energy;
                        current = cand;
                        if current.energy < best.energy {
                            best = current.clone();
                        }
                        history.push(record(kind, detail, true, false, before, &current, &best, per_step, temperature, cycle, &rng));
                    }
                    continue;
                }
                MoveOutcome {
                    best: sw.best,
                    relaxations: sw.relaxations,
                }
            } else {
                let mv = match kind {
                    MoveKind::Cyclic => cyclic(ctx, &current),
                    MoveKind::Mutation => mutation(ctx, &current),
                    _ => swap(ctx, &current),
                };
                relaxations += mv.relaxations;
                mv
            };
            let Some((cand, detail)) = outcome.best else {
                continue;
            };
            let delta = cand.energy - current.energy;
            let downhill = delta < -cfg.energy_tolerance;
            // uphill draws happen only for non-downhill candidates
            let accepted = downhill || (delta > cfg.energy_tolerance && metropolis(delta, temperature, &mut rng));
            let before = current.energy;
            if accepted {
                unchanged = false;
                current = cand.clone();
                if current.energy < best.energy {
                    best = current.clone();
                }
            }
            history.push(record(kind, detail, accepted, accepted && !downhill, before, &cand, &best, outcome.relaxations, temperature, cycle, &rng));
        }
        if reached(&best) {
            break;
        }
        if unchanged {
            if current.energy <= best.energy + cfg.energy_tolerance {
                best = current.clone();
                certified = true;
                break;
            }
            let before = current.energy;
            current = best.clone();
            history.push(record(MoveKind::ReturnToBest, MoveDetail::None, true, false, before, &current, &best, 0, temperature, cycle, &rng));
        }
        temperature *= cfg.discrete_annealing;
    }
    RunResult {
        best,
        certified,
        cycles,
        relaxations,
        history,
    }
}
