//! Continuous relaxation, basin-hopping and the discrete neighbourhood moves,
//! all expressed over pool indices.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::config::OptimizerConfig;
use super::lbfgs::{minimize, Termination};
use super::record::MoveDetail;
use crate::ansatz::Evaluator;
use crate::hamiltonian::SectorHamiltonian;
use crate::linalg::max_abs;
use crate::pool::PoolTables;

/// A relaxed (or attempted) point of the search.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    pub indices: Vec<usize>,
    pub amplitudes: Vec<f64>,
    pub energy: f64,
    pub grad_norm: f64,
    pub converged: bool,
}

#[derive(Clone, Copy)]
pub(crate) struct Context<'a> {
    pub ham: &'a SectorHamiltonian,
    pub tables: &'a PoolTables,
    pub reference: usize,
    pub config: &'a OptimizerConfig,
}

impl<'a> Context<'a> {
    pub fn relax(&self, indices: Vec<usize>, amplitudes: Vec<f64>, max_iterations: usize) -> Point {
        let mut eval = Evaluator::new(self.ham, self.tables);
        if indices.is_empty() {
            let energy = eval.energy(&indices, &amplitudes, self.reference);
            return Point {
                indices,
                amplitudes,
                energy,
                grad_norm: 0.0,
                converged: true,
            };
        }
        let reference = self.reference;
        let r = minimize(
            |x, g| eval.energy_gradient(&indices, x, reference, g),
            &amplitudes,
            &self.config.lbfgs(max_iterations),
        );
        let grad_norm = max_abs(&r.grad);
        Point {
            indices,
            amplitudes: r.x,
            energy: r.f,
            grad_norm,
            converged: r.termination == Termination::Converged || grad_norm <= self.config.grad_tolerance,
        }
    }

    pub fn local(&self, indices: Vec<usize>, amplitudes: Vec<f64>) -> Point {
        self.relax(indices, amplitudes, self.config.max_local_iterations)
    }

    pub fn evaluate(&self, indices: &[usize], amplitudes: &[f64]) -> (f64, Vec<f64>) {
        let mut eval = Evaluator::new(self.ham, self.tables);
        let mut g = vec![0.0; indices.len()];
        let e = eval.energy_gradient(indices, amplitudes, self.reference, &mut g);
        (e, g)
    }
}

pub(crate) fn metropolis(delta: f64, temperature: f64, rng: &mut ChaCha8Rng) -> bool {
    if delta <= 0.0 {
        return true;
    }
    let u: f64 = rng.gen();
    u < (-delta / temperature).exp()
}

#[derive(Debug, Clone)]
pub struct BasinHopOutcome {
    pub best: Point,
    pub steps: usize,
    pub accepted: usize,
    /// Steps whose local minimisation did not converge.
    pub skipped: usize,
    pub relaxations: usize,
}

/// Basin-hopping from `start` (which is first relaxed).
pub(crate) fn basin_hop(ctx: &Context, start: Point, rng: &mut ChaCha8Rng) -> BasinHopOutcome {
    let cfg = ctx.config;
    let mut current = if start.converged {
        start
    } else {
        ctx.local(start.indices, start.amplitudes)
    };
    let mut best = current.clone();
    let mut out = BasinHopOutcome {
        best: best.clone(),
        steps: cfg.bh_steps_per_cycle,
        accepted: 0,
        skipped: 0,
        relaxations: 1,
    };
    if current.indices.is_empty() {
        out.steps = 0;
        return out;
    }
    let s = cfg.bh_perturbation_scale;
    for _ in 0..cfg.bh_steps_per_cycle {
        let perturbed: Vec<f64> = current
            .amplitudes
            .iter()
            .map(|t| t + if s > 0.0 { rng.gen_range(-s..=s) } else { 0.0 })
            .collect();
        let trial = ctx.local(current.indices.clone(), perturbed);
        out.relaxations += 1;
        // decision draw is taken unconditionally so the stream does not depend on the outcome
        let u: f64 = rng.gen();
        if !trial.converged || !trial.energy.is_finite() {
            out.skipped += 1;
            continue;
        }
        let delta = trial.energy - current.energy;
        if delta <= 0.0 || u < (-delta / cfg.bh_temperature).exp() {
            out.accepted += 1;
            current = trial;
            if current.energy < best.energy {
                best = current.clone();
            }
        }
    }
    out.best = best;
    out
}

#[derive(Debug, Clone)]
pub struct MoveOutcome {
    /// Lowest candidate after relaxation, or `None` if the neighbourhood is empty.
    pub best: Option<(Point, MoveDetail)>,
    pub relaxations: usize,
}

fn restart_amplitude(cfg: &OptimizerConfig, t: f64) -> f64 {
    if t.is_finite() {
        t
    } else {
        cfg.fallback_amplitude
    }
}

/// Relaxes every candidate and picks the lowest, breaking near-ties
/// (within `energy_tolerance`) by enumeration order.
fn select(ctx: &Context, candidates: Vec<(Vec<usize>, Vec<f64>, MoveDetail)>) -> MoveOutcome {
    let n = candidates.len();
    let iters = ctx.config.candidate_iterations();
    let run = |(idx, amps, detail): (Vec<usize>, Vec<f64>, MoveDetail)| (ctx.relax(idx, amps, iters), detail);
    let relaxed: Vec<(Point, MoveDetail)> = if ctx.config.parallel {
        candidates.into_par_iter().map(run).collect()
    } else {
        candidates.into_iter().map(run).collect()
    };
    let e_min = relaxed
        .iter()
        .map(|(p, _)| p.energy)
        .filter(|e| e.is_finite())
        .fold(f64::INFINITY, f64::min);
    let best = relaxed
        .into_iter()
        .find(|(p, _)| p.energy.is_finite() && p.energy <= e_min + ctx.config.energy_tolerance);
    MoveOutcome { best, relaxations: n }
}

pub(crate) fn cyclic_candidates(p: &Point) -> Vec<(Vec<usize>, Vec<f64>, MoveDetail)> {
    let m = p.indices.len();
    (1..m)
        .map(|r| {
            let idx = (0..m).map(|j| p.indices[(j + r) % m]).collect();
            let amps = (0..m).map(|j| p.amplitudes[(j + r) % m]).collect();
            (idx, amps, MoveDetail::Cyclic { offset: r })
        })
        .collect()
}

pub(crate) fn mutation_candidates(
    cfg: &OptimizerConfig,
    p: &Point,
    pool_len: usize,
) -> Vec<(Vec<usize>, Vec<f64>, MoveDetail)> {
    let mut out = Vec::with_capacity(p.indices.len() * pool_len.saturating_sub(1));
    for i in 0..p.indices.len() {
        for k in 0..pool_len {
            if k == p.indices[i] {
                continue;
            }
            let mut idx = p.indices.clone();
            idx[i] = k;
            let mut amps = p.amplitudes.clone();
            amps[i] = restart_amplitude(cfg, amps[i]);
            out.push((idx, amps, MoveDetail::Mutation { position: i, operator: k }));
        }
    }
    out
}

pub(crate) fn swap_candidates(p: &Point) -> Vec<(Vec<usize>, Vec<f64>, MoveDetail)> {
    let m = p.indices.len();
    let mut out = Vec::with_capacity(m * m.saturating_sub(1) / 2);
    for i in 0..m {
        for j in i + 1..m {
            let mut idx = p.indices.clone();
            let mut amps = p.amplitudes.clone();
            idx.swap(i, j);
            amps.swap(i, j);
            out.push((idx, amps, MoveDetail::Swap { first: i, second: j }));
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub current: Point,
    /// Downhill steps taken, in order.
    pub steps: Vec<(Point, MoveDetail)>,
    /// Lowest candidate of the first position when no step was taken.
    pub best: Option<(Point, MoveDetail)>,
    pub relaxations: usize,
}

/// Position-by-position variant: at each position the best candidate replaces
/// the current state if it lowers the energy by more than `energy_tolerance`.
fn sweep(
    ctx: &Context,
    p: &Point,
    position_candidates: impl Fn(&Point, usize) -> Vec<(Vec<usize>, Vec<f64>, MoveDetail)>,
) -> SweepOutcome {
    let mut out = SweepOutcome {
        current: p.clone(),
        steps: Vec::new(),
        best: None,
        relaxations: 0,
    };
    for i in 0..p.indices.len() {
        let mv = select(ctx, position_candidates(&out.current, i));
        out.relaxations += mv.relaxations;
        let Some((cand, detail)) = mv.best else { continue };
        if cand.energy < out.current.energy - ctx.config.energy_tolerance {
            out.current = cand.clone();
            out.steps.push((cand, detail));
        } else if out.steps.is_empty() && out.best.as_ref().is_none_or(|(b, _)| cand.energy < b.energy) {
            out.best = Some((cand, detail));
        }
    }
    out
}

pub(crate) fn mutation_sweep(ctx: &Context, p: &Point) -> SweepOutcome {
    let pool_len = ctx.tables.pool().len();
    sweep(ctx, p, |cur, i| {
        mutation_candidates(ctx.config, cur, pool_len)
            .into_iter()
            .filter(|c| matches!(c.2, MoveDetail::Mutation { position, .. } if position == i))
            .collect()
    })
}

pub(crate) fn swap_sweep(ctx: &Context, p: &Point) -> SweepOutcome {
    sweep(ctx, p, |cur, i| {
        swap_candidates(cur)
            .into_iter()
            .filter(|c| matches!(c.2, MoveDetail::Swap { first, .. } if first == i))
            .collect()
    })
}

pub(crate) fn cyclic(ctx: &Context, p: &Point) -> MoveOutcome {
    select(ctx, cyclic_candidates(p))
}

pub(crate) fn mutation(ctx: &Context, p: &Point) -> MoveOutcome {
    select(ctx, mutation_candidates(ctx.config, p, ctx.tables.pool().len()))
}

pub(crate) fn swap(ctx: &Context, p: &Point) -> MoveOutcome {
    select(ctx, swap_candidates(p))
}
