//! The spin-adapted operator pool and exact exponentials of its generators.
//!
//! Every generator `κ` acts on the sector basis as a set of disjoint two-level
//! rotations: a determinant `d` is coupled to at most one partner `d'` with
//! `κ|d> = s|d'>` and `κ|d'> = -s|d>`, and all other determinants are
//! annihilated. `exp(tκ)` is therefore a product of commuting Givens rotations
//! with angle `t`. The spin-adapted single `κ_p^q + κ_pbar^qbar` is the product
//! of the alpha and beta rotations, which commute.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::fock::{apply_single_excitation, pair_excitation_unchecked, SectorBasis, Spin};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum OperatorKind {
    /// `κ_p^q + κ_pbar^qbar`
    SpinAdaptedSingle,
    /// `κ_{p pbar}^{q qbar}`
    PairedDouble,
}

impl OperatorKind {
    pub fn label(self) -> &'static str {
        match self {
            OperatorKind::SpinAdaptedSingle => "single",
            OperatorKind::PairedDouble => "pair",
        }
    }
}

/// One pool generator, canonicalised with `p < q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OperatorId {
    pub kind: OperatorKind,
    pub p: usize,
    pub q: usize,
}

impl OperatorId {
    pub fn new(kind: OperatorKind, p: usize, q: usize) -> Result<Self> {
        if p >= q {
            return Err(Error::InvalidArgument(format!("operator indices must satisfy p < q (got {p}, {q})")));
        }
        Ok(Self { kind, p, q })
    }

    pub fn single(p: usize, q: usize) -> Self {
        Self::new(OperatorKind::SpinAdaptedSingle, p, q).expect("p < q")
    }

    pub fn pair(p: usize, q: usize) -> Self {
        Self::new(OperatorKind::PairedDouble, p, q).expect("p < q")
    }

    /// True when the two generators touch disjoint spatial orbitals (and hence commute).
    pub fn disjoint(&self, other: &OperatorId) -> bool {
        let a = [self.p, self.q];
        !a.contains(&other.p) && !a.contains(&other.q)
    }
}

impl fmt::Display for OperatorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.kind.label(), self.p, self.q)
    }
}

impl FromStr for OperatorId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split_whitespace().collect();
        let bad = || Error::InvalidArgument(format!("cannot parse operator '{s}'"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let kind = match parts[0] {
            "single" => OperatorKind::SpinAdaptedSingle,
            "pair" => OperatorKind::PairedDouble,
            _ => return Err(bad()),
        };
        let p = parts[1].parse().map_err(|_| bad())?;
        let q = parts[2].parse().map_err(|_| bad())?;
        OperatorId::new(kind, p, q)
    }
}

/// Ordered pool: all singles then all paired doubles, each in lexicographic `(p, q)` order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OperatorPool {
    n_orbitals: usize,
    operators: Vec<OperatorId>,
}

impl OperatorPool {
    pub fn new(n_orbitals: usize) -> Result<Self> {
        if n_orbitals < 2 {
            return Err(Error::InvalidArgument(format!(
                "operator pool needs at least 2 orbitals (got {n_orbitals})"
            )));
        }
        let mut operators = Vec::with_capacity(n_orbitals * (n_orbitals - 1));
        for kind in [OperatorKind::SpinAdaptedSingle, OperatorKind::PairedDouble] {
            for p in 0..n_orbitals {
                for q in p + 1..n_orbitals {
                    operators.push(OperatorId { kind, p, q });
                }
            }
        }
        Ok(Self { n_orbitals, operators })
    }

    pub fn n_orbitals(&self) -> usize {
        self.n_orbitals
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    pub fn operators(&self) -> &[OperatorId] {
        &self.operators
    }

    pub fn get(&self, i: usize) -> OperatorId {
        self.operators[i]
    }

    /// Position of `op` in the pool, in O(1).
    pub fn index_of(&self, op: &OperatorId) -> Result<usize> {
        let n = self.n_orbitals;
        if op.p >= op.q || op.q >= n {
            return Err(Error::OrbitalOutOfRange { index: op.q.max(op.p), n_orbitals: n });
        }
        let within = op.p * (2 * n - op.p - 1) / 2 + (op.q - op.p - 1);
        Ok(match op.kind {
            OperatorKind::SpinAdaptedSingle => within,
            OperatorKind::PairedDouble => n * (n - 1) / 2 + within,
        })
    }

    /// Short content hash identifying the pool enumeration.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        h.update(format!("n_orbitals {}\n", self.n_orbitals));
        for op in &self.operators {
            h.update(format!("{op}\n"));
        }
        h.finalize()[..8].iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// `build_pool` in free-function form.
pub fn build_pool(n_orbitals: usize) -> Result<OperatorPool> {
    OperatorPool::new(n_orbitals)
}

/// One coupled determinant pair: `κ|src> = sign |dst>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation {
    pub src: u32,
    pub dst: u32,
    pub sign: f64,
}

/// Coupled pairs of one generator, one list per spin channel it touches.
#[derive(Debug, Clone)]
pub struct OperatorTable {
    channels: Vec<Vec<Rotation>>,
}

impl OperatorTable {
    pub fn channels(&self) -> &[Vec<Rotation>] {
        &self.channels
    }
}

#[inline]
fn rotate_channel(pairs: &[Rotation], c: f64, s: f64, x: &mut [f64]) {
    for r in pairs {
        let (i, j) = (r.src as usize, r.dst as usize);
        let (a, b) = (x[i], x[j]);
        let ss = s * r.sign;
        x[i] = c * a - ss * b;
        x[j] = c * b + ss * a;
    }
}

/// Precomputed rotation tables for every pool operator on one sector basis.
#[derive(Debug, Clone)]
pub struct PoolTables {
    pool: OperatorPool,
    dim: usize,
    tables: Vec<OperatorTable>,
}

impl PoolTables {
    pub fn new(pool: &OperatorPool, basis: &SectorBasis) -> Result<Self> {
        if pool.n_orbitals() != basis.n_orbitals() {
            return Err(Error::dim(basis.n_orbitals(), pool.n_orbitals()));
        }
        if basis.len() > u32::MAX as usize {
            return Err(Error::DimensionCap { dim: basis.len(), cap: u32::MAX as usize });
        }
        let tables = pool.operators().iter().map(|op| build_table(op, basis)).collect();
        Ok(Self {
            pool: pool.clone(),
            dim: basis.len(),
            tables,
        })
    }

    pub fn pool(&self) -> &OperatorPool {
        &self.pool
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn table(&self, index: usize) -> &OperatorTable {
        &self.tables[index]
    }

    fn check(&self, state: &[f64]) -> Result<()> {
        if state.len() != self.dim {
            return Err(Error::dim(self.dim, state.len()));
        }
        Ok(())
    }

    /// `κ|ψ>` for pool operator `op`.
    pub fn apply_generator(&self, op: &OperatorId, state: &[f64]) -> Result<Vec<f64>> {
        self.check(state)?;
        let idx = self.pool.index_of(op)?;
        let mut y = vec![0.0; self.dim];
        self.generator_into(idx, state, &mut y);
        Ok(y)
    }

    /// `y = κ x` by pool index.
    pub fn generator_into(&self, index: usize, x: &[f64], y: &mut [f64]) {
        y.iter_mut().for_each(|v| *v = 0.0);
        for ch in &self.tables[index].channels {
            for r in ch {
                let (i, j) = (r.src as usize, r.dst as usize);
                y[j] += r.sign * x[i];
                y[i] -= r.sign * x[j];
            }
        }
    }

    /// `exp(t κ)|ψ>`, returned as a new vector.
    pub fn apply_exponential(&self, op: &OperatorId, amplitude: f64, state: &[f64]) -> Result<Vec<f64>> {
        self.check(state)?;
        if !amplitude.is_finite() {
            return Err(Error::InvalidArgument(format!("non-finite amplitude {amplitude}")));
        }
        let idx = self.pool.index_of(op)?;
        let mut out = state.to_vec();
        self.rotate_in_place(idx, amplitude, &mut out);
        Ok(out)
    }

    /// In-place `x <- exp(t κ) x` by pool index. `t == 0` leaves `x` untouched.
    #[inline]
    pub fn rotate_in_place(&self, index: usize, t: f64, x: &mut [f64]) {
        if t == 0.0 {
            return;
        }
        let (s, c) = t.sin_cos();
        for ch in &self.tables[index].channels {
            rotate_channel(ch, c, s, x);
        }
    }

    /// `<σ| κ |ψ>` by pool index, without forming `κψ`.
    #[inline]
    pub fn generator_matrix_element(&self, index: usize, sigma: &[f64], psi: &[f64]) -> f64 {
        let mut acc = 0.0;
        for ch in &self.tables[index].channels {
            for r in ch {
                let (i, j) = (r.src as usize, r.dst as usize);
                acc += r.sign * (sigma[j] * psi[i] - sigma[i] * psi[j]);
            }
        }
        acc
    }
}

fn build_table(op: &OperatorId, basis: &SectorBasis) -> OperatorTable {
    let coupled = |f: &dyn Fn(&crate::fock::Determinant) -> Option<(crate::fock::Determinant, f64)>| {
        basis
            .determinants()
            .iter()
            .enumerate()
            .filter_map(|(i, d)| {
                let (out, sign) = f(d)?;
                let j = basis.index(&out).expect("pool generators preserve the sector");
                Some(Rotation { src: i as u32, dst: j as u32, sign })
            })
            .collect::<Vec<_>>()
    };
    let (p, q) = (op.p, op.q);
    let channels = match op.kind {
        OperatorKind::SpinAdaptedSingle => Spin::BOTH
            .iter()
            .map(|&spin| coupled(&|d| apply_single_excitation(d, p, q, spin)))
            .collect(),
        OperatorKind::PairedDouble => vec![coupled(&|d| pair_excitation_unchecked(d, p, q))],
    };
    OperatorTable { channels }
}
