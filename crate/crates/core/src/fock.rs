//! Occupation-number determinants and fixed (N_alpha, N_beta) sector bases.
//!
//! Fermionic signs follow a single spin-orbital ordering: every alpha orbital
//! (ascending spatial index) precedes every beta orbital. A creation or
//! annihilation operator on mode `k` picks up `(-1)^m` where `m` is the number
//! of occupied modes that precede `k` in that ordering.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest number of spatial orbitals representable in one machine word per channel.
pub const MAX_ORBITALS: usize = 64;

/// Largest sector dimension the basis builder accepts.
pub const MAX_SECTOR_DIM: u128 = 1 << 28;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Spin {
    Alpha,
    Beta,
}

impl Spin {
    pub const BOTH: [Spin; 2] = [Spin::Alpha, Spin::Beta];
}

/// A Slater determinant as a pair of occupation bitmasks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Determinant {
    pub alpha: u64,
    pub beta: u64,
}

#[inline]
fn below(mask: u64, k: usize) -> u32 {
    (mask & ((1u64 << k) - 1)).count_ones()
}

#[inline]
fn parity(count: u32) -> f64 {
    if count & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

impl Determinant {
    pub fn new(alpha: u64, beta: u64) -> Self {
        Self { alpha, beta }
    }

    #[inline]
    pub fn channel(&self, spin: Spin) -> u64 {
        match spin {
            Spin::Alpha => self.alpha,
            Spin::Beta => self.beta,
        }
    }

    #[inline]
    fn with_channel(mut self, spin: Spin, mask: u64) -> Self {
        match spin {
            Spin::Alpha => self.alpha = mask,
            Spin::Beta => self.beta = mask,
        }
        self
    }

    #[inline]
    pub fn is_occupied(&self, spin: Spin, k: usize) -> bool {
        self.channel(spin) >> k & 1 == 1
    }

    #[inline]
    pub fn is_doubly_occupied(&self, k: usize) -> bool {
        (self.alpha & self.beta) >> k & 1 == 1
    }

    /// Number of occupied spin orbitals preceding mode `(spin, k)`.
    #[inline]
    fn preceding(&self, spin: Spin, k: usize) -> u32 {
        match spin {
            Spin::Alpha => below(self.alpha, k),
            Spin::Beta => self.alpha.count_ones() + below(self.beta, k),
        }
    }

    /// `a_{k,spin} |self>`, or `None` if mode is empty.
    #[inline]
    pub fn annihilate(&self, spin: Spin, k: usize) -> Option<(Determinant, f64)> {
        if !self.is_occupied(spin, k) {
            return None;
        }
        let sign = parity(self.preceding(spin, k));
        Some((self.with_channel(spin, self.channel(spin) & !(1u64 << k)), sign))
    }

    /// `a†_{k,spin} |self>`, or `None` if mode is already occupied.
    #[inline]
    pub fn create(&self, spin: Spin, k: usize) -> Option<(Determinant, f64)> {
        if self.is_occupied(spin, k) {
            return None;
        }
        let sign = parity(self.preceding(spin, k));
        Some((self.with_channel(spin, self.channel(spin) | (1u64 << k)), sign))
    }

    /// Number of doubly occupied spatial orbitals.
    pub fn double_count(&self) -> u32 {
        (self.alpha & self.beta).count_ones()
    }
}

/// `a†_q a_p` within one spin channel.
///
/// Returns `None` when the result vanishes (p empty, or q occupied with q != p).
pub fn apply_single_excitation(
    det: &Determinant,
    p: usize,
    q: usize,
    spin: Spin,
) -> Option<(Determinant, f64)> {
    let (mid, s1) = det.annihilate(spin, p)?;
    let (out, s2) = mid.create(spin, q)?;
    Some((out, s1 * s2))
}

/// `a†_q a†_qbar a_pbar a_p`: moves the opposite-spin pair on `p` to `q`.
pub fn apply_pair_excitation(det: &Determinant, p: usize, q: usize) -> Result<Option<(Determinant, f64)>> {
    if p == q {
        return Err(Error::InvalidArgument(format!(
            "pair excitation requires p != q (got p = q = {p})"
        )));
    }
    Ok(pair_excitation_unchecked(det, p, q))
}

#[inline]
pub(crate) fn pair_excitation_unchecked(det: &Determinant, p: usize, q: usize) -> Option<(Determinant, f64)> {
    let (d1, s1) = det.annihilate(Spin::Alpha, p)?;
    let (d2, s2) = d1.annihilate(Spin::Beta, p)?;
    let (d3, s3) = d2.create(Spin::Beta, q)?;
    let (d4, s4) = d3.create(Spin::Alpha, q)?;
    Some((d4, s1 * s2 * s3 * s4))
}

/// All `n`-bit strings with `k` bits set, in ascending numeric order.
pub fn occupation_strings(n: usize, k: usize) -> Vec<u64> {
    if k > n {
        return Vec::new();
    }
    if k == 0 {
        return vec![0];
    }
    let limit: u128 = 1u128 << n;
    let mut out = Vec::new();
    let mut v: u128 = (1u128 << k) - 1;
    while v < limit {
        out.push(v as u64);
        // Gosper's hack: next integer with the same popcount.
        let c = v & v.wrapping_neg();
        let r = v + c;
        v = (((r ^ v) >> 2) / c) | r;
    }
    out
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Complete determinant basis of a fixed (N_alpha, N_beta) sector.
///
/// Determinants are ordered lexicographically on `(alpha, beta)` read as
/// unsigned integers; index `i = rank(alpha) * n_beta_strings + rank(beta)`.
#[derive(Debug, Clone)]
pub struct SectorBasis {
    n_orbitals: usize,
    n_alpha: usize,
    n_beta: usize,
    alpha_strings: Vec<u64>,
    beta_strings: Vec<u64>,
    alpha_rank: HashMap<u64, usize>,
    beta_rank: HashMap<u64, usize>,
    determinants: Vec<Determinant>,
}

impl SectorBasis {
    pub fn new(n_orbitals: usize, n_alpha: usize, n_beta: usize) -> Result<Self> {
        if n_orbitals > MAX_ORBITALS {
            return Err(Error::InvalidSector(format!(
                "{n_orbitals} orbitals exceeds the {MAX_ORBITALS}-orbital cap"
            )));
        }
        if n_alpha > n_orbitals || n_beta > n_orbitals {
            return Err(Error::InvalidSector(format!(
                "({n_alpha} alpha, {n_beta} beta) electrons do not fit in {n_orbitals} orbitals"
            )));
        }
        let dim = binomial(n_orbitals, n_alpha) * binomial(n_orbitals, n_beta);
        if dim > MAX_SECTOR_DIM {
            return Err(Error::InvalidSector(format!("sector dimension {dim} is too large")));
        }
        let alpha_strings = occupation_strings(n_orbitals, n_alpha);
        let beta_strings = occupation_strings(n_orbitals, n_beta);
        let rank = |s: &[u64]| s.iter().enumerate().map(|(i, &m)| (m, i)).collect::<HashMap<_, _>>();
        let alpha_rank = rank(&alpha_strings);
        let beta_rank = rank(&beta_strings);
        let mut determinants = Vec::with_capacity(dim as usize);
        for &a in &alpha_strings {
            for &b in &beta_strings {
                determinants.push(Determinant::new(a, b));
            }
        }
        Ok(Self {
            n_orbitals,
            n_alpha,
            n_beta,
            alpha_strings,
            beta_strings,
            alpha_rank,
            beta_rank,
            determinants,
        })
    }

    pub fn n_orbitals(&self) -> usize {
        self.n_orbitals
    }

    pub fn n_alpha(&self) -> usize {
        self.n_alpha
    }

    pub fn n_beta(&self) -> usize {
        self.n_beta
    }

    pub fn n_electrons(&self) -> usize {
        self.n_alpha + self.n_beta
    }

    pub fn len(&self) -> usize {
        self.determinants.len()
    }

    pub fn is_empty(&self) -> bool {
        self.determinants.is_empty()
    }

    pub fn determinants(&self) -> &[Determinant] {
        &self.determinants
    }

    pub fn get(&self, i: usize) -> Determinant {
        self.determinants[i]
    }

    pub fn alpha_strings(&self) -> &[u64] {
        &self.alpha_strings
    }

    pub fn beta_strings(&self) -> &[u64] {
        &self.beta_strings
    }

    /// Position of `det` in the basis, if it belongs to this sector.
    #[inline]
    pub fn index(&self, det: &Determinant) -> Option<usize> {
        let ia = self.alpha_rank.get(&det.alpha)?;
        let ib = self.beta_rank.get(&det.beta)?;
        Some(ia * self.beta_strings.len() + ib)
    }

    /// Closed-shell-like reference: the lowest `n_alpha` / `n_beta` orbitals filled.
    pub fn aufbau_determinant(&self) -> Determinant {
        let fill = |k: usize| if k == 0 { 0 } else { u64::MAX >> (64 - k) };
        Determinant::new(fill(self.n_alpha), fill(self.n_beta))
    }

    pub fn aufbau_index(&self) -> usize {
        self.index(&self.aufbau_determinant())
            .expect("aufbau determinant lies in its own sector")
    }

    pub fn unit_vector(&self, i: usize) -> Vec<f64> {
        let mut v = vec![0.0; self.len()];
        v[i] = 1.0;
        v
    }

    pub(crate) fn check_state(&self, state: &[f64]) -> Result<()> {
        if state.len() != self.len() {
            return Err(Error::dim(self.len(), state.len()));
        }
        Ok(())
    }
}

/// Convenience wrapper matching the free-function form.
pub fn build_sector_basis(n_orbitals: usize, n_alpha: usize, n_beta: usize) -> Result<SectorBasis> {
    SectorBasis::new(n_orbitals, n_alpha, n_beta)
}
