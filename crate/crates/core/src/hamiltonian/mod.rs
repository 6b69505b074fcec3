//! Sector Hamiltonians from molecular integrals or Hubbard lattices.

mod fcidump;
mod hubbard;
mod observables;
mod sparse;

pub use fcidump::{freeze_core, parse_fcidump, FcidumpData, Integrals};
pub use hubbard::{build_hubbard_hamiltonian, Boundary, HubbardSpec, OrbitalBasis};
pub use observables::{double_occupancy, s_squared_expectation, DoubleOccupancy, ParticleNumber, SpinSquared};
pub use sparse::CsrMatrix;

use crate::error::{Error, Result};
use crate::fock::{Determinant, SectorBasis, Spin};
use crate::linalg::LinearOperator;

/// Ĥ restricted to one (N_alpha, N_beta) sector, plus a scalar core energy.
#[derive(Debug, Clone)]
pub struct SectorHamiltonian {
    basis: SectorBasis,
    matrix: CsrMatrix,
    core_energy: f64,
}

impl SectorHamiltonian {
    pub fn from_parts(basis: SectorBasis, matrix: CsrMatrix, core_energy: f64) -> Result<Self> {
        if matrix.dim() != basis.len() {
            return Err(Error::dim(basis.len(), matrix.dim()));
        }
        Ok(Self { basis, matrix, core_energy })
    }

    pub fn basis(&self) -> &SectorBasis {
        &self.basis
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    pub fn core_energy(&self) -> f64 {
        self.core_energy
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// `<psi|H|psi> + core_energy`.
    pub fn expectation(&self, state: &[f64]) -> Result<f64> {
        crate::linalg::expectation(self, state)
    }
}

impl LinearOperator for SectorHamiltonian {
    fn dim(&self) -> usize {
        self.basis.len()
    }

    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        self.matrix.matvec_into(x, y)
    }

    fn offset(&self) -> f64 {
        self.core_energy
    }
}

#[inline]
fn spin_of(g: usize, n: usize) -> (Spin, usize) {
    if g < n {
        (Spin::Alpha, g)
    } else {
        (Spin::Beta, g - n)
    }
}

fn occupied_spin_orbitals(det: &Determinant, n: usize) -> Vec<usize> {
    (0..n)
        .filter(|&k| det.is_occupied(Spin::Alpha, k))
        .chain((0..n).filter(|&k| det.is_occupied(Spin::Beta, k)).map(|k| k + n))
        .collect()
}

/// Physicist's `<pq|rs>` over spin orbitals (alpha first), `= (pr|qs)` when spins match.
#[inline]
fn phys(g: &Integrals, n: usize, p: usize, q: usize, r: usize, s: usize) -> f64 {
    let (sp, p) = spin_of(p, n);
    let (sq, q) = spin_of(q, n);
    let (sr, r) = spin_of(r, n);
    let (ss, s) = spin_of(s, n);
    if sp == sr && sq == ss {
        g.eri(p, r, q, s)
    } else {
        0.0
    }
}

/// Applies `a_i` ... in order `ops` (spin-orbital, create?) and returns the result.
fn apply_string(det: &Determinant, n: usize, ops: &[(usize, bool)]) -> Option<(Determinant, f64)> {
    let mut d = *det;
    let mut sign = 1.0;
    for &(g, create) in ops {
        let (spin, k) = spin_of(g, n);
        let (next, s) = if create { d.create(spin, k)? } else { d.annihilate(spin, k)? };
        d = next;
        sign *= s;
    }
    Some((d, sign))
}

/// Slater–Condon assembly of the second-quantised Hamiltonian
/// `sum h_pq a†_p a_q + 1/2 sum <pq|rs> a†_p a†_q a_s a_r` in the sector basis.
pub fn build_molecular_hamiltonian(integrals: &Integrals, basis: &SectorBasis) -> Result<SectorHamiltonian> {
    let n = integrals.n_orbitals();
    if basis.n_orbitals() != n {
        return Err(Error::dim(n, basis.n_orbitals()));
    }
    let rows = basis
        .determinants()
        .iter()
        .map(|det| slater_condon_row(integrals, basis, det))
        .collect();
    SectorHamiltonian::from_parts(basis.clone(), CsrMatrix::from_rows(rows), integrals.core_energy)
}

/// Checks NELEC/MS2 against the basis before building.
pub fn build_fcidump_hamiltonian(data: &FcidumpData, basis: &SectorBasis) -> Result<SectorHamiltonian> {
    let (na, nb) = data.sector()?;
    if (na, nb) != (basis.n_alpha(), basis.n_beta()) {
        return Err(Error::InvalidSector(format!(
            "FCIDUMP implies ({na}, {nb}) electrons but basis holds ({}, {})",
            basis.n_alpha(),
            basis.n_beta()
        )));
    }
    build_molecular_hamiltonian(&data.integrals, basis)
}

fn slater_condon_row(g: &Integrals, basis: &SectorBasis, det: &Determinant) -> Vec<(usize, f64)> {
    let n = basis.n_orbitals();
    let occ = occupied_spin_orbitals(det, n);
    let virt: Vec<usize> = (0..2 * n).filter(|x| !occ.contains(x)).collect();
    let mut row = Vec::new();

    let mut diag = 0.0;
    for (a, &i) in occ.iter().enumerate() {
        let (_, ki) = spin_of(i, n);
        diag += g.h(ki, ki);
        for &j in &occ[a + 1..] {
            diag += phys(g, n, i, j, i, j) - phys(g, n, i, j, j, i);
        }
    }
    row.push((basis.index(det).expect("row determinant in basis"), diag));

    for &i in &occ {
        let (si, ki) = spin_of(i, n);
        for &a in &virt {
            let (sa, ka) = spin_of(a, n);
            if si != sa {
                continue;
            }
            let Some((out, sign)) = apply_string(det, n, &[(i, false), (a, true)]) else { continue };
            let mut v = g.h(ka, ki);
            for &j in &occ {
                if j != i {
                    v += phys(g, n, a, j, i, j) - phys(g, n, a, j, j, i);
                }
            }
            if v != 0.0 {
                row.push((basis.index(&out).expect("excitation stays in sector"), sign * v));
            }
        }
    }

    for (x, &i) in occ.iter().enumerate() {
        for &j in &occ[x + 1..] {
            for (y, &a) in virt.iter().enumerate() {
                for &b in &virt[y + 1..] {
                    let v = phys(g, n, a, b, i, j) - phys(g, n, a, b, j, i);
                    if v == 0.0 {
                        continue;
                    }
                    let Some((out, sign)) = apply_string(det, n, &[(i, false), (j, false), (b, true), (a, true)])
                    else {
                        continue;
                    };
                    if let Some(col) = basis.index(&out) {
                        row.push((col, sign * v));
                    }
                }
            }
        }
    }
    row
}
