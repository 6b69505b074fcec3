use std::collections::BTreeSet;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{build_molecular_hamiltonian, Integrals, SectorHamiltonian};
use crate::error::{Error, Result};
use crate::fock::SectorBasis;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Boundary {
    #[default]
    Open,
    Periodic,
}

/// Single-particle basis in which the Hubbard Hamiltonian is expressed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum OrbitalBasis {
    /// Lattice sites.
    Site,
    /// Eigenvectors of the hopping matrix, ascending in energy.
    #[default]
    TightBinding,
}

/// Rectangular Hubbard lattice `lx x ly` with hopping `t_hop` and on-site repulsion `u_rep`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HubbardSpec {
    pub lx: usize,
    pub ly: usize,
    pub t_hop: f64,
    pub u_rep: f64,
    #[serde(default)]
    pub boundary_x: Boundary,
    #[serde(default)]
    pub boundary_y: Boundary,
    #[serde(default)]
    pub orbital_basis: OrbitalBasis,
}

impl HubbardSpec {
    pub fn new(lx: usize, ly: usize, t_hop: f64, u_rep: f64) -> Self {
        Self {
            lx,
            ly,
            t_hop,
            u_rep,
            boundary_x: Boundary::Open,
            boundary_y: Boundary::Open,
            orbital_basis: OrbitalBasis::TightBinding,
        }
    }

    pub fn with_orbital_basis(mut self, basis: OrbitalBasis) -> Self {
        self.orbital_basis = basis;
        self
    }

    pub fn with_boundaries(mut self, x: Boundary, y: Boundary) -> Self {
        self.boundary_x = x;
        self.boundary_y = y;
        self
    }

    pub fn n_sites(&self) -> usize {
        self.lx * self.ly
    }

    pub fn validate(&self) -> Result<()> {
        if self.lx == 0 || self.ly == 0 {
            return Err(Error::InvalidArgument("Hubbard lattice dimensions must be positive".into()));
        }
        if !self.t_hop.is_finite() || !self.u_rep.is_finite() {
            return Err(Error::InvalidArgument("Hubbard t and U must be finite".into()));
        }
        Ok(())
    }

    /// Site `(x, y)` has index `x + lx * y`.
    pub fn site(&self, x: usize, y: usize) -> usize {
        x + self.lx * y
    }

    /// Unique nearest-neighbour bonds `(i, j)` with `i < j`.
    ///
    /// A periodic axis of length 2 wraps onto the existing bond and adds nothing.
    pub fn bonds(&self) -> Vec<(usize, usize)> {
        let mut set = BTreeSet::new();
        let mut add = |a: usize, b: usize| {
            if a != b {
                set.insert((a.min(b), a.max(b)));
            }
        };
        for y in 0..self.ly {
            for x in 0..self.lx {
                if x + 1 < self.lx {
                    add(self.site(x, y), self.site(x + 1, y));
                } else if self.boundary_x == Boundary::Periodic {
                    add(self.site(x, y), self.site(0, y));
                }
                if y + 1 < self.ly {
                    add(self.site(x, y), self.site(x, y + 1));
                } else if self.boundary_y == Boundary::Periodic {
                    add(self.site(x, y), self.site(x, 0));
                }
            }
        }
        set.into_iter().collect()
    }

    /// The one-electron hopping matrix `-t_hop` on each bond.
    pub fn hopping_matrix(&self) -> DMatrix<f64> {
        let n = self.n_sites();
        let mut h = DMatrix::zeros(n, n);
        for (i, j) in self.bonds() {
            h[(i, j)] = -self.t_hop;
            h[(j, i)] = -self.t_hop;
        }
        h
    }

    /// Ascending hopping-matrix eigenvalues and eigenvectors (as columns).
    ///
    /// Each eigenvector's largest-magnitude component is made positive.
    pub fn tight_binding_orbitals(&self) -> (Vec<f64>, DMatrix<f64>) {
        let n = self.n_sites();
        let eig = self.hopping_matrix().symmetric_eigen();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let mut coeffs = DMatrix::zeros(n, n);
        let mut energies = Vec::with_capacity(n);
        for (k, &src) in order.iter().enumerate() {
            let mut col = eig.eigenvectors.column(src).into_owned();
            if col[col.iamax()] < 0.0 {
                col.neg_mut();
            }
            coeffs.set_column(k, &col);
            energies.push(eig.eigenvalues[src]);
        }
        (energies, coeffs)
    }

    /// Site-basis integrals: `h_ij = -t` on bonds, `(ii|ii) = U`.
    pub fn site_integrals(&self) -> Integrals {
        let n = self.n_sites();
        let mut g = Integrals::zeros(n);
        for (i, j) in self.bonds() {
            g.set_h(i, j, -self.t_hop);
        }
        for i in 0..n {
            g.set_eri(i, i, i, i, self.u_rep);
        }
        g
    }

    /// Lattice double occupancy `(1/n) sum_i n_i,up n_i,down` as a two-body
    /// operator in the configured orbital basis.
    pub fn double_occupancy_operator(&self, basis: &SectorBasis) -> Result<SectorHamiltonian> {
        let probe = HubbardSpec {
            t_hop: 0.0,
            u_rep: 1.0 / self.n_sites() as f64,
            ..self.clone()
        };
        let g = match self.orbital_basis {
            OrbitalBasis::Site => probe.site_integrals(),
            OrbitalBasis::TightBinding => probe.site_integrals().rotate(&self.tight_binding_orbitals().1),
        };
        build_molecular_hamiltonian(&g, basis)
    }

    /// Integrals in the configured orbital basis.
    pub fn integrals(&self) -> Integrals {
        let site = self.site_integrals();
        match self.orbital_basis {
            OrbitalBasis::Site => site,
            OrbitalBasis::TightBinding => site.rotate(&self.tight_binding_orbitals().1),
        }
    }
}

/// `H = -t sum_<ij>,s (a†_is a_js + h.c.) + U sum_i n_i,up n_i,down` on the sector basis.
pub fn build_hubbard_hamiltonian(spec: &HubbardSpec, basis: &SectorBasis) -> Result<SectorHamiltonian> {
    spec.validate()?;
    if spec.n_sites() != basis.n_orbitals() {
        return Err(Error::dim(spec.n_sites(), basis.n_orbitals()));
    }
    build_molecular_hamiltonian(&spec.integrals(), basis)
}
