use super::CsrMatrix;
use crate::error::Result;
use crate::fock::{SectorBasis, Spin};
use crate::linalg::{expectation, LinearOperator};

/// Total spin `S^2 = S^- S^+ + S_z (S_z + 1)`, assembled once per basis.
#[derive(Debug, Clone)]
pub struct SpinSquared {
    matrix: CsrMatrix,
}

impl SpinSquared {
    pub fn new(basis: &SectorBasis) -> Self {
        let n = basis.n_orbitals();
        let sz = (basis.n_alpha() as f64 - basis.n_beta() as f64) / 2.0;
        let shift = sz * (sz + 1.0);
        let rows = basis
            .determinants()
            .iter()
            .enumerate()
            .map(|(i, det)| {
                let mut row = vec![(i, shift)];
                // S^+ = sum_p a†_p,alpha a_p,beta
                for p in 0..n {
                    let Some((d1, s1)) = det.annihilate(Spin::Beta, p) else { continue };
                    let Some((d1, s2)) = d1.create(Spin::Alpha, p) else { continue };
                    // S^- = sum_q a†_q,beta a_q,alpha
                    for q in 0..n {
                        let Some((d2, s3)) = d1.annihilate(Spin::Alpha, q) else { continue };
                        let Some((d2, s4)) = d2.create(Spin::Beta, q) else { continue };
                        let j = basis.index(&d2).expect("S^- S^+ preserves the sector");
                        row.push((j, s1 * s2 * s3 * s4));
                    }
                }
                row
            })
            .collect();
        Self {
            matrix: CsrMatrix::from_rows(rows),
        }
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }
}

impl LinearOperator for SpinSquared {
    fn dim(&self) -> usize {
        self.matrix.dim()
    }

    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        self.matrix.matvec_into(x, y)
    }
}

/// Site-averaged double occupancy `(1/n) sum_p n_p,up n_p,down` (diagonal).
#[derive(Debug, Clone)]
pub struct DoubleOccupancy {
    diag: Vec<f64>,
}

impl DoubleOccupancy {
    pub fn new(basis: &SectorBasis) -> Self {
        let n = basis.n_orbitals() as f64;
        Self {
            diag: basis.determinants().iter().map(|d| d.double_count() as f64 / n).collect(),
        }
    }
}

impl LinearOperator for DoubleOccupancy {
    fn dim(&self) -> usize {
        self.diag.len()
    }

    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        for ((yi, xi), d) in y.iter_mut().zip(x).zip(&self.diag) {
            *yi = d * xi;
        }
    }
}

/// Total particle number; constant on a sector.
#[derive(Debug, Clone)]
pub struct ParticleNumber {
    dim: usize,
    n: f64,
}

impl ParticleNumber {
    pub fn new(basis: &SectorBasis) -> Self {
        Self {
            dim: basis.len(),
            n: basis.n_electrons() as f64,
        }
    }
}

impl LinearOperator for ParticleNumber {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        for (yi, xi) in y.iter_mut().zip(x) {
            *yi = self.n * xi;
        }
    }
}

pub fn s_squared_expectation(state: &[f64], basis: &SectorBasis) -> Result<f64> {
    basis.check_state(state)?;
    expectation(&SpinSquared::new(basis), state)
}

/// Double occupancy of the orbitals of `basis`. For a Hubbard lattice expressed in
/// rotated orbitals use [`super::HubbardSpec::double_occupancy_operator`] instead.
pub fn double_occupancy(state: &[f64], basis: &SectorBasis) -> Result<f64> {
    basis.check_state(state)?;
    expectation(&DoubleOccupancy::new(basis), state)
}
