//! Exact references: FCI ground states, dense operator matrices and dense
//! matrix exponentials.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::SectorHamiltonian;
use crate::linalg::{axpy, dot, norm, normalize, LinearOperator};

/// Largest dimension accepted by the dense helpers.
pub const DENSE_OPERATOR_CAP: usize = 6000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverMethod {
    Dense,
    Iterative,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectrumResult {
    /// Total energies (core energy included), ascending. The dense path returns
    /// the full spectrum; the iterative path the lowest two roots.
    pub eigenvalues: Vec<f64>,
    pub ground_vector: Vec<f64>,
    pub method: SolverMethod,
    pub residual_norm: f64,
    /// Lowest two eigenvalues closer than [`EigenConfig::degeneracy_tol`].
    pub degenerate: bool,
}

impl SpectrumResult {
    pub fn ground_energy(&self) -> f64 {
        self.eigenvalues[0]
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EigenConfig {
    /// Dense diagonalisation at or below this dimension.
    pub dense_cap: usize,
    /// Largest dimension for the iterative solver.
    pub iterative_cap: usize,
    pub residual_tol: f64,
    pub max_iterations: usize,
    pub max_subspace: usize,
    pub degeneracy_tol: f64,
}

impl Default for EigenConfig {
    fn default() -> Self {
        Self {
            dense_cap: 2000,
            iterative_cap: 2_000_000,
            residual_tol: 1e-10,
            max_iterations: 2000,
            max_subspace: 48,
            degeneracy_tol: 1e-8,
        }
    }
}

/// Column-by-column assembly of any sector operator as a dense matrix,
/// including its constant offset on the diagonal.
pub fn dense_operator_matrix(op: &dyn LinearOperator) -> Result<DMatrix<f64>> {
    let n = op.dim();
    if n > DENSE_OPERATOR_CAP {
        return Err(Error::DimensionCap { dim: n, cap: DENSE_OPERATOR_CAP });
    }
    let mut m = DMatrix::zeros(n, n);
    let mut e = vec![0.0; n];
    let mut col = vec![0.0; n];
    for j in 0..n {
        e[j] = 1.0;
        op.apply_into(&e, &mut col);
        e[j] = 0.0;
        for (i, v) in col.iter().enumerate() {
            m[(i, j)] = *v;
        }
        m[(j, j)] += op.offset();
    }
    Ok(m)
}

/// `exp(t A)` by scaling and squaring a Taylor series.
pub fn dense_expm(matrix: &DMatrix<f64>, t: f64) -> Result<DMatrix<f64>> {
    let n = matrix.nrows();
    if n != matrix.ncols() {
        return Err(Error::dim(n, matrix.ncols()));
    }
    if n > DENSE_OPERATOR_CAP {
        return Err(Error::DimensionCap { dim: n, cap: DENSE_OPERATOR_CAP });
    }
    let a = matrix * t;
    let one_norm = (0..n).map(|j| a.column(j).iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max);
    let squarings = if one_norm > 0.5 { (one_norm / 0.5).log2().ceil() as i32 } else { 0 };
    let b = &a / 2f64.powi(squarings);
    let mut sum = DMatrix::identity(n, n);
    let mut term = DMatrix::identity(n, n);
    for k in 1..=40 {
        term = &term * &b / k as f64;
        sum += &term;
        if term.amax() <= 1e-18 * sum.amax() {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    Ok(sum)
}

/// `exp(t A) v`.
pub fn dense_expm_apply(matrix: &DMatrix<f64>, t: f64, vector: &[f64]) -> Result<Vec<f64>> {
    if vector.len() != matrix.ncols() {
        return Err(Error::dim(matrix.ncols(), vector.len()));
    }
    let e = dense_expm(matrix, t)?;
    Ok((e * DVector::from_column_slice(vector)).iter().copied().collect())
}

/// Exact ground state of `ham`: dense below the dense cap, Davidson above.
pub fn fci_ground_state(ham: &SectorHamiltonian, config: &EigenConfig) -> Result<SpectrumResult> {
    let n = ham.dim();
    if n > config.iterative_cap {
        return Err(Error::DimensionCap { dim: n, cap: config.iterative_cap });
    }
    if n <= config.dense_cap {
        dense_ground_state(ham, config)
    } else {
        davidson(ham, config)
    }
}

pub fn dense_ground_state(ham: &SectorHamiltonian, config: &EigenConfig) -> Result<SpectrumResult> {
    let mut m = dense_operator_matrix(ham)?;
    for i in 0..m.nrows() {
        m[(i, i)] -= ham.core_energy();
    }
    let eig = m.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let e0 = eig.eigenvalues[order[0]];
    let mut v: Vec<f64> = eig.eigenvectors.column(order[0]).iter().copied().collect();
    fix_sign(&mut v);
    let residual_norm = residual(ham, &v, e0);
    let eigenvalues: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k] + ham.core_energy()).collect();
    let degenerate = eigenvalues.len() > 1 && eigenvalues[1] - eigenvalues[0] < config.degeneracy_tol;
    Ok(SpectrumResult {
        eigenvalues,
        ground_vector: v,
        method: SolverMethod::Dense,
        residual_norm,
        degenerate,
    })
}

fn residual(op: &dyn LinearOperator, v: &[f64], e: f64) -> f64 {
    let mut r = op.apply(v);
    axpy(-e, v, &mut r);
    norm(&r)
}

fn fix_sign(v: &mut [f64]) {
    let lead = v.iter().copied().fold(0.0_f64, |m, x| if x.abs() > m.abs() { x } else { m });
    if lead < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

fn orthonormalize_against(basis: &[Vec<f64>], v: &mut [f64]) -> f64 {
    for _ in 0..2 {
        for b in basis {
            let c = dot(b, v);
            axpy(-c, b, v);
        }
    }
    normalize(v)
}

/// Block Davidson for the two lowest roots with diagonal preconditioning.
pub fn davidson(ham: &SectorHamiltonian, config: &EigenConfig) -> Result<SpectrumResult> {
    let n = ham.dim();
    let roots = 2.min(n);
    let diag = ham.matrix().diagonal();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| diag[a].total_cmp(&diag[b]));

    // Small deterministic noise keeps the search space from being confined to
    // the symmetry block of the lowest diagonal entries.
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_da71d5);
    let mut space: Vec<Vec<f64>> = Vec::new();
    let mut images: Vec<Vec<f64>> = Vec::new();
    for k in 0..roots.max(4).min(n) {
        let mut v: Vec<f64> = (0..n).map(|_| 1e-3 * rng.gen_range(-1.0..1.0)).collect();
        v[order[k]] += 1.0;
        if orthonormalize_against(&space, &mut v) > 1e-10 {
            images.push(ham.apply(&v));
            space.push(v);
        }
    }

    let mut last_res = f64::INFINITY;
    for iter in 0..config.max_iterations {
        let m = space.len();
        let t = DMatrix::from_fn(m, m, |i, j| dot(&space[i], &images[j]));
        let t = (&t + t.transpose()) * 0.5;
        let eig = t.symmetric_eigen();
        let mut idx: Vec<usize> = (0..m).collect();
        idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

        let mut ritz = Vec::with_capacity(roots);
        let mut ritz_images = Vec::with_capacity(roots);
        let mut thetas = Vec::with_capacity(roots);
        let mut residuals = Vec::with_capacity(roots);
        for &k in idx.iter().take(roots) {
            let y = eig.eigenvectors.column(k);
            let mut x = vec![0.0; n];
            let mut hx = vec![0.0; n];
            for (c, (v, w)) in y.iter().zip(space.iter().zip(&images)) {
                axpy(*c, v, &mut x);
                axpy(*c, w, &mut hx);
            }
            let theta = eig.eigenvalues[k];
            let mut r = hx.clone();
            axpy(-theta, &x, &mut r);
            residuals.push(r);
            ritz.push(x);
            ritz_images.push(hx);
            thetas.push(theta);
        }
        let res_norms: Vec<f64> = residuals.iter().map(|r| norm(r)).collect();
        last_res = res_norms[0];
        let tol = |e: f64| config.residual_tol * e.abs().max(1.0);
        let converged = res_norms.iter().zip(&thetas).all(|(r, e)| *r <= tol(*e));
        if converged {
            let mut v = ritz.swap_remove(0);
            normalize(&mut v);
            fix_sign(&mut v);
            let residual_norm = residual(ham, &v, thetas[0]);
            let eigenvalues: Vec<f64> = thetas.iter().map(|e| e + ham.core_energy()).collect();
            let degenerate = eigenvalues.len() > 1 && eigenvalues[1] - eigenvalues[0] < config.degeneracy_tol;
            return Ok(SpectrumResult {
                eigenvalues,
                ground_vector: v,
                method: SolverMethod::Iterative,
                residual_norm,
                degenerate,
            });
        }

        if space.len() + roots > config.max_subspace {
            space.clear();
            images.clear();
            for (x, hx) in ritz.iter().zip(&ritz_images) {
                let mut x = x.clone();
                let mut hx = hx.clone();
                let nx = norm(&x);
                x.iter_mut().for_each(|v| *v /= nx);
                hx.iter_mut().for_each(|v| *v /= nx);
                space.push(x);
                images.push(hx);
            }
        }

        let mut added = 0;
        for ((r, theta), rn) in residuals.iter().zip(&thetas).zip(&res_norms) {
            if *rn <= tol(*theta) {
                continue;
            }
            let mut d: Vec<f64> = r
                .iter()
                .zip(&diag)
                .map(|(ri, di)| {
                    let denom = theta - di;
                    if denom.abs() < 1e-8 {
                        ri / 1e-8_f64.copysign(denom)
                    } else {
                        ri / denom
                    }
                })
                .collect();
            if orthonormalize_against(&space, &mut d) > 1e-12 {
                images.push(ham.apply(&d));
                space.push(d);
                added += 1;
            }
        }
        if added == 0 {
            // Preconditioned corrections collapsed; fall back to raw residuals.
            for r in &residuals {
                let mut d = r.clone();
                if orthonormalize_against(&space, &mut d) > 1e-14 {
                    images.push(ham.apply(&d));
                    space.push(d);
                    added += 1;
                }
            }
        }
        if added == 0 {
            return Err(Error::EigenNonConvergence { residual: last_res, iterations: iter + 1 });
        }
    }
    Err(Error::EigenNonConvergence {
        residual: last_res,
        iterations: config.max_iterations,
    })
}
