//! Small dense-vector helpers and the operator abstraction shared by
//! Hamiltonians, observables and pool generators.

use crate::error::{Error, Result};

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn normalize(v: &mut [f64]) -> f64 {
    let n = norm(v);
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
    n
}

pub fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

/// A real linear operator acting on sector state vectors.
pub trait LinearOperator: Sync {
    fn dim(&self) -> usize;

    /// `y = A x`. Both slices have length [`LinearOperator::dim`].
    fn apply_into(&self, x: &[f64], y: &mut [f64]);

    /// Scalar added to expectation values (core energy for Hamiltonians).
    fn offset(&self) -> f64 {
        0.0
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.dim()];
        self.apply_into(x, &mut y);
        y
    }
}

/// The identity on a space of fixed dimension.
pub struct Identity(pub usize);

impl LinearOperator for Identity {
    fn dim(&self) -> usize {
        self.0
    }

    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        y.copy_from_slice(x);
    }
}

/// `<psi| A |psi> + offset`.
pub fn expectation(op: &dyn LinearOperator, state: &[f64]) -> Result<f64> {
    if state.len() != op.dim() {
        return Err(Error::dim(op.dim(), state.len()));
    }
    Ok(dot(state, &op.apply(state)) + op.offset())
}
