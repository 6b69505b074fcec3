//! Symmetry-preserving unitary product states.
//!
//! `|Ψ(t, μ)> = exp(t_M κ_μM) ... exp(t_1 κ_μ1) |Φ_0>`: operator 1 acts first on
//! the reference determinant.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::hamiltonian::SectorHamiltonian;
use crate::linalg::{dot, LinearOperator};
use crate::pool::{OperatorId, OperatorPool, PoolTables};

#[derive(Debug, Clone, PartialEq)]
pub struct Ansatz {
    pub sequence: Vec<OperatorId>,
    pub amplitudes: Vec<f64>,
    /// Index of `Φ_0` in the sector basis.
    pub reference: usize,
}

impl Ansatz {
    pub fn new(sequence: Vec<OperatorId>, amplitudes: Vec<f64>, reference: usize) -> Result<Self> {
        if sequence.len() != amplitudes.len() {
            return Err(Error::dim(sequence.len(), amplitudes.len()));
        }
        Ok(Self {
            sequence,
            amplitudes,
            reference,
        })
    }

    pub fn empty(reference: usize) -> Self {
        Self {
            sequence: Vec::new(),
            amplitudes: Vec::new(),
            reference,
        }
    }

    pub fn len(&self) -> usize {
        self.sequence.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequence.is_empty()
    }

    /// Pool indices of the sequence, validating every operator and the reference.
    pub fn pool_indices(&self, tables: &PoolTables) -> Result<Vec<usize>> {
        if self.reference >= tables.dim() {
            return Err(Error::InvalidArgument(format!(
                "reference index {} outside basis of size {}",
                self.reference,
                tables.dim()
            )));
        }
        if self.sequence.len() != self.amplitudes.len() {
            return Err(Error::dim(self.sequence.len(), self.amplitudes.len()));
        }
        self.sequence.iter().map(|op| tables.pool().index_of(op)).collect()
    }

    /// Text record: header lines, then one `kind p q amplitude` line per operator.
    ///
    /// Amplitudes use the shortest decimal that round-trips exactly.
    pub fn to_text(&self, pool: &OperatorPool) -> String {
        let mut s = String::new();
        writeln!(s, "# s-UPS ansatz; operator 1 acts first on the reference").unwrap();
        writeln!(s, "n_orbitals {}", pool.n_orbitals()).unwrap();
        writeln!(s, "pool_fingerprint {}", pool.fingerprint()).unwrap();
        writeln!(s, "reference {}", self.reference).unwrap();
        writeln!(s, "operators {}", self.len()).unwrap();
        for (op, t) in self.sequence.iter().zip(&self.amplitudes) {
            writeln!(s, "{op} {t:e}").unwrap();
        }
        s
    }

    /// Parses [`Ansatz::to_text`] output, checking it against `pool`.
    pub fn from_text(text: &str, pool: &OperatorPool) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let err = |line: usize, message: String| Error::AnsatzParse { line, message };
        let mut header = |key: &str| -> Result<(usize, String)> {
            let (ln, l) = lines.next().ok_or_else(|| err(0, format!("missing '{key}' line")))?;
            let value = l
                .strip_prefix(key)
                .map(str::trim)
                .ok_or_else(|| err(ln, format!("expected '{key}'")))?;
            Ok((ln, value.to_string()))
        };
        let (ln, n) = header("n_orbitals")?;
        if n.parse::<usize>().ok() != Some(pool.n_orbitals()) {
            return Err(err(ln, format!("orbital count {n} does not match pool ({})", pool.n_orbitals())));
        }
        let (ln, fp) = header("pool_fingerprint")?;
        if fp != pool.fingerprint() {
            return Err(err(ln, format!("pool fingerprint {fp} does not match {}", pool.fingerprint())));
        }
        let (ln, r) = header("reference")?;
        let reference = r.parse().map_err(|_| err(ln, format!("bad reference '{r}'")))?;
        let (ln, m) = header("operators")?;
        let m: usize = m.parse().map_err(|_| err(ln, format!("bad operator count '{m}'")))?;
        let mut sequence = Vec::with_capacity(m);
        let mut amplitudes = Vec::with_capacity(m);
        for (ln, l) in lines {
            let (op, t) = l
                .rsplit_once(char::is_whitespace)
                .ok_or_else(|| err(ln, "expected 'kind p q amplitude'".into()))?;
            let op: OperatorId = op.trim().parse().map_err(|e| err(ln, format!("{e}")))?;
            pool.index_of(&op).map_err(|e| err(ln, format!("{e}")))?;
            let t: f64 = t.parse().map_err(|_| err(ln, format!("bad amplitude '{t}'")))?;
            if !t.is_finite() {
                return Err(err(ln, "non-finite amplitude".into()));
            }
            sequence.push(op);
            amplitudes.push(t);
        }
        if sequence.len() != m {
            return Err(err(0, format!("expected {m} operators, found {}", sequence.len())));
        }
        Ok(Self {
            sequence,
            amplitudes,
            reference,
        })
    }
}

/// Applies the product to `Φ_0` by pool index, writing into `out`.
pub(crate) fn prepare_state(tables: &PoolTables, indices: &[usize], amplitudes: &[f64], reference: usize, out: &mut [f64]) {
    out.iter_mut().for_each(|v| *v = 0.0);
    out[reference] = 1.0;
    for (&k, &t) in indices.iter().zip(amplitudes) {
        tables.rotate_in_place(k, t, out);
    }
}

/// `|Ψ(t, μ)>`, unit norm.
pub fn evaluate_state(ansatz: &Ansatz, tables: &PoolTables) -> Result<Vec<f64>> {
    let idx = ansatz.pool_indices(tables)?;
    let mut psi = vec![0.0; tables.dim()];
    prepare_state(tables, &idx, &ansatz.amplitudes, ansatz.reference, &mut psi);
    Ok(psi)
}

fn check_pair(ham: &SectorHamiltonian, tables: &PoolTables) -> Result<()> {
    if ham.dim() != tables.dim() {
        return Err(Error::dim(ham.dim(), tables.dim()));
    }
    Ok(())
}

/// `E(t, μ) = <Ψ|H|Ψ> + E_core`.
pub fn energy(ansatz: &Ansatz, ham: &SectorHamiltonian, tables: &PoolTables) -> Result<f64> {
    check_pair(ham, tables)?;
    let psi = evaluate_state(ansatz, tables)?;
    Ok(dot(&psi, &ham.apply(&psi)) + ham.core_energy())
}

/// `∂E/∂t_i` for every position, by a single reverse sweep.
pub fn gradient(ansatz: &Ansatz, ham: &SectorHamiltonian, tables: &PoolTables) -> Result<Vec<f64>> {
    Ok(energy_and_gradient(ansatz, ham, tables)?.1)
}

pub fn energy_and_gradient(ansatz: &Ansatz, ham: &SectorHamiltonian, tables: &PoolTables) -> Result<(f64, Vec<f64>)> {
    check_pair(ham, tables)?;
    let idx = ansatz.pool_indices(tables)?;
    let mut eval = Evaluator::new(ham, tables);
    let mut grad = vec![0.0; idx.len()];
    let e = eval.energy_gradient(&idx, &ansatz.amplitudes, ansatz.reference, &mut grad);
    Ok((e, grad))
}

/// Reusable energy/gradient kernel over pool indices; owns its work vectors.
pub struct Evaluator<'a> {
    ham: &'a SectorHamiltonian,
    tables: &'a PoolTables,
    psi: Vec<f64>,
    sigma: Vec<f64>,
    evaluations: usize,
}

impl<'a> Evaluator<'a> {
    pub fn new(ham: &'a SectorHamiltonian, tables: &'a PoolTables) -> Self {
        let dim = tables.dim();
        Self {
            ham,
            tables,
            psi: vec![0.0; dim],
            sigma: vec![0.0; dim],
            evaluations: 0,
        }
    }

    pub fn hamiltonian(&self) -> &'a SectorHamiltonian {
        self.ham
    }

    pub fn tables(&self) -> &'a PoolTables {
        self.tables
    }

    /// Number of energy(+gradient) evaluations performed so far.
    pub fn evaluations(&self) -> usize {
        self.evaluations
    }

    pub fn energy(&mut self, indices: &[usize], amplitudes: &[f64], reference: usize) -> f64 {
        self.evaluations += 1;
        prepare_state(self.tables, indices, amplitudes, reference, &mut self.psi);
        self.ham.apply_into(&self.psi, &mut self.sigma);
        dot(&self.psi, &self.sigma) + self.ham.core_energy()
    }

    /// Energy, with `grad[i] = 2 <σ_i| κ_i |ψ_i>` filled by the reverse sweep.
    pub fn energy_gradient(&mut self, indices: &[usize], amplitudes: &[f64], reference: usize, grad: &mut [f64]) -> f64 {
        let e = self.energy(indices, amplitudes, reference);
        for i in (0..indices.len()).rev() {
            let k = indices[i];
            grad[i] = 2.0 * self.tables.generator_matrix_element(k, &self.sigma, &self.psi);
            self.tables.rotate_in_place(k, -amplitudes[i], &mut self.psi);
            self.tables.rotate_in_place(k, -amplitudes[i], &mut self.sigma);
        }
        e
    }

    /// Final state and `H|ψ>` of the last [`Evaluator::energy`] call (before any sweep).
    pub fn state_and_sigma(&mut self, indices: &[usize], amplitudes: &[f64], reference: usize) -> (&[f64], &[f64]) {
        self.energy(indices, amplitudes, reference);
        (&self.psi, &self.sigma)
    }
}
