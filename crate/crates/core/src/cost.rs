//! CNOT cost model for s-UPS circuits under Jordan–Wigner with all alpha
//! qubits preceding all beta qubits.

use serde::{Deserialize, Serialize};

use crate::ansatz::Ansatz;
use crate::pool::{OperatorId, OperatorKind};

/// Additive per-operator CNOT counts.
///
/// Paired doubles cost a constant; each spin channel of a spin-adapted single
/// costs `single_cnot_base + single_cnot_per_z * z`, with `z` the number of
/// qubits strictly between the two orbitals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostModel {
    pub paired_double_cnots: u64,
    pub single_cnot_base: u64,
    pub single_cnot_per_z: u64,
}

impl Default for CostModel {
    fn default() -> Self {
        Self {
            paired_double_cnots: 13,
            single_cnot_base: 2,
            single_cnot_per_z: 2,
        }
    }
}

impl std::fmt::Display for CostModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "paired_double={} single_base={} single_per_z={}",
            self.paired_double_cnots, self.single_cnot_base, self.single_cnot_per_z
        )
    }
}

/// Qubit index of spatial orbital `k` in the given channel.
pub fn qubit_index(k: usize, beta: bool, n_orbitals: usize) -> usize {
    if beta {
        n_orbitals + k
    } else {
        k
    }
}

impl CostModel {
    pub fn operator_cost(&self, op: &OperatorId, n_orbitals: usize) -> u64 {
        match op.kind {
            OperatorKind::PairedDouble => self.paired_double_cnots,
            OperatorKind::SpinAdaptedSingle => [false, true]
                .iter()
                .map(|&beta| {
                    let a = qubit_index(op.p, beta, n_orbitals);
                    let b = qubit_index(op.q, beta, n_orbitals);
                    let z = (a.abs_diff(b) - 1) as u64;
                    self.single_cnot_base + self.single_cnot_per_z * z
                })
                .sum(),
        }
    }
}

pub fn cnot_count(ansatz: &Ansatz, n_orbitals: usize, model: &CostModel) -> u64 {
    ansatz.sequence.iter().map(|op| model.operator_cost(op, n_orbitals)).sum()
}
