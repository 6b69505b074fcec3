//! Classical simulation and global optimisation of symmetry-preserving
//! unitary product states (s-UPS).
//!
//! The crate is organised bottom-up:
//!
//! * [`fock`] - determinants, sector bases and elementary fermionic action.
//! * [`hamiltonian`] - FCIDUMP ingestion, Hubbard lattices, sparse sector
//!   Hamiltonians and observables.
//! * [`pool`] - the spin-adapted operator pool and exact exponentials.
//! * [`ansatz`] - product-state evaluation, energy and reverse-sweep gradient.
//! * [`optimizer`] - local minimisation, basin-hopping, discrete moves,
//!   DISCO-VQE and the ADAPT-VQE baseline.
//! * [`oracle`] - exact references (dense/iterative FCI, dense expm).
//! * [`cost`] - CNOT cost model.
//! * [`runner`] - configuration, single runs and scans.

pub mod ansatz;
pub mod cost;
pub mod error;
pub mod fock;
pub mod hamiltonian;
pub mod linalg;
pub mod optimizer;
pub mod oracle;
pub mod pool;
pub mod runner;

pub use ansatz::Ansatz;
pub use error::{Error, Result};
pub use fock::{Determinant, SectorBasis, Spin};
pub use hamiltonian::{FcidumpData, HubbardSpec, SectorHamiltonian};
pub use pool::{OperatorId, OperatorKind, OperatorPool, PoolTables};
