//! Independent reference constructions for integration tests.
//!
//! Operators are built from second-quantised strings acting on Fock-space
//! occupation bitmasks (mode `p` is alpha orbital `p`, mode `n + p` is beta
//! orbital `p`), with no use of the crate's Slater-Condon rules.

#![allow(dead_code)]

use disco_core::hamiltonian::Integrals;
use disco_core::{Determinant, SectorBasis};
use nalgebra::DMatrix;
use rand::Rng;

/// One ladder operator: `(creation, mode)`.
pub type Ladder = (bool, usize);

/// Applies a product of ladder operators (rightmost first) to a basis state.
pub fn apply_string(ops: &[Ladder], state: u128) -> Option<(f64, u128)> {
    let mut s = state;
    let mut sign = 1.0;
    for &(create, mode) in ops.iter().rev() {
        let bit = 1u128 << mode;
        let occupied = s & bit != 0;
        if create == occupied {
            return None;
        }
        if (s & (bit - 1)).count_ones() % 2 == 1 {
            sign = -sign;
        }
        s ^= bit;
    }
    Some((sign, s))
}

pub fn fock_index(det: &Determinant, n: usize) -> u128 {
    det.alpha as u128 | ((det.beta as u128) << n)
}

/// Matrix of `sum_k c_k * string_k` in the sector basis.
pub fn sector_matrix(basis: &SectorBasis, terms: &[(f64, Vec<Ladder>)]) -> DMatrix<f64> {
    let n = basis.n_orbitals();
    let d = basis.len();
    let lookup: std::collections::HashMap<u128, usize> =
        (0..d).map(|i| (fock_index(&basis.get(i), n), i)).collect();
    let mut m = DMatrix::zeros(d, d);
    for j in 0..d {
        let b = fock_index(&basis.get(j), n);
        for (c, ops) in terms {
            if *c == 0.0 {
                continue;
            }
            if let Some((sign, out)) = apply_string(ops, b) {
                let i = *lookup.get(&out).expect("operator left the sector");
                m[(i, j)] += c * sign;
            }
        }
    }
    m
}

fn a(mode: usize) -> Ladder {
    (false, mode)
}

fn c(mode: usize) -> Ladder {
    (true, mode)
}

/// `sum h_pq a+_ps a_qs + 1/2 sum (pq|rs) a+_ps a+_rt a_st a_qs + E_core`.
pub fn hamiltonian_terms(g: &Integrals) -> Vec<(f64, Vec<Ladder>)> {
    let n = g.n_orbitals();
    let mut terms = Vec::new();
    for s in 0..2 {
        for p in 0..n {
            for q in 0..n {
                terms.push((g.h(p, q), vec![c(p + s * n), a(q + s * n)]));
            }
        }
    }
    for s in 0..2 {
        for t in 0..2 {
            for p in 0..n {
                for q in 0..n {
                    for r in 0..n {
                        for u in 0..n {
                            let v = 0.5 * g.eri(p, q, r, u);
                            terms.push((v, vec![c(p + s * n), c(r + t * n), a(u + t * n), a(q + s * n)]));
                        }
                    }
                }
            }
        }
    }
    terms
}

pub fn hamiltonian_matrix(g: &Integrals, basis: &SectorBasis) -> DMatrix<f64> {
    let mut m = sector_matrix(basis, &hamiltonian_terms(g));
    for i in 0..m.nrows() {
        m[(i, i)] += g.core_energy;
    }
    m
}

/// `κ = (a+_q a_p + a+_qb a_pb) - h.c.`
pub fn single_generator(basis: &SectorBasis, p: usize, q: usize) -> DMatrix<f64> {
    let n = basis.n_orbitals();
    let mut terms = Vec::new();
    for s in 0..2 {
        terms.push((1.0, vec![c(q + s * n), a(p + s * n)]));
        terms.push((-1.0, vec![c(p + s * n), a(q + s * n)]));
    }
    sector_matrix(basis, &terms)
}

/// `κ = a+_q a+_qb a_pb a_p - h.c.`
pub fn pair_generator(basis: &SectorBasis, p: usize, q: usize) -> DMatrix<f64> {
    let n = basis.n_orbitals();
    let terms = vec![
        (1.0, vec![c(q), c(q + n), a(p + n), a(p)]),
        (-1.0, vec![c(p), c(p + n), a(q + n), a(q)]),
    ];
    sector_matrix(basis, &terms)
}

pub fn generator(basis: &SectorBasis, op: &disco_core::OperatorId) -> DMatrix<f64> {
    match op.kind {
        disco_core::OperatorKind::SpinAdaptedSingle => single_generator(basis, op.p, op.q),
        disco_core::OperatorKind::PairedDouble => pair_generator(basis, op.p, op.q),
    }
}

/// `S^2 = S- S+ + Sz (Sz + 1)` from ladder strings.
pub fn s_squared_matrix(basis: &SectorBasis) -> DMatrix<f64> {
    let n = basis.n_orbitals();
    let mut terms = Vec::new();
    // S- S+ = sum_pq a+_pb a_pa a+_qa a_qb
    for p in 0..n {
        for q in 0..n {
            terms.push((1.0, vec![c(p + n), a(p), c(q), a(q + n)]));
        }
    }
    let mut m = sector_matrix(basis, &terms);
    let sz = 0.5 * (basis.n_alpha() as f64 - basis.n_beta() as f64);
    for i in 0..m.nrows() {
        m[(i, i)] += sz * (sz + 1.0);
    }
    m
}

pub fn s_z_matrix(basis: &SectorBasis) -> DMatrix<f64> {
    let n = basis.n_orbitals();
    let mut terms = Vec::new();
    for p in 0..n {
        terms.push((0.5, vec![c(p), a(p)]));
        terms.push((-0.5, vec![c(p + n), a(p + n)]));
    }
    sector_matrix(basis, &terms)
}

/// Random real integrals with full eight-fold symmetry.
pub fn random_integrals<R: Rng>(n: usize, rng: &mut R) -> Integrals {
    let mut g = Integrals::zeros(n);
    for p in 0..n {
        for q in 0..=p {
            let v = rng.gen_range(-1.0..1.0) + if p == q { -(n as f64) + p as f64 } else { 0.0 };
            g.set_h(p, q, v);
        }
    }
    for p in 0..n {
        for q in 0..n {
            for r in 0..n {
                for s in 0..n {
                    if (p * n + q) >= (r * n + s) && p >= q && r >= s {
                        let v = rng.gen_range(-0.3..0.3) + if p == q && r == s { 0.5 } else { 0.0 };
                        g.set_eri(p, q, r, s, v);
                    }
                }
            }
        }
    }
    g.core_energy = rng.gen_range(-1.0..1.0);
    g
}

pub fn to_dmatrix(rows: Vec<Vec<f64>>) -> DMatrix<f64> {
    let n = rows.len();
    DMatrix::from_fn(n, n, |i, j| rows[i][j])
}

pub fn fixture(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

/// `key value` lines of a `.ref` file.
pub fn reference_value(name: &str, key: &str) -> f64 {
    let text = std::fs::read_to_string(fixture(&format!("{name}.ref"))).unwrap();
    text.lines()
        .find_map(|l| {
            let mut it = l.split_whitespace();
            (it.next() == Some(key)).then(|| it.next().unwrap().parse().unwrap())
        })
        .unwrap_or_else(|| panic!("{key} missing from {name}.ref"))
}
