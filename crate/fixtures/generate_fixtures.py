"""Regenerate the FCIDUMP fixtures (STO-3G, RHF canonical orbitals).

Requires pyscf. Each fixture gets a sibling `.ref` file holding the FCI
ground-state energy (total, including nuclear repulsion) computed by pyscf,
used as an independent reference in the tests.
"""
import os
import numpy as np
from pyscf import gto, scf, fci, ao2mo, tools

HERE = os.path.dirname(os.path.abspath(__file__))


def write(name, atoms, n_frozen=0):
    mol = gto.M(atom=atoms, basis="sto-3g", unit="Angstrom", verbose=0, symmetry=False)
    mf = scf.RHF(mol)
    mf.conv_tol = 1e-12
    mf.max_cycle = 500
    mf.kernel()
    if not mf.converged:
        mf = scf.newton(mf).run()
    path = os.path.join(HERE, name + ".fcidump")
    tools.fcidump.from_scf(mf, path, tol=1e-14)
    cis = fci.direct_spin1.FCI(mol)
    cis.conv_tol = 1e-13
    e_fci, _ = cis.kernel(
        mf.mo_coeff.T @ mf.get_hcore() @ mf.mo_coeff,
        ao2mo.restore(1, ao2mo.kernel(mol, mf.mo_coeff), mol.nao),
        mol.nao,
        mol.nelectron,
        ecore=mol.energy_nuc(),
    )
    with open(os.path.join(HERE, name + ".ref"), "w") as f:
        f.write(f"fci_energy {e_fci:.15e}\n")
        f.write(f"rhf_energy {mf.e_tot:.15e}\n")
    if n_frozen:
        mc_e = frozen_fci(mol, mf, n_frozen)
        with open(os.path.join(HERE, name + ".ref"), "a") as f:
            f.write(f"frozen{n_frozen}_fci_energy {mc_e:.15e}\n")
    print(name, e_fci)


def frozen_fci(mol, mf, n_frozen):
    from pyscf import mcscf
    ncas = mol.nao - n_frozen
    nelecas = mol.nelectron - 2 * n_frozen
    mc = mcscf.CASCI(mf, ncas, nelecas)
    mc.fcisolver.conv_tol = 1e-13
    return mc.kernel()[0]


def chain(n, r):
    return [["H", (0.0, 0.0, i * r)] for i in range(n)]


def tetrahedron(r):
    a = r / np.sqrt(2.0)
    pts = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]], float) * a / 2.0
    return [["H", tuple(p)] for p in pts]


if __name__ == "__main__":
    write("h2_0.74", chain(2, 0.74))
    write("h4_linear_0.90", chain(4, 0.90))
    write("h4_tetrahedral_1.98", tetrahedron(1.98))
    for r in [0.70, 0.90, 1.10, 1.30, 1.50, 1.80, 2.10, 2.50]:
        write(f"h4_linear_scan_{r:.2f}", chain(4, r))
    for r in [1.00, 1.50, 2.00]:
        write(f"h6_linear_{r:.2f}", chain(6, r))
    for r in [0.96, 1.50, 2.20]:
        th = np.deg2rad(104.5 / 2.0)
        write(f"h2o_{r:.2f}", [["O", (0, 0, 0)], ["H", (0, r * np.sin(th), r * np.cos(th))],
                               ["H", (0, -r * np.sin(th), r * np.cos(th))]])
    for r in [1.10, 1.60, 2.20]:
        write(f"n2_{r:.2f}", [["N", (0, 0, 0)], ["N", (0, 0, r)]], n_frozen=4)
