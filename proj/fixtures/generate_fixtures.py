#!/usr/bin/env python3
"""Regenerate the committed integral fixtures.

Not part of the C++ build: requires pyscf. Every file written here is consumed
by the test suites through the FCIDUMP / manifest readers in libsaoovqe.

Layout (relative to this directory):
    h2/                      H2, 1.4 bohr, STO-3G, CAS(2e,2o)
    h4/                      H4 rectangle, CAS(2e,2o), stencil + derivatives
    formaldimine/a130_p90/   CH2NH at alpha=130, phi=90, CAS(4e,3o)
    formaldimine/scan_p90/   alpha scan 100..160 step 5 at phi=90

Fixed-orbital convention: integrals at a displaced geometry are expressed in
the center geometry's MOs, Loewdin-orthonormalized with the displaced AO
overlap, C(x) = C0 (C0^T S(x) C0)^(-1/2).
"""
import json
import os
import sys

import numpy as np
import pyscf
from pyscf import ao2mo, gto, mcscf, scf

ANGSTROM = 1.0 / 0.52917721092
HERE = os.path.dirname(os.path.abspath(__file__))
AXES = "xyz"


# ---------------------------------------------------------------- FCIDUMP


def fcidump_text(h, g, e_core, nelec, ms2=0):
    n = h.shape[0]
    out = [f"&FCI NORB={n},NELEC={nelec},MS2={ms2},",
           " ORBSYM=" + ",".join("1" * n) + ",",
           " ISYM=1,", "&END"]

    def line(v, i, j, k, l):
        return f"{v:24.16e} {i:4d} {j:4d} {k:4d} {l:4d}"

    for i in range(n):
        for j in range(i + 1):
            ij = i * (i + 1) // 2 + j
            for k in range(n):
                for l in range(k + 1):
                    kl = k * (k + 1) // 2 + l
                    if kl > ij:
                        continue
                    v = float(g[i, j, k, l])
                    if v != 0.0:
                        out.append(line(v, i + 1, j + 1, k + 1, l + 1))
    for i in range(n):
        for j in range(i + 1):
            v = float(h[i, j])
            if v != 0.0:
                out.append(line(v, i + 1, j + 1, 0, 0))
    out.append(line(float(e_core), 0, 0, 0, 0))
    return "\n".join(out) + "\n"


def write(path, text):
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path, "w") as f:
        f.write(text)


def mo_integrals(mol, c):
    h = c.T @ mol.intor("int1e_kin") @ c + c.T @ mol.intor("int1e_nuc") @ c
    h = 0.5 * (h + h.T)
    g = ao2mo.restore(1, ao2mo.full(mol, c), c.shape[1])
    return h, g, mol.energy_nuc()


# ------------------------------------------------------------- geometries


def formaldimine(alpha, phi):
    """C at origin, N on +z; alpha = C-N-H bend, phi = H-C-N-H dihedral."""
    rcn, rch, rnh = 1.27 * ANGSTROM, 1.09 * ANGSTROM, 1.03 * ANGSTROM
    hcn = np.deg2rad(121.0)
    c = np.zeros(3)
    n = np.array([0.0, 0.0, rcn])
    h1 = c + rch * np.array([np.sin(hcn), 0.0, np.cos(hcn)])
    h2 = c + rch * np.array([-np.sin(hcn), 0.0, np.cos(hcn)])
    a, p = np.deg2rad(alpha), np.deg2rad(phi)
    h3 = n + rnh * np.array([np.sin(a) * np.cos(p), np.sin(a) * np.sin(p), -np.cos(a)])
    return [("C", c), ("N", n), ("H", h1), ("H", h2), ("H", h3)]


def h4_rectangle(a=1.8, b=2.6):
    return [("H", np.array([sx * a / 2, sy * b / 2, 0.0]))
            for sx, sy in ((-1, -1), (1, -1), (1, 1), (-1, 1))]


def h2(r=1.4):
    return [("H", np.zeros(3)), ("H", np.array([0.0, 0.0, r]))]


def make_mol(atoms):
    return gto.M(atom=[(s, tuple(x)) for s, x in atoms], basis="sto-3g",
                 unit="Bohr", verbose=0)


# ---------------------------------------------------------------- SA-CASSCF


def sa_casscf(mol, ncas, nelecas, mo0=None, mol0=None):
    mf = scf.RHF(mol).run(conv_tol=1e-12)
    mc = mcscf.CASSCF(mf, ncas, nelecas)
    mc.fix_spin_(ss=0)
    mc = mc.state_average_([0.5, 0.5])
    mc.conv_tol = 1e-12
    mc.conv_tol_grad = 1e-6
    mc.max_cycle_macro = 300
    if mo0 is not None:
        mo0 = mcscf.project_init_guess(mc, mo0, mol0)
    mc.kernel(mo0)
    if not mc.converged:
        sys.exit("SA-CASSCF did not converge")
    return mf, mc


def align_signs(c_ref, c, s):
    d = np.einsum("pi,pq,qi->i", c_ref, s, c)
    return c * np.where(d < 0, -1.0, 1.0)


def displaced(atoms, atom, axis, delta):
    out = [(s, x.copy()) for s, x in atoms]
    out[atom][1][axis] += delta
    return out


def fixed_orbital_integrals(atoms, c0):
    mol = make_mol(atoms)
    s_mo = c0.T @ mol.intor("int1e_ovlp") @ c0
    w, v = np.linalg.eigh(s_mo)
    c = c0 @ (v * w ** -0.5) @ v.T
    return mo_integrals(mol, c)


def write_stencil(dirname, atoms, c0, nelec, step):
    lines = ["# stencil manifest: <label> <path> <convention>",
             f"step {step:.6e}", "tracking phase-matched",
             "center center.fcidump fixed-orbital"]
    h, g, e = fixed_orbital_integrals(atoms, c0)
    write(os.path.join(dirname, "center.fcidump"), fcidump_text(h, g, e, nelec))
    for a in range(len(atoms)):
        for k in range(3):
            label = f"{a}{AXES[k]}"
            for sign, tag in ((1, "p"), (-1, "m")):
                h, g, e = fixed_orbital_integrals(displaced(atoms, a, k, sign * step), c0)
                name = f"{label}_{tag}.fcidump"
                write(os.path.join(dirname, name), fcidump_text(h, g, e, nelec))
                lines.append(f"{label}{'+' if sign > 0 else '-'} {name} fixed-orbital")
    write(os.path.join(dirname, "manifest.txt"), "\n".join(lines) + "\n")


def write_derivatives(dirname, atoms, c0, nelec, step=1e-3):
    """Fourth-order central differences of the fixed-orbital integrals."""
    lines = ["# derivative manifest: <label> <path> <convention>"]
    sums = {k: 0.0 for k in AXES}
    for a in range(len(atoms)):
        for k in range(3):
            label = f"{a}{AXES[k]}"
            f = {m: fixed_orbital_integrals(displaced(atoms, a, k, m * step), c0)
                 for m in (-2, -1, 1, 2)}
            coef = {-2: 1.0, -1: -8.0, 1: 8.0, 2: -1.0}
            dh = sum(coef[m] * f[m][0] for m in coef) / (12 * step)
            dg = sum(coef[m] * f[m][1] for m in coef) / (12 * step)
            de = sum(coef[m] * f[m][2] for m in coef) / (12 * step)
            sums[AXES[k]] += abs(de)
            name = f"d{label}.fcidump"
            write(os.path.join(dirname, name), fcidump_text(dh, dg, de, nelec))
            lines.append(f"{label} {name} fixed-orbital")
    write(os.path.join(dirname, "manifest.txt"), "\n".join(lines) + "\n")
    write_connection(os.path.join(dirname, "connection.txt"), atoms, c0, step)


def frame_overlap(mol0, atoms, c0):
    """<phi_p(center)|chi_q(x)> with chi the fixed-orbital frame at x."""
    mol = make_mol(atoms)
    s_mo = c0.T @ mol.intor("int1e_ovlp") @ c0
    w, v = np.linalg.eigh(s_mo)
    c = c0 @ (v * w ** -0.5) @ v.T
    return c0.T @ gto.intor_cross("int1e_ovlp", mol0, mol) @ c


def write_connection(path, atoms, c0, step=1e-3):
    """Frame connection X_pq = <phi_p|d chi_q/dx>, antisymmetric; p > q listed, 1-based."""
    mol0 = make_mol(atoms)
    lines = ["# frame connection: <label> <p> <q> <value>"]
    for a in range(len(atoms)):
        for k in range(3):
            f = {m: frame_overlap(mol0, displaced(atoms, a, k, m * step), c0)
                 for m in (-2, -1, 1, 2)}
            x = (f[-2] - 8.0 * f[-1] + 8.0 * f[1] - f[2]) / (12 * step)
            x = 0.5 * (x - x.T)
            for p in range(x.shape[0]):
                for q in range(p):
                    lines.append(f"{a}{AXES[k]} {p + 1:4d} {q + 1:4d} {x[p, q]:24.16e}")
    write(path, "\n".join(lines) + "\n")


def meta_common(mol, atoms, mc, ncas, nelecas, active):
    return {
        "backend": "pyscf", "backend_version": pyscf.__version__,
        "basis": "sto-3g", "units": {"energy": "hartree", "length": "bohr",
                                      "gradient": "hartree/bohr", "nac": "1/bohr"},
        "atoms": [s for s, _ in atoms],
        "geometry_bohr": [list(map(float, x)) for _, x in atoms],
        "norb": int(mol.nao), "nelec": int(mol.nelectron),
        "cas": {"n_elec": nelecas, "n_orb": ncas}, "active_indices": active,
        "weights": [0.5, 0.5],
        "e0": float(mc.e_states[0]), "e1": float(mc.e_states[1]),
        "e_sa": float(mc.e_tot),
    }


def coords(atoms):
    return [f"{a}{AXES[k]}" for a in range(len(atoms)) for k in range(3)]


# -------------------------------------------------------------- fixtures


def gen_h2():
    atoms = h2()
    mol = make_mol(atoms)
    mf, mc = sa_casscf(mol, 2, 2)
    h, g, e = mo_integrals(mol, mc.mo_coeff)
    d = os.path.join(HERE, "h2")
    write(os.path.join(d, "h2.fcidump"), fcidump_text(h, g, e, 2))
    meta = meta_common(mol, atoms, mc, 2, 2, [0, 1])
    write(os.path.join(d, "meta.json"), json.dumps(meta, indent=2) + "\n")


def gen_h4():
    atoms = h4_rectangle()
    mol = make_mol(atoms)
    mf, mc = sa_casscf(mol, 2, 2)
    c0 = mc.mo_coeff
    d = os.path.join(HERE, "h4")
    h, g, e = mo_integrals(mol, c0)
    write(os.path.join(d, "center.fcidump"), fcidump_text(h, g, e, 4))
    h, g, e = mo_integrals(mol, mf.mo_coeff)
    write(os.path.join(d, "rhf.fcidump"), fcidump_text(h, g, e, 4))
    write_stencil(os.path.join(d, "stencil_1e-3"), atoms, c0, 4, 1e-3)
    write_derivatives(os.path.join(d, "derivs"), atoms, c0, 4)
    meta = meta_common(mol, atoms, mc, 2, 2, [1, 2])
    meta["coordinates"] = coords(atoms)
    meta["nac01"] = mc.nac_method().kernel(state=(0, 1)).ravel().tolist()
    meta["nac01_ci"] = mc.nac_method().kernel(state=(0, 1), use_etfs=True).ravel().tolist()
    write(os.path.join(d, "meta.json"), json.dumps(meta, indent=2) + "\n")


def gen_formaldimine_point():
    atoms = formaldimine(130.0, 90.0)
    mol = make_mol(atoms)
    mf, mc = sa_casscf(mol, 3, 4)
    c0 = mc.mo_coeff
    d = os.path.join(HERE, "formaldimine", "a130_p90")
    h, g, e = mo_integrals(mol, c0)
    write(os.path.join(d, "center.fcidump"), fcidump_text(h, g, e, 16))
    h, g, e = mo_integrals(mol, mf.mo_coeff)
    write(os.path.join(d, "rhf.fcidump"), fcidump_text(h, g, e, 16))
    write_stencil(os.path.join(d, "stencil_1e-3"), atoms, c0, 16, 1e-3)
    write_stencil(os.path.join(d, "stencil_5e-4"), atoms, c0, 16, 5e-4)
    write_derivatives(os.path.join(d, "derivs"), atoms, c0, 16)
    meta = meta_common(mol, atoms, mc, 3, 4, [6, 7, 8])
    meta["alpha_deg"], meta["phi_deg"] = 130.0, 90.0
    meta["bond_lengths_angstrom"] = {"CN": 1.27, "CH": 1.09, "NH": 1.03}
    meta["hcn_angle_deg"] = 121.0
    meta["coordinates"] = coords(atoms)
    meta["grad0"] = mc.nuc_grad_method().kernel(state=0).ravel().tolist()
    meta["grad1"] = mc.nuc_grad_method().kernel(state=1).ravel().tolist()
    meta["nac01"] = mc.nac_method().kernel(state=(0, 1)).ravel().tolist()
    meta["nac01_ci"] = mc.nac_method().kernel(state=(0, 1), use_etfs=True).ravel().tolist()
    write(os.path.join(d, "meta.json"), json.dumps(meta, indent=2) + "\n")


def gen_formaldimine_scan():
    """Sweep outward from alpha=130 so every point is warm-started from a converged neighbour."""
    d = os.path.join(HERE, "formaldimine", "scan_p90")
    alphas = [100.0 + 5.0 * i for i in range(13)]
    start = alphas.index(130.0)
    order = alphas[start:] + alphas[start - 1::-1]
    solved = {}
    for alpha in order:
        atoms = formaldimine(alpha, 90.0)
        mol = make_mol(atoms)
        nb = alpha - 5.0 if alpha > 130.0 else alpha + 5.0
        if alpha == 130.0:
            mf, mc = sa_casscf(mol, 3, 4)
            c = mc.mo_coeff
        else:
            c_prev, mol_prev, _ = solved[nb]
            mf, mc = sa_casscf(mol, 3, 4, c_prev, mol_prev)
            c = align_signs(c_prev, mc.mo_coeff, mol.intor("int1e_ovlp"))
        solved[alpha] = (c, mol, mc)
        print(f"alpha={alpha:.0f} e0={mc.e_states[0]:.10f} e1={mc.e_states[1]:.10f}")
    lines = ["# scan manifest: <alpha_deg> <path>"]
    points = []
    for alpha in alphas:
        c, mol, mc = solved[alpha]
        h, g, e = mo_integrals(mol, c)
        name = f"a{int(round(alpha)):03d}.fcidump"
        write(os.path.join(d, name), fcidump_text(h, g, e, 16))
        lines.append(f"{alpha:.1f} {name}")
        points.append({"alpha_deg": alpha, "file": name,
                       "e0": float(mc.e_states[0]), "e1": float(mc.e_states[1])})
    write(os.path.join(d, "manifest.txt"), "\n".join(lines) + "\n")
    meta = {"backend": "pyscf", "backend_version": pyscf.__version__,
            "basis": "sto-3g", "phi_deg": 90.0, "cas": {"n_elec": 4, "n_orb": 3},
            "active_indices": [6, 7, 8], "points": points}
    write(os.path.join(d, "meta.json"), json.dumps(meta, indent=2) + "\n")


if __name__ == "__main__":
    which = sys.argv[1:] or ["h2", "h4", "point", "scan"]
    if "h2" in which:
        gen_h2()
    if "h4" in which:
        gen_h4()
    if "point" in which:
        gen_formaldimine_point()
    if "scan" in which:
        gen_formaldimine_scan()
