#!/usr/bin/env python3
"""Reference fixture generator for the H2/STO-3G test suite.

Independent NumPy implementation of the closed-form s-type Gaussian
integrals, restricted Hartree-Fock, and determinant-basis full CI used to
pin the chemistry fixtures consumed by the C++ tests. Spot values are
anchored against the standard literature numbers for H2/STO-3G at
R = 1.4 bohr (Szabo & Ostlund, Sec. 3.5.2) before anything is written.

Run from the repository root:

    python3 tools/gen_fixtures.py

writes tests/fixtures/h2_sto3g.json.
"""

import itertools
import json
import math
import os

import numpy as np

BOHR_PER_ANGSTROM = 1.0 / 0.52917721092

# STO-3G hydrogen s-function (zeta = 1.24), standard published data.
STO3G_H_EXPS = [3.42525091, 0.62391373, 0.16885540]
STO3G_H_COEFFS = [0.15432897, 0.53532814, 0.44463454]


def boys_f0(x):
    if x < 1e-6:
        return 1.0 - x / 3.0 + x * x / 10.0
    return 0.5 * math.sqrt(math.pi / x) * math.erf(math.sqrt(x))


class Basis:
    """Two contracted s-functions on the two protons (z-axis), R in bohr."""

    def __init__(self, r_bohr):
        self.centers = [np.array([0.0, 0.0, -r_bohr / 2]),
                        np.array([0.0, 0.0, +r_bohr / 2])]
        # primitive normalization (2a/pi)^(3/4), then contracted-function
        # renormalization (published coefficients leave a ~1e-8 residue)
        norms = [(2.0 * a / math.pi) ** 0.75 for a in STO3G_H_EXPS]
        w = [c * n for c, n in zip(STO3G_H_COEFFS, norms)]
        self_overlap = sum(
            wa * wb * (math.pi / (aa + ab)) ** 1.5
            for aa, wa in zip(STO3G_H_EXPS, w)
            for ab, wb in zip(STO3G_H_EXPS, w))
        self.weights = [x / math.sqrt(self_overlap) for x in w]
        self.r_bohr = r_bohr

    def prims(self, mu):
        for a, w in zip(STO3G_H_EXPS, self.weights):
            yield a, w, self.centers[mu]


def one_electron(basis):
    nb = 2
    S = np.zeros((nb, nb))
    T = np.zeros((nb, nb))
    V = np.zeros((nb, nb))
    Dz = np.zeros((nb, nb))  # <mu| z |nu>, origin at bond midpoint
    for mu in range(nb):
        for nu in range(nb):
            for a, ca, A in basis.prims(mu):
                for b, cb, B in basis.prims(nu):
                    p = a + b
                    ab2 = float(np.dot(A - B, A - B))
                    pref = math.exp(-a * b / p * ab2)
                    s = (math.pi / p) ** 1.5 * pref
                    t = a * b / p * (3.0 - 2.0 * a * b / p * ab2) * s
                    P = (a * A + b * B) / p
                    v = 0.0
                    for C in basis.centers:
                        pc2 = float(np.dot(P - C, P - C))
                        v -= 2.0 * math.pi / p * pref * boys_f0(p * pc2)
                    S[mu, nu] += ca * cb * s
                    T[mu, nu] += ca * cb * t
                    V[mu, nu] += ca * cb * v
                    Dz[mu, nu] += ca * cb * s * P[2]
    return S, T, V, Dz


def two_electron(basis):
    nb = 2
    g = np.zeros((nb, nb, nb, nb))
    for mu, nu, rho, tau in itertools.product(range(nb), repeat=4):
        val = 0.0
        for a, ca, A in basis.prims(mu):
            for b, cb, B in basis.prims(nu):
                for c, cc, C in basis.prims(rho):
                    for d, cd, D in basis.prims(tau):
                        p = a + b
                        q = c + d
                        P = (a * A + b * B) / p
                        Q = (c * C + d * D) / q
                        ab2 = float(np.dot(A - B, A - B))
                        cd2 = float(np.dot(C - D, C - D))
                        pq2 = float(np.dot(P - Q, P - Q))
                        pref = math.exp(-a * b / p * ab2 - c * d / q * cd2)
                        val += (ca * cb * cc * cd * 2.0 * math.pi ** 2.5
                                / (p * q * math.sqrt(p + q)) * pref
                                * boys_f0(p * q / (p + q) * pq2))
        g[mu, nu, rho, tau] = val
    return g


def rhf(S, hcore, g, e_nuc, max_iter=200, tol=1e-13):
    """Closed-shell RHF for 2 electrons; returns (e_tot, C, eps)."""
    s_val, s_vec = np.linalg.eigh(S)
    X = s_vec @ np.diag(s_val ** -0.5) @ s_vec.T
    D = np.zeros_like(S)
    e_old = 0.0
    for _ in range(max_iter):
        J = np.einsum('pqrs,rs->pq', g, D)
        K = np.einsum('prqs,rs->pq', g, D)
        F = hcore + J - 0.5 * K
        Fp = X.T @ F @ X
        eps, Cp = np.linalg.eigh(Fp)
        C = X @ Cp
        Cocc = C[:, :1]
        D = 2.0 * Cocc @ Cocc.T
        e_el = 0.5 * np.sum(D * (hcore + F))
        if abs(e_el - e_old) < tol:
            break
        e_old = e_el
    # deterministic MO phase: first AO coefficient positive
    for p in range(C.shape[1]):
        if C[0, p] < 0:
            C[:, p] = -C[:, p]
    return e_el + e_nuc, C, eps


def mo_integrals(hcore, g, Dz, C):
    h_mo = C.T @ hcore @ C
    g_mo = np.einsum('mp,nq,mnrt,rr_,tt_->pq r_ t_'.replace(' ', ''),
                     C, C, g, C, C) if False else \
        np.einsum('mnrt,mp,nq,rs,tu->pqsu', g, C, C, C, C)
    z_mo = C.T @ Dz @ C
    return h_mo, g_mo, z_mo


def spin_orbital_tables(h_mo, g_mo):
    """Interleaved (alpha,beta) spin orbitals: index 2p + sigma."""
    n = 2 * h_mo.shape[0]
    h = np.zeros((n, n))
    g = np.zeros((n, n, n, n))
    for P in range(n):
        for Q in range(n):
            p, sp = divmod(P, 2)
            q, sq = divmod(Q, 2)
            if sp == sq:
                h[P, Q] = h_mo[p, q]
    for P, Q, R, T in itertools.product(range(n), repeat=4):
        p, sp = divmod(P, 2)
        q, sq = divmod(Q, 2)
        r, sr = divmod(R, 2)
        t, st = divmod(T, 2)
        if sp == sq and sr == st:
            g[P, Q, R, T] = g_mo[p, q, r, t]
    return h, g


# ---- Jordan-Wigner on 4 qubits (qubit 0 = most significant bit) ----

PAULI = {
    'I': np.eye(2, dtype=complex),
    'X': np.array([[0, 1], [1, 0]], dtype=complex),
    'Y': np.array([[0, -1j], [1j, 0]], dtype=complex),
    'Z': np.array([[1, 0], [0, -1]], dtype=complex),
}


def word_matrix(word):
    m = np.array([[1.0 + 0j]])
    for ch in word:
        m = np.kron(m, PAULI[ch])
    return m


def ladder(n, p, dagger):
    """JW image of c_p (or c_p^dagger) as dense matrix."""
    xw = ['Z'] * p + ['X'] + ['I'] * (n - p - 1)
    yw = ['Z'] * p + ['Y'] + ['I'] * (n - p - 1)
    x = word_matrix(''.join(xw))
    y = word_matrix(''.join(yw))
    return 0.5 * (x - 1j * y) if dagger else 0.5 * (x + 1j * y)


def hamiltonian_matrix(h, g, e_nuc):
    n = h.shape[0]
    dim = 2 ** n
    H = np.zeros((dim, dim), dtype=complex)
    cd = [ladder(n, p, True) for p in range(n)]
    c = [ladder(n, p, False) for p in range(n)]
    for p in range(n):
        for q in range(n):
            if abs(h[p, q]) > 1e-14:
                H += h[p, q] * cd[p] @ c[q]
    for p, q, r, s in itertools.product(range(n), repeat=4):
        if abs(g[p, q, r, s]) > 1e-14:
            H += 0.5 * g[p, q, r, s] * cd[p] @ cd[r] @ c[s] @ c[q]
    H += e_nuc * np.eye(dim)
    return H


def number_matrix(n):
    dim = 2 ** n
    N = np.zeros((dim, dim))
    for i in range(dim):
        N[i, i] = bin(i).count('1')
    return N


def sector_ground(H, nelec=2):
    """Lowest eigenvalue among eigenstates with <N> = nelec."""
    dim = H.shape[0]
    n = int(math.log2(dim))
    idx = [i for i in range(dim) if bin(i).count('1') == nelec]
    Hs = H[np.ix_(idx, idx)]
    w = np.linalg.eigvalsh(Hs)
    return w[0]


# ---- 2-qubit reduction: g/u orbital-parity sector {0, 3, 12, 15} ----

SECTOR = [0, 3, 12, 15]


def reduce_2q(H16):
    B = np.zeros((16, 4))
    for j, s in enumerate(SECTOR):
        B[s, j] = 1.0
    return B.T @ H16 @ B


def commutes_with_parities(H16, tol=1e-10):
    zz_g = word_matrix('ZZII')
    zz_u = word_matrix('IIZZ')
    c1 = np.linalg.norm(H16 @ zz_g - zz_g @ H16)
    c2 = np.linalg.norm(H16 @ zz_u - zz_u @ H16)
    return max(c1, c2) < tol


def chem_pipeline(r_ang, field=0.0):
    """Full pipeline at bond length r (angstrom) and axial field strength.

    Returns dict with AO integrals, RHF, 16x16 JW Hamiltonian (in the
    field-relaxed MO basis), 4x4 reduced block, and the MO z-matrix.
    """
    r_bohr = r_ang * BOHR_PER_ANGSTROM
    basis = Basis(r_bohr)
    S, T, V, Dz = one_electron(basis)
    g_ao = two_electron(basis)
    e_nuc = 1.0 / r_bohr
    # H(F) = H + F*mu, mu = -z (electronic; nuclear part zero at midpoint)
    hcore = T + V - field * Dz
    e_hf, C, eps = rhf(S, hcore, g_ao, e_nuc)
    h_mo, g_mo, z_mo = mo_integrals(hcore, g_ao, Dz, C)
    h_so, g_so = spin_orbital_tables(h_mo, g_mo)
    H16 = hamiltonian_matrix(h_so, g_so, e_nuc)
    return {
        'S': S, 'T': T, 'V': V, 'Dz': Dz, 'g_ao': g_ao, 'e_nuc': e_nuc,
        'e_hf': e_hf, 'C': C, 'eps': eps, 'z_mo': z_mo,
        'H16': H16, 'H4': reduce_2q(H16),
        'commutes': commutes_with_parities(H16),
    }


def fci_energy(r_ang, field=0.0):
    return sector_ground(chem_pipeline(r_ang, field)['H16'])


def reduced_ground(r_ang, field=0.0):
    w = np.linalg.eigvalsh(chem_pipeline(r_ang, field)['H4'])
    return w[0]


def sanity_anchor():
    """Literature anchors: Szabo & Ostlund H2/STO-3G at R = 1.4 bohr."""
    r_ang = 1.4 / BOHR_PER_ANGSTROM
    pipe = chem_pipeline(r_ang)
    S, T, g = pipe['S'], pipe['T'], pipe['g_ao']
    checks = [
        ('S12', S[0, 1], 0.6593, 2e-4),
        ('T11', T[0, 0], 0.7600, 2e-4),
        ('T12', T[0, 1], 0.2365, 2e-4),
        ('(11|11)', g[0, 0, 0, 0], 0.7746, 2e-4),
        ('(11|22)', g[0, 0, 1, 1], 0.5697, 2e-4),
        ('(12|12)', g[0, 1, 0, 1], 0.2970, 2e-4),
        ('E_RHF', pipe['e_hf'], -1.1167, 2e-4),
    ]
    for name, got, want, tol in checks:
        assert abs(got - want) < tol, f'{name}: {got} vs {want}'
    e_fci = sector_ground(pipe['H16'])
    assert abs(e_fci - (-1.1373)) < 2e-4, e_fci
    print('sanity anchors OK (S&O R=1.4 bohr):',
          f"E_RHF={pipe['e_hf']:.8f} E_FCI={e_fci:.8f}")


def main():
    sanity_anchor()
    out = {
        'meta': {
            'system': 'H2 / STO-3G, bond on z axis, origin at midpoint',
            'bohr_per_angstrom': BOHR_PER_ANGSTROM,
            'sto3g_h_exponents': STO3G_H_EXPS,
            'sto3g_h_coefficients': STO3G_H_COEFFS,
            'generator': 'tools/gen_fixtures.py (independent NumPy reference)',
        },
        'energies': [],
    }
    for r in [0.5, 0.7414, 1.0, 1.5]:
        pipe = chem_pipeline(r)
        e_fci = sector_ground(pipe['H16'])
        e_red = np.linalg.eigvalsh(pipe['H4'])[0]
        assert abs(e_red - e_fci) < 1e-10, (r, e_red, e_fci)
        out['energies'].append({
            'r_angstrom': r,
            'e_hf': pipe['e_hf'],
            'e_fci': e_fci,
        })
        print(f'R={r:7.4f} A   E_HF={pipe["e_hf"]:.10f}   '
              f'E_FCI={e_fci:.10f}')

    pipe = chem_pipeline(0.7414)
    out['integrals_at_0p7414'] = {
        'r_angstrom': 0.7414,
        'overlap': pipe['S'].tolist(),
        'h_core': (pipe['T'] + pipe['V']).tolist(),
        'eri': pipe['g_ao'].reshape(-1).tolist(),
        'dipole_z_ao': pipe['Dz'].tolist(),
        'e_nuc': pipe['e_nuc'],
        'mo_z_offdiag': abs(pipe['z_mo'][0, 1]),
    }
    path = os.path.join(os.path.dirname(__file__), '..',
                        'tests', 'fixtures', 'h2_sto3g.json')
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path, 'w') as f:
        json.dump(out, f, indent=1)
    print('wrote', os.path.normpath(path))


if __name__ == '__main__':
    main()
