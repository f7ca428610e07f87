"""Pure-numpy field kernels (fallback backend).

Both kernels evaluate the closed forms for an n-component circular state
at a flat array of phase-space points.  The Cython backend in
_kernels_cy.pyx implements the identical arithmetic; test_kernels pins
the two together.

Stability note: for a Moebius image u = (c - z)/(1 - c conj(z)) the factor
1 - |u|^2 is computed through the exact identity
(1 - |c|^2)(1 - |z|^2)/|1 - c conj(z)|^2 instead of subtracting |u|^2
from 1, which loses digits as |u| -> 1.
"""
from __future__ import annotations

import numpy as np


def wigner_points(k: float, comps: np.ndarray, zs: np.ndarray):
    """Unnormalized Wigner sum over all component pairs at each point.

    Hermitian-conjugate pairs (i,j)+(j,i) are folded into 2*Re of the
    (i<j) term; diagonal terms are real analytically and their residual
    imaginary part is returned as a diagnostic.

    Returns (values, max_abs_imag_discarded).
    """
    comps = np.asarray(comps, dtype=complex)
    zs = np.asarray(zs, dtype=complex)
    n = comps.shape[0]
    zc = np.conj(zs)
    one_m_z2 = 1.0 - np.abs(zs) ** 2
    one_m_c2 = 1.0 - np.abs(comps) ** 2

    out = np.zeros(zs.shape, dtype=float)
    max_imag = 0.0
    for i in range(n):
        for j in range(i, n):
            zi, zj = comps[i], comps[j]
            A = 1.0 - zj * zc
            B = 1.0 - zi * zc
            uj = (zj - zs) / A
            ui = (zi - zs) / B
            gj = one_m_c2[j] * one_m_z2 / (A.real**2 + A.imag**2)
            gi = one_m_c2[i] * one_m_z2 / (B.real**2 + B.imag**2)
            term = np.exp(
                k * (np.log(gj) + np.log(gi))
                - 2.0 * k * np.log(1.0 + np.conj(uj) * ui)
                + 2j * k * np.angle(A * np.conj(B))
            )
            if i == j:
                mi = float(np.max(np.abs(term.imag))) if term.size else 0.0
                max_imag = max(max_imag, mi)
                out += term.real
            else:
                out += 2.0 * term.real
    return out, max_imag


def overlap_sums(k: float, comps: np.ndarray, ds: np.ndarray) -> np.ndarray:
    """Unnormalized displacement-overlap sum sum_ij <z_i| D(d) |z_j>
    at each displacement d."""
    comps = np.asarray(comps, dtype=complex)
    ds = np.asarray(ds, dtype=complex)
    n = comps.shape[0]
    one_m_d2 = 1.0 - np.abs(ds) ** 2
    one_m_c2 = 1.0 - np.abs(comps) ** 2

    out = np.zeros(ds.shape, dtype=complex)
    for j in range(n):
        zj = comps[j]
        den = 1.0 + np.conj(ds) * zj
        zjp = (zj + ds) / den
        gjp = one_m_c2[j] * one_m_d2 / (den.real**2 + den.imag**2)
        phase = -2j * k * np.angle(den)
        log_gjp = np.log(gjp)
        for i in range(n):
            zi = comps[i]
            out += np.exp(
                k * (np.log(one_m_c2[i]) + log_gjp)
                - 2.0 * k * np.log(1.0 - np.conj(zi) * zjp)
                + phase
            )
    return out
