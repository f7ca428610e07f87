"""Wigner distributions of circular states on masked disk grids.

W is the expectation of the displaced parity D(z) Pi D(z)^dag with no
extra prefactor, so the coherent state peaks at W(0) = 1 and zeros are
normalization-invariant.
"""
from __future__ import annotations

import cmath
import math
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import kernels
from .errors import NumericalError
from .geometry import DiskPoint
from .grids import PhaseSpaceGrid, ScalarField
from .states import CircularStateSpec, _component_array, check_bargmann_index, circular_norm, parity_overlap

IMAG_RESIDUE_TOL = 1e-8


def _wigner_chunk(payload):
    k, comps, zs = payload
    return kernels.wigner_points(k, comps, zs)


def eval_in_chunks(worker, payloads, workers: int):
    """Map worker over payloads, in-process or across a process pool.

    Chunking never changes per-point arithmetic, so results are identical
    for any worker count.
    """
    if workers <= 1 or len(payloads) <= 1:
        return [worker(p) for p in payloads]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(worker, payloads))


def wigner_term(k: float, zi: DiskPoint, zj: DiskPoint, z: DiskPoint) -> complex:
    """Single cross term W_{|zi><zj|}(z) = <zj| D(z) Pi D(z)^dag |zi>.

    Evaluates exp(2ik arg(A/B)) <(zj - z)/A | Pi | (zi - z)/B> with
    A = 1 - zj conj(z), B = 1 - zi conj(z).
    """
    k = check_bargmann_index(k)
    a, b, c = zi.zeta, zj.zeta, z.zeta
    A = 1.0 - b * c.conjugate()
    B = 1.0 - a * c.conjugate()
    uj = DiskPoint((b - c) / A)
    ui = DiskPoint((a - c) / B)
    phase = cmath.exp(2j * k * cmath.phase(A * B.conjugate()))
    return phase * parity_overlap(k, uj, ui)


def wigner_coherent(k: float, z: DiskPoint) -> float:
    """W of the reference coherent state: [(1-|z|^2)/(1+|z|^2)]^(2k)."""
    k = check_bargmann_index(k)
    r2 = abs(z.zeta) ** 2
    return math.exp(2.0 * k * (math.log1p(-r2) - math.log1p(r2)))


def wigner_at(spec: CircularStateSpec, zs, normalize: bool = True):
    """Exact W of the circular state at arbitrary complex points zs.

    Returns (values, max_abs_imag_discarded); values has the shape of zs.
    """
    zs = np.asarray(zs, dtype=complex)
    comps = _component_array(spec)
    vals, max_imag = kernels.wigner_points(spec.k, comps, zs.ravel())
    vals = vals.reshape(zs.shape)
    if normalize:
        vals = vals / circular_norm(spec) ** 2
    return vals, max_imag


def wigner_circular(
    spec: CircularStateSpec,
    grid: PhaseSpaceGrid,
    normalize: bool = True,
    workers: int = 1,
) -> ScalarField:
    """W of the circular state sampled over the masked grid."""
    mask = grid.mask
    flat = grid.zeta[mask]
    comps = _component_array(spec)
    chunks = np.array_split(flat, max(workers, 1))
    results = eval_in_chunks(
        _wigner_chunk, [(spec.k, comps, c) for c in chunks], workers
    )
    vals = np.concatenate([r[0] for r in results]) if results else np.empty(0)
    max_imag = max((r[1] for r in results), default=0.0)
    if normalize:
        vals = vals / circular_norm(spec) ** 2
    out = np.full(grid.shape, np.nan)
    out[mask] = vals
    scale = float(np.max(np.abs(vals))) if vals.size else 0.0
    if scale > 0.0 and max_imag > IMAG_RESIDUE_TOL * scale:
        raise NumericalError(
            f"Wigner imaginary residue {max_imag} exceeds 1e-8 of field max {scale}"
        )
    return ScalarField(grid=grid, values=out, max_abs_imag_discarded=max_imag)
