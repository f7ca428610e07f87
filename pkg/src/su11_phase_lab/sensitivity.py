"""Displacement-overlap sensitivity S(delta) and the coherent baseline.

S is the squared magnitude of <state| D(delta) |state> (normalized by
default, so S(0) = 1).  "Orthogonality" is operationalized as S dropping
below ZERO_THRESHOLD: S is a magnitude squared and touches zero
tangentially, so root-finding brackets the threshold crossing instead.
"""
from __future__ import annotations

import cmath
import math

import numpy as np

from . import kernels
from .errors import DomainError
from .geometry import DiskPoint, mobius_add
from .states import (
    CircularStateSpec,
    _component_array,
    check_bargmann_index,
    circular_norm,
    coherent_overlap,
)
from .grids import PhaseSpaceGrid, ScalarField

ZERO_THRESHOLD = 1e-6
ZERO_SCAN_RMAX = 0.5
ZERO_RESOLUTION = 1e-5


def overlap_term(k: float, zi: DiskPoint, zj: DiskPoint, d: complex) -> complex:
    """Per-pair term <zi| D(d) |zj> =
    e^{-2ik arg(1 + conj(d) zj)} <zi | (d + zj)/(1 + conj(d) zj)>."""
    k = check_bargmann_index(k)
    d = complex(d)
    if abs(d) >= 1.0:
        raise DomainError(f"|d| = {abs(d)} must be < 1")
    den = 1.0 + d.conjugate() * zj.zeta
    phase = cmath.exp(-2j * k * cmath.phase(den))
    return phase * coherent_overlap(k, zi, mobius_add(zj, d))


def overlap_circular(spec: CircularStateSpec, d: complex, normalize: bool = True) -> float:
    """S(delta) = |sum_ij overlap_term|^2 (divided by norm^4 if normalized)."""
    return float(overlap_at(spec, np.asarray(complex(d)), normalize=normalize))


def overlap_at(spec: CircularStateSpec, ds, normalize: bool = True):
    """Vectorized S(delta) over an array of displacements."""
    ds = np.asarray(ds, dtype=complex)
    if np.any(np.abs(ds) >= 1.0):
        raise DomainError("all |delta| must be < 1")
    total = kernels.overlap_sums(spec.k, _component_array(spec), ds.ravel())
    if normalize:
        total = total / circular_norm(spec) ** 2
    return (np.abs(total) ** 2).reshape(ds.shape)


def _overlap_chunk(payload):
    k, comps, ds = payload
    return kernels.overlap_sums(k, comps, ds)


def overlap_grid(
    spec: CircularStateSpec,
    grid: PhaseSpaceGrid,
    normalize: bool = True,
    workers: int = 1,
) -> ScalarField:
    """S(delta) sampled over the masked grid of displacements."""
    from .wigner import eval_in_chunks

    mask = grid.mask
    flat = grid.zeta[mask]
    comps = _component_array(spec)
    chunks = np.array_split(flat, max(workers, 1))
    sums = eval_in_chunks(
        _overlap_chunk, [(spec.k, comps, c) for c in chunks], workers
    )
    total = np.concatenate(sums) if sums else np.empty(0, dtype=complex)
    if normalize:
        total = total / circular_norm(spec) ** 2
    vals = np.abs(total) ** 2
    out = np.full(grid.shape, np.nan)
    out[mask] = vals
    return ScalarField(grid=grid, values=out, max_abs_imag_discarded=0.0)


def sql_baseline(k: float, d: complex) -> float:
    """Exact coherent-state overlap (1-|d|^2)^(2k).

    The small-|d| exponential approximation exp(-2k |d|^2) is available as
    sql_baseline_gaussian for comparison plots.
    """
    k = check_bargmann_index(k)
    d = complex(d)
    if abs(d) >= 1.0:
        raise DomainError(f"|d| = {abs(d)} must be < 1")
    return math.exp(2.0 * k * math.log1p(-abs(d) ** 2))


def sql_baseline_gaussian(k: float, d: complex) -> float:
    """Gaussian approximation exp(-2k |d|^2) of the baseline (diagnostic)."""
    k = check_bargmann_index(k)
    return math.exp(-2.0 * k * abs(complex(d)) ** 2)


def sql_efolding_radius(k: float) -> float:
    """Radius where the exact baseline falls to 1/e:
    sqrt(1 - exp(-1/(2k))).  The baseline never vanishes, so this level
    set stands in for its sensitivity scale."""
    k = check_bargmann_index(k)
    return math.sqrt(-math.expm1(-1.0 / (2.0 * k)))


def first_zero_radius(
    spec: CircularStateSpec,
    theta: float,
    normalize: bool = True,
    threshold: float = ZERO_THRESHOLD,
    rmax: float = ZERO_SCAN_RMAX,
    resolution: float = ZERO_RESOLUTION,
):
    """Smallest r > 0 with S(r e^{i theta}) < threshold, or None if S stays
    above the threshold for all r up to rmax.

    A coarse scan brackets candidate dips (S below sqrt(threshold)); each
    candidate is rescanned at `resolution` and the winning crossing is
    bisected down to `resolution` width.
    """
    direction = cmath.exp(1j * theta)

    def S(rs):
        return overlap_at(spec, np.asarray(rs) * direction, normalize=normalize)

    coarse_step = max(resolution, 2e-4)
    rs = np.arange(0.0, rmax + coarse_step, coarse_step)
    rs[0] = 0.0
    vals = S(rs)
    guard = math.sqrt(threshold)

    in_dip = vals < guard
    if not in_dip.any():
        return None
    # contiguous candidate windows, in order of increasing r
    idx = np.where(in_dip)[0]
    splits = np.where(np.diff(idx) > 1)[0]
    groups = np.split(idx, splits + 1)
    for g in groups:
        lo = max(rs[g[0]] - coarse_step, 0.0)
        hi = min(rs[g[-1]] + coarse_step, rmax)
        fine = np.arange(lo, hi + resolution, resolution)
        fv = S(fine)
        hits = np.where(fv < threshold)[0]
        if len(hits) == 0:
            continue
        h = hits[0]
        if h == 0:
            return float(fine[0])
        a, b = fine[h - 1], fine[h]
        # bisect the threshold crossing to `resolution`
        while b - a > resolution:
            mid = 0.5 * (a + b)
            if float(S(np.asarray([mid]))[0]) < threshold:
                b = mid
            else:
                a = mid
        return float(b)
    return None
