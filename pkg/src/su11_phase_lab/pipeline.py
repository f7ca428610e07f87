"""Feature-measurement pipeline: ray profiles, node extents, and sweeps.

The central interference feature of a circular state is probed along rays
from the origin.  Where the state has true zeros the first zero is the
natural boundary; along symmetry directions pointing at components the
Wigner function stays positive (the interference dips bottom out on the
exponentially small coherent-blob floor), so the robust boundary marker
is the first pronounced interference node: the first local minimum of
W(r e^{i theta}) falling below a fixed fraction of W(0).  For directions
with genuine zeros the node coincides with the zero dip.
"""
from __future__ import annotations

import math

import numpy as np

from .features import ScalingFit, scaling_exponent
from .sensitivity import first_zero_radius, overlap_at
from .states import CircularStateSpec
from .wigner import wigner_at

NODE_DEPTH = 0.5
NODE_SCAN_POINTS = 4001


def wigner_ray_profile(spec: CircularStateSpec, theta: float, radii, normalize=True):
    """Exact W along the ray r e^{i theta} for the given radii."""
    radii = np.asarray(radii, dtype=float)
    zs = radii * np.exp(1j * theta)
    vals, _ = wigner_at(spec, zs, normalize=normalize)
    return vals


def first_node_radius(radii, values, depth: float = NODE_DEPTH):
    """Radius of the first local minimum dipping below depth * values[0].

    Returns None when no such node exists in the scanned range.  The
    minimum is refined by a parabolic fit through its three samples.
    """
    radii = np.asarray(radii, dtype=float)
    v = np.asarray(values, dtype=float)
    ceiling = depth * v[0]
    for i in range(1, len(v) - 1):
        if v[i] < ceiling and v[i] <= v[i - 1] and v[i] <= v[i + 1]:
            den = v[i - 1] - 2.0 * v[i] + v[i + 1]
            if den > 0:
                shift = 0.5 * (v[i - 1] - v[i + 1]) / den
                shift = max(-0.5, min(0.5, shift))
            else:
                shift = 0.0
            return float(radii[i] + shift * (radii[i + 1] - radii[i]))
    return None


def wigner_feature_radius(
    spec: CircularStateSpec,
    theta: float,
    rmax: float | None = None,
    n_scan: int = NODE_SCAN_POINTS,
    depth: float = NODE_DEPTH,
):
    """First interference-node radius of the central Wigner feature along
    theta; None if the profile has no node below the depth cut."""
    if rmax is None:
        rmax = min(0.45, 6.0 / spec.k)
    radii = np.linspace(0.0, rmax, n_scan)
    vals = wigner_ray_profile(spec, theta, radii)
    return first_node_radius(radii, vals, depth=depth)


def wigner_feature_sweep(
    k_list,
    nbar: int,
    tau_bar: float,
    theta: float,
    depth: float = NODE_DEPTH,
) -> ScalingFit:
    """Fit the k-scaling of the central-feature node radius along theta."""
    samples = []
    missing = []
    for k in k_list:
        spec = CircularStateSpec(k=float(k), n_components=nbar, tau_bar=tau_bar)
        r = wigner_feature_radius(spec, theta, depth=depth)
        if r is None:
            missing.append(float(k))
        else:
            samples.append((float(k), r))
    if missing:
        raise ValueError(
            f"no interference node along theta={theta:.4f} for k in {missing} "
            f"(nbar={nbar}, tau_bar={tau_bar}); this direction has no "
            "feature-scale structure"
        )
    return scaling_exponent(samples)


def wigner_node_isotropy(
    spec: CircularStateSpec,
    n_dirs: int = 360,
    depth: float = NODE_DEPTH,
):
    """(max/min, extents) of the node radius over n_dirs directions.

    Directions without a node make the feature unbounded; they are
    reported through the second return value as None entries and the
    ratio is computed as +inf.
    """
    extents = []
    for i in range(n_dirs):
        theta = 2.0 * math.pi * i / n_dirs
        extents.append(wigner_feature_radius(spec, theta, depth=depth))
    defined = [e for e in extents if e is not None]
    if len(defined) < n_dirs:
        return math.inf, extents
    return max(defined) / min(defined), extents


def sensitivity_direction_scan(
    spec: CircularStateSpec, n_dirs: int = 64, threshold: float = 1e-6
):
    """first_zero_radius over n_dirs directions (None where S never drops
    below the threshold: a legitimate outcome along component axes)."""
    out = []
    for i in range(n_dirs):
        theta = 2.0 * math.pi * i / n_dirs
        out.append(first_zero_radius(spec, theta, threshold=threshold))
    return out


def spread_metric(radii) -> tuple[float, int]:
    """(max-min)/mean over the defined radii; returns the count of
    no-zero directions alongside."""
    defined = [r for r in radii if r is not None]
    missing = len(radii) - len(defined)
    if not defined:
        raise ValueError("no direction produced a zero radius")
    mean = sum(defined) / len(defined)
    return (max(defined) - min(defined)) / mean, missing


def sensitivity_radius_sweep(
    k_list, nbar: int, tau_bar: float, n_dirs: int = 64
) -> ScalingFit:
    """Fit the k-scaling of the direction-averaged first-zero radius."""
    samples = []
    for k in k_list:
        spec = CircularStateSpec(k=float(k), n_components=nbar, tau_bar=tau_bar)
        radii = sensitivity_direction_scan(spec, n_dirs=n_dirs)
        defined = [r for r in radii if r is not None]
        if not defined:
            raise ValueError(f"no zeros found in any direction at k={k}")
        samples.append((float(k), sum(defined) / len(defined)))
    return scaling_exponent(samples)


def sql_radius_sweep(k_list) -> ScalingFit:
    """Fit the k-scaling of the baseline e-folding radius."""
    from .sensitivity import sql_efolding_radius

    return scaling_exponent([(float(k), sql_efolding_radius(float(k))) for k in k_list])
