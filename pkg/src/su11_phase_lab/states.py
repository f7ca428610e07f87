"""Coherent-state algebra for the positive discrete series.

Closed forms used here (amplitudes, overlaps, parity overlaps) are the
resummations of the number-basis series; the oracle module recomputes the
same quantities by brute force and the test suite holds the two lanes
together.  All Gamma ratios go through log-Gamma so k up to ~32 and
number indices in the thousands stay in range.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import DomainError, NumericalError, UnsupportedRealizationError
from .geometry import DiskPoint

# Relative imaginary part above which a Gram sum is considered broken.
GRAM_IMAG_TOL = 1e-8


def check_bargmann_index(k: float) -> float:
    """Validate a Bargmann index (positive real, finite)."""
    k = float(k)
    if not math.isfinite(k) or k <= 0.0:
        raise DomainError(f"Bargmann index must be positive and finite, got {k}")
    return k


@dataclass(frozen=True)
class CircularStateSpec:
    """Equal-weight superposition of n_components coherent states at radius
    tanh(tau_bar/2), angular spacing 2pi/n_components.

    n_components must be even (>= 2); n_components == 1 is allowed as the
    degenerate single-coherent-state case used for baselines.
    """

    k: float
    n_components: int
    tau_bar: float

    def __post_init__(self):
        check_bargmann_index(self.k)
        n = self.n_components
        if not (n == 1 or (n >= 2 and n % 2 == 0)):
            raise DomainError(f"n_components must be 1 or an even integer >= 2, got {n}")
        if not math.isfinite(self.tau_bar) or self.tau_bar < 0.0:
            raise DomainError(f"tau_bar must be finite and >= 0, got {self.tau_bar}")

    @property
    def component_radius(self) -> float:
        return math.tanh(self.tau_bar / 2.0)


@dataclass(frozen=True)
class FockAmplitudes:
    """Dense number-basis amplitudes up to a cutoff (index n = 0..cutoff)."""

    k: float
    cutoff: int
    amps: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amps, dtype=complex)
        if amps.shape != (self.cutoff + 1,):
            raise DomainError(f"amps must have length cutoff+1={self.cutoff + 1}")
        total = float(np.sum(np.abs(amps) ** 2))
        if total > 1.0 + 1e-12:
            raise NumericalError(f"amplitude norm {total} exceeds 1")
        amps.flags.writeable = False
        object.__setattr__(self, "amps", amps)

    @property
    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.amps) ** 2))


@dataclass(frozen=True)
class TwoModeAmplitudes:
    """Coefficients c[n] of |n, n+delta> for the two-mode realization."""

    delta: int
    cutoff: int
    amps: np.ndarray


def component_points(spec: CircularStateSpec) -> list[DiskPoint]:
    """The n_components coherent-state labels e^{2 pi i j / n} tanh(tau_bar/2)."""
    r = spec.component_radius
    n = spec.n_components
    return [DiskPoint(r * cmath.exp(2j * math.pi * j / n)) for j in range(n)]


def _component_array(spec: CircularStateSpec) -> np.ndarray:
    r = spec.component_radius
    n = spec.n_components
    return r * np.exp(2j * np.pi * np.arange(n) / n)


def coherent_amplitude(k: float, z: DiskPoint, n) -> complex:
    """Number-basis amplitude <k,n | z,k> =
    (1-|z|^2)^k sqrt(Gamma(2k+n) / (n! Gamma(2k))) z^n.

    Vectorizes over integer arrays n.
    """
    k = check_bargmann_index(k)
    zeta = z.zeta
    n_arr = np.asarray(n)
    if np.any(n_arr < 0):
        raise DomainError("n must be >= 0")
    lg = 0.5 * (gammaln(2 * k + n_arr) - gammaln(n_arr + 1.0) - gammaln(2 * k))
    # z^n via exp(n log z); the origin needs the explicit n == 0 special case
    if zeta == 0:
        zn = np.where(n_arr == 0, 1.0 + 0j, 0j)
    else:
        zn = np.exp(n_arr * cmath.log(zeta))
    out = (1.0 - abs(zeta) ** 2) ** k * np.exp(lg) * zn
    return complex(out) if out.ndim == 0 else out


def coherent_overlap(k: float, z1: DiskPoint, z2: DiskPoint) -> complex:
    """<z1,k | z2,k> = [(1-|z1|^2)(1-|z2|^2)]^k (1 - conj(z1) z2)^(-2k)."""
    k = check_bargmann_index(k)
    a, b = z1.zeta, z2.zeta
    log_mag = k * (math.log1p(-abs(a) ** 2) + math.log1p(-abs(b) ** 2))
    return cmath.exp(log_mag - 2.0 * k * cmath.log(1.0 - a.conjugate() * b))


def parity_overlap(k: float, z1: DiskPoint, z2: DiskPoint) -> complex:
    """<z1,k | Pi | z2,k> with Pi |k,n> = (-1)^n |k,n>; flips z2 -> -z2 in
    the overlap, giving [(1-|z1|^2)(1-|z2|^2)]^k (1 + conj(z1) z2)^(-2k)."""
    k = check_bargmann_index(k)
    a, b = z1.zeta, z2.zeta
    log_mag = k * (math.log1p(-abs(a) ** 2) + math.log1p(-abs(b) ** 2))
    return cmath.exp(log_mag - 2.0 * k * cmath.log(1.0 + a.conjugate() * b))


def circular_norm(spec: CircularStateSpec) -> float:
    """Norm of the unnormalized superposition: sqrt(sum_ij <z_i|z_j>)."""
    pts = component_points(spec)
    total = 0j
    for zi in pts:
        for zj in pts:
            total += coherent_overlap(spec.k, zi, zj)
    if abs(total.imag) > GRAM_IMAG_TOL * max(abs(total.real), 1e-300):
        raise NumericalError(
            f"Gram sum has relative imaginary part {abs(total.imag) / abs(total.real)}"
        )
    if total.real <= 0.0:
        raise NumericalError(f"Gram sum is not positive: {total}")
    return math.sqrt(total.real)


def single_mode_embedding(k: float, z: DiskPoint, cutoff: int) -> FockAmplitudes:
    """Embed |z,k> into the single-mode photon-number basis.

    k = 1/4 populates even numbers |2n> (squeezed vacuum family);
    k = 3/4 populates odd numbers |2n+1> (one-photon squeezed family).
    """
    k = check_bargmann_index(k)
    if k not in (0.25, 0.75):
        raise UnsupportedRealizationError(
            f"single-mode realization exists only for k in {{1/4, 3/4}}, got {k}"
        )
    if cutoff < 1:
        raise DomainError("cutoff must be >= 1")
    amps = np.zeros(cutoff + 1, dtype=complex)
    offset = 0 if k == 0.25 else 1
    n_top = (cutoff - offset) // 2
    idx = np.arange(n_top + 1)
    amps[2 * idx + offset] = coherent_amplitude(k, z, idx)
    return FockAmplitudes(k=k, cutoff=cutoff, amps=amps)


def two_mode_amplitudes(delta: int, z: DiskPoint, cutoff: int) -> TwoModeAmplitudes:
    """Coefficients of |n, n+delta>:
    (1-|z|^2)^{(1+delta)/2} sqrt((n+delta)! / (n! delta!)) z^n."""
    if delta < 0 or int(delta) != delta:
        raise DomainError(f"delta must be a nonnegative integer, got {delta}")
    delta = int(delta)
    n = np.arange(cutoff + 1)
    lg = 0.5 * (gammaln(n + delta + 1.0) - gammaln(n + 1.0) - gammaln(delta + 1.0))
    zeta = z.zeta
    if zeta == 0:
        zn = np.where(n == 0, 1.0 + 0j, 0j)
    else:
        zn = np.exp(n * cmath.log(zeta))
    amps = (1.0 - abs(zeta) ** 2) ** ((1.0 + delta) / 2.0) * np.exp(lg) * zn
    amps.flags.writeable = False
    return TwoModeAmplitudes(delta=delta, cutoff=cutoff, amps=amps)


def bargmann_from_degeneracy(delta: int) -> float:
    """Bargmann index of the two-mode sector with photon asymmetry delta:
    k = (delta + 1)/2."""
    if delta < 0 or int(delta) != delta:
        raise DomainError(f"delta must be a nonnegative integer, got {delta}")
    return (int(delta) + 1) / 2.0
