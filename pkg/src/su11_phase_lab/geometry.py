"""Poincare-disk geometry.

The phase space is the open unit disk, reached from hyperboloid
coordinates (tau, phi) by stereographic projection
zeta = e^{i phi} tanh(tau/2).  Displacements act on disk points as
Moebius maps zeta -> (zeta + delta)/(1 + conj(delta) zeta).
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .errors import DomainError

# Points this close to |zeta| = 1 make every (1 - |zeta|^2)^k closed form
# ill-conditioned; construction rejects them outright.
BOUNDARY_GUARD = 1e-15

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class HyperbolicPoint:
    """Point on the upper hyperboloid sheet: radius tau, angle phi mod 2pi."""

    tau: float
    phi: float

    def __post_init__(self):
        if not math.isfinite(self.tau):
            raise DomainError(f"tau must be finite, got {self.tau}")
        if not math.isfinite(self.phi):
            raise DomainError(f"phi must be finite, got {self.phi}")
        object.__setattr__(self, "phi", self.phi % TWO_PI)


@dataclass(frozen=True)
class DiskPoint:
    """Point strictly inside the unit disk."""

    zeta: complex

    def __post_init__(self):
        z = complex(self.zeta)
        if not (math.isfinite(z.real) and math.isfinite(z.imag)):
            raise DomainError(f"zeta must be finite, got {z}")
        if abs(z) >= 1.0 - BOUNDARY_GUARD:
            raise DomainError(f"|zeta| = {abs(z)} is not strictly inside the disk")
        object.__setattr__(self, "zeta", z)

    @property
    def radius(self) -> float:
        return abs(self.zeta)


def disk_from_hyperbolic(p: HyperbolicPoint) -> DiskPoint:
    """Stereographic projection zeta = e^{i phi} tanh(tau/2)."""
    r = math.tanh(p.tau / 2.0)
    return DiskPoint(r * cmath.exp(1j * p.phi))


def hyperbolic_from_disk(z: DiskPoint) -> HyperbolicPoint:
    """Inverse projection; phi = 0 at the origin by convention."""
    r = abs(z.zeta)
    if r == 0.0:
        return HyperbolicPoint(0.0, 0.0)
    return HyperbolicPoint(2.0 * math.atanh(r), cmath.phase(z.zeta) % TWO_PI)


def mobius_add(z: DiskPoint, d: complex) -> DiskPoint:
    """Disk action of the displacement D(d): (zeta + d)/(1 + conj(d) zeta)."""
    d = complex(d)
    if abs(d) >= 1.0:
        raise DomainError(f"|d| = {abs(d)} must be < 1")
    zeta = z.zeta
    return DiskPoint((zeta + d) / (1.0 + d.conjugate() * zeta))


def bloch_vector(p: HyperbolicPoint) -> tuple[float, float, float]:
    """Hyperboloid unit vector (cosh tau, sinh tau cos phi, sinh tau sin phi)."""
    ch, sh = math.cosh(p.tau), math.sinh(p.tau)
    return (ch, sh * math.cos(p.phi), sh * math.sin(p.phi))
