"""Masked Cartesian grids over the disk and real-valued fields on them."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DomainError, NumericalError

# Cells at least this close to the unit circle are masked out; the closed
# forms divide by 1 - |zeta|^2 and blow up on the boundary.
MASK_GUARD = 1e-9


@dataclass(frozen=True)
class PhaseSpaceGrid:
    """nx-by-np Cartesian grid spanning [-extent, extent]^2 in zeta = x + i p.

    Rows are p-major: values[ip, ix] samples the point (x[ix], p[ip]).
    """

    nx: int
    np: int
    extent: float

    def __post_init__(self):
        if self.nx < 2 or self.np < 2:
            raise DomainError("grid needs nx >= 2 and np >= 2")
        if not (0.0 < self.extent < 1.0):
            raise DomainError(f"extent must lie in (0, 1), got {self.extent}")

    @cached_property
    def x(self) -> np.ndarray:
        v = np.linspace(-self.extent, self.extent, self.nx)
        v.flags.writeable = False
        return v

    @cached_property
    def p(self) -> np.ndarray:
        v = np.linspace(-self.extent, self.extent, self.np)
        v.flags.writeable = False
        return v

    @cached_property
    def zeta(self) -> np.ndarray:
        z = self.x[None, :] + 1j * self.p[:, None]
        z.flags.writeable = False
        return z

    @cached_property
    def mask(self) -> np.ndarray:
        """True for cells strictly inside the disk (with boundary guard)."""
        m = np.abs(self.zeta) < 1.0 - MASK_GUARD
        m.flags.writeable = False
        return m

    @property
    def shape(self) -> tuple[int, int]:
        return (self.np, self.nx)


@dataclass(frozen=True)
class ScalarField:
    """Real samples on a masked grid; NaN on masked-out cells."""

    grid: PhaseSpaceGrid
    values: np.ndarray
    max_abs_imag_discarded: float = 0.0

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != self.grid.shape:
            raise DomainError(
                f"values shape {vals.shape} does not match grid {self.grid.shape}"
            )
        vals = vals.copy()
        vals[~self.grid.mask] = np.nan
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)
        scale = self.max_abs()
        if scale > 0 and self.max_abs_imag_discarded > 1e-8 * scale:
            raise NumericalError(
                f"imaginary residue {self.max_abs_imag_discarded} exceeds "
                f"1e-8 of field max {scale}"
            )

    def max_abs(self) -> float:
        m = self.grid.mask
        if not m.any():
            return 0.0
        return float(np.nanmax(np.abs(self.values[m])))

    def value_at_index(self, ip: int, ix: int) -> float:
        return float(self.values[ip, ix])
