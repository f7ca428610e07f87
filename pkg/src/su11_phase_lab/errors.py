"""Exception types shared across the package."""


class DomainError(ValueError):
    """Input outside the mathematical domain of an operation."""


class UnsupportedRealizationError(DomainError):
    """Single-mode bosonic embedding requested for k not in {1/4, 3/4}."""


class NumericalError(RuntimeError):
    """A numerical guard tripped (imaginary residue, Gram sum, ...)."""


class ConvergenceError(NumericalError):
    """Truncated-Fock construction did not stabilize at the given cutoff."""


class CutoffCapError(NumericalError):
    """Tail summation would need a Fock cutoff beyond the hard cap."""


class NoEnclosingContourError(LookupError):
    """No closed contour enclosing the requested origin was found."""


class NoIntersectionError(LookupError):
    """A ray from the origin does not intersect the contour."""
