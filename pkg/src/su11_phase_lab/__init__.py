"""SU(1,1) circular states on the Poincare disk.

Wigner distributions, displacement sensitivity, sub-Planck feature
geometry, and the truncated-Fock oracle validating all closed forms.
"""
from .errors import (
    ConvergenceError,
    CutoffCapError,
    DomainError,
    NoEnclosingContourError,
    NoIntersectionError,
    NumericalError,
    UnsupportedRealizationError,
)
from .geometry import (
    DiskPoint,
    HyperbolicPoint,
    bloch_vector,
    disk_from_hyperbolic,
    hyperbolic_from_disk,
    mobius_add,
)
from .grids import PhaseSpaceGrid, ScalarField
from .states import (
    CircularStateSpec,
    FockAmplitudes,
    TwoModeAmplitudes,
    bargmann_from_degeneracy,
    circular_norm,
    coherent_amplitude,
    coherent_overlap,
    component_points,
    parity_overlap,
    single_mode_embedding,
    two_mode_amplitudes,
)
from .wigner import wigner_at, wigner_circular, wigner_coherent, wigner_term
from .sensitivity import (
    first_zero_radius,
    overlap_at,
    overlap_circular,
    overlap_grid,
    overlap_term,
    sql_baseline,
    sql_baseline_gaussian,
    sql_efolding_radius,
)
from .features import (
    Contour,
    ScalingFit,
    central_contour,
    isotropy_ratio,
    radial_extent,
    scaling_exponent,
    zero_contours,
)

__version__ = "0.1.0"
