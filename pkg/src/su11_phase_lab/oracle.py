"""Brute-force truncated-Fock ground truth.

Everything here works directly with dense generator matrices or sparse
generator actions in the number basis; no closed-form overlap or phase
composition enters, so these values adjudicate the closed forms in
states.py / wigner.py / sensitivity.py.

Double-precision linear algebra carries an absolute noise floor around
1e-13 on unit-norm sandwiches.  Comparisons that need genuine *relative*
accuracy on exponentially small matrix elements (high k) belong to the
arbitrary-precision lane in highprec.py, which evaluates the same
construction with enough working digits.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.linalg import expm
from scipy.sparse.linalg import expm_multiply

from .errors import ConvergenceError, CutoffCapError, DomainError
from .geometry import DiskPoint, mobius_add
from .states import check_bargmann_index

CUTOFF_CAP = 20000
AGREEMENT_TOL = 1e-9
CONVERGENCE_TOL = 1e-9
DEFAULT_TAIL_EPS = 1e-12


@dataclass(frozen=True)
class TruncatedOperator:
    """Dense (N+1)x(N+1) matrix of an operator at Fock cutoff N."""

    k: float
    cutoff: int
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        n = self.cutoff + 1
        if m.shape != (n, n):
            raise DomainError(f"matrix must be {(n, n)}, got {m.shape}")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)


def _ladder_coeffs(k: float, N: int) -> np.ndarray:
    """K+ subdiagonal entries: K+[n+1, n] = sqrt((n+1)(2k+n))."""
    n = np.arange(N, dtype=float)
    return np.sqrt((n + 1.0) * (2.0 * k + n))


def generator_matrices(k: float, N: int):
    """Dense (Kplus, Kminus, Kzero) at cutoff N; Kminus is the exact
    entrywise adjoint of Kplus."""
    k = check_bargmann_index(k)
    if N < 1:
        raise DomainError("cutoff N must be >= 1")
    kp = np.zeros((N + 1, N + 1), dtype=complex)
    kp[np.arange(1, N + 1), np.arange(N)] = _ladder_coeffs(k, N)
    km = kp.conj().T.copy()
    k0 = np.diag(k + np.arange(N + 1, dtype=float)).astype(complex)
    return (
        TruncatedOperator(k, N, kp),
        TruncatedOperator(k, N, km),
        TruncatedOperator(k, N, k0),
    )


def parity_matrix(k: float, N: int) -> TruncatedOperator:
    """Pi = e^{i pi (K0 - k)}: diagonal (-1)^n, exactly."""
    k = check_bargmann_index(k)
    signs = np.where(np.arange(N + 1) % 2 == 0, 1.0, -1.0).astype(complex)
    return TruncatedOperator(k, N, np.diag(signs))


def _xi_from_disk(z: complex) -> complex:
    """Hyperboloid parameter xi = (tau/2) e^{i phi} for a disk label z."""
    r = abs(z)
    if r == 0.0:
        return 0.0
    return math.atanh(r) * (z / r)


def _generator_sparse(k: float, z: complex, N: int):
    """Sparse xi K+ - conj(xi) K- for expm actions."""
    xi = _xi_from_disk(z)
    c = _ladder_coeffs(k, N)
    return sp.diags([xi * c, -np.conj(xi) * c], [-1, 1], format="csr", dtype=complex)


def _displacement_expm(k: float, z: complex, N: int) -> np.ndarray:
    """Route (b): scaling-and-squaring exponential of xi K+ - conj(xi) K-."""
    return expm(_generator_sparse(k, z, N).toarray())


def _displacement_disentangled(k: float, z: complex, N: int) -> np.ndarray:
    """Route (a): truncated e^{z K+} e^{ln(1-|z|^2) K0} e^{-conj(z) K-}.

    The three truncated factors close exactly on the kept block (the
    triangular exponentials never route through states above the cutoff),
    but the product cancels catastrophically in doubles for large N, so
    the convolution runs in extended precision sized from the largest
    intermediate term.  See highprec.triple_product_matrix.
    """
    from . import highprec

    return highprec.triple_product_matrix(k, z, N)


def displacement_matrix(
    k: float, z: DiskPoint, N: int, check_agreement: bool = True
) -> TruncatedOperator:
    """Truncated D(z), computed two independent ways.

    Route (a) is the disentangled triple product, route (b) the
    scaling-and-squaring exponential of the generator.  With
    check_agreement the leading (N//2+1)-square blocks must agree within
    1e-9; disagreement signals an inadequate cutoff for this |z|.
    """
    k = check_bargmann_index(k)
    if abs(z.zeta) > 0.9:
        raise DomainError("displacement_matrix requires |z| <= 0.9 for conditioning")
    if N < 1:
        raise DomainError("cutoff N must be >= 1")
    D = _displacement_expm(k, z.zeta, N)
    if check_agreement:
        Dd = _displacement_disentangled(k, z.zeta, N)
        nb = N // 2 + 1
        err = float(np.max(np.abs(D[:nb, :nb] - Dd[:nb, :nb])))
        if err > AGREEMENT_TOL:
            raise ConvergenceError(
                f"displacement constructions disagree by {err:.3e} on the leading "
                f"block (k={k}, |z|={abs(z.zeta):.3f}, N={N}); increase the cutoff"
            )
    return TruncatedOperator(k, N, D)


def coherent_vector(k: float, z: DiskPoint, N: int) -> np.ndarray:
    """|z,k> = D(z)|k,0> via the generator exponential action (no closed
    forms)."""
    k = check_bargmann_index(k)
    e0 = np.zeros(N + 1, dtype=complex)
    e0[0] = 1.0
    if z.zeta == 0:
        return e0
    return expm_multiply(_generator_sparse(k, z.zeta, N), e0)


def cutoff_for_tail(k: float, rmax: float, eps: float = DEFAULT_TAIL_EPS) -> int:
    """Smallest N whose neglected amplitude tail mass at radius rmax is
    below eps, doubled once as margin for displaced arguments."""
    k = check_bargmann_index(k)
    if not (0.0 < rmax < 1.0):
        raise DomainError(f"rmax must be in (0,1), got {rmax}")
    if eps <= 0.0:
        raise DomainError("eps must be positive")
    r2 = rmax * rmax
    # |c_n|^2 follows t_{n+1} = t_n r^2 (2k+n)/(n+1); bound the tail with the
    # geometric ratio at the current index once it is below 1.
    t = math.exp(2.0 * k * math.log1p(-r2))  # |c_0|^2
    n = 0
    while True:
        ratio = r2 * (2.0 * k + n) / (n + 1.0)
        if ratio < 1.0:
            tail_bound = t * ratio / (1.0 - ratio)
            if tail_bound < eps:
                break
        t *= ratio
        n += 1
        if n > CUTOFF_CAP:
            raise CutoffCapError(
                f"tail cutoff for k={k}, rmax={rmax}, eps={eps} exceeds {CUTOFF_CAP}"
            )
    N = 2 * n
    if N > CUTOFF_CAP:
        raise CutoffCapError(f"doubled cutoff {N} exceeds {CUTOFF_CAP}")
    return max(N, 8)


def _auto_cutoff(k: float, radii, eps: float = DEFAULT_TAIL_EPS) -> int:
    rmax = max(max(abs(r) for r in radii), 1e-3)
    return cutoff_for_tail(k, min(rmax, 0.999), eps)


def oracle_coherent_overlap(k: float, z1: DiskPoint, z2: DiskPoint, N: int | None = None) -> complex:
    """<z1|z2> by inner product of generator-built vectors."""
    if N is None:
        N = _auto_cutoff(k, [z1.radius, z2.radius])
    return complex(np.vdot(coherent_vector(k, z1, N), coherent_vector(k, z2, N)))


def oracle_parity_overlap(k: float, z1: DiskPoint, z2: DiskPoint, N: int | None = None) -> complex:
    """<z1|Pi|z2> by inner product with the parity signs applied."""
    if N is None:
        N = _auto_cutoff(k, [z1.radius, z2.radius])
    v2 = coherent_vector(k, z2, N)
    signs = np.where(np.arange(N + 1) % 2 == 0, 1.0, -1.0)
    return complex(np.vdot(coherent_vector(k, z1, N), signs * v2))


def _wigner_sandwich(k: float, zi: complex, zj: complex, z: complex, N: int) -> complex:
    vi = coherent_vector(k, DiskPoint(zi), N)
    vj = coherent_vector(k, DiskPoint(zj), N)
    signs = np.where(np.arange(N + 1) % 2 == 0, 1.0, -1.0)
    if z != 0:
        g = _generator_sparse(k, z, N)
        w = expm_multiply(-g, vi)
        w = signs * w
        w = expm_multiply(g, w)
    else:
        w = signs * vi
    return complex(np.vdot(vj, w))


def oracle_wigner_term(
    k: float,
    zi: DiskPoint,
    zj: DiskPoint,
    z: DiskPoint,
    N: int | None = None,
    verify_convergence: bool = False,
) -> complex:
    """W_{|zi><zj|}(z) = <zj| D(z) Pi D(z)^dag |zi> by matrix-vector
    products with the generator exponential."""
    k = check_bargmann_index(k)
    if N is None:
        ri = mobius_add(zi, -z.zeta).radius
        rj = mobius_add(zj, -z.zeta).radius
        N = _auto_cutoff(k, [zi.radius, zj.radius, z.radius, ri, rj])
    val = _wigner_sandwich(k, zi.zeta, zj.zeta, z.zeta, N)
    if verify_convergence:
        val2 = _wigner_sandwich(k, zi.zeta, zj.zeta, z.zeta, 2 * N)
        if abs(val - val2) > CONVERGENCE_TOL:
            raise ConvergenceError(
                f"wigner oracle moved by {abs(val - val2):.3e} when doubling N={N}"
            )
    return val


def oracle_overlap_term(
    k: float,
    zi: DiskPoint,
    zj: DiskPoint,
    d: complex,
    N: int | None = None,
    verify_convergence: bool = False,
) -> complex:
    """<zi| D(d) |zj> by a generator-exponential action on |zj>."""
    k = check_bargmann_index(k)
    d = complex(d)
    if abs(d) >= 1.0:
        raise DomainError(f"|d| = {abs(d)} must be < 1")

    def evaluate(n):
        vj = coherent_vector(k, zj, n)
        if d != 0:
            vj = expm_multiply(_generator_sparse(k, d, n), vj)
        return complex(np.vdot(coherent_vector(k, zi, n), vj))

    if N is None:
        rj = mobius_add(zj, d).radius
        N = _auto_cutoff(k, [zi.radius, zj.radius, abs(d), rj])
    val = evaluate(N)
    if verify_convergence:
        val2 = evaluate(2 * N)
        if abs(val - val2) > CONVERGENCE_TOL:
            raise ConvergenceError(
                f"overlap oracle moved by {abs(val - val2):.3e} when doubling N={N}"
            )
    return val
