"""Arbitrary-precision lane of the truncated-Fock oracle (gmpy2).

The number-basis construction is identical to oracle.py: amplitude
recurrences from the ladder coefficients and the disentangled
displacement product e^{d K+} e^{ln(1-|d|^2) K0} e^{-conj(d) K-} applied
as triangular convolutions.  Double-precision sandwiches cancel
catastrophically once k is large and labels sit deep in the disk (the
intermediates outgrow the result by tens of orders of magnitude); here
the working precision grows until two independent (cutoff, precision)
evaluations agree, so exponentially small matrix elements keep genuine
relative accuracy.
"""
from __future__ import annotations

import math
from functools import lru_cache

import gmpy2
from gmpy2 import mpc, mpfr
import numpy as np
from scipy.special import gammaln

from .errors import ConvergenceError
from .geometry import DiskPoint, mobius_add
from .states import check_bargmann_index

# Two consecutive (N, bits) evaluations must agree to this relative
# tolerance; values below ABS_FLOOR in magnitude are treated as equal.
STABLE_RTOL = 1e-11
ABS_FLOOR = 1e-300
MAX_BITS = 1600


class _Ctx:
    """Scoped gmpy2 precision (restores the previous precision on exit)."""

    def __init__(self, bits: int):
        self.bits = bits

    def __enter__(self):
        ctx = gmpy2.get_context()
        self._old = ctx.precision
        ctx.precision = self.bits
        return ctx

    def __exit__(self, *exc):
        gmpy2.get_context().precision = self._old
        return False


def _conj(x: mpc) -> mpc:
    return mpc(x.real, -x.imag)


@lru_cache(maxsize=64)
def _tables(k: float, N: int, bits: int):
    """lgamma tables and E[n] = sqrt(n! Gamma(2k+n)) at the given precision."""
    with _Ctx(bits):
        two_k = mpfr(2) * mpfr(k)
        lg1 = [gmpy2.lgamma(mpfr(n + 1))[0] for n in range(N + 1)]
        lg2 = [gmpy2.lgamma(two_k + n)[0] for n in range(N + 1)]
        E = [gmpy2.exp((lg1[n] + lg2[n]) / 2) for n in range(N + 1)]
        Einv = [1 / e for e in E]
    return lg1, lg2, E, Einv


def _amps(k: float, z: complex, N: int):
    """Coherent amplitudes c_n(z) via the ladder recurrence."""
    zz = mpc(z)
    r2 = gmpy2.norm(zz)
    c = [mpc(0)] * (N + 1)
    c[0] = mpc(gmpy2.exp(mpfr(k) * gmpy2.log(1 - r2)))
    for n in range(N):
        c[n + 1] = c[n] * zz * gmpy2.sqrt((2 * mpfr(k) + n) / (n + 1))
    return c


def _powers_over_factorial(base: mpc, N: int):
    """[base^j / j! for j = 0..N]."""
    out = [mpc(1)]
    for j in range(1, N + 1):
        out.append(out[-1] * base / j)
    return out


def _apply_displacement(k: float, d: complex, v, E, Einv):
    """w = D(d) v through the triangular triple product."""
    N = len(v) - 1
    dd = mpc(d)
    one_m = 1 - gmpy2.norm(dd)
    q = _powers_over_factorial(-_conj(dd), N)
    p = _powers_over_factorial(dd, N)
    # upper-triangular e^{-conj(d) K-}: w_m = sum_{n>=m} q[n-m] E[n] v_n / E[m]
    vt = [E[n] * v[n] for n in range(N + 1)]
    w = [mpc(0)] * (N + 1)
    for m in range(N + 1):
        s = mpc(0)
        for n in range(m, N + 1):
            s += q[n - m] * vt[n]
        w[m] = s * Einv[m]
    # diagonal e^{ln(1-|d|^2) K0}
    logd = gmpy2.log(one_m)
    for m in range(N + 1):
        w[m] *= gmpy2.exp((mpfr(k) + m) * logd)
    # lower-triangular e^{d K+}: y_l = E[l] sum_{m<=l} p[l-m] w_m / E[m]
    wh = [w[m] * Einv[m] for m in range(N + 1)]
    y = [mpc(0)] * (N + 1)
    for l in range(N + 1):
        s = mpc(0)
        for m in range(l + 1):
            s += p[l - m] * wh[m]
        y[l] = E[l] * s
    return y


def _dot(a, b) -> complex:
    s = mpc(0)
    for x, y in zip(a, b):
        s += _conj(x) * y
    return complex(s)


def _base_cutoff(k: float, radii) -> int:
    """Series length for the *product* tails of the sandwiched values.

    The bra/ket labels (not their Moebius images) control the decay of
    the inner products: the image-state tails always meet a rapidly
    decaying partner.  The extra half covers band leakage of the
    triangular applies; the stabilization loop catches any shortfall.
    """
    from .oracle import cutoff_for_tail

    rmax = min(max(max(abs(r) for r in radii), 1e-3), 0.999)
    return (3 * cutoff_for_tail(k, rmax, 1e-16)) // 2


def _ln_coherent_bound(k: float, r: float, N: int) -> np.ndarray:
    """ln |c_n| along a coherent amplitude vector at radius r."""
    n = np.arange(N + 1, dtype=float)
    r = max(min(r, 0.9999), 1e-300)
    return (
        k * math.log1p(-r * r)
        + n * math.log(r)
        + 0.5 * (gammaln(2.0 * k + n) - gammaln(n + 1.0) - gammaln(2.0 * k))
    )


def _band_ln_max(ld: float, L: np.ndarray, ln_in: np.ndarray, idx: np.ndarray) -> float:
    """Largest ln |band term| of a triangular apply:
    term(out, in>=out-or-<=out) = |j| ld - lnG(|j|+1) + (L[out]-L[in])/2 + ln_in[in].

    The band profile is symmetric in the roles of the two triangular
    factors, so one scan over |j| covers both orientations.
    """
    Ls = L[idx]
    vs = ln_in[idx]
    j = np.abs(idx[None, :].astype(float) - idx[:, None].astype(float))
    T = j * ld - gammaln(j + 1.0) + 0.5 * (Ls[:, None] - Ls[None, :]) + vs[None, :]
    return float(T.max())


def _apply_ln_growth(k: float, absd: float, r_in: float, N: int) -> float:
    """Largest ln |term| met while applying the displacement triple product
    to a coherent-profile vector at radius r_in; sizes the precision."""
    n = np.arange(N + 1, dtype=float)
    L = gammaln(n + 1.0) + gammaln(2.0 * k + n)
    ld = math.log(max(absd, 1e-300))
    stride = max(1, (N + 1) // 256)
    idx = np.unique(np.concatenate([np.arange(0, N + 1, stride), [N]]))

    ln_v = _ln_coherent_bound(k, r_in, N)
    m1 = _band_ln_max(ld, L, ln_v, idx)
    # true post-(K- factor, K0 factor) profile:
    # |w_m| <= (1-r^2)^k (1-|d| r)^(-2k) mu^m sqrt(G(2k+m)/(m! G(2k)))
    #          * (1-|d|^2)^(k+m),  mu = r/(1-|d| r)
    denom = max(1.0 - absd * r_in, 1e-12)
    mu = min(r_in / denom, 1e12)
    one_m_d2 = max(1.0 - absd * absd, 1e-300)
    ln_w = (
        k * math.log1p(-min(r_in * r_in, 1.0 - 1e-12))
        - 2.0 * k * math.log(denom)
        + n * math.log(max(mu, 1e-300))
        + 0.5 * (gammaln(2.0 * k + n) - gammaln(n + 1.0) - gammaln(2.0 * k))
        + (k + n) * math.log(one_m_d2)
    )
    m2 = _band_ln_max(ld, L, ln_w, idx)
    return max(m1, m2, float(ln_w.max()))


def _bits_for(k: float, applies, ln_value_est: float, N: int) -> int:
    """Working precision leaving ~40 guard digits between the worst
    intermediate and the (estimated) result magnitude.

    applies: sequence of (|d|, input radius) stages.
    """
    worst = 0.0
    for absd, r_in in applies:
        worst = max(worst, _apply_ln_growth(k, absd, r_in, N))
    ln_floor = ln_value_est - 95.0
    bits = 64 + int(1.4427 * max(worst - ln_floor, 0.0))
    return min(bits, 60000)


def _stabilized(evaluate, N0: int, bits_fn):
    """Run evaluate(N, bits_fn(N)) at growing N until two consecutive
    finite results agree to STABLE_RTOL."""
    N = N0
    prev = evaluate(N, bits_fn(N))
    for _ in range(8):
        N2 = N + max(48, N // 6)
        cur = evaluate(N2, bits_fn(N2))
        both_finite = (
            math.isfinite(prev.real) and math.isfinite(prev.imag)
            and math.isfinite(cur.real) and math.isfinite(cur.imag)
        )
        if both_finite:
            scale = max(abs(prev), abs(cur))
            if scale < ABS_FLOOR or abs(cur - prev) <= STABLE_RTOL * scale:
                return cur
        prev, N = cur, N2
    raise ConvergenceError("high-precision oracle did not stabilize")


def hp_coherent_overlap(k: float, z1: DiskPoint, z2: DiskPoint) -> complex:
    """<z1|z2> by direct series summation."""
    k = check_bargmann_index(k)

    def evaluate(N, bits):
        with _Ctx(bits):
            return _dot(_amps(k, z1.zeta, N), _amps(k, z2.zeta, N))

    return _stabilized(evaluate, _base_cutoff(k, [z1.radius, z2.radius]), lambda n: 192)


def hp_parity_overlap(k: float, z1: DiskPoint, z2: DiskPoint) -> complex:
    """<z1|Pi|z2> by direct series summation with alternating signs."""
    k = check_bargmann_index(k)

    def evaluate(N, bits):
        with _Ctx(bits):
            a = _amps(k, z1.zeta, N)
            b = _amps(k, z2.zeta, N)
            for n in range(1, N + 1, 2):
                b[n] = -b[n]
            return _dot(a, b)

    return _stabilized(evaluate, _base_cutoff(k, [z1.radius, z2.radius]), lambda n: 192)


def _value_sized_cutoff(base: int, r_leak: float, value_mag: float) -> int:
    """Cutoff so leakage decaying like r_leak^N resolves a value of the
    given magnitude to ~1e-12 relative.

    value_mag comes from the double-precision closed form and only sizes
    the work;  an understated magnitude merely triggers another
    stabilization round.
    """
    lam = -math.log(min(max(r_leak, 1e-6), 0.9999))
    target = -math.log(max(value_mag, 1e-250)) + 27.6 + 40.0  # 1e-12 rel + margin
    return max(base, int(target / lam) + 32)


def hp_overlap_term(k: float, zi: DiskPoint, zj: DiskPoint, d: complex) -> complex:
    """<zi| D(d) |zj> via the triple-product action on the amplitude series."""
    from .sensitivity import overlap_term

    k = check_bargmann_index(k)
    d = complex(d)
    radii = [zi.radius, zj.radius, abs(d)]
    v_est = abs(overlap_term(k, zi, zj, d))
    ln_v_est = math.log(max(v_est, 1e-250))
    r_leak = zi.radius * mobius_add(zj, d).radius
    N0 = _value_sized_cutoff(_base_cutoff(k, radii), r_leak, v_est)
    applies = [(abs(d), zj.radius)]

    def evaluate(N, bits):
        with _Ctx(bits):
            _, _, E, Einv = _tables(k, N, bits)
            v = _amps(k, zj.zeta, N)
            v = _apply_displacement(k, d, v, E, Einv)
            return _dot(_amps(k, zi.zeta, N), v)

    return _stabilized(evaluate, N0, lambda n: _bits_for(k, applies, ln_v_est, n))


def hp_wigner_term(k: float, zi: DiskPoint, zj: DiskPoint, z: DiskPoint) -> complex:
    """<zj| D(z) Pi D(z)^dag |zi> via two triple-product actions."""
    from .wigner import wigner_term

    k = check_bargmann_index(k)
    r_im_i = mobius_add(zi, -z.zeta).radius
    v_est = abs(wigner_term(k, zi, zj, z))
    ln_v_est = math.log(max(v_est, 1e-250))
    # the slow truncation leak is the band tail of the one intermediate
    # state |mob(zi, -z)>; the bra side is never displaced here
    N0 = _value_sized_cutoff(
        _base_cutoff(k, [zi.radius, zj.radius, z.radius]), r_im_i, v_est
    )
    applies = [(z.radius, zi.radius), (z.radius, r_im_i)]

    def evaluate(N, bits):
        with _Ctx(bits):
            _, _, E, Einv = _tables(k, N, bits)
            v = _amps(k, zi.zeta, N)
            v = _apply_displacement(k, -z.zeta, v, E, Einv)  # D(z)^dag = D(-z)
            for n in range(1, N + 1, 2):
                v[n] = -v[n]
            v = _apply_displacement(k, z.zeta, v, E, Einv)
            return _dot(_amps(k, zj.zeta, N), v)

    return _stabilized(evaluate, N0, lambda n: _bits_for(k, applies, ln_v_est, n))


def _triple_product_max_log10(k: float, r: float, N: int) -> float:
    """Largest |term| (log10) in the triple-product convolution, scanned on
    the worst rows; sizes the working precision."""
    n_idx = np.arange(N + 1, dtype=float)
    L = gammaln(n_idx + 1.0) + gammaln(2.0 * k + n_idx)
    logr = math.log10(max(r, 1e-300))
    log1m = math.log10(max(1.0 - r * r, 1e-300))
    worst = -math.inf
    for m in (N, max(N // 2, 1)):
        for n in (N, max(N // 2, 1)):
            l = np.arange(0, min(m, n) + 1, dtype=int)
            t = (
                (m - l + n - l) * logr
                - (gammaln(m - l + 1.0) + gammaln(n - l + 1.0)) / math.log(10.0)
                + (k + l) * log1m
                + (0.5 * (L[m] + L[n]) - L[l]) / math.log(10.0)
            )
            worst = max(worst, float(np.max(t)))
    return worst


def triple_product_matrix(k: float, z: complex, N: int) -> np.ndarray:
    """Full truncated D(z) from the disentangled product, evaluated in
    extended precision and rounded to complex128.

    T[m,n] = E[m] E[n] sum_l p[m-l] q[n-l] (1-|z|^2)^{k+l} / E[l]^2.
    """
    k = check_bargmann_index(k)
    z = complex(z)
    if z == 0:
        return np.eye(N + 1, dtype=complex)
    r = abs(z)
    bits = 64 + max(0, int(3.33 * (_triple_product_max_log10(k, r, N) + 16)))
    with _Ctx(bits):
        _, _, E, Einv = _tables(k, N, bits)
        zz = mpc(z)
        p = _powers_over_factorial(zz, N)
        q = _powers_over_factorial(-_conj(zz), N)
        logd = gmpy2.log(1 - gmpy2.norm(zz))
        w = [gmpy2.exp((mpfr(k) + l) * logd) * Einv[l] * Einv[l] for l in range(N + 1)]
        out = np.empty((N + 1, N + 1), dtype=complex)
        for m in range(N + 1):
            pm = p[: m + 1]
            for n in range(N + 1):
                lmax = min(m, n)
                s = mpc(0)
                for l in range(lmax + 1):
                    s += pm[m - l] * q[n - l] * w[l]
                out[m, n] = complex(E[m] * E[n] * s)
    return out
