"""Interior and exterior moduli of a rectangle.

For the rectangle ``[-a/2, a/2] x [0, b]`` with interior modulus ``H = a/b``
the exterior modulus is ``2K(k)/K'(k)`` where ``k`` solves ``psi(k) = H`` and

    psi(k) = 2 [E(k) - (1 - k) K(k)] / [E'(k) - k K'(k)].

The denominator vanishes like (pi/8)(1 - k)^2 as k -> 1, so it is evaluated
from an exact power series in k' whenever k' is small.
Root finding works in the variable ``u = log(k'/k)``, which represents the
whole interval (0, 1) without loss near either end.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from scipy.optimize import brentq

from .elliptic import (
    EllipticModulus,
    as_modulus,
    carlson_rd,
    complete_K,
    complete_K_comp,
    e_minus_comp_sq_k,
)
from .errors import ConvergenceError, DomainError, NumericalOverflow

__all__ = [
    "BoundsReport",
    "psi",
    "psi_inv",
    "psi_denominator",
    "square_modulus",
    "ext_modulus_rectangle",
    "bickley_modulus",
    "vz_bounds",
    "asymptote_ext",
    "EXT_RECT_OFFSET",
]

# limit of ExtMod(H) - log(H)/pi as H -> infinity
EXT_RECT_OFFSET = math.log(4.0 * math.pi) / math.pi

_SERIES_SWITCH = 0.3
_SERIES_TERMS = 40


@dataclass(frozen=True)
class BoundsReport:
    lower: float
    value: float
    upper: float
    H: float

    @property
    def ordered(self) -> bool:
        return self.lower < self.value < self.upper


def _check_H(H: float) -> float:
    H = float(H)
    if not (H > 0 and math.isfinite(H)):
        raise DomainError(f"aspect ratio must be positive and finite, got {H!r}")
    return H


@lru_cache(maxsize=1)
def _denominator_coefficients() -> tuple[float, ...]:
    """Coefficients d_n with E(x) - x' K(x) = (pi/2) sum_{n>=2} d_n x^(2n).

    Built from exact rational products of the K, E and sqrt(1 - x^2) series.
    """
    n_max = _SERIES_TERMS + 2
    b = [Fraction(1)]
    for n in range(1, n_max):
        b.append(b[-1] * Fraction(2 * n - 1, 2 * n))
    a = [bn * bn for bn in b]
    e = [-a[n] / (2 * n - 1) for n in range(n_max)]
    # sqrt(1 - s) = sum c_j s^j
    c = [Fraction(1)]
    for j in range(1, n_max):
        c.append(c[-1] * (Fraction(1, 2) - (j - 1)) / j * -1)
    d = []
    for n in range(n_max):
        d.append(e[n] - sum(c[j] * a[n - j] for j in range(n + 1)))
    assert d[0] == 0 and d[1] == 0
    return tuple(float(x) for x in d[2:])


def psi_denominator(m) -> float:
    """E'(k) - k K'(k), accurate to relative rounding error for all k."""
    m = as_modulus(m)
    x = m.k_comp
    if x < _SERIES_SWITCH:
        s = x * x
        total = 0.0
        power = s * s
        for d in _denominator_coefficients():
            term = d * power
            total += term
            if abs(term) < 1e-18 * abs(total):
                break
            power *= s
        if total == 0.0:
            raise NumericalOverflow(f"psi denominator underflows at k'={x!r}")
        return 0.5 * math.pi * total
    # (1 - k) K(k') - (K(k') - E(k')), mild cancellation only
    kk = complete_K_comp(m)
    return m.one_minus_k * kk - x * x / 3.0 * carlson_rd(0.0, m.k * m.k, 1.0)


def _psi_numerator(m: EllipticModulus) -> float:
    # E - (1-k)K = (E - k'^2 K) + k(1-k)K, both parts positive
    return e_minus_comp_sq_k(m) + m.k * m.one_minus_k * complete_K(m)


def psi(m) -> float:
    """Interior modulus H of the rectangle whose exterior modulus is 2K(k)/K'(k)."""
    m = as_modulus(m)
    num = 2.0 * _psi_numerator(m)
    den = psi_denominator(m)
    val = num / den
    if not math.isfinite(val):
        raise NumericalOverflow(f"psi overflows at k'={m.k_comp!r}")
    return val


def _log_psi(u: float) -> float:
    return math.log(psi(EllipticModulus.from_log_ratio(u)))


def psi_inv(H: float, *, xtol: float = 1e-15, maxiter: int = 200) -> EllipticModulus:
    """Modulus k with psi(k) = H.

    psi is increasing in k, hence decreasing in u = log(k'/k); the bracket in
    u is widened until it straddles log H, then Brent's method refines it.
    """
    H = _check_H(H)
    target = math.log(H)

    def g(u):
        return _log_psi(u) - target

    lo, hi = -1.0, 1.0
    step = 1.0
    while g(lo) <= 0:
        lo, step = lo - step, 2.0 * step
        if lo < -400:
            raise ConvergenceError(f"could not bracket psi^-1({H!r})")
    step = 1.0
    try:
        while g(hi) >= 0:
            hi, step = hi + step, 2.0 * step
            if hi > 1e6:
                raise ConvergenceError(f"could not bracket psi^-1({H!r})")
    except DomainError as exc:
        raise NumericalOverflow(f"psi^-1({H!r}): k underflows ({exc})") from exc
    try:
        u = brentq(g, lo, hi, xtol=xtol, rtol=4 * 2.0**-52, maxiter=maxiter)
    except RuntimeError as exc:
        raise ConvergenceError(str(exc)) from exc
    return EllipticModulus.from_log_ratio(u)


@lru_cache(maxsize=1)
def square_modulus() -> EllipticModulus:
    """The k with 2K(k)/K'(k) = 1, i.e. the exterior parameter of the square."""

    def g(u):
        m = EllipticModulus.from_log_ratio(u)
        return math.log(2.0 * complete_K(m) / complete_K_comp(m))

    return EllipticModulus.from_log_ratio(brentq(g, -5.0, 5.0, xtol=1e-15, rtol=4 * 2.0**-52))


def ext_modulus_rectangle(H: float) -> float:
    """Exterior modulus of a rectangle with interior modulus H.

    When k underflows (H far below one) the quarter-turn identity
    ``Mod(H) = 1 / Mod(1/H)`` is used instead: a rotated rectangle with the
    conjugate arc pair has the reciprocal modulus.
    """
    H = _check_H(H)
    try:
        m = psi_inv(H)
    except NumericalOverflow:
        if H >= 1.0:
            raise
        return 1.0 / ext_modulus_rectangle(1.0 / H)
    return 2.0 * complete_K(m) / complete_K_comp(m)


def bickley_modulus(lam) -> float:
    """Interior modulus of the rectangle whose exterior modulus is K(lam)/K'(lam).

    (E - lam'^2 K) / (E' - lam^2 K') with both differences taken in the
    cancellation-free form of :func:`~quadmod.elliptic.e_minus_comp_sq_k`.
    """
    lam = as_modulus(lam)
    num = e_minus_comp_sq_k(lam)
    den = e_minus_comp_sq_k(lam.comp)
    if den == 0.0:
        raise NumericalOverflow("Bickley denominator underflows")
    return num / den


def vz_bounds(H: float) -> BoundsReport:
    """Lower and upper logarithmic bounds for the rectangle's exterior modulus."""
    H = _check_H(H)
    s = 1.0 + math.sqrt(4.0 * H / math.pi)
    lower = 2.0 / math.pi * (1.0 - 1.0 / s) * math.log(2.0 * s)
    upper = 2.0 / math.pi * math.log(2.0 * (1.0 + math.sqrt(math.pi * H)))
    return BoundsReport(lower=lower, value=ext_modulus_rectangle(H), upper=upper, H=H)


def asymptote_ext(H: float) -> float:
    """log(H)/pi, the leading behaviour of the exterior modulus for large H."""
    H = _check_H(H)
    if H <= 1.0:
        raise DomainError(f"asymptote needs H > 1, got {H!r}")
    return math.log(H) / math.pi
