"""Complete and incomplete elliptic integrals of the first and second kind.

All integrals are in Legendre normal form with modulus ``k``::

    F(x, k) = int_0^x dt / sqrt((1 - t^2)(1 - k^2 t^2))
    E(x, k) = int_0^x sqrt((1 - k^2 t^2) / (1 - t^2)) dt

Complete integrals use the arithmetic-geometric mean, incomplete ones the
Carlson symmetric forms R_F and R_D evaluated by duplication.  Every
evaluator takes an :class:`EllipticModulus`, which carries ``k`` and the
complementary modulus ``k' = sqrt(1 - k^2)`` side by side so that neither
has to be recovered from the other by a cancelling subtraction.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import ConvergenceError, DomainError

__all__ = [
    "EllipticModulus",
    "SeriesKind",
    "SeriesSpec",
    "as_modulus",
    "carlson_rf",
    "carlson_rd",
    "complete_K",
    "complete_E",
    "complete_K_comp",
    "complete_E_comp",
    "k_minus_e",
    "e_minus_comp_sq_k",
    "incomplete_F",
    "incomplete_E",
    "i2n",
    "landen_ascend",
    "reference_series",
    "log_series_omitted_term",
]

_EPS = 2.0**-52
_HALF_PI = 0.5 * math.pi
# below this complementary modulus K and E switch to the logarithmic expansion
_LOG_SWITCH = 1e-8
_I2N_SERIES_MAX = 0.8


@dataclass(frozen=True)
class EllipticModulus:
    """Modulus ``k`` in (0, 1) stored together with ``k_comp = sqrt(1 - k^2)``.

    Either field may hold 1.0 when the other is too small for ``1 - x^2``
    to differ from 1 in double precision.  Build it with :meth:`from_k`, :meth:`from_comp` or :meth:`from_log_ratio`;
    whichever value is supplied is kept verbatim.
    """

    k: float
    k_comp: float

    def __post_init__(self):
        k, kc = self.k, self.k_comp
        # a stored value may round to 1.0 when its partner is below sqrt(eps)
        if not (0.0 < k <= 1.0 and 0.0 < kc <= 1.0) or (k == 1.0 and kc == 1.0):
            raise DomainError(f"modulus must satisfy 0 < k, k' < 1, got k={k!r}, k'={kc!r}")
        if abs((k * k - 1.0) + kc * kc) > 8 * _EPS:
            raise DomainError(f"k^2 + k'^2 != 1 for k={k!r}, k'={kc!r}")

    @classmethod
    def from_k(cls, k: float) -> "EllipticModulus":
        k = float(k)
        if not 0.0 < k < 1.0:
            raise DomainError(f"k must lie in (0, 1), got {k!r}")
        return cls(k, math.sqrt((1.0 - k) * (1.0 + k)))

    @classmethod
    def from_comp(cls, k_comp: float) -> "EllipticModulus":
        kc = float(k_comp)
        if not 0.0 < kc < 1.0:
            raise DomainError(f"k' must lie in (0, 1), got {kc!r}")
        return cls(math.sqrt((1.0 - kc) * (1.0 + kc)), kc)

    @classmethod
    def from_log_ratio(cls, u: float) -> "EllipticModulus":
        """Modulus with ``k / k' = exp(-u)``; covers both endpoints without loss."""
        if u > 0:
            t = math.exp(-u)
            s = math.sqrt(1.0 + t * t)
            k, kc = t / s, 1.0 / s
        else:
            t = math.exp(u)
            s = math.sqrt(1.0 + t * t)
            k, kc = 1.0 / s, t / s
        if k == 0.0 or kc == 0.0:
            raise DomainError(f"log ratio {u!r} underflows the modulus")
        # 1/s and t/s are each correctly rounded, the sum of squares may drift by an ulp
        return cls(k, kc)

    @property
    def comp(self) -> "EllipticModulus":
        """The complementary modulus as an :class:`EllipticModulus`."""
        return EllipticModulus(self.k_comp, self.k)

    @property
    def log_ratio(self) -> float:
        return math.log(self.k_comp) - math.log(self.k)

    @property
    def one_minus_k(self) -> float:
        """``1 - k`` computed as ``k'^2 / (1 + k)``."""
        return self.k_comp * self.k_comp / (1.0 + self.k)


def as_modulus(m) -> EllipticModulus:
    if isinstance(m, EllipticModulus):
        return m
    return EllipticModulus.from_k(m)


# ---------------------------------------------------------------------------
# Carlson symmetric forms


def carlson_rf(x: float, y: float, z: float) -> float:
    """R_F(x, y, z) = 1/2 int_0^inf dt / sqrt((t+x)(t+y)(t+z)); at most one zero argument."""
    if min(x, y, z) < 0 or (x == 0) + (y == 0) + (z == 0) > 1:
        raise DomainError(f"R_F undefined for ({x}, {y}, {z})")
    a0 = (x + y + z) / 3.0
    q = (3.0 * _EPS) ** (-1.0 / 6.0) * max(abs(a0 - x), abs(a0 - y), abs(a0 - z))
    a = a0
    scale = 1.0
    for _ in range(200):
        if q * scale < abs(a):
            break
        sx, sy, sz = math.sqrt(x), math.sqrt(y), math.sqrt(z)
        lam = sx * sy + sx * sz + sy * sz
        x, y, z = 0.25 * (x + lam), 0.25 * (y + lam), 0.25 * (z + lam)
        a = 0.25 * (a + lam)
        scale *= 0.25
    else:
        raise ConvergenceError("R_F duplication did not converge")
    # deviations of the final arguments from their mean, normalised
    dx = (a - x) / a
    dy = (a - y) / a
    dz = -(dx + dy)
    e2 = dx * dy - dz * dz
    e3 = dx * dy * dz
    return (1.0 - e2 / 10.0 + e3 / 14.0 + e2 * e2 / 24.0 - 3.0 * e2 * e3 / 44.0) / math.sqrt(a)


def carlson_rd(x: float, y: float, z: float) -> float:
    """R_D(x, y, z) = 3/2 int_0^inf dt / ((t+z) sqrt((t+x)(t+y)(t+z))); z > 0."""
    if min(x, y) < 0 or z <= 0 or x + y == 0:
        raise DomainError(f"R_D undefined for ({x}, {y}, {z})")
    a0 = (x + y + 3.0 * z) / 5.0
    q = (0.25 * _EPS) ** (-1.0 / 6.0) * max(abs(a0 - x), abs(a0 - y), abs(a0 - z))
    a = a0
    scale = 1.0
    total = 0.0
    for _ in range(200):
        if q * scale < abs(a):
            break
        sx, sy, sz = math.sqrt(x), math.sqrt(y), math.sqrt(z)
        lam = sx * sy + sx * sz + sy * sz
        total += scale / (sz * (z + lam))
        x, y, z = 0.25 * (x + lam), 0.25 * (y + lam), 0.25 * (z + lam)
        a = 0.25 * (a + lam)
        scale *= 0.25
    else:
        raise ConvergenceError("R_D duplication did not converge")
    dx = (a - x) / a
    dy = (a - y) / a
    dz = -(dx + dy) / 3.0
    e2 = dx * dy - 6.0 * dz * dz
    e3 = (3.0 * dx * dy - 8.0 * dz * dz) * dz
    e4 = 3.0 * (dx * dy - dz * dz) * dz * dz
    e5 = dx * dy * dz * dz * dz
    poly = (
        1.0
        - 3.0 * e2 / 14.0
        + e3 / 6.0
        + 9.0 * e2 * e2 / 88.0
        - 3.0 * e4 / 22.0
        - 9.0 * e2 * e3 / 52.0
        + 3.0 * e5 / 26.0
    )
    return scale * poly / (a * math.sqrt(a)) + 3.0 * total


# ---------------------------------------------------------------------------
# complete integrals


def _agm_K_E(k: float, kc: float) -> tuple[float, float]:
    a, b = 1.0, kc
    c2_sum = 0.5 * k * k
    weight = 0.5
    for _ in range(60):
        c = 0.5 * (a - b)
        a, b = 0.5 * (a + b), math.sqrt(a * b)
        weight *= 2.0
        c2_sum += weight * c * c
        if abs(c) <= _EPS * a:
            break
    else:
        raise ConvergenceError(f"AGM did not converge for k={k!r}")
    K = _HALF_PI / a
    return K, K * (1.0 - c2_sum)


def _log_expansions(kc: float) -> tuple[float, float]:
    lam = math.log(4.0 / kc)
    s = kc * kc
    K = lam + 0.25 * (lam - 1.0) * s + 9.0 / 64.0 * (lam - 7.0 / 6.0) * s * s
    E = 1.0 + 0.5 * (lam - 0.5) * s + 3.0 / 16.0 * (lam - 13.0 / 12.0) * s * s
    return K, E


def _K_E(k: float, kc: float) -> tuple[float, float]:
    if kc < _LOG_SWITCH:
        return _log_expansions(kc)
    return _agm_K_E(k, kc)


def complete_K(m) -> float:
    """Complete integral of the first kind K(k)."""
    m = as_modulus(m)
    return _K_E(m.k, m.k_comp)[0]


def complete_E(m) -> float:
    """Complete integral of the second kind E(k)."""
    m = as_modulus(m)
    return _K_E(m.k, m.k_comp)[1]


def complete_K_comp(m) -> float:
    """K'(k) = K(k'), evaluated from the stored complementary modulus."""
    m = as_modulus(m)
    return _K_E(m.k_comp, m.k)[0]


def complete_E_comp(m) -> float:
    """E'(k) = E(k'), evaluated from the stored complementary modulus."""
    m = as_modulus(m)
    return _K_E(m.k_comp, m.k)[1]


def k_minus_e(m) -> float:
    """K(k) - E(k) = (k^2 / 3) R_D(0, k'^2, 1), free of cancellation as k -> 0."""
    m = as_modulus(m)
    return m.k * m.k / 3.0 * carlson_rd(0.0, m.k_comp * m.k_comp, 1.0)


def e_minus_comp_sq_k(m) -> float:
    """E(k) - k'^2 K(k) = k^2 (K(k) - R_D(0, k'^2, 1) / 3); positive on (0, 1)."""
    m = as_modulus(m)
    return m.k * m.k * (complete_K(m) - carlson_rd(0.0, m.k_comp * m.k_comp, 1.0) / 3.0)


# ---------------------------------------------------------------------------
# incomplete integrals


def _check_x(x: float) -> float:
    x = float(x)
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"argument x must lie in [0, 1], got {x!r}")
    return x


def _incomplete_args(x: float, m: EllipticModulus) -> tuple[float, float]:
    y = (1.0 - x) * (1.0 + x)
    # 1 - k^2 x^2 written so that it stays accurate when k -> 1 and x -> 1
    z = m.k_comp * m.k_comp + m.k * m.k * y
    return y, z


def incomplete_F(x: float, m) -> float:
    """Incomplete integral of the first kind F(x, k), 0 <= x <= 1."""
    x = _check_x(x)
    m = as_modulus(m)
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return complete_K(m)
    y, z = _incomplete_args(x, m)
    return x * carlson_rf(y, z, 1.0)


def incomplete_E(x: float, m) -> float:
    """Incomplete integral of the second kind E(x, k), 0 <= x <= 1."""
    x = _check_x(x)
    m = as_modulus(m)
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return complete_E(m)
    y, z = _incomplete_args(x, m)
    k2 = m.k * m.k
    return x * carlson_rf(y, z, 1.0) - k2 * x**3 / 3.0 * carlson_rd(y, z, 1.0)


def i2n(x: float, n: int) -> float:
    """I_{2n}(x) = int_0^x t^{2n} / sqrt(1 - t^2) dt.

    For x <= 0.8 the binomial series of the integrand is summed term by term
    (all terms positive); closer to 1 the upward recursion in n is used, whose
    subtractions are harmless there because I_{2n}(x) no longer decays fast.
    """
    x = _check_x(x)
    if n < 0:
        raise DomainError(f"n must be nonnegative, got {n!r}")
    if x <= _I2N_SERIES_MAX:
        x2 = x * x
        total, coef, power = 0.0, 1.0, 1.0
        j = 0
        while True:
            term = coef * power / (2 * n + 2 * j + 1)
            total += term
            if term <= 1e-17 * total:
                break
            j += 1
            coef *= (2 * j - 1) / (2 * j)
            power *= x2
        return total * x ** (2 * n + 1)
    root = math.sqrt((1.0 - x) * (1.0 + x))
    val = math.asin(x)
    power = x  # x^{2j-1}
    for j in range(1, n + 1):
        val = (2 * j - 1) / (2 * j) * val - power * root / (2 * j)
        power *= x * x
    return val


def landen_ascend(m) -> EllipticModulus:
    """Ascending Landen map k -> lam = 2 sqrt(k) / (1 + k), lam' = (1 - k) / (1 + k)."""
    m = as_modulus(m)
    lam = 2.0 * math.sqrt(m.k) / (1.0 + m.k)
    lam_c = m.one_minus_k / (1.0 + m.k)
    if lam >= 1.0:
        # k' near sqrt(eps): keep the exact complement and nudge lam below one
        lam = math.sqrt((1.0 - lam_c) * (1.0 + lam_c))
    return EllipticModulus(lam, lam_c)


# ---------------------------------------------------------------------------
# truncated series, used as independent oracles


class SeriesKind(str, enum.Enum):
    K = "K"
    E = "E"
    Kprime = "Kprime"
    Eprime = "Eprime"
    F_expansion = "F_expansion"
    E_expansion = "E_expansion"


@dataclass(frozen=True)
class SeriesSpec:
    kind: SeriesKind
    term_count: int = 50

    def __post_init__(self):
        object.__setattr__(self, "kind", SeriesKind(self.kind))
        if self.term_count < 1:
            raise DomainError("term_count must be at least 1")


def _central_ratios(n_terms: int) -> list[float]:
    """b_n = (2n-1)!! / (2n)!! = (2n)! / (4^n n!^2) for n < n_terms."""
    b = [1.0]
    for n in range(1, n_terms):
        b.append(b[-1] * (2 * n - 1) / (2 * n))
    return b


_LOG_SERIES = {
    # (coefficient, offset) pairs: c * (ln(4/s) - offset) * s^(2j)
    SeriesKind.Kprime: [(1.0, 0.0), (0.25, 1.0), (9.0 / 64.0, 7.0 / 6.0), (25.0 / 256.0, 37.0 / 30.0)],
    SeriesKind.Eprime: [(1.0, -1.0), (0.5, 0.5), (3.0 / 16.0, 13.0 / 12.0), (15.0 / 128.0, 6.0 / 5.0)],
}


def _log_series_terms(kind: SeriesKind, s: float, count: int) -> list[float]:
    lam = math.log(4.0 / s)
    terms = []
    for j, (c, off) in enumerate(_LOG_SERIES[kind][:count]):
        if kind is SeriesKind.Eprime and j == 0:
            terms.append(1.0)
        else:
            terms.append(c * (lam - off) * s ** (2 * j))
    return terms


def log_series_omitted_term(kind, m, term_count: int = 3) -> float:
    """Magnitude of the first term dropped by a ``term_count``-term log series."""
    kind = SeriesKind(kind)
    m = as_modulus(m)
    if term_count >= len(_LOG_SERIES[kind]):
        raise DomainError("no tabulated term beyond the requested truncation")
    return abs(_log_series_terms(kind, m.k, term_count + 1)[-1])


def reference_series(spec: SeriesSpec, m, x: float | None = None) -> float:
    """Evaluate a truncated power series by direct term summation.

    ``K`` and ``E`` are the power series in ``k``; ``Kprime`` and ``Eprime``
    are the logarithmic expansions of K'(k) and E'(k) about k = 0 (equivalently
    of K and E about modulus 1 in terms of the complementary modulus), limited
    to three displayed terms plus one more for error bounding.
    ``F_expansion`` and ``E_expansion`` are the series of F(x, k), E(x, k) in
    powers of k with coefficients I_{2n}(x).
    """
    m = as_modulus(m)
    kind, n = spec.kind, spec.term_count
    needs_x = kind in (SeriesKind.F_expansion, SeriesKind.E_expansion)
    if needs_x != (x is not None):
        raise DomainError(f"series {kind.value} {'requires' if needs_x else 'does not take'} x")
    k2 = m.k * m.k
    if kind in (SeriesKind.K, SeriesKind.E):
        b = _central_ratios(n)
        total, power = 0.0, 1.0
        for j in range(n):
            a = b[j] * b[j]
            if kind is SeriesKind.E:
                a = -a / (2 * j - 1)
            total += a * power
            power *= k2
        return _HALF_PI * total
    if kind in (SeriesKind.Kprime, SeriesKind.Eprime):
        if n > len(_LOG_SERIES[kind]):
            raise DomainError(f"at most {len(_LOG_SERIES[kind])} terms are tabulated for {kind.value}")
        terms = _log_series_terms(kind, m.k, n)
        if any(abs(t2) >= abs(t1) for t1, t2 in zip(terms, terms[1:])):
            raise DomainError(f"log series terms do not decrease at k={m.k!r}")
        return sum(terms)
    x = _check_x(x)
    b = _central_ratios(n)
    total, power = 0.0, 1.0
    for j in range(n):
        c = b[j] if kind is SeriesKind.F_expansion else -b[j] / (2 * j - 1)
        total += c * power * i2n(x, j)
        power *= k2
    return total
