"""Analytic bounds for the exterior modulus of a stretched symmetric quadrilateral.

The lower bound is the modulus of ``G_2H``, the plane slit along the two
vertical segments ``[+-H alpha - i beta, +-H alpha + i beta]`` and the real
segment ``[-H alpha, H alpha]``.  The map of the upper half-plane onto the
upper half of ``G_2H`` is a Schwarz-Christoffel integral with prevertices
``+-1``, ``+-1/lam``, ``+-1/k``; ``lam`` and the auxiliary ``l`` are explicit
functions of ``k``::

    1/lam^2 = E'(k) / (k^2 K'(k)),    l = (k/k') sqrt(1/lam^2 - 1),

so the single unknown ``k`` is fixed by the aspect condition

    [E(k) - (1 - k^2/lam^2) K(k)] / [E(l', k') - (k^2/lam^2) F(l', k')] = H alpha / beta.

With ``kappa = k/lam`` the modulus is ``K(kappa)/K'(kappa)``.  Writing
``Kc = K(k')``, ``Ec = E(k')`` and ``Rc = R_D(0, k^2, 1)``, all derived
quantities reduce to cancellation-free forms::

    kappa^2 = Ec / Kc,   kappa'^2 = 1 - kappa^2 = k'^2 l'^2,   l'^2 = Rc / (3 Kc).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

from scipy.optimize import brentq

from .elliptic import (
    EllipticModulus,
    carlson_rd,
    complete_E,
    complete_E_comp,
    complete_K,
    complete_K_comp,
    e_minus_comp_sq_k,
    i2n,
    incomplete_E,
    incomplete_F,
    k_minus_e,
)
from .errors import ConvergenceError, DomainError, SandwichViolation
from .rectangle_moduli import ext_modulus_rectangle

__all__ = [
    "SlitParams",
    "SandwichReport",
    "g2h_solve",
    "g2h_modulus",
    "g2h_half_modulus",
    "g1h_star_modulus",
    "slit_aspect_terms",
    "aspect_residual",
    "sandwich_check",
]

# below this k' the slit-height integral uses the double power series
_SERIES_SWITCH = 0.3
_SERIES_ORDER = 24


@dataclass(frozen=True)
class SlitParams:
    k: EllipticModulus
    lam: EllipticModulus
    l: float
    l_comp: float
    H: float
    alpha: float
    beta: float
    kappa: EllipticModulus = field(repr=False)

    @property
    def target_aspect(self) -> float:
        return self.H * self.alpha / self.beta


def _parameters(m: EllipticModulus):
    kc_val = complete_K_comp(m)
    ec_val = complete_E_comp(m)
    rc = carlson_rd(0.0, m.k * m.k, 1.0)
    l_comp = math.sqrt(rc / (3.0 * kc_val))
    l = math.sqrt((kc_val - rc / 3.0) / kc_val)
    kappa_c = m.k_comp * l_comp
    kappa = (
        EllipticModulus.from_comp(kappa_c) if kappa_c < 0.5 else EllipticModulus.from_k(math.sqrt(ec_val / kc_val))
    )
    lam2 = m.k * m.k * kc_val / ec_val
    lam_c2 = e_minus_comp_sq_k(m.comp) / ec_val
    lam = EllipticModulus.from_comp(math.sqrt(lam_c2)) if lam_c2 < 0.25 else EllipticModulus.from_k(math.sqrt(lam2))
    return kc_val, ec_val, l, l_comp, kappa, lam


@lru_cache(maxsize=4096)
def _i2n_table(x: float, n_max: int) -> tuple[float, ...]:
    return tuple(i2n(x, n) for n in range(n_max + 1))


def _height_difference(m: EllipticModulus, l_comp: float, kc_val: float, ec_val: float) -> float:
    """K(k') E(l', k') - E(k') F(l', k'), which is O(k'^2) as k' -> 0.

    For small k' the two products are expanded in k'^2 and the diagonal
    terms, which cancel exactly, are dropped before summation.
    """
    kp = m.k_comp
    if kp >= _SERIES_SWITCH:
        mc = m.comp
        return kc_val * incomplete_E(l_comp, mc) - ec_val * incomplete_F(l_comp, mc)
    order = _SERIES_ORDER
    b = [1.0]
    for n in range(1, order + 1):
        b.append(b[-1] * (2 * n - 1) / (2 * n))
    table = _i2n_table(l_comp, order)
    s2 = kp * kp
    total = 0.0
    power = 1.0
    for s in range(1, order + 1):
        power *= s2
        inner = 0.0
        for mm in range(s + 1):
            n = s - mm
            if n == mm:
                continue
            inner += b[mm] * b[mm] * b[n] * table[n] * 2.0 * (n - mm) / ((2 * mm - 1) * (2 * n - 1))
        term = inner * power
        total += term
        if abs(term) < 1e-18 * abs(total):
            break
    return 0.5 * math.pi * total


def slit_aspect_terms(m: EllipticModulus) -> tuple[float, float]:
    """Numerator and denominator of the aspect condition, both up to the factor C/k^2."""
    kc_val, ec_val, l, l_comp, kappa, lam = _parameters(m)
    kappa2, kappa_c2 = kappa.k**2, kappa.k_comp**2
    if kappa_c2 < 0.5:
        num = complete_E(m) - kappa_c2 * complete_K(m)
    else:
        num = kappa2 * complete_K(m) - k_minus_e(m)
    den = _height_difference(m, l_comp, kc_val, ec_val) / kc_val
    return num, den


def _log_aspect(u: float) -> float:
    num, den = slit_aspect_terms(EllipticModulus.from_log_ratio(u))
    return math.log(num) - math.log(den)


def _check_positive(**kw):
    for name, val in kw.items():
        if not (val > 0 and math.isfinite(val)):
            raise DomainError(f"{name} must be positive and finite, got {val!r}")


def g2h_solve(alpha: float, beta: float, H: float) -> SlitParams:
    """Solve the slit-map parameter system for the given geometry."""
    _check_positive(alpha=alpha, beta=beta, H=H)
    target = math.log(H * alpha / beta)

    def g(u):
        return _log_aspect(u) - target

    # the aspect ratio increases with k, i.e. decreases with u = log(k'/k)
    lo, hi, step = -1.0, 1.0, 1.0
    while g(lo) <= 0:
        lo, step = lo - step, 2.0 * step
        if lo < -300:
            raise ConvergenceError(f"could not bracket k for H={H!r}")
    step = 1.0
    while True:
        try:
            if g(hi) < 0:
                break
        except (DomainError, ValueError) as exc:
            raise DomainError(f"H={H!r} too small: k underflows the bracket") from exc
        hi, step = hi + step, 2.0 * step
        if hi > 700:
            raise DomainError(f"H={H!r} too small: k underflows the bracket")
    try:
        u = brentq(g, lo, hi, xtol=1e-15, rtol=4 * 2.0**-52, maxiter=200)
    except RuntimeError as exc:
        raise ConvergenceError(str(exc)) from exc
    m = EllipticModulus.from_log_ratio(u)
    _, _, l, l_comp, kappa, lam = _parameters(m)
    return SlitParams(k=m, lam=lam, l=l, l_comp=l_comp, H=float(H), alpha=float(alpha), beta=float(beta), kappa=kappa)


def aspect_residual(p: SlitParams) -> float:
    """Relative residual of the aspect condition at the solved parameters."""
    num, den = slit_aspect_terms(p.k)
    return abs(num / den - p.target_aspect) / p.target_aspect


def _kappa(p: SlitParams) -> EllipticModulus:
    if not p.kappa.k < 1.0:
        raise DomainError("k/lam must lie in (0, 1); slit parameters are corrupted")
    return p.kappa


def g2h_modulus(p: SlitParams) -> float:
    """Modulus of the slit domain G_2H: K(k/lam) / K'(k/lam)."""
    kappa = _kappa(p)
    return complete_K(kappa) / complete_K_comp(kappa)


def g2h_half_modulus(p: SlitParams) -> float:
    """Modulus of the upper half of G_2H: 2 K(k/lam) / K'(k/lam)."""
    return 2.0 * g2h_modulus(p)


def g1h_star_modulus(alpha: float, M: float, H: float) -> float:
    """Exterior modulus of [-H alpha, H alpha] x [-M, M] with vertices at its corners."""
    _check_positive(alpha=alpha, M=M, H=H)
    return ext_modulus_rectangle(H * alpha / M)


@dataclass
class SandwichReport:
    H: float
    lower: float
    upper: float
    asymptote: float
    ext_numeric: float | None = None
    upper_is_proxy: bool = False
    slack: float = 0.0
    violations: list[str] = field(default_factory=list)

    @property
    def ordered(self) -> bool:
        return not self.violations


def sandwich_check(quad, H: float, M: float, fd=None, *, slack: float = 0.02, strict: bool = True) -> SandwichReport:
    """Trap the exterior modulus of the stretched quad between the slit and box bounds.

    ``fd`` is an optional pair ``(exterior_estimate, g1h_estimate)`` of
    :class:`~quadmod.modulus_fd.ModulusEstimate`.  Without it the upper bound
    is the corner-vertex box modulus, which is only a proxy and is not
    checked against anything.
    """
    _check_positive(H=H, M=M)
    if not M > quad.max_height():
        raise DomainError(f"M={M!r} must exceed max f = {quad.max_height()!r}")
    lower = g2h_modulus(g2h_solve(quad.alpha, quad.beta, H))
    asym = math.log(H) / math.pi
    if fd is None:
        upper = g1h_star_modulus(quad.alpha, M, H)
        return SandwichReport(H=H, lower=lower, upper=upper, asymptote=asym, upper_is_proxy=True)
    ext_est, g1h_est = fd
    rep = SandwichReport(H=H, lower=lower, upper=g1h_est.value, asymptote=asym, ext_numeric=ext_est.value, slack=slack)
    if rep.lower > rep.ext_numeric * (1.0 + slack):
        rep.violations.append(f"lower bound {rep.lower:.6g} exceeds exterior modulus {rep.ext_numeric:.6g}")
    if rep.ext_numeric > rep.upper * (1.0 + slack):
        rep.violations.append(f"exterior modulus {rep.ext_numeric:.6g} exceeds upper bound {rep.upper:.6g}")
    if strict and rep.violations:
        raise SandwichViolation("; ".join(rep.violations) + " (likely FD under-resolution)")
    return rep
