"""Acceptance checks, one callable per criterion, shared by ``quadmod verify`` and the test suite.

Library functions are looked up through their modules at call time so that a
monkeypatched function is what the check actually exercises.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import elliptic as ell
from . import rectangle_moduli as rm
from . import slit_bounds as sb
from . import modulus_fd as fd

__all__ = ["Criterion", "CriterionResult", "CRITERIA", "MODULES", "run_criterion", "run_criteria", "format_result"]

MODULES = ("elliptic", "rectangle_moduli", "slit_bounds", "modulus_fd")


@dataclass(frozen=True)
class Criterion:
    number: int
    module: str
    title: str
    check: Callable[[], tuple[bool, str]]


@dataclass
class CriterionResult:
    number: int
    module: str
    title: str
    passed: bool
    detail: str
    seconds: float


def _rel(a, b):
    return abs(a - b) / max(1.0, abs(b))


def c01_series() -> tuple[bool, str]:
    worst = 0.0
    for k in (0.1, 0.2, 0.3, 0.4, 0.5):
        m = ell.EllipticModulus.from_k(k)
        for kind, fn in ((ell.SeriesKind.K, ell.complete_K), (ell.SeriesKind.E, ell.complete_E)):
            worst = max(worst, abs(fn(m) - ell.reference_series(ell.SeriesSpec(kind, 50), m)))
    ok = worst <= 1e-12
    # log series of K'(k) in the small modulus s, three printed terms
    ratios = []
    for s in (0.3, 0.1, 0.01):
        m = ell.EllipticModulus.from_k(s)
        approx = ell.reference_series(ell.SeriesSpec(ell.SeriesKind.Kprime, 3), m)
        err = abs(ell.complete_K_comp(m) - approx)
        omitted = ell.log_series_omitted_term(ell.SeriesKind.Kprime, m, 3)
        bound = omitted / (1.0 - s * s)
        ok = ok and err <= bound
        ratios.append(f"s={s:g}: err/omitted={err / omitted:.4f}")
    return ok, f"max |K,E - series| = {worst:.2e}; " + ", ".join(ratios)


def c02_legendre() -> tuple[bool, str]:
    worst = 0.0
    for k in np.linspace(0.05, 0.95, 19):
        m = ell.EllipticModulus.from_k(float(k))
        K, E = ell.complete_K(m), ell.complete_E(m)
        Kp, Ep = ell.complete_K_comp(m), ell.complete_E_comp(m)
        worst = max(worst, abs(E * Kp + Ep * K - K * Kp - 0.5 * math.pi))
    return worst <= 1e-12, f"Legendre relation max residual {worst:.2e}"


def c03_landen() -> tuple[bool, str]:
    worst = 0.0
    for k in np.geomspace(1e-4, 1.0 - 1e-4, 50):
        m = ell.EllipticModulus.from_k(float(k))
        lam = ell.landen_ascend(m)
        k_ = m.k
        K, E, Kp, Ep = ell.complete_K(m), ell.complete_E(m), ell.complete_K_comp(m), ell.complete_E_comp(m)
        worst = max(
            worst,
            _rel(ell.complete_K(lam), (1 + k_) * K),
            _rel(ell.complete_K_comp(lam), 0.5 * (1 + k_) * Kp),
            _rel(ell.complete_E(lam), (2 * E - m.k_comp**2 * K) / (1 + k_)),
            _rel(ell.complete_E_comp(lam), (Ep + k_ * Kp) / (1 + k_)),
        )
    return worst <= 1e-11, f"Gauss-Landen identities max deviation {worst:.2e}"


def c04_bickley() -> tuple[bool, str]:
    w1 = w2 = 0.0
    for k in np.linspace(0.01, 0.99, 50):
        m = ell.EllipticModulus.from_k(float(k))
        lam = ell.landen_ascend(m)
        w1 = max(w1, _rel(ell.complete_K(lam) / ell.complete_K_comp(lam), 2 * ell.complete_K(m) / ell.complete_K_comp(m)))
        w2 = max(w2, _rel(rm.bickley_modulus(lam), rm.psi(m)))
    return w1 <= 1e-11 and w2 <= 1e-10, f"modulus ratio {w1:.2e}, Bickley vs psi {w2:.2e}"


def c05_square() -> tuple[bool, str]:
    v = rm.ext_modulus_rectangle(1.0)
    return abs(v - 1.0) <= 1e-10, f"ext_modulus_rectangle(1) - 1 = {v - 1.0:.2e}"


def c06_vz() -> tuple[bool, str]:
    bad = [H for H in (10.0**e for e in range(9)) if not rm.vz_bounds(H).ordered]
    return not bad, "all ordered" if not bad else f"unordered at H={bad}"


def c07_offset() -> tuple[bool, str]:
    H = 1e10
    gap = rm.ext_modulus_rectangle(H) - math.log(H) / math.pi
    d = abs(gap - math.log(4 * math.pi) / math.pi)
    return d <= 1e-3, f"offset {gap:.8f} vs log(4 pi)/pi = {math.log(4 * math.pi) / math.pi:.8f}, |diff| = {d:.2e}"


def c08_psi_asymptote() -> tuple[bool, str]:
    m = ell.EllipticModulus.from_k(1.0 - 1e-4)
    v = rm.psi(m) * math.pi * m.one_minus_k**2 / 16.0
    return 0.99 <= v <= 1.01, f"psi(k) pi (1-k)^2 / 16 = {v:.6f}"


def c09_g2h_system() -> tuple[bool, str]:
    worst_res = worst_inv = 0.0
    ok = True
    ratios = []
    for e in range(1, 11):
        p = sb.g2h_solve(1.0, 1.0, 10.0**e)
        worst_res = max(worst_res, sb.aspect_residual(p))
        k, lam = p.k, p.lam
        # k < lam < 1, compared through 1 - k so it survives k rounding to 1
        ok = ok and k.k > 0 and 0 < lam.one_minus_k < k.one_minus_k
        lam2 = k.k**2 * ell.complete_K_comp(k) / ell.complete_E_comp(k)
        l_ref = k.k / k.k_comp * (lam.k_comp / lam.k)
        worst_inv = max(worst_inv, _rel(lam.k**2, lam2), abs(p.l - l_ref) / p.l, abs(p.l**2 + p.l_comp**2 - 1.0))
        ok = ok and 0 < p.l < 1 and 0 < p.l_comp < 1
        if e >= 6:
            ratios.append(lam.one_minus_k / k.one_minus_k)
    drift = max(abs(a - b) for a, b in zip(ratios[:-1], ratios[1:]))
    ok = ok and worst_res <= 1e-10 and worst_inv <= 1e-10 and drift < 1e-2 and all(0 < r < 1 for r in ratios)
    return ok, (
        f"residual {worst_res:.2e}, invariants {worst_inv:.2e}, "
        f"(1-lam)/(1-k) = {ratios[-1]:.8f}, drift {drift:.2e}"
    )


def c10_g2h_trend() -> tuple[bool, str]:
    Hs = [10.0**e for e in (2, 4, 6, 8, 10)]
    r = [sb.g2h_modulus(sb.g2h_solve(1.0, 1.0, H)) / (math.log(H) / math.pi) for H in Hs]
    increasing = all(b > a for a, b in zip(r[:-1], r[1:]))
    above = r[-1] > 0.9
    return increasing and above, f"ratios {', '.join(f'{x:.5f}' for x in r)}; increasing={increasing}, last>0.9={above}"


def c11_fd_exactness() -> tuple[bool, str]:
    rect = fd.make_quad("rectangle")
    val, _ = fd.solve_modulus(fd.interior_boundary(rect, 2.0), fd.QuadOrientation("vertical_ends"), 0.1)
    exact = abs(val - 2.0)
    cos = fd.make_quad("cosine")
    ve = fd.modulus_interior(cos, 2.0, orientation="vertical_ends")
    hc = fd.modulus_interior(cos, 2.0, orientation="horizontal_curves")
    prod = ve.value * hc.value
    return exact <= 1e-10 and abs(prod - 1.0) <= 1e-2, f"|Mod - 2| = {exact:.2e}; conjugate product {prod:.6f}"


def c12_fd_rectangle() -> tuple[bool, str]:
    est = fd.modulus_exterior(fd.make_quad("rectangle"), 8.0)
    ref = rm.ext_modulus_rectangle(8.0)
    d = abs(est.value / ref - 1.0)
    return d <= 0.02 and len(est.raw) >= 3, f"FD {est.value:.6f} vs closed form {ref:.6f}, rel {d:.2e}"


SANDWICH_M_FACTOR = 1.1


def c13_sandwich() -> tuple[bool, str]:
    quad = fd.make_quad("cosine")
    M = SANDWICH_M_FACTOR * quad.max_height()
    ok = True
    ext_vals = []
    parts = []
    for H in (4.0, 8.0, 16.0):
        ext = fd.modulus_exterior(quad, H)
        g1 = fd.modulus_g1h(quad.alpha, quad.beta, M, H)
        rep = sb.sandwich_check(quad, H, M, fd=(ext, g1), slack=0.02, strict=False)
        ok = ok and rep.ordered
        ext_vals.append(ext.value)
        parts.append(f"H={H:g}: {rep.lower:.4f} <= {ext.value:.4f} <= {g1.value:.4f}")
    inc = all(b > a for a, b in zip(ext_vals[:-1], ext_vals[1:]))
    return ok and inc, "; ".join(parts) + f"; increasing={inc}"


def c14_interior_asymptote() -> tuple[bool, str]:
    quad = fd.make_quad("cosine")
    H = 32.0
    est = fd.modulus_interior(quad, H, orientation="horizontal_curves")
    v = est.value * fd.compute_c(quad) * H
    return 0.9 <= v <= 1.1, f"Mod c H = {v:.5f}"


def c15_g1h_monotone() -> tuple[bool, str]:
    ladder_M = (2.0, 1.5, 1.1)
    ests = [fd.modulus_g1h(1.0, 1.0, M, 16.0) for M in ladder_M]
    ok = all(b.value >= a.value - (a.err_est + b.err_est) for a, b in zip(ests[:-1], ests[1:]))
    return ok, ", ".join(f"M={M:g}: {e.value:.5f}" for M, e in zip(ladder_M, ests))


CRITERIA: tuple[Criterion, ...] = (
    Criterion(1, "elliptic", "complete integrals vs series oracles", c01_series),
    Criterion(2, "elliptic", "Legendre relation", c02_legendre),
    Criterion(3, "elliptic", "Gauss-Landen identities", c03_landen),
    Criterion(4, "rectangle_moduli", "Bickley and Duren-Pfaltzgraff agree under Landen", c04_bickley),
    Criterion(5, "rectangle_moduli", "square symmetry", c05_square),
    Criterion(6, "rectangle_moduli", "logarithmic bounds on the rectangle exterior modulus", c06_vz),
    Criterion(7, "rectangle_moduli", "large-H offset of the rectangle exterior modulus", c07_offset),
    Criterion(8, "rectangle_moduli", "psi asymptote near k = 1", c08_psi_asymptote),
    Criterion(9, "slit_bounds", "slit-map parameter system", c09_g2h_system),
    Criterion(10, "slit_bounds", "slit-domain modulus trend", c10_g2h_trend),
    Criterion(11, "modulus_fd", "FD rectangle exactness and conjugate reciprocity", c11_fd_exactness),
    Criterion(12, "modulus_fd", "FD exterior rectangle vs closed form", c12_fd_rectangle),
    Criterion(13, "modulus_fd", "sandwich for the cosine quad", c13_sandwich),
    Criterion(14, "modulus_fd", "interior asymptote 1/(cH)", c14_interior_asymptote),
    Criterion(15, "modulus_fd", "box modulus monotone in M", c15_g1h_monotone),
)


def run_criterion(c: Criterion) -> CriterionResult:
    """Run one criterion; an exception counts as a failure and is reported with its cause."""
    t0 = time.perf_counter()
    try:
        passed, detail = c.check()
    except Exception as exc:
        passed, detail = False, f"{type(exc).__name__}: {exc}"
    return CriterionResult(c.number, c.module, c.title, bool(passed), detail, time.perf_counter() - t0)


def run_criteria(module: str | None = None) -> list[CriterionResult]:
    """Run all criteria, or only those of one module."""
    if module is not None and module not in MODULES:
        raise ValueError(f"unknown module {module!r}; choose from {', '.join(MODULES)}")
    return [run_criterion(c) for c in CRITERIA if module is None or c.module == module]


def format_result(r: CriterionResult) -> str:
    return f"[{'PASS' if r.passed else 'FAIL'}] {r.number:2d} {r.module:<16} {r.title} ({r.seconds:.2f}s): {r.detail}"
