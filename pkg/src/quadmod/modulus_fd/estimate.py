"""Grid ladders, Richardson extrapolation and the public modulus estimators."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad as _quad

from ..errors import ConvergenceError, DomainError
from .geometry import (
    QuadOrientation,
    SymmetricQuad,
    box_exterior_quarter_boundary,
    exterior_quarter_boundary,
    interior_quarter_boundary,
)
from .solver import build_mesh, solve_field

__all__ = [
    "ModulusEstimate",
    "richardson_extrapolate",
    "compute_c",
    "modulus_interior",
    "modulus_exterior",
    "modulus_g1h",
    "ladder",
]

log = logging.getLogger(__name__)

DEFAULT_H0 = 0.1
DEFAULT_LEVELS = 3
DEFAULT_BUDGET = 4_000_000


@dataclass
class ModulusEstimate:
    """Extrapolated modulus with the raw ladder it came from.

    ``err_est`` is the magnitude of the last Richardson increment and
    ``converged`` records whether it is at most ``tol * |value|``.
    """

    value: float
    raw: list[tuple[float, float]]
    err_est: float
    converged: bool
    tol: float
    warnings: list[str] = field(default_factory=list)


def richardson_extrapolate(raw, order: int = 2, depth: int | None = 1, rtol: float = 1e-6) -> tuple[float, float]:
    """Extrapolate ``(h, value)`` pairs to h = 0.

    The spacings must halve from one entry to the next.  Column ``j`` of the
    tableau removes the ``h**(order * j)`` term; ``depth`` columns are built
    (all of them when ``None``).  With the default single column each
    neighbouring pair is combined to cancel the ``h**order`` term.

    Returns
    -------
    value, err_est
        The extrapolant from the finest pair, and the magnitude of the last
        increment: the change between the two finest extrapolants of the
        deepest column, or between the last two columns when the deepest
        column has a single entry.
    """
    raw = [(float(h), float(v)) for h, v in raw]
    if len(raw) < 2:
        raise DomainError("Richardson extrapolation needs at least two spacings")
    for (h0, _), (h1, _) in zip(raw[:-1], raw[1:]):
        if not abs(h0 / h1 - 2.0) <= rtol * 2.0:
            raise DomainError(f"spacings must halve, got {h0!r} -> {h1!r}")
    n = len(raw)
    d = n - 1 if depth is None else min(int(depth), n - 1)
    if d < 1:
        raise DomainError("depth must be at least 1")
    cols = [[v for _, v in raw]]
    for j in range(1, d + 1):
        f = 2.0 ** (order * j)
        prev = cols[-1]
        cols.append([b + (b - a) / (f - 1.0) for a, b in zip(prev[:-1], prev[1:])])
    last = cols[-1]
    inc = last[-1] - last[-2] if len(last) > 1 else last[-1] - cols[-2][-1]
    return last[-1], abs(inc)


def compute_c(quad: SymmetricQuad) -> float:
    """The integral of dx / (2 f(x)) over [-alpha, alpha]."""

    def integrand(x):
        fx = float(quad.f(np.array([x]))[0])
        if not fx > 0:
            raise DomainError(f"curve vanishes at x={x!r}")
        return 0.5 / fx

    val, err = _quad(integrand, 0.0, quad.alpha, epsabs=0.0, epsrel=1e-13, limit=200)
    if not err <= 1e-10 * abs(val):
        raise ConvergenceError(f"quadrature error {err:.2e} too large for c")
    return 2.0 * val


def ladder(boundary, orient, tol, h0=DEFAULT_H0, levels=DEFAULT_LEVELS, budget=DEFAULT_BUDGET, solver="direct", **mesh_kw):
    """Solve on spacings h0, h0/2, ... and extrapolate."""
    if not tol > 0:
        raise DomainError(f"tol must be positive, got {tol!r}")
    raw = []
    warnings = []
    for level in range(levels):
        mesh = build_mesh(boundary, orient, h0, level, **mesh_kw)
        nodes = mesh.shape[0] * mesh.shape[1]
        if nodes > budget:
            raise DomainError(f"level {level} grid has {nodes} nodes, above the budget {budget:g}")
        fld = solve_field(mesh, h0 / 2**level, solver=solver)
        raw.append((h0 / 2**level, 1.0 / fld.energy))
        warnings.extend(w for w in fld.warnings if w not in warnings)
        log.debug("%s level %d: %d nodes, modulus %.12g", boundary.label, level, nodes, raw[-1][1])
    value, err = richardson_extrapolate(raw)
    return ModulusEstimate(value=value, raw=raw, err_est=err, converged=err <= tol * abs(value), tol=tol, warnings=warnings)


def _check_H(H):
    if not (H >= 1 and math.isfinite(H)):
        raise DomainError(f"stretch factor must satisfy H >= 1, got {H!r}")


def modulus_interior(
    quad: SymmetricQuad, H: float, tol: float = 1e-2, orientation: str = "vertical_ends", **kw
) -> ModulusEstimate:
    """Modulus of Q_H for the curves joining the Dirichlet pair of ``orientation``.

    ``vertical_ends`` joins the end segments (a rectangle gives 2H alpha / 2 beta);
    ``horizontal_curves`` joins the graphs and behaves like 1/(cH).
    """
    _check_H(H)
    b = interior_quarter_boundary(quad, H)
    return ladder(b, QuadOrientation(orientation), tol, **kw)


def modulus_exterior(quad: SymmetricQuad, H: float, tol: float = 1e-2, **kw) -> ModulusEstimate:
    """Exterior modulus of Q_H, the complement joining the two end segments."""
    _check_H(H)
    b = exterior_quarter_boundary(quad, H)
    return ladder(b, QuadOrientation(exterior=True), tol, **kw)


def modulus_g1h(alpha: float, beta: float, M: float, H: float, tol: float = 1e-2, **kw) -> ModulusEstimate:
    """Exterior modulus of the box [-H alpha, H alpha] x [-M, M] with vertices at (+-H alpha, +-beta)."""
    _check_H(H)
    if not (alpha > 0 and beta > 0 and M > beta):
        raise DomainError(f"need alpha, beta > 0 and M > beta, got {alpha!r}, {beta!r}, {M!r}")
    b = box_exterior_quarter_boundary(alpha, beta, M, H)
    return ladder(b, QuadOrientation(exterior=True), tol, **kw)
