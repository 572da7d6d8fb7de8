"""Quadrilaterals of the symmetric class and the boundary descriptions solved on.

A :class:`Boundary` is a closed chain of arcs in the coordinates the grid is
laid out in.  Each arc carries a role: an explicit condition
(``dirichlet0``, ``dirichlet1``, ``neumann``) or a side label (``ends0``,
``ends1``, ``curves0``, ``curves1``) that a :class:`QuadOrientation` turns
into Dirichlet or Neumann data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..errors import DomainError

__all__ = [
    "SymmetricQuad",
    "QuadOrientation",
    "Arc",
    "Boundary",
    "CATALOG",
    "make_quad",
    "interior_boundary",
    "interior_quarter_boundary",
    "invert_exterior",
    "InvertedBoundary",
    "exterior_quarter_boundary",
    "box_exterior_quarter_boundary",
]

DIRICHLET0 = "dirichlet0"
DIRICHLET1 = "dirichlet1"
NEUMANN = "neumann"
_SIDE_ROLES = ("ends0", "ends1", "curves0", "curves1")


@dataclass(frozen=True)
class SymmetricQuad:
    """Quadrilateral bounded by y = +-f(x), |x| <= alpha, and the segments x = +-alpha.

    ``curve`` must be even and positive on [-alpha, alpha]; it is called with
    numpy arrays.
    """

    alpha: float
    curve: Callable[[np.ndarray], np.ndarray]
    label: str = "custom"
    beta: float = field(init=False)

    def __post_init__(self):
        if not self.alpha > 0:
            raise DomainError(f"alpha must be positive, got {self.alpha!r}")
        xs = np.linspace(-self.alpha, self.alpha, 401)
        ys = np.asarray(self.curve(xs), dtype=float)
        if not np.all(ys > 0):
            raise DomainError(f"curve of {self.label!r} must be positive on [-alpha, alpha]")
        if not np.allclose(ys, ys[::-1], rtol=0, atol=1e-12):
            raise DomainError(f"curve of {self.label!r} must be even")
        object.__setattr__(self, "beta", float(self.curve(np.array([self.alpha]))[0]))

    def f(self, x) -> np.ndarray:
        return np.asarray(self.curve(np.asarray(x, dtype=float)), dtype=float)

    def max_height(self) -> float:
        xs = np.linspace(0.0, self.alpha, 2001)
        return float(np.max(self.f(xs)))

    def min_height(self) -> float:
        xs = np.linspace(0.0, self.alpha, 2001)
        return float(np.min(self.f(xs)))

    def upper_curve(self, H: float, n: int) -> np.ndarray:
        """Points of y = f(x/H) for x from 0 to H alpha, shape (n, 2)."""
        s = np.linspace(0.0, self.alpha, n)
        return np.column_stack([H * s, self.f(s)])


def _constant(height):
    return lambda x: np.full_like(np.asarray(x, dtype=float), height)


def _cosine(alpha, height):
    return lambda x: height * (2.0 - np.cos(np.pi * np.asarray(x, dtype=float) / alpha))


def _parabola(alpha, height):
    return lambda x: height * (1.0 + (np.asarray(x, dtype=float) / alpha) ** 2)


# catalog id -> factory(alpha, height)
CATALOG: dict[str, Callable[[float, float], Callable]] = {
    "rectangle": lambda alpha, height: _constant(height),
    "cosine": _cosine,
    "parabola": _parabola,
}


def make_quad(catalog_id: str, alpha: float = 1.0, height: float = 1.0) -> SymmetricQuad:
    """Build a catalog quad; ``cosine`` is f(x) = height (2 - cos(pi x / alpha))."""
    try:
        factory = CATALOG[catalog_id]
    except KeyError:
        raise DomainError(f"unknown quad {catalog_id!r}; catalog: {', '.join(sorted(CATALOG))}") from None
    return SymmetricQuad(alpha=float(alpha), curve=factory(float(alpha), float(height)), label=catalog_id)


@dataclass(frozen=True)
class QuadOrientation:
    """Which arc pair carries the Dirichlet data 0 and 1."""

    arc_pair: str = "vertical_ends"
    exterior: bool = False

    def __post_init__(self):
        if self.arc_pair not in ("vertical_ends", "horizontal_curves"):
            raise DomainError(f"unknown arc pair {self.arc_pair!r}")

    def resolve(self, role: str) -> str:
        if role not in _SIDE_ROLES:
            return role
        family = "ends" if self.arc_pair == "vertical_ends" else "curves"
        if not role.startswith(family):
            return NEUMANN
        return DIRICHLET0 if role.endswith("0") else DIRICHLET1


@dataclass
class Arc:
    points: np.ndarray  # (n, 2), consecutive arcs share endpoints
    role: str


@dataclass
class Boundary:
    """Closed chain of arcs plus meshing hints, in grid coordinates.

    ``singular`` lists points where the solution has a corner singularity and
    the grid should be graded; ``knots`` are coordinates that must be grid
    lines; past ``far_x`` the grid spacing along x may grow linearly.
    """

    arcs: list[Arc]
    singular: list[tuple[float, float]] = field(default_factory=list)
    knots_x: list[float] = field(default_factory=list)
    knots_y: list[float] = field(default_factory=list)
    far_x: float | None = None
    label: str = ""

    def ring(self) -> np.ndarray:
        pts = [self.arcs[0].points]
        for arc in self.arcs[1:]:
            pts.append(arc.points[1:])
        ring = np.vstack(pts)
        if np.hypot(*(ring[0] - ring[-1])) > 1e-12:
            raise DomainError("boundary arcs do not close")
        return ring

    def bbox(self) -> tuple[float, float, float, float]:
        r = self.ring()
        return float(r[:, 0].min()), float(r[:, 0].max()), float(r[:, 1].min()), float(r[:, 1].max())

    def vertices(self) -> list[tuple[np.ndarray, str, str]]:
        """Arc junctions with the roles before and after them."""
        out = []
        n = len(self.arcs)
        for i in range(n):
            out.append((self.arcs[i].points[-1], self.arcs[i].role, self.arcs[(i + 1) % n].role))
        return out


def _segment(p, q, n) -> np.ndarray:
    t = np.linspace(0.0, 1.0, max(int(n), 2))[:, None]
    return (1 - t) * np.asarray(p, float) + t * np.asarray(q, float)


def _curve_samples(quad: SymmetricQuad, H: float, spacing: float) -> int:
    length = H * quad.alpha + 2 * quad.max_height()
    return int(min(max(200, length / spacing), 200000))


def interior_boundary(quad: SymmetricQuad, H: float, spacing: float = 0.01) -> Boundary:
    """Boundary of the stretched quad Q_H in physical coordinates.

    Arc order: right end (ends1), top curve (curves1), left end (ends0),
    bottom curve (curves0), counter-clockwise.
    """
    a = H * quad.alpha
    b = quad.beta
    n = _curve_samples(quad, H, spacing)
    top = quad.upper_curve(H, n)  # x from 0 to a
    top_full = np.vstack([top[::-1] * [-1, 1], top[1:]])  # x from -a to a
    right = _segment((a, -b), (a, b), max(50, 2 * b / spacing))
    top_arc = top_full[::-1]  # from (a, b) to (-a, b)
    left = _segment((-a, b), (-a, -b), max(50, 2 * b / spacing))
    bottom = top_full * [1, -1]  # from (-a, -b) to (a, -b)
    arcs = [Arc(right, "ends1"), Arc(top_arc, "curves1"), Arc(left, "ends0"), Arc(bottom, "curves0")]
    return Boundary(
        arcs=arcs,
        knots_x=[-a, 0.0, a],
        knots_y=[-b, 0.0, b],
        label=f"interior {quad.label} H={H:g}",
    )


def interior_quarter_boundary(quad: SymmetricQuad, H: float, spacing: float = 0.01) -> Boundary:
    """First-quadrant quarter of Q_H, for either orientation.

    Arc order: real axis (curves0), right end (ends1), top curve (curves1),
    imaginary axis (ends0).  The symmetric potential is 1/2 on the axis that
    separates the Dirichlet arcs and has zero normal derivative on the other,
    so v = 2u - 1 solves the quarter problem with the labels above and its
    Dirichlet energy equals the energy of u on all of Q_H.
    """
    a = H * quad.alpha
    b = quad.beta
    n = _curve_samples(quad, H, spacing)
    top = quad.upper_curve(H, n)
    arcs = [
        Arc(_segment((0.0, 0.0), (a, 0.0), max(50, a / spacing)), "curves0"),
        Arc(_segment((a, 0.0), (a, b), max(50, b / spacing)), "ends1"),
        Arc(top[::-1].copy(), "curves1"),
        Arc(_segment((0.0, float(top[0, 1])), (0.0, 0.0), max(50, top[0, 1] / spacing)), "ends0"),
    ]
    return Boundary(
        arcs=arcs,
        singular=[(a, b)],
        knots_x=[0.0, a],
        knots_y=[0.0, b, float(top[0, 1])],
        label=f"interior quarter {quad.label} H={H:g}",
    )


@dataclass
class InvertedBoundary:
    """Image of the stretched boundary under w = 1/z.

    ``points`` is a closed polyline traversed positively around the bounded
    image domain, ``vertices`` the images of the quad vertices in the order
    D, C, B, A used for the exterior quadrilateral; the image of infinity is 0.
    """

    points: np.ndarray
    vertices: np.ndarray
    infinity_image: complex = 0j


def invert_exterior(quad: SymmetricQuad, H: float, n: int = 4000) -> InvertedBoundary:
    """Map the boundary of Q_H by w = 1/z.

    The origin lies inside Q_H, so the exterior (which contains infinity)
    becomes the bounded region enclosed by the image curve.  ``points`` is
    ordered counter-clockwise around that region, which is the image of the
    positive (clockwise) traversal of the exterior.
    """
    a, b = H * quad.alpha, quad.beta
    top = quad.upper_curve(H, n)
    top_full = np.vstack([top[::-1] * [-1, 1], top[1:]])
    right = _segment((a, -b), (a, b), 200)
    # counter-clockwise around Q_H
    z_ring = np.vstack([right, top_full[::-1][1:], _segment((-a, b), (-a, -b), 200)[1:], (top_full * [1, -1])[1:]])
    z = z_ring[:, 0] + 1j * z_ring[:, 1]
    if np.any(np.abs(z) == 0):
        raise DomainError("boundary passes through the origin")
    w = 1.0 / z[::-1]
    pts = np.column_stack([w.real, w.imag])
    verts_z = np.array([a + 1j * b, a - 1j * b, -a - 1j * b, -a + 1j * b])
    verts = 1.0 / verts_z
    return InvertedBoundary(points=pts, vertices=np.column_stack([verts.real, verts.imag]))


def _to_log_polar(xy: np.ndarray) -> np.ndarray:
    return np.column_stack([0.5 * np.log(xy[:, 0] ** 2 + xy[:, 1] ** 2), np.arctan2(xy[:, 1], xy[:, 0])])


def _densify(xy: np.ndarray, spacing: float) -> np.ndarray:
    """Resample a physical polyline so that consecutive log-polar steps stay below ``spacing``."""
    out = [xy[:1]]
    for p, q in zip(xy[:-1], xy[1:]):
        r = max(min(np.hypot(*p), np.hypot(*q)), 1e-300)
        steps = int(math.ceil(np.hypot(*(q - p)) / (r * spacing)))
        if steps > 1:
            t = np.linspace(0.0, 1.0, steps + 1)[1:, None]
            out.append((1 - t) * p + t * q)
        else:
            out.append(q[None, :])
    return np.vstack(out)


def _quarter_log_polar(
    body: list[tuple[np.ndarray, str]],
    far_length: float,
    spacing: float,
    singular_xy: list[tuple[float, float]],
    label: str,
) -> Boundary:
    """Log-polar description of a first-quadrant exterior problem.

    ``body`` is the body boundary in physical coordinates as arcs running from
    a point on the positive imaginary axis to a point on the positive real
    axis.  The chain is closed by the real axis (neumann), the far circle and
    the imaginary axis (both dirichlet0, the symmetry value).
    """
    arcs = []
    for pts, role in body:
        arcs.append(Arc(_to_log_polar(_densify(pts, spacing)), role))
    # pin the axis endpoints exactly
    arcs[0].points[0, 1] = 0.5 * math.pi
    arcs[-1].points[-1, 1] = 0.0
    rho_end = arcs[-1].points[-1, 0]
    rho_top = arcs[0].points[0, 0]
    body_pts = np.vstack([a.points for a in arcs])
    rho_far = float(body_pts[:, 0].max()) + far_length
    n_long = max(int((rho_far - rho_end) / spacing), 4)
    n_far = max(int(0.5 * math.pi / spacing), 4)
    arcs.append(Arc(_segment((rho_end, 0.0), (rho_far, 0.0), n_long), NEUMANN))
    arcs.append(Arc(_segment((rho_far, 0.0), (rho_far, 0.5 * math.pi), n_far), DIRICHLET0))
    arcs.append(Arc(_segment((rho_far, 0.5 * math.pi), (rho_top, 0.5 * math.pi), max(int((rho_far - rho_top) / spacing), 4)), DIRICHLET0))
    singular = [tuple(_to_log_polar(np.array([p]))[0]) for p in singular_xy]
    knots_x = [rho_end, rho_top] + [s[0] for s in singular]
    knots_y = [0.0, 0.5 * math.pi] + [s[1] for s in singular]
    return Boundary(
        arcs=arcs,
        singular=singular,
        knots_x=knots_x,
        knots_y=knots_y,
        far_x=float(body_pts[:, 0].max()),
        label=label,
    )


def exterior_quarter_boundary(quad: SymmetricQuad, H: float, spacing: float = 0.005, far_length: float = 8.0) -> Boundary:
    """Quarter of the exterior of Q_H in log-polar coordinates rho + i theta = log z.

    By the two reflection symmetries the potential equals 1/2 on the
    imaginary axis and at infinity and has zero normal derivative on the real
    axis; after rescaling to v = 2u - 1 the quarter problem has data 0 on the
    imaginary axis and far circle, 1 on the end segment x = H alpha, and its
    Dirichlet energy equals the full exterior energy.
    """
    a, b = H * quad.alpha, quad.beta
    n = _curve_samples(quad, H, spacing)
    top = quad.upper_curve(H, n)
    end = _segment((a, b), (a, 0.0), 400)
    return _quarter_log_polar(
        [(top, NEUMANN), (end, DIRICHLET1)],
        far_length,
        spacing,
        singular_xy=[(a, b)],
        label=f"exterior {quad.label} H={H:g}",
    )


def box_exterior_quarter_boundary(
    alpha: float, beta: float, M: float, H: float, spacing: float = 0.005, far_length: float = 8.0
) -> Boundary:
    """Quarter of the exterior of [-H alpha, H alpha] x [-M, M], vertices at (+-H alpha, +-beta)."""
    if not 0 < beta <= M:
        raise DomainError(f"need 0 < beta <= M, got beta={beta!r}, M={M!r}")
    a = H * alpha
    body = [(_segment((0.0, M), (a, M), 400), NEUMANN)]
    singular = [(a, M)]
    if beta < M:
        body.append((_segment((a, M), (a, beta), 200), NEUMANN))
        singular.append((a, beta))
    body.append((_segment((a, beta), (a, 0.0), 200), DIRICHLET1))
    return _quarter_log_polar(body, far_length, spacing, singular, label=f"box exterior H={H:g} M={M:g}")
