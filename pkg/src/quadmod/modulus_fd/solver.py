"""Masked-grid Laplace solver for the modulus of a quadrilateral.

The grid is a tensor product of two graded axes.  Each cell is cut along one
diagonal into two linear elements, so on uniform patches the stiffness matrix
is the five-point Laplacian and the Dirichlet energy is the sum of the cell
gradient energies.  Cells inside the domain are kept, nodes on the edge of the
kept region are snapped onto the true boundary, and boundary nodes take the
condition of the arc they land on.  Neumann data is the natural condition of
the energy and needs no ghost values.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
import shapely

from ..errors import ConvergenceError, DomainError, UnderResolvedError
from .geometry import DIRICHLET0, DIRICHLET1, NEUMANN, Boundary, QuadOrientation

__all__ = ["CellCode", "GridField", "graded_axis", "build_mesh", "Mesh", "solve_field", "solve_modulus"]

log = logging.getLogger(__name__)

MIN_CELLS = 4
WARN_CELLS = 8


class CellCode(enum.IntEnum):
    OUTSIDE = 0
    INTERIOR = 1
    DIRICHLET0 = 2
    DIRICHLET1 = 3
    NEUMANN = 4


_ROLE_CODE = {DIRICHLET0: CellCode.DIRICHLET0, DIRICHLET1: CellCode.DIRICHLET1, NEUMANN: CellCode.NEUMANN}


def graded_axis(
    lo: float,
    hi: float,
    h: float,
    level: int = 0,
    knots=(),
    singular=(),
    radius: float = 0.5,
    grading: float = 3.0,
    far_start: float | None = None,
    growth: float = 1.0,
    max_stretch: float = 12.0,
) -> np.ndarray:
    """Nodes on [lo, hi] with spacing about ``h / 2**level`` away from special points.

    Within ``radius`` of a singular coordinate the local spacing shrinks like
    ``dist**(1 - 1/grading)``; beyond ``far_start`` it grows linearly up to
    ``max_stretch * h``.  Every knot is a node, and the node count between
    consecutive knots is the level-0 count times ``2**level``, so successive
    levels are nested.
    """
    if not hi > lo:
        raise DomainError("empty axis")
    span = hi - lo
    tol = 1e-12 * max(span, abs(lo), abs(hi))
    breaks = [lo, hi] + [float(k) for k in list(knots) + list(singular) if lo + tol < k < hi - tol]
    breaks = np.unique(np.asarray(breaks))
    keep = np.concatenate([[True], np.diff(breaks) > tol])
    breaks = breaks[keep]
    breaks[-1] = hi
    sing = np.asarray([c for c in singular if lo - tol <= c <= hi + tol], dtype=float)
    expo = 1.0 - 1.0 / grading

    def density(x):
        g = np.ones_like(x)
        for c in sing:
            g = np.minimum(g, np.maximum((np.abs(x - c) / radius) ** expo, 1e-12))
        if far_start is not None:
            g = g * np.clip(1.0 + (x - far_start) / growth, 1.0, max_stretch)
        return g

    s = 0.5 - 0.5 * np.cos(np.linspace(0.0, math.pi, 4001))
    nodes = [np.array([breaks[0]])]
    for p, q in zip(breaks[:-1], breaks[1:]):
        x = p + (q - p) * s
        mid = 0.5 * (x[1:] + x[:-1])
        cum = np.concatenate([[0.0], np.cumsum(np.diff(x) / density(mid))])
        n0 = max(1, int(math.ceil(cum[-1] / h - 1e-9)))
        n = n0 * 2**level
        target = np.linspace(0.0, cum[-1], n + 1)[1:]
        piece = np.interp(target, cum, x)
        piece[-1] = q
        nodes.append(piece)
    return np.concatenate(nodes)


@dataclass
class Mesh:
    xs: np.ndarray
    ys: np.ndarray
    points: np.ndarray  # (nx*ny, 2) after snapping
    triangles: np.ndarray  # (T, 3)
    code: np.ndarray  # (nx*ny,) CellCode values
    arc_counts: list[int]
    arc_roles: list[str]
    warnings: list[str] = field(default_factory=list)

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.xs), len(self.ys)


def _arc_ends(boundary: Boundary) -> np.ndarray:
    lengths = []
    for arc in boundary.arcs:
        d = np.diff(arc.points, axis=0)
        lengths.append(np.hypot(d[:, 0], d[:, 1]).sum())
    return np.cumsum(lengths)


def _triangle_areas(pts: np.ndarray, tri: np.ndarray) -> np.ndarray:
    a, b, c = pts[tri[:, 0]], pts[tri[:, 1]], pts[tri[:, 2]]
    return 0.5 * ((b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1]) - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0]))


def build_mesh(
    boundary: Boundary,
    orient: QuadOrientation,
    h: float,
    level: int = 0,
    radius: float = 0.5,
    grading: float = 3.0,
) -> Mesh:
    ring = boundary.ring()
    poly = shapely.Polygon(ring)
    if not poly.is_valid:
        raise DomainError(f"boundary of {boundary.label!r} is not a simple closed curve")
    x0, x1, y0, y1 = boundary.bbox()
    scale = max(x1 - x0, y1 - y0, abs(x0), abs(x1), abs(y0), abs(y1))
    sx = [p[0] for p in boundary.singular]
    sy = [p[1] for p in boundary.singular]
    xs = graded_axis(x0, x1, h, level, boundary.knots_x, sx, radius, grading, far_start=boundary.far_x)
    ys = graded_axis(y0, y1, h, level, boundary.knots_y, sy, radius, grading)
    nx, ny = len(xs), len(ys)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    pts = np.column_stack([X.ravel(), Y.ravel()])

    test = poly.buffer(1e-10 * scale, join_style="mitre")
    shapely.prepare(test)
    inside = shapely.contains_xy(test, pts[:, 0], pts[:, 1])

    idx = np.arange(nx * ny).reshape(nx, ny)
    n00, n10, n11, n01 = idx[:-1, :-1].ravel(), idx[1:, :-1].ravel(), idx[1:, 1:].ravel(), idx[:-1, 1:].ravel()
    tri = np.concatenate([np.column_stack([n00, n10, n11]), np.column_stack([n00, n11, n01])])
    ok = inside[tri].all(axis=1)
    tri = tri[ok]
    cen = pts[tri].mean(axis=1)
    tri = tri[shapely.contains_xy(test, cen[:, 0], cen[:, 1])]
    if len(tri) == 0:
        raise UnderResolvedError(f"no grid cell lies inside {boundary.label!r}")

    edges = np.sort(np.concatenate([tri[:, [0, 1]], tri[:, [1, 2]], tri[:, [2, 0]]]), axis=1)
    uniq, counts = np.unique(edges, axis=0, return_counts=True)
    bnodes = np.unique(uniq[counts == 1])

    line = shapely.LineString(ring)
    s = shapely.line_locate_point(line, shapely.points(pts[bnodes]))
    proj = shapely.get_coordinates(shapely.line_interpolate_point(line, s))
    ends = _arc_ends(boundary)
    arc_idx = np.minimum(np.searchsorted(ends, s, side="left"), len(ends) - 1)

    roles = [orient.resolve(a.role) for a in boundary.arcs]
    new = pts.copy()
    moved = np.zeros(len(pts), dtype=bool)
    node_role = {}
    vertex_nodes = set()
    vtol = 1e-9 * scale
    verts = boundary.vertices()
    vpts = np.array([v[0] for v in verts])
    for i, (vp, before, after) in enumerate(verts):
        d = np.hypot(*(pts[bnodes] - vp).T)
        j = int(np.argmin(d))
        node = int(bnodes[j])
        rb, ra = roles[i], roles[(i + 1) % len(roles)]
        dirichlet = [r for r in (rb, ra) if r != NEUMANN]
        if len(set(dirichlet)) > 1:
            raise DomainError("two different Dirichlet arcs meet at a vertex")
        node_role[node] = dirichlet[0] if dirichlet else rb
        new[node] = vp
        moved[node] = d[j] > 0
        vertex_nodes.add(node)

    local = np.empty(len(bnodes))
    ix, iy = np.divmod(bnodes, ny)
    dx = np.maximum(np.diff(xs)[np.minimum(ix, nx - 2)], np.diff(xs)[np.maximum(ix - 1, 0)])
    dy = np.maximum(np.diff(ys)[np.minimum(iy, ny - 2)], np.diff(ys)[np.maximum(iy - 1, 0)])
    local[:] = np.hypot(dx, dy)
    for j, node in enumerate(bnodes):
        node = int(node)
        if node in vertex_nodes:
            continue
        node_role[node] = roles[arc_idx[j]]
        q = proj[j]
        dist = math.hypot(*(q - pts[node]))
        if dist == 0.0 or dist > 2.0 * local[j]:
            continue
        if np.min(np.hypot(*(vpts - q).T)) < vtol:
            continue
        new[node] = q
        moved[node] = True

    area0 = _triangle_areas(pts, tri)
    for _ in range(20):
        area = _triangle_areas(new, tri)
        bad = area < 0.2 * area0
        if not bad.any():
            break
        culprits = np.unique(tri[bad])
        culprits = culprits[moved[culprits]]
        culprits = np.array([c for c in culprits if int(c) not in vertex_nodes], dtype=int)
        if len(culprits) == 0:
            break
        new[culprits] = pts[culprits]
        moved[culprits] = False
    area = _triangle_areas(new, tri)
    if np.any(area <= 0):
        raise UnderResolvedError(f"snapping produced inverted cells for {boundary.label!r}")

    code = np.full(nx * ny, CellCode.OUTSIDE, dtype=np.int8)
    code[np.unique(tri)] = CellCode.INTERIOR
    arc_counts = [0] * len(roles)
    for j in range(len(bnodes)):
        arc_counts[arc_idx[j]] += 1
    for node, role in node_role.items():
        code[node] = _ROLE_CODE[role]

    mesh = Mesh(xs=xs, ys=ys, points=new, triangles=tri, code=code, arc_counts=arc_counts, arc_roles=roles)
    for i, (cnt, role) in enumerate(zip(arc_counts, roles)):
        if cnt < MIN_CELLS:
            raise UnderResolvedError(
                f"arc {i} ({role}) of {boundary.label!r} spans {cnt} boundary nodes, need >= {MIN_CELLS}"
            )
        if cnt < WARN_CELLS:
            mesh.warnings.append(f"arc {i} ({role}) spans only {cnt} boundary nodes")
    return mesh


def _stiffness(pts: np.ndarray, tri: np.ndarray) -> sp.csr_matrix:
    p0, p1, p2 = pts[tri[:, 0]], pts[tri[:, 1]], pts[tri[:, 2]]
    b = np.column_stack([p1[:, 1] - p2[:, 1], p2[:, 1] - p0[:, 1], p0[:, 1] - p1[:, 1]])
    c = np.column_stack([p2[:, 0] - p1[:, 0], p0[:, 0] - p2[:, 0], p1[:, 0] - p0[:, 0]])
    area = 0.5 * (b[:, 0] * c[:, 1] - b[:, 1] * c[:, 0])
    local = (b[:, :, None] * b[:, None, :] + c[:, :, None] * c[:, None, :]) / (4.0 * area[:, None, None])
    rows = np.repeat(tri, 3, axis=1).ravel()
    cols = np.tile(tri, (1, 3)).ravel()
    n = len(pts)
    return sp.csr_matrix((local.ravel(), (rows, cols)), shape=(n, n))


@dataclass
class GridField:
    """Solved potential on the masked grid.

    ``cell_code`` and ``values`` have the grid shape (nx, ny); values outside
    the domain are NaN.
    """

    h: float
    nx: int
    ny: int
    xs: np.ndarray
    ys: np.ndarray
    cell_code: np.ndarray
    values: np.ndarray
    energy: float
    residual: float
    warnings: list[str] = field(default_factory=list)

    def dump_pgm(self, path) -> None:
        """Write the field as a plain-text (P2) greymap, outside cells black."""
        v = np.nan_to_num(self.values.T[::-1], nan=-1.0 / 254)
        grey = np.clip(np.rint(1 + 254 * v), 0, 255).astype(int)
        with open(path, "w") as fh:
            fh.write(f"P2\n{self.nx} {self.ny}\n255\n")
            for row in grey:
                fh.write(" ".join(map(str, row)) + "\n")


def solve_field(mesh: Mesh, h: float, solver: str = "direct", rtol: float = 1e-10, maxiter: int = 1_000_000) -> GridField:
    A = _stiffness(mesh.points, mesh.triangles)
    n = len(mesh.points)
    code = mesh.code
    fixed = (code == CellCode.DIRICHLET0) | (code == CellCode.DIRICHLET1)
    if not (code == CellCode.DIRICHLET0).any() or not (code == CellCode.DIRICHLET1).any():
        raise UnderResolvedError("both Dirichlet arcs need at least one grid node")
    active = code != CellCode.OUTSIDE
    free = active & ~fixed
    u = np.zeros(n)
    u[code == CellCode.DIRICHLET1] = 1.0
    fi = np.flatnonzero(free)
    A_ff = A[fi][:, fi].tocsc()
    rhs = -(A[fi] @ u)
    r0 = np.linalg.norm(rhs)
    if solver == "direct":
        x = spla.spsolve(A_ff, rhs)
    elif solver == "cg":
        diag = A_ff.diagonal()
        M = sp.diags(1.0 / diag)
        x, info = spla.cg(A_ff, rhs, rtol=rtol, maxiter=maxiter, M=M)
        if info != 0:
            raise ConvergenceError(f"CG did not reach rtol={rtol} within {maxiter} iterations")
    else:
        raise DomainError(f"unknown solver {solver!r}")
    u[fi] = x
    res = np.linalg.norm(A_ff @ x - rhs) / r0 if r0 > 0 else 0.0
    if res > rtol:
        raise ConvergenceError(f"linear solve residual {res:.3e} above {rtol:.1e}")
    energy = float(u @ (A @ u))
    vals = np.where(active, u, np.nan).reshape(mesh.shape)
    return GridField(
        h=h,
        nx=mesh.shape[0],
        ny=mesh.shape[1],
        xs=mesh.xs,
        ys=mesh.ys,
        cell_code=code.reshape(mesh.shape),
        values=vals,
        energy=energy,
        residual=float(res),
        warnings=list(mesh.warnings),
    )


def solve_modulus(
    boundary: Boundary,
    orient: QuadOrientation,
    h: float,
    level: int = 0,
    solver: str = "direct",
    **mesh_kw,
) -> tuple[float, GridField]:
    """Modulus 1/D[u_h] of the discrete harmonic measure for the given Dirichlet pair."""
    mesh = build_mesh(boundary, orient, h, level, **mesh_kw)
    fld = solve_field(mesh, h / 2**level, solver=solver)
    if not fld.energy > 0:
        raise ConvergenceError("Dirichlet energy is not positive")
    return 1.0 / fld.energy, fld
