"""Numerical conformal moduli from discrete Dirichlet energies."""

from .estimate import (
    ModulusEstimate,
    compute_c,
    ladder,
    modulus_exterior,
    modulus_g1h,
    modulus_interior,
    richardson_extrapolate,
)
from .geometry import (
    CATALOG,
    DIRICHLET0,
    DIRICHLET1,
    NEUMANN,
    Arc,
    Boundary,
    InvertedBoundary,
    QuadOrientation,
    SymmetricQuad,
    box_exterior_quarter_boundary,
    exterior_quarter_boundary,
    interior_boundary,
    interior_quarter_boundary,
    invert_exterior,
    make_quad,
)
from .solver import CellCode, GridField, Mesh, build_mesh, graded_axis, solve_field, solve_modulus

__all__ = [
    "ModulusEstimate",
    "compute_c",
    "ladder",
    "modulus_exterior",
    "modulus_g1h",
    "modulus_interior",
    "richardson_extrapolate",
    "CATALOG",
    "DIRICHLET0",
    "DIRICHLET1",
    "NEUMANN",
    "Arc",
    "Boundary",
    "InvertedBoundary",
    "QuadOrientation",
    "SymmetricQuad",
    "box_exterior_quarter_boundary",
    "exterior_quarter_boundary",
    "interior_boundary",
    "interior_quarter_boundary",
    "invert_exterior",
    "make_quad",
    "CellCode",
    "GridField",
    "Mesh",
    "build_mesh",
    "graded_axis",
    "solve_field",
    "solve_modulus",
]
