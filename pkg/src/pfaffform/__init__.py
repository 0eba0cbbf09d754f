"""Exact graph polynomials and the Pfaffian and topological forms of graphs."""

from .engine import alpha_form, dipole_phi, phi_form, sign_factor, subdivision_check, verify_main_theorem
from .forms import FormExpression, PolyForm, forms_equal, scale_ratio
from .graph import (
    CycleBasis,
    Graph,
    GraphError,
    fundamental_cycle_basis,
    parse_graph,
    path_matrix,
    spanning_trees,
    subdivide_edge,
)
from .graphpoly import dodgson, laplacian_bundle, symanzik
from .linalg import RingMatrix, determinant, hafnian, pfaffian
from .poly import MultiPoly

__all__ = [
    "CycleBasis",
    "FormExpression",
    "Graph",
    "GraphError",
    "MultiPoly",
    "PolyForm",
    "RingMatrix",
    "alpha_form",
    "determinant",
    "dipole_phi",
    "dodgson",
    "forms_equal",
    "fundamental_cycle_basis",
    "hafnian",
    "laplacian_bundle",
    "parse_graph",
    "path_matrix",
    "pfaffian",
    "phi_form",
    "scale_ratio",
    "sign_factor",
    "spanning_trees",
    "subdivide_edge",
    "subdivision_check",
    "symanzik",
    "verify_main_theorem",
]
