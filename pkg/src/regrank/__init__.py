"""Exact binary and Boolean rank of 0,1 matrices, gadget composition, and the
regular-matrix to regular-graph construction, with checkable certificates."""

from .matrix import BoolMatrix, Rectangle, complement, is_regular, parse_matrix, random_regular, real_rank
from .rank import RectangleSet, binary_rank, boolean_rank, cc_measures
from .graph import Biclique, BicliqueCovering, Graph, bp_exact, chromatic_number
from .transform import transform as run_transform, verify_output

__version__ = "0.1.0"

__all__ = [
    "BoolMatrix", "Rectangle", "complement", "is_regular", "parse_matrix", "random_regular", "real_rank",
    "RectangleSet", "binary_rank", "boolean_rank", "cc_measures",
    "Biclique", "BicliqueCovering", "Graph", "bp_exact", "chromatic_number",
    "run_transform", "verify_output",
]
