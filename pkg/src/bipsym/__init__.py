"""Symmetry groups of regular bipartite multigraphs via their intersection matrices."""

from .errors import BipsymError
from .matrix_core import IntersectionMatrix, RectMatrix, cyclic_shift, extend, validate
from .partitions import SetPartition, canonical_partition, intersection_matrix
from .stabilizer import aut_order, order_KN

__version__ = "0.1.0"

__all__ = [
    "BipsymError", "IntersectionMatrix", "RectMatrix", "SetPartition",
    "aut_order", "canonical_partition", "cyclic_shift", "extend", "intersection_matrix",
    "order_KN", "validate",
]
