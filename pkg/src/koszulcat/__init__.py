"""Exact chain-level Koszul duality for dg-categories on a finite object window."""

__version__ = "0.1.0"

from .field import QQ, GF, Field, Scalar  # noqa: F401
from .sparse import SparseMatrix  # noqa: F401
