"""Maximal operators, sparse families, and singular-integral quadrature.

The operators act on cell-averaged grid functions.  Dyadic scans walk the
generations of one shifted grid; the multilinear bracket combines all
shifted grids of a lattice into a certified lower/upper envelope pair.
"""

from .maximal import dyadic_maximal, multilinear_maximal, weighted_dyadic_maximal
from .riesz import RieszValues, adjoint_kernel, bilinear_riesz, direct_kernel
from .sparse import SparseFamily, SparsenessError, build_sparse_family, sparse_operator

__all__ = [
    "RieszValues",
    "SparseFamily",
    "SparsenessError",
    "adjoint_kernel",
    "bilinear_riesz",
    "build_sparse_family",
    "direct_kernel",
    "dyadic_maximal",
    "multilinear_maximal",
    "sparse_operator",
    "weighted_dyadic_maximal",
]
