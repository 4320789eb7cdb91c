"""Exact verification toolkit for the Yangian of the queer Lie superalgebra.

Everything is computed over the Gaussian rationals; every asserted identity
is certified with zero tolerance, either by canonical polynomial arithmetic
or by evaluation on degree-bounded integer grids.
"""

__version__ = "0.1.0"

from .exact_scalar import GaussRat, Poly, RatFun, TruncSeries, identity_certify, series_invert
from .super_linear import SuperOp, koszul_mul, koszul_tensor, embed, constants

__all__ = [
    "GaussRat",
    "Poly",
    "RatFun",
    "TruncSeries",
    "identity_certify",
    "series_invert",
    "SuperOp",
    "koszul_mul",
    "koszul_tensor",
    "embed",
    "constants",
    "__version__",
]
