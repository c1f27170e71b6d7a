"""Spectral distribution of ``S Y_t S Y_t*`` for a symmetry ``S`` and free
unitary Brownian motion ``Y_t``, and the free Jacobi process built from it."""

from .moments import (
    ExpPoly,
    MomentTable,
    OdeMoments,
    RankParam,
    check_pde_coefficients,
    herglotz_series,
    r_moment,
    solve_recursion,
)
from .numeric import Poly, jacobi_P10, laguerre_L1

__version__ = "0.1.0"

__all__ = [
    "ExpPoly",
    "MomentTable",
    "OdeMoments",
    "Poly",
    "RankParam",
    "check_pde_coefficients",
    "herglotz_series",
    "jacobi_P10",
    "laguerre_L1",
    "r_moment",
    "solve_recursion",
]
