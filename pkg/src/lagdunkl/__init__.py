"""Numerics for Laguerre, Dunkl-Hermite and symmetrized expansions.

Submodules
----------
specfun
    Gamma, Bessel and Laguerre functions, Gauss-Jacobi quadrature.
bases
    Orthonormal bases, ladder operators, eta-symmetric decomposition.
kernels
    Heat kernels in closed, integral and series form plus derivative and
    composite operator kernels.
operators
    Spectral application of semigroups, Riesz transforms, multipliers and
    square functions.
verify
    Named invariant checks producing :class:`~lagdunkl.verify.CheckReport`.
cli
    The ``lagdunkl`` command.
"""

from .specfun import ConvergenceError, DomainError

__version__ = "0.1.0"

__all__ = ["ConvergenceError", "DomainError", "__version__"]
