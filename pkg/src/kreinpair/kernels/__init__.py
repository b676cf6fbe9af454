"""Kernel dispatch between the numba and numpy implementations.

The choice is made once at import time from the environment; ``backend``
reports which one is active. Both modules stay importable for comparison.
"""

from .._accel import use_numba
from . import _numpy

if use_numba():
    from . import _numba as _impl

    backend = "numba"
else:
    _impl = _numpy
    backend = "numpy"

hermitian_tridiagonal = _impl.hermitian_tridiagonal
tridiagonal_ql = _impl.tridiagonal_ql
hessenberg = _impl.hessenberg
hessenberg_qr_eigvals = _impl.hessenberg_qr_eigvals
lu_factor = _impl.lu_factor
lu_solve = _impl.lu_solve
hessenberg_resolvent_sum = _impl.hessenberg_resolvent_sum

__all__ = [
    "backend",
    "hermitian_tridiagonal",
    "tridiagonal_ql",
    "hessenberg",
    "hessenberg_qr_eigvals",
    "lu_factor",
    "lu_solve",
    "hessenberg_resolvent_sum",
]
