"""
Bessel and Hankel functions of integer order and real argument.

Thin, domain-checked wrappers over :mod:`scipy.special` (Cephes/AMOS), which evaluate with
power series at small argument, asymptotic phase expansions at large argument and stable
recurrences in between; accuracy is well beyond the 10 significant digits the FMM needs.
All functions broadcast over numpy arrays in both order and argument.
"""

import numpy as np
from scipy import special

from fmm_precond.utils.errors import DomainError

MAX_ORDER = 64


def _check_order(n) -> np.ndarray:
    n = np.asarray(n)
    if np.any(np.abs(n) > MAX_ORDER):
        raise DomainError(f'Bessel order beyond supported range |n| <= {MAX_ORDER}')
    return n


def bessel_j(n, x):
    """
    J_n(x) for integer n and real x >= 0; negative integer orders follow J_{-n} = (-1)^n J_n.
    """
    n = _check_order(n)
    x = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(x)):
        raise DomainError('Bessel argument must be finite')
    return special.jv(n, x)


def bessel_y(n, x):
    """
    Y_n(x) for integer n and real x > 0; logarithmically singular at the origin.
    """
    n = _check_order(n)
    x = np.asarray(x, dtype=float)
    if np.any(~(x > 0)) or np.any(~np.isfinite(x)):
        raise DomainError('Y_n(x) requires finite x > 0')
    return special.yv(n, x)


def hankel1(n, x):
    """
    Hankel function of the first kind H^1_n(x) = J_n(x) + i Y_n(x) for x > 0.
    """
    n = _check_order(n)
    x = np.asarray(x, dtype=float)
    if np.any(~(x > 0)) or np.any(~np.isfinite(x)):
        raise DomainError('H^1_n(x) requires finite x > 0')
    return special.hankel1(n, x)
