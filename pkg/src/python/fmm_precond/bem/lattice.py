"""
Near-field correction of the volume potential on a bilinear (Q1) node lattice.

Sampling G at the nodes and skipping the singular self term is not what the discrete Q1
operator inverts. Its free-space inverse is the lattice Green's function

    g(m) = -(1/2π) ln h + c - a(m),      a(m) = mean over θ ∈ [-π, π]² of (1 - cos m·θ) / σ(θ)

with σ the symbol of the Q1 stiffness stencil and c the constant for which a(m) - (1/2π) ln|m|
vanishes at infinity. For m ≠ 0 the gap g(m) - G(mh) = c - a(m) + (1/2π) ln|m| is independent
of h and decays quickly, so it is applied as a sparse correction on top of the point sum over
offsets with |m|∞ ≤ CORRECTION_RADIUS. At m = 0 the correction is the whole self term, including
the regular part of the Helmholtz kernel at the origin.
"""

import logging
import math
from functools import lru_cache
from typing import Tuple

import numpy as np
import scipy.sparse as sp

from fmm_precond.discretize.grid import Grid
from fmm_precond.special.kernels import Kernel, KernelType
from fmm_precond.utils.errors import DomainError

logger = logging.getLogger(__name__)

CORRECTION_RADIUS = 3
QUADRATURE_POINTS = 512

FIVE_POINT_CONSTANT = (2.0 * np.euler_gamma + 3.0 * math.log(2.0)) / (4.0 * math.pi)
"""
Limit of a(m) - (1/2π) ln|m| for the five-point Laplacian.
"""


def q1_symbol(t1: np.ndarray, t2: np.ndarray) -> np.ndarray:
    """
    Fourier symbol of the Q1 stiffness stencil (8/3 centre, -1/3 at the eight neighbours).
    """
    c1, c2 = np.cos(t1), np.cos(t2)
    return 8.0 / 3.0 - (2.0 / 3.0) * (c1 + c2) - (4.0 / 3.0) * c1 * c2


def five_point_symbol(t1: np.ndarray, t2: np.ndarray) -> np.ndarray:
    return 4.0 - 2.0 * np.cos(t1) - 2.0 * np.cos(t2)


@lru_cache(maxsize=4)
def _angles(n: int) -> Tuple[np.ndarray, np.ndarray]:
    # midpoint rule: an even n never samples θ = 0
    t = -math.pi + (np.arange(n) + 0.5) * (2.0 * math.pi / n)
    return np.meshgrid(t, t, indexing='ij')


@lru_cache(maxsize=None)
def lattice_constant(n: int = QUADRATURE_POINTS) -> float:
    """
    c = lim a(m) - (1/2π) ln|m| for the Q1 stencil: the five-point constant plus the mean of
    1/σ_Q1 - 1/σ_5, whose integrand stays bounded at the origin.
    """
    t1, t2 = _angles(n)
    return FIVE_POINT_CONSTANT + float(np.mean(1.0 / q1_symbol(t1, t2) - 1.0 / five_point_symbol(t1, t2)))


@lru_cache(maxsize=None)
def potential_kernel(m1: int, m2: int, n: int = QUADRATURE_POINTS) -> float:
    """
    a(m) of the Q1 stencil; zero at the origin, (1/2π) ln|m| + c far from it.
    """
    m1, m2 = sorted((abs(m1), abs(m2)))
    if m2 == 0:
        return 0.0
    t1, t2 = _angles(n)
    return float(np.mean((1.0 - np.cos(m1 * t1 + m2 * t2)) / q1_symbol(t1, t2)))


def offset_correction(m1: int, m2: int) -> float:
    """
    g(m) - G(mh) for the Laplace kernel, m ≠ 0.
    """
    if m1 == 0 and m2 == 0:
        raise DomainError('the self term has no point value to correct')
    return lattice_constant() - potential_kernel(m1, m2) + math.log(math.hypot(m1, m2)) / (2.0 * math.pi)


def self_value(kernel: Kernel, h: float) -> complex:
    """
    g(0), plus the value at the origin of G_κ - G_0 for the Helmholtz kernel.
    """
    if h <= 0:
        raise DomainError('lattice spacing must be positive')
    value = -math.log(h) / (2.0 * math.pi) + lattice_constant()
    if kernel.kernel_type is KernelType.HELMHOLTZ_2D:
        return complex(value - (math.log(kernel.kappa / 2.0) + np.euler_gamma) / (2.0 * math.pi), 0.25)
    if kernel.kernel_type is KernelType.LAPLACE_2D:
        return complex(value)
    raise DomainError('lattice corrections are defined for 2D kernels only')


def lattice_indices(points, grid: Grid) -> np.ndarray:
    """
    Integer lattice coordinates of points lying on the nodes of ``grid``.
    """
    scaled = (np.asarray(points, dtype=float) - grid.lower) / grid.h
    indices = np.rint(scaled).astype(int)
    if not np.allclose(scaled, indices, atol=1e-8):
        raise DomainError('volume points do not lie on the grid nodes')
    return indices


def volume_correction(points, grid: Grid, kernel: Kernel, radius: int = CORRECTION_RADIUS) -> sp.csr_matrix:
    """
    Sparse C such that (point sum without self terms) + C @ charges is the Q1 lattice potential
    of the charges, up to offsets beyond ``radius``.
    """
    indices = lattice_indices(points, grid)
    size = grid.nodes_per_side() + 2 * radius
    lookup = np.full((size, size), -1, dtype=int)
    lookup[indices[:, 0] + radius, indices[:, 1] + radius] = np.arange(len(indices))

    rows, cols, values = [], [], []
    for m1 in range(-radius, radius + 1):
        for m2 in range(-radius, radius + 1):
            value = self_value(kernel, grid.h) if m1 == m2 == 0 else offset_correction(m1, m2)
            neighbours = lookup[indices[:, 0] + radius + m1, indices[:, 1] + radius + m2]
            found = neighbours >= 0
            rows.append(np.flatnonzero(found))
            cols.append(neighbours[found])
            values.append(np.full(int(found.sum()), value, dtype=complex))
    matrix = sp.csr_matrix((np.concatenate(values), (np.concatenate(rows), np.concatenate(cols))),
                           shape=(len(indices), len(indices)))
    logger.debug('lattice correction: %d points, radius %d, %d entries', len(indices), radius, matrix.nnz)
    return matrix
