"""
Finite element assembly of the stiffness and mass matrices on uniform square grids with
tensor-product Lagrange elements.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Tuple

import numpy as np
import scipy.sparse as sp
from numpy.polynomial.legendre import leggauss

from fmm_precond.discretize.grid import Grid

logger = logging.getLogger(__name__)


class ElementType(Enum):
    """
    Quadrilateral Lagrange elements.
    """

    Q1 = 'Q1'
    """
    Bilinear, 4 nodes.
    """

    Q2 = 'Q2'
    """
    Biquadratic, 9 nodes.
    """

    @property
    def order(self) -> int:
        return 1 if self is ElementType.Q1 else 2


def _lagrange_1d(order: int, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Values and derivatives of the equispaced Lagrange basis on [0, 1] at points x, shape
    (order + 1, len(x)).
    """
    nodes = np.linspace(0.0, 1.0, order + 1)
    values = np.ones((order + 1, len(x)))
    derivatives = np.zeros((order + 1, len(x)))
    for i in range(order + 1):
        others = [nodes[j] for j in range(order + 1) if j != i]
        denominator = np.prod([nodes[i] - xj for xj in others])
        values[i] = np.prod([x - xj for xj in others], axis=0) / denominator
        for skip in range(len(others)):
            derivatives[i] += np.prod([x - xj for k, xj in enumerate(others) if k != skip] or [np.ones_like(x)],
                                      axis=0) / denominator
    return values, derivatives


def element_matrices_1d(order: int, h: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    1D element stiffness and mass of an interval of length h, by (order + 1)-point Gauss
    quadrature, exact for these polynomial integrands.
    """
    xi, w = leggauss(order + 1)
    x = 0.5 * (xi + 1.0)
    w = 0.5 * w
    values, derivatives = _lagrange_1d(order, x)
    stiffness = (derivatives * w) @ derivatives.T / h
    mass = (values * w) @ values.T * h
    return stiffness, mass


def element_matrices(element: ElementType, h: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    2D element stiffness and mass as Kronecker products of the 1D matrices; local node
    (ix, iy) has index iy·(order + 1) + ix.
    """
    k1, m1 = element_matrices_1d(element.order, h)
    return np.kron(k1, m1) + np.kron(m1, k1), np.kron(m1, m1)


def _element_nodes(grid: Grid, order: int) -> np.ndarray:
    """
    Global node numbers of every element, shape (n², (order + 1)²).
    """
    m = grid.nodes_per_side(order)
    e = np.arange(grid.n)
    ex, ey = np.meshgrid(e, e)
    local = np.arange(order + 1)
    ly, lx = np.meshgrid(local, local, indexing='ij')
    gx = ex.ravel()[:, None] * order + lx.ravel()[None, :]
    gy = ey.ravel()[:, None] * order + ly.ravel()[None, :]
    return gy * m + gx


def assemble_global(grid: Grid, element: ElementType) -> Tuple[sp.csr_matrix, sp.csr_matrix]:
    """
    Stiffness K and mass M over all nodes, before any boundary treatment.
    """
    k_e, m_e = element_matrices(element, grid.h)
    nodes = _element_nodes(grid, element.order)
    size = grid.nodes_per_side(element.order) ** 2
    rows = np.repeat(nodes, nodes.shape[1], axis=1).ravel()
    cols = np.tile(nodes, (1, nodes.shape[1])).ravel()
    n_elements = nodes.shape[0]

    def build(local):
        matrix = sp.coo_matrix((np.tile(local.ravel(), n_elements), (rows, cols)), shape=(size, size)).tocsr()
        matrix.sum_duplicates()
        matrix.sort_indices()
        return matrix

    return build(k_e), build(m_e)


@dataclass
class FemMatrices:
    stiffness: sp.csr_matrix
    mass: sp.csr_matrix
    interior: np.ndarray
    """
    Global indices of the interior (unknown) nodes, in lattice order.
    """
    boundary: np.ndarray


def _assemble(grid: Grid, element: ElementType) -> FemMatrices:
    K, M = assemble_global(grid, element)
    boundary_mask = grid.boundary_mask(element.order)
    logger.debug('assembled %s on %d x %d cells: %d nodes', element.name, grid.n, grid.n, K.shape[0])
    return FemMatrices(K, M, np.flatnonzero(~boundary_mask), np.flatnonzero(boundary_mask))


def restrict(matrix: sp.csr_matrix, rows: np.ndarray, cols: np.ndarray) -> sp.csr_matrix:
    out = matrix[rows][:, cols].tocsr()
    out.sort_indices()
    return out


def assemble_q1(grid: Grid, kappa: float):
    """
    Interior-node K and M for bilinear elements plus the interior index map. κ enters only
    through the caller's combination A = K - κ²M and is accepted for symmetry with build_system.
    """
    fem = _assemble(grid, ElementType.Q1)
    return (restrict(fem.stiffness, fem.interior, fem.interior), restrict(fem.mass, fem.interior, fem.interior),
            fem.interior)


def assemble_q2(grid: Grid, kappa: float):
    """
    As :func:`assemble_q1` for 9-node biquadratic elements.
    """
    fem = _assemble(grid, ElementType.Q2)
    return (restrict(fem.stiffness, fem.interior, fem.interior), restrict(fem.mass, fem.interior, fem.interior),
            fem.interior)


def assemble(grid: Grid, element: ElementType) -> FemMatrices:
    return _assemble(grid, element)
