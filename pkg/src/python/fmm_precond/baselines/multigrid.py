"""
Geometric multigrid V-cycle for Q1 systems on uniform grids: re-discretized coarse operators,
bilinear prolongation, restriction by its transpose, damped Jacobi smoothing and a dense LU
solve on the coarsest grid.

As a preconditioner the hierarchy is built for the diffusion operator (κ = 0) on every level,
fine grid included, the way a Poisson multigrid is applied unchanged to a Helmholtz matrix. It
stays effective while few eigenvalues of K⁻¹A sit near or below zero and breaks down as κ grows.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
import scipy.sparse as sp
from scipy.linalg import lu_factor, lu_solve
from scipy.sparse.linalg import LinearOperator

from fmm_precond.discretize.assembly import ElementType, assemble, restrict
from fmm_precond.discretize.grid import Grid
from fmm_precond.discretize.system import FemSystem
from fmm_precond.utils.errors import ConfigurationError

logger = logging.getLogger(__name__)

MAX_COARSE_UNKNOWNS = 81
JACOBI_WEIGHT = 2.0 / 3.0
DIFFUSION = 0.0


def prolongation_1d(n_fine: int) -> sp.csr_matrix:
    """
    Linear interpolation from the n_fine/2 - 1 interior coarse nodes to the n_fine - 1 interior
    fine nodes of a 1D grid.
    """
    n_coarse = n_fine // 2
    rows, cols, vals = [], [], []
    for j in range(n_coarse - 1):
        fine = 2 * j + 1
        rows += [fine - 1, fine, fine + 1]
        cols += [j, j, j]
        vals += [0.5, 1.0, 0.5]
    return sp.csr_matrix((vals, (rows, cols)), shape=(n_fine - 1, n_coarse - 1))


def prolongation(n_fine: int) -> sp.csr_matrix:
    p1 = prolongation_1d(n_fine)
    return sp.kron(p1, p1, format='csr')


def helmholtz_matrix(grid: Grid, kappa: float) -> sp.csr_matrix:
    fem = assemble(grid, ElementType.Q1)
    return restrict((fem.stiffness - kappa ** 2 * fem.mass).tocsr(), fem.interior, fem.interior)


@dataclass
class MgLevel:
    grid: Grid
    A: sp.csr_matrix
    inverse_diagonal: np.ndarray
    P: sp.csr_matrix = None
    """
    Prolongation from the next coarser level; None on the coarsest.
    """


@dataclass
class MgHierarchy:
    levels: List[MgLevel]
    """
    Finest first.
    """
    coarse_lu: tuple = None
    pre_smooth: int = 2
    post_smooth: int = 2
    weight: float = JACOBI_WEIGHT
    metadata: dict = field(default_factory=dict)

    @property
    def depth(self) -> int:
        return len(self.levels)


def build_hierarchy(grid: Grid, kappa: float, A_fine=None, pre_smooth: int = 2, post_smooth: int = 2,
                    weight: float = JACOBI_WEIGHT) -> MgHierarchy:
    """
    Coarsen by halving n while the grid has more than 81 interior unknowns and an even n.
    """
    levels = []
    current = grid
    A = sp.csr_matrix(A_fine) if A_fine is not None else helmholtz_matrix(grid, kappa)
    while True:
        levels.append(MgLevel(current, A, 1.0 / A.diagonal()))
        if (current.n - 1) ** 2 <= MAX_COARSE_UNKNOWNS or current.n % 2:
            break
        coarse = current.coarsened()
        levels[-1].P = prolongation(current.n)
        current = coarse
        A = helmholtz_matrix(current, kappa)
    coarse_lu = lu_factor(levels[-1].A.toarray())
    logger.debug('multigrid hierarchy: n = %s', [lvl.grid.n for lvl in levels])
    return MgHierarchy(levels, coarse_lu, pre_smooth, post_smooth, weight,
                       metadata={'smoother': f'damped Jacobi (omega={weight:.4g})',
                                 'cycle': f'V({pre_smooth},{post_smooth})',
                                 'coarse_operator': 're-discretized Q1',
                                 'hierarchy_kappa': f'{kappa:g}'})


def _smooth(level: MgLevel, x: np.ndarray, b: np.ndarray, sweeps: int, weight: float) -> np.ndarray:
    for _ in range(sweeps):
        x = x + weight * level.inverse_diagonal * (b - level.A @ x)
    return x


def _vcycle(hierarchy: MgHierarchy, depth: int, b: np.ndarray) -> np.ndarray:
    level = hierarchy.levels[depth]
    if depth == hierarchy.depth - 1:
        return lu_solve(hierarchy.coarse_lu, b)
    x = _smooth(level, np.zeros_like(b), b, hierarchy.pre_smooth, hierarchy.weight)
    residual = b - level.A @ x
    x = x + level.P @ _vcycle(hierarchy, depth + 1, level.P.T @ residual)
    return _smooth(level, x, b, hierarchy.post_smooth, hierarchy.weight)


def mg_vcycle(hierarchy: MgHierarchy, r) -> np.ndarray:
    """
    One V-cycle from a zero initial guess; linear in r.
    """
    return _vcycle(hierarchy, 0, np.asarray(r, dtype=complex).reshape(-1))


class GmgPreconditioner(LinearOperator):
    def __init__(self, hierarchy: MgHierarchy):
        self.hierarchy = hierarchy
        n = hierarchy.levels[0].A.shape[0]
        super().__init__(dtype=np.complex128, shape=(n, n))

    @classmethod
    def for_system(cls, system: FemSystem, kappa: Optional[float] = DIFFUSION) -> 'GmgPreconditioner':
        """
        V-cycle preconditioner for a Q1 system. The hierarchy is built for wavenumber ``kappa``;
        None uses the system's own matrix on the finest level and its κ below.
        """
        if system.element is not ElementType.Q1:
            raise ConfigurationError('geometric multigrid is available for Q1 systems only')
        if kappa is None:
            return cls(build_hierarchy(system.grid, system.kappa, system.A))
        return cls(build_hierarchy(system.grid, kappa))

    def _matvec(self, r):
        return mg_vcycle(self.hierarchy, r)
