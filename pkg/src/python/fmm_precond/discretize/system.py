import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.sparse as sp

from fmm_precond.discretize.assembly import ElementType, assemble, restrict
from fmm_precond.discretize.grid import Grid
from fmm_precond.discretize.problems import ProblemSpec
from fmm_precond.utils.errors import DomainError

logger = logging.getLogger(__name__)


@dataclass
class FemSystem:
    """
    Linear system A x = b over the interior nodes, with A = K - κ²M (real symmetric) and
    b = -(M f) minus the Dirichlet lifting.
    """

    problem: ProblemSpec
    grid: Grid
    element: ElementType
    A: sp.csr_matrix
    b: np.ndarray
    coordinates: np.ndarray
    """
    Interior node coordinates, one row per unknown.
    """
    stiffness: sp.csr_matrix
    mass: sp.csr_matrix
    lumped_mass: np.ndarray
    """
    Row sums of the full mass matrix at the interior nodes (h² for Q1).
    """
    interior: np.ndarray
    exact: Optional[np.ndarray] = None
    """
    Exact solution at the interior nodes when the problem has one.
    """

    @property
    def kappa(self) -> float:
        return self.problem.kappa

    @property
    def n(self) -> int:
        return self.A.shape[0]


def build_system(problem: ProblemSpec, grid: Grid, element: ElementType = ElementType.Q1) -> FemSystem:
    """
    Assemble the Helmholtz system: the equation ∇²u + κ²u = f is multiplied by -1 before
    discretization, so that A is positive definite at κ = 0.
    """
    if (grid.lower, grid.upper) != tuple(problem.bounds):
        raise DomainError(f'grid bounds {grid.bounds} do not match problem domain {problem.bounds}')
    fem = assemble(grid, element)
    order = element.order
    nodes = grid.node_coordinates(order)
    kappa2 = problem.kappa ** 2

    A_full = (fem.stiffness - kappa2 * fem.mass).tocsr()
    f = problem.source(nodes[:, 0], nodes[:, 1])
    g = problem.dirichlet(nodes[fem.boundary, 0], nodes[fem.boundary, 1])
    interior, boundary = fem.interior, fem.boundary

    A = restrict(A_full, interior, interior)
    lifting = restrict(A_full, interior, boundary) @ g
    b = -(fem.mass @ f)[interior] - lifting

    coordinates = nodes[interior]
    exact = None
    if problem.exact is not None:
        exact = problem.exact(coordinates[:, 0], coordinates[:, 1])
    lumped = np.asarray(fem.mass.sum(axis=1)).ravel()[interior]
    logger.info('built %s system for %s: %d unknowns, h=%.4g, kappa=%.4g',
                element.name, problem.identifier.name, A.shape[0], grid.h, problem.kappa)
    return FemSystem(problem=problem, grid=grid, element=element, A=A, b=np.asarray(b, dtype=float),
                     coordinates=coordinates, stiffness=restrict(fem.stiffness, interior, interior),
                     mass=restrict(fem.mass, interior, interior), lumped_mass=lumped, interior=interior,
                     exact=exact)
