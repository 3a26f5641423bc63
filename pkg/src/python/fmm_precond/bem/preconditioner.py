import logging
import threading
from typing import List, Optional

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import LinearOperator

from fmm_precond.bem.lattice import volume_correction
from fmm_precond.bem.mesh import BoundaryMesh, discretize_boundary
from fmm_precond.bem.pipeline import BemOperators, InnerSolverMethod, InnerSolverSettings
from fmm_precond.discretize.assembly import ElementType
from fmm_precond.discretize.system import FemSystem
from fmm_precond.fmm.config import FmmConfig
from fmm_precond.utils.errors import DomainError, InnerSolveError

logger = logging.getLogger(__name__)

VOLUME_SIGN = 1.0


class BemPreconditioner(LinearOperator):
    """
    Approximate inverse of the FEM Helmholtz matrix through the continuous problem: a residual r
    over the interior nodes becomes a volume density f = r/weight (the lumped mass), the boundary
    flux is solved for zero Dirichlet data and the field is evaluated back at the nodes.
    The map r ↦ z is linear; with the LU inner solver it is exactly so.

    Applies may run concurrently; the apply counter and the warning list are shared.
    """

    def __init__(self, mesh: BoundaryMesh, volume_points, volume_weights, config: FmmConfig,
                 settings: InnerSolverSettings = None, correction: Optional[sp.spmatrix] = None):
        self.mesh = mesh
        self.config = config
        self.settings = settings or InnerSolverSettings(method=InnerSolverMethod.LU)
        self.volume_weights = np.asarray(volume_weights, dtype=float)
        self.operators = BemOperators(mesh, config, volume_points, self.volume_weights,
                                      volume_correction=correction)
        self.applies = 0
        self.warnings: List[str] = []
        self._lock = threading.Lock()
        n = len(self.volume_weights)
        super().__init__(dtype=np.complex128, shape=(n, n))

    @classmethod
    def for_system(cls, system: FemSystem, config: FmmConfig, settings: InnerSolverSettings = None,
                   n_per_side: Optional[int] = None) -> 'BemPreconditioner':
        """
        Preconditioner for an assembled FEM system: volume sources at the interior nodes weighted by
        their lumped mass, and one boundary element per grid cell edge unless told otherwise. On a
        Q1 lattice the volume potential near each node is that of the discrete stencil.
        """
        if config.kernel.kappa != system.kappa:
            raise DomainError(f'kernel wavenumber {config.kernel.kappa} does not match the system ({system.kappa})')
        mesh = discretize_boundary(system.grid.bounds, n_per_side or system.grid.n)
        correction = None
        if system.element is ElementType.Q1:
            correction = volume_correction(system.coordinates, system.grid, config.kernel)
        return cls(mesh, system.coordinates, system.lumped_mass, config, settings, correction)

    def _matvec(self, r):
        r = np.asarray(r, dtype=complex).reshape(-1)
        with self._lock:
            self.applies += 1
            apply = self.applies
        if not np.any(r):
            return np.zeros_like(r)
        values = VOLUME_SIGN * r / self.volume_weights
        volume_term = self.operators.volume_to_boundary(values)
        try:
            flux, _ = self.operators.solve_flux(-volume_term, self.settings)
        except InnerSolveError as e:
            message = f'preconditioner apply {apply}: {e}; using the partial flux'
            logger.warning(message)
            with self._lock:
                self.warnings.append(message)
            flux = e.flux
        return self.operators.interior(flux, values=values)
