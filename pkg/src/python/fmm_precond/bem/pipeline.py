"""
Boundary-integral solution of -(∇² + κ²)u = f in a square with Dirichlet data u_Γ.

With G the outgoing fundamental solution and ∂G/∂n taken at the boundary point, the
representation formula and its boundary limit read

    u(P) = ∫ G q dΓ - ∫ ∂G/∂n u_Γ dΓ + ∫ f G dΩ                   (P inside)
    ∫ G q dΓ = (½I + D) u_Γ - ∫ f G dΩ                             (P on Γ)

where q = ∂u/∂n and D is the principal-value double layer. Constant elements are collocated at
their midpoints; boundary integrals use Gauss points as FMM sources, with each element's own
contribution at its midpoint replaced by the analytic diagonal.
"""

import logging
import threading
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

import numpy as np
import scipy.sparse as sp
from scipy.linalg import lu_factor, lu_solve
from scipy.sparse.linalg import LinearOperator

from fmm_precond.bem.mesh import BoundaryMesh
from fmm_precond.bem.operators import diagonal_value, own_element_quadrature
from fmm_precond.bem.quadrature import Layer, QuadratureRule, element_quadrature, gauss_legendre
from fmm_precond.fmm.config import FmmConfig
from fmm_precond.fmm.evaluate import FmmPlan
from fmm_precond.krylov.gmres import gmres
from fmm_precond.krylov.report import SolveReport
from fmm_precond.special.kernels import cell_mean_kernel
from fmm_precond.utils.errors import DomainError, InnerSolveError
from fmm_precond.utils.serialization import CamelModel

logger = logging.getLogger(__name__)


@dataclass
class VolumeSources:
    """
    Point sources standing in for the volume integral ∫ f G dΩ: densities ``values`` at
    ``points``, each representing a cell of area ``weights``.
    """

    points: np.ndarray
    weights: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float)
        self.weights = np.asarray(self.weights, dtype=float)
        self.values = np.asarray(self.values, dtype=complex)
        if self.points.ndim != 2 or self.points.shape[1] != 2:
            raise DomainError('volume points must be an (N, 2) array')
        if self.weights.shape != (len(self.points),) or self.values.shape != (len(self.points),):
            raise DomainError('one weight and one value per volume point')
        if np.any(self.weights <= 0):
            raise DomainError('volume weights must be positive')

    @property
    def charges(self) -> np.ndarray:
        return self.weights * self.values


class InnerSolverMethod(Enum):
    """
    How the boundary flux system G q = rhs is solved.
    """

    GMRES = 'GMRES'
    """
    Unpreconditioned restarted GMRES with FMM matvecs.
    """

    LU = 'LU'
    """
    Dense LU of the single-layer operator, materialized once column by column through the FMM.
    """


class InnerSolverSettings(CamelModel):
    method: InnerSolverMethod = InnerSolverMethod.GMRES

    restart: int = 30

    tol: Optional[float]
    """
    Relative tolerance of the GMRES inner solve; max(ε, 1e-6) when not given, ε being the FMM precision.
    """

    max_iterations: int = 200

    def tolerance_for(self, config: FmmConfig) -> float:
        return self.tol if self.tol is not None else max(config.effective_epsilon, 1e-6)


class BemOperators:
    """
    FMM-backed boundary and volume operators over a fixed boundary mesh, volume point set and
    evaluation target set. Targets default to the volume points, in which case each target's own
    cell is integrated analytically, or through ``volume_correction`` (a sparse matrix over the
    volume points, see :mod:`fmm_precond.bem.lattice`) when one is given. FMM plans and the LU
    factors are built on first use.
    """

    def __init__(self, mesh: BoundaryMesh, config: FmmConfig, volume_points=None, volume_weights=None,
                 targets=None, rule: QuadratureRule = None, volume_correction: Optional[sp.spmatrix] = None):
        self.mesh = mesh
        self.config = config
        self.kernel = config.kernel
        self.rule = rule or gauss_legendre()
        self.quad_points, self.quad_weights, self.owner = element_quadrature(mesh, self.rule)
        self.volume_points = None if volume_points is None else np.asarray(volume_points, dtype=float)
        self.volume_weights = None if volume_weights is None else np.asarray(volume_weights, dtype=float)
        if targets is None:
            self.targets = self.volume_points
            self.self_cells = self.volume_points is not None
        else:
            self.targets = np.asarray(targets, dtype=float)
            self.self_cells = (self.volume_points is not None and self.targets.shape == self.volume_points.shape
                               and np.array_equal(self.targets, self.volume_points))
        if volume_correction is not None and (not self.self_cells
                                              or volume_correction.shape != (len(self.targets),) * 2):
            raise DomainError('a volume correction needs the volume points as targets')
        self.volume_correction = volume_correction
        self._corrections = {
            layer: np.array([diagonal_value(self.kernel, layer, w) for w in mesh.widths])
            - own_element_quadrature(mesh, self.kernel, layer, self.rule)
            for layer in Layer
        }
        self._plans = {}
        self._lu = None
        self._lock = threading.RLock()

    def _plan(self, name: str) -> FmmPlan:
        with self._lock:
            return self._plans[name] if name in self._plans else self._build_plan(name)

    def _build_plan(self, name: str) -> FmmPlan:
        normals = self.mesh.normals[self.owner] if name.startswith('double') else None
        sources = self.volume_points if name.startswith('volume') else self.quad_points
        targets = self.mesh.midpoints if name.endswith('boundary') else self.targets
        if sources is None or targets is None:
            raise DomainError(f'{name} needs volume points or targets')
        self._plans[name] = FmmPlan(sources, targets, self.config, normals=normals)
        return self._plans[name]

    def _layer_charges(self, density) -> np.ndarray:
        density = np.asarray(density, dtype=complex)
        if density.shape != (len(self.mesh),):
            raise DomainError('one boundary value per element expected')
        return density[self.owner] * self.quad_weights

    # --- operators at the collocation midpoints ---

    def single_layer(self, q) -> np.ndarray:
        return self._plan('single_boundary').apply(self._layer_charges(q)) + self._corrections[Layer.SINGLE] * q

    def double_layer(self, u) -> np.ndarray:
        return self._plan('double_boundary').apply(self._layer_charges(u)) + self._corrections[Layer.DOUBLE] * u

    def volume_to_boundary(self, values) -> np.ndarray:
        return self._plan('volume_boundary').apply(self.volume_weights * np.asarray(values, dtype=complex))

    # --- operators at the targets ---

    def single_layer_at_targets(self, q) -> np.ndarray:
        return self._plan('single_targets').apply(self._layer_charges(q))

    def double_layer_at_targets(self, u) -> np.ndarray:
        return self._plan('double_targets').apply(self._layer_charges(u))

    def volume_at_targets(self, values) -> np.ndarray:
        charges = self.volume_weights * np.asarray(values, dtype=complex)
        out = self._plan('volume_targets').apply(charges)
        if self.volume_correction is not None:
            out = out + self.volume_correction @ charges
        elif self.self_cells:
            out = out + charges * cell_mean_kernel(self.kernel, self.volume_weights)
        return out

    # --- boundary flux ---

    def single_layer_matrix(self) -> np.ndarray:
        """
        The collocation single-layer operator materialized through the FMM, one column per element.
        """
        n = len(self.mesh)
        matrix = np.empty((n, n), dtype=complex)
        unit = np.zeros(n, dtype=complex)
        for j in range(n):
            unit[j] = 1.0
            matrix[:, j] = self.single_layer(unit)
            unit[j] = 0.0
        return matrix

    def solve_flux(self, rhs, settings: InnerSolverSettings) -> Tuple[np.ndarray, Optional[SolveReport]]:
        """
        Solve the single-layer system for the flux. Raises InnerSolveError carrying the partial
        flux when GMRES hits its iteration cap.
        """
        rhs = np.asarray(rhs, dtype=complex)
        if not np.any(rhs):
            return np.zeros(len(self.mesh), dtype=complex), None
        if settings.method is InnerSolverMethod.LU:
            with self._lock:
                if self._lu is None:
                    self._lu = lu_factor(self.single_layer_matrix())
                    logger.debug('factored %d x %d single-layer operator', len(self.mesh), len(self.mesh))
            return lu_solve(self._lu, rhs), None

        n = len(self.mesh)
        operator = LinearOperator(shape=(n, n), dtype=np.complex128, matvec=self.single_layer)
        max_outer = -(-settings.max_iterations // settings.restart)
        report = gmres(operator, rhs, tol=settings.tolerance_for(self.config), restart=settings.restart,
                       max_outer=max_outer, maxiter=settings.max_iterations)
        if not report.converged:
            raise InnerSolveError(f'inner boundary solve stopped at relative residual {report.final_residual:.3e} '
                                  f'after {report.iterations} iterations', flux=report.solution, report=report)
        return report.solution, report

    def boundary_flux(self, dirichlet, volume_term, settings: InnerSolverSettings) -> np.ndarray:
        dirichlet = np.asarray(dirichlet, dtype=complex)
        rhs = -np.asarray(volume_term, dtype=complex)
        if np.any(dirichlet):
            rhs = rhs + 0.5 * dirichlet + self.double_layer(dirichlet)
        return self.solve_flux(rhs, settings)[0]

    def interior(self, flux, dirichlet=None, values=None) -> np.ndarray:
        out = self.single_layer_at_targets(flux)
        if dirichlet is not None and np.any(dirichlet):
            out = out - self.double_layer_at_targets(dirichlet)
        if values is not None and np.any(values):
            out = out + self.volume_at_targets(values)
        return out


def volume_to_boundary(sources: VolumeSources, mesh: BoundaryMesh, config: FmmConfig) -> np.ndarray:
    """
    ∫ f G dΩ at every collocation midpoint, as one N_Ω → N_Γ kernel sum.
    """
    return BemOperators(mesh, config, sources.points, sources.weights).volume_to_boundary(sources.values)


def solve_boundary_flux(mesh: BoundaryMesh, dirichlet, volume_term, config: FmmConfig,
                        settings: InnerSolverSettings = None) -> np.ndarray:
    """
    Flux q = ∂u/∂n solving ∫ G q dΓ = (½I + D) u_Γ - volume_term at the collocation points.
    """
    return BemOperators(mesh, config).boundary_flux(dirichlet, volume_term, settings or InnerSolverSettings())


def evaluate_interior(mesh: BoundaryMesh, flux, dirichlet, sources: Optional[VolumeSources], targets,
                      config: FmmConfig) -> np.ndarray:
    """
    u = ∫ G q dΓ - ∫ ∂G/∂n u_Γ dΓ + ∫ f G dΩ at the targets.
    """
    if sources is None:
        operators = BemOperators(mesh, config, targets=targets)
        return operators.interior(flux, dirichlet)
    operators = BemOperators(mesh, config, sources.points, sources.weights, targets=targets)
    return operators.interior(flux, dirichlet, sources.values)
